#pragma once

#include <fstream>
#include <map>
#include <sstream>

#include "enz/geometry/source.hpp"
#include "enz/physics/config.hpp"

namespace enz::cli {

struct WindowSpec {
  std::optional<geometry::Circle> disk;  // empty: every non-PML triangle
};

struct RunOptions {
  int order = 2;
  int rho_iterations = 30;
  std::vector<Complex> deltas;
  WindowSpec window;
  std::vector<double> gammas;
  int resonance_order = 0;  // 0: radial mode, 1: first angular pair
  std::vector<double> h_list;
  int profile_points = 201;
};

struct RunConfig {
  geometry::DomainSpec domain;
  double h = 0.0;
  std::optional<std::string> mesh_file;
  physics::PhysicsConfig physics;
  RunOptions run;
  std::vector<std::pair<std::string, std::string>> echo;  // section.key, raw value
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline double number(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

inline std::vector<double> numbers(const std::string& s, char sep = ',') {
  std::vector<double> out;
  for (const auto& p : split(s, sep)) out.push_back(number(p));
  return out;
}

// "re,im" or "re".
inline Complex complex_value(const std::string& s) {
  auto v = numbers(s);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw std::invalid_argument("expected re,im");
}

// "circle cx,cy,r" or "polygon x,y; x,y; ...".
inline geometry::Shape shape_value(const std::string& s) {
  std::istringstream is(s);
  std::string kind;
  is >> kind;
  std::string rest;
  std::getline(is, rest);
  rest = trim(rest);
  if (kind == "circle") {
    auto v = numbers(rest);
    if (v.size() != 3) throw std::invalid_argument("circle needs cx,cy,r");
    return geometry::Circle{{v[0], v[1]}, v[2]};
  }
  if (kind == "polygon") {
    geometry::Polygon p;
    for (const auto& pt : split(rest, ';')) {
      auto v = numbers(pt);
      if (v.size() != 2) throw std::invalid_argument("polygon vertices are x,y pairs separated by ';'");
      p.vertices.push_back({v[0], v[1]});
    }
    return p;
  }
  throw std::invalid_argument("shape must be 'circle' or 'polygon'");
}

// "cx,cy,r[,amp_re,amp_im[,inner]]".
inline geometry::SourceDisk source_value(const std::string& s) {
  auto v = numbers(s);
  if (v.size() != 3 && v.size() != 5 && v.size() != 6)
    throw std::invalid_argument("source needs cx,cy,r[,amp_re,amp_im[,inner_r]]");
  geometry::SourceDisk d{{v[0], v[1]}, v[2]};
  if (v.size() >= 5) d.amplitude = {v[3], v[4]};
  if (v.size() == 6) d.inner_radius = v[5];
  return d;
}

// "disk:cx,cy,r" or "all".
inline WindowSpec window_value(const std::string& s) {
  if (s == "all") return {};
  if (s.rfind("disk:", 0) == 0) {
    auto v = numbers(s.substr(5));
    if (v.size() == 3) return {geometry::Circle{{v[0], v[1]}, v[2]}};
  }
  throw std::invalid_argument("window is disk:cx,cy,r or all");
}

inline int integer(const std::string& s) {
  double v = number(s);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument("expected an integer");
  return static_cast<int>(v);
}

}  // namespace detail

// Sectioned key = value text. Complex numbers are "re,im"; lists use ';'.
inline RunConfig parse_config(std::istream& is) {
  RunConfig rc;
  std::string section;
  std::string line;
  int lineno = 0;
  std::optional<Complex> k, mu;
  std::optional<double> truncation, pml, h;
  std::vector<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    auto where = [&](const std::string& what) { fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + what); };
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') where("unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "domain" && section != "physics" && section != "run") where("unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) where("expected key = value");
    if (section.empty()) where("key outside of a section");
    std::string key = detail::trim(line.substr(0, eq)), val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) where("empty key or value");
    std::string full = section + "." + key;
    if (key != "source" && std::find(seen.begin(), seen.end(), full) != seen.end()) where("duplicate key " + full);
    seen.push_back(full);
    rc.echo.emplace_back(full, val);
    try {
      if (full == "domain.omega") rc.domain.omega = detail::shape_value(val);
      else if (full == "domain.dopant") rc.domain.dopant = detail::shape_value(val);
      else if (full == "domain.truncation_radius") truncation = detail::number(val);
      else if (full == "domain.pml_thickness") pml = detail::number(val);
      else if (full == "domain.h") h = detail::number(val);
      else if (full == "domain.mesh_file") rc.mesh_file = val;
      else if (full == "physics.k") k = detail::complex_value(val);
      else if (full == "physics.mu") mu = detail::complex_value(val);
      else if (full == "physics.omega") rc.physics.omega = detail::number(val);
      else if (full == "physics.delta") rc.physics.delta = detail::complex_value(val);
      else if (full == "physics.source") rc.physics.sources.disks.push_back(detail::source_value(val));
      else if (full == "physics.radiation") {
        if (val == "pml") rc.physics.radiation = fem::RadiationSpec{fem::RadiationSpec::Mode::Pml, 2, 0.0};
        else if (val == "robin") rc.physics.radiation = fem::RadiationSpec::robin();
        else where("radiation must be pml or robin");
      } else if (full == "physics.seed") rc.physics.seed = static_cast<unsigned>(detail::integer(val));
      else if (full == "physics.rtol") rc.physics.tol.rtol = detail::number(val);
      else if (full == "physics.ctol") rc.physics.tol.ctol = detail::number(val);
      else if (full == "physics.singular_ratio") rc.physics.tol.singular_ratio = detail::number(val);
      else if (full == "physics.resonance_rel") rc.physics.tol.resonance_rel = detail::number(val);
      else if (full == "run.order") rc.run.order = detail::integer(val);
      else if (full == "run.rho_iterations") rc.run.rho_iterations = detail::integer(val);
      else if (full == "run.deltas") {
        for (const auto& d : detail::split(val, ';')) rc.run.deltas.push_back(detail::complex_value(d));
      } else if (full == "run.window") rc.run.window = detail::window_value(val);
      else if (full == "run.gammas") rc.run.gammas = detail::numbers(val, ';');
      else if (full == "run.resonance_order") rc.run.resonance_order = detail::integer(val);
      else if (full == "run.h_list") rc.run.h_list = detail::numbers(val, ';');
      else if (full == "run.profile_points") rc.run.profile_points = detail::integer(val);
      else where("unknown key " + full);
    } catch (const std::invalid_argument& e) {
      where(full + ": " + e.what());
    } catch (const std::out_of_range&) {
      where(full + ": value out of range");
    }
  }
  auto invalid = [](const std::string& what) { fail(ErrorCode::ValidationError, what); };
  if (!geometry::is_valid(rc.domain.omega) || !geometry::is_valid(rc.domain.dopant)) invalid("omega and dopant must be valid shapes");
  // Wavenumber: k given directly, or from omega and mu.
  auto& ph = rc.physics;
  if (!(ph.omega > 0.0) || !std::isfinite(ph.omega)) invalid("omega must be positive");
  if (k) {
    ph.k = *k;
    ph.mu = mu ? *mu : (*k) * (*k) / (ph.omega * ph.omega);
  } else if (mu) {
    ph.mu = *mu;
    ph.k = std::sqrt(ph.omega * ph.omega * (*mu));
    if (std::arg(ph.k) < 0.0) ph.k = -ph.k;
  } else {
    ph.mu = ph.k * ph.k / (ph.omega * ph.omega);
  }
  ph.validate();
  const double wavelength = 2.0 * kPi / std::max(ph.k.real(), 1e-12);
  rc.domain.truncation_radius = truncation ? *truncation : 4.0 * geometry::max_radius(geometry::normalize(rc.domain.omega));
  const bool robin = ph.radiation && ph.radiation->mode == fem::RadiationSpec::Mode::RobinAbc;
  if (robin && pml && *pml > 0.0) invalid("robin radiation needs pml_thickness = 0");
  rc.domain.pml_thickness = pml ? *pml : (robin ? 0.0 : wavelength);
  if (ph.radiation && !robin && !(rc.domain.pml_thickness > 0.0)) invalid("pml radiation needs a positive pml_thickness");
  rc.h = h ? *h : wavelength / 20.0;
  if (!(rc.h > 0.0) || !std::isfinite(rc.h)) invalid("h must be positive");
  if (rc.run.order < 0 || rc.run.order > 200) invalid("order must lie in [0, 200]");
  if (rc.run.rho_iterations < 10) invalid("rho_iterations must be at least 10");
  if (rc.run.resonance_order != 0 && rc.run.resonance_order != 1) invalid("resonance_order must be 0 or 1");
  if (rc.run.profile_points < 2) invalid("profile_points must be at least 2");
  for (double g : rc.run.gammas)
    if (!(g > 0.0)) invalid("gammas must be positive");
  for (double x : rc.run.h_list)
    if (!(x > 0.0)) invalid("h_list entries must be positive");
  if (rc.run.window.disk && !(rc.run.window.disk->radius > 0.0)) invalid("window radius must be positive");
  geometry::validate(rc.domain);
  geometry::validate_sources(rc.domain, ph.sources);
  return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::ParseError, "cannot open config file " + path);
  return parse_config(f);
}

}  // namespace enz::cli
