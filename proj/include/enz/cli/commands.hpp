#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>

#include "enz/cli/config.hpp"
#include "enz/direct/direct.hpp"
#include "enz/fields/fields.hpp"
#include "enz/oracle/axisymmetric.hpp"
#include "enz/resonance/resonance.hpp"
#include "json.hpp"

namespace enz::cli {

using nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

inline ordered_json to_json(Complex z) { return ordered_json{{"re", z.real()}, {"im", z.imag()}}; }

inline std::string csv(double v) { return fem::format_double(v); }

// Output directory, artifact list and timings of one run.
class Run {
 public:
  Run(std::string command, const RunConfig& cfg, std::filesystem::path out)
      : command_(std::move(command)), cfg_(cfg), out_(std::move(out)), start_(Clock::now()) {
    std::filesystem::create_directories(out_);
  }

  std::ofstream open(const std::string& name) {
    std::ofstream f(out_ / name, std::ios::binary);
    if (!f) fail(ErrorCode::ValidationError, "cannot write " + (out_ / name).string());
    outputs_.push_back(name);
    return f;
  }

  void write_json(const std::string& name, const ordered_json& j) { open(name) << j.dump(2) << '\n'; }

  void mark(const std::string& stage) {
    auto now = Clock::now();
    timings_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

  ordered_json& options() { return options_; }

  // Manifest: inputs, versions and outputs; wall-clock timings are kept in a
  // separate block so the rest of the file is reproducible.
  void finish() {
    ordered_json m;
    m["command"] = command_;
    m["version"] = kVersion;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
#ifdef ENZ_HAVE_UMFPACK
    m["sparse_lu"] = "umfpack";
#else
    m["sparse_lu"] = "eigen-sparselu";
#endif
    ordered_json in = ordered_json::object();
    for (const auto& [k, v] : cfg_.echo) in[k] = v;
    m["config"] = in;
    m["options"] = options_;
    m["outputs"] = outputs_;
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : timings_) t[k] = v;
    t["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
    m["timings_seconds"] = t;
    std::ofstream f(out_ / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::string command_;
  const RunConfig& cfg_;
  std::filesystem::path out_;
  Clock::time_point start_, last_ = Clock::now();
  std::vector<std::string> outputs_;
  std::map<std::string, double> timings_;
  ordered_json options_ = ordered_json::object();
};

inline std::shared_ptr<const geometry::Mesh> load_mesh(const RunConfig& cfg, double h) {
  if (cfg.mesh_file) {
    std::ifstream f(*cfg.mesh_file);
    if (!f) fail(ErrorCode::ParseError, "cannot open mesh file " + *cfg.mesh_file);
    return std::make_shared<const geometry::Mesh>(geometry::read_mesh(f));
  }
  return std::make_shared<const geometry::Mesh>(geometry::build_mesh(cfg.domain, h));
}

inline fem::Window make_window(const WindowSpec& w) {
  return w.disk ? fem::Window::disk_window(*w.disk) : fem::Window{};
}

inline void require_delta(Complex d) {
  if (d == Complex{} || !std::isfinite(d.real()) || !std::isfinite(d.imag()))
    fail(ErrorCode::ValidationError, "delta must be nonzero and finite");
}

// Concentric-circle setup for the oracle, when the configuration has one.
inline std::optional<oracle::ConcentricSetup> concentric_setup(const RunConfig& cfg) {
  auto* om = std::get_if<geometry::Circle>(&cfg.domain.omega);
  auto* dp = std::get_if<geometry::Circle>(&cfg.domain.dopant);
  const auto& ph = cfg.physics;
  if (!om || !dp || norm(om->center) != 0.0 || norm(dp->center) != 0.0) return std::nullopt;
  if (ph.k.imag() != 0.0 || !(ph.k.real() > 0.0) || ph.sources.disks.size() != 1) return std::nullopt;
  const auto& s = ph.sources.disks[0];
  if (norm(s.center) != 0.0 || !(s.inner_radius > 0.0)) return std::nullopt;
  oracle::ConcentricSetup g;
  g.a = dp->radius;
  g.b = om->radius;
  g.r1 = s.inner_radius;
  g.r2 = s.radius;
  g.f0 = s.amplitude;
  g.k = ph.k.real();
  g.mu = ph.mu;
  return g;
}

inline int cmd_aux(const RunConfig& cfg, Run& run) {
  auto mesh = load_mesh(cfg, cfg.h);
  run.mark("mesh");
  auxiliary::Workspace ws(mesh, cfg.physics);
  auto a = auxiliary::compute_auxiliary(ws, cfg.physics.sources);
  run.mark("solve");
  auto f = run.open("aux.csv");
  const auto& p = cfg.physics;
  f << "k_re,k_im,delta_re,delta_im,beta_re,beta_im,cstar_re,cstar_im,mueff_re,mueff_im,rellich_residual\n";
  f << csv(p.k.real()) << ',' << csv(p.k.imag()) << ',' << csv(p.delta.real()) << ',' << csv(p.delta.imag()) << ','
    << csv(a.beta.real()) << ',' << csv(a.beta.imag()) << ',' << csv(a.c_star.real()) << ',' << csv(a.c_star.imag())
    << ',' << csv(a.mu_eff.volume.real()) << ',' << csv(a.mu_eff.volume.imag()) << ',' << csv(a.rellich.residual) << '\n';
  ordered_json s;
  s["nodes"] = mesh->nodes.size();
  s["beta"] = to_json(a.beta);
  s["c_star"] = to_json(a.c_star);
  s["mu_eff_volume"] = to_json(a.mu_eff.volume);
  s["mu_eff_flux"] = to_json(a.mu_eff.flux);
  s["sign_certificate"] = a.sign_certificate;
  s["rellich"] = {{"lhs", a.rellich.lhs}, {"volume", a.rellich.volume}, {"far_field", a.rellich.far_field},
                  {"residual", a.rellich.residual}};
  run.write_json("aux_summary.json", s);
  return 0;
}

struct ExpandOptions {
  int order = 2;
  Complex delta{1e-2, 0.0};
};

inline int cmd_expand(const RunConfig& cfg, const ExpandOptions& opt, Run& run) {
  require_delta(opt.delta);
  if (opt.order < 0) fail(ErrorCode::ValidationError, "order must be nonnegative");
  run.options()["order"] = opt.order;
  run.options()["delta"] = to_json(opt.delta);
  auto mesh = load_mesh(cfg, cfg.h);
  auxiliary::Workspace ws(mesh, cfg.physics);
  auto a = auxiliary::compute_auxiliary(ws, cfg.physics.sources);
  correctors::Context cx{&ws, &a};
  auto h = correctors::build_hierarchy(cx, std::max(0, opt.order - 1));
  run.mark("hierarchy");
  h.rho_hat = correctors::estimate_radius(cx, cfg.run.rho_iterations, cfg.physics.seed).rho_hat;
  run.mark("radius");
  auto v = correctors::assemble_v_delta(cx, h, opt.delta, opt.order);
  auto f = run.open("expansion_field.csv");
  fem::write_field_csv(f, v);
  ordered_json s;
  s["c_star"] = to_json(h.c_star);
  ordered_json e = ordered_json::array();
  for (int j = 0; j < opt.order; ++j) e.push_back(to_json(h.e[j]));
  s["e_j"] = e;
  s["rho_hat"] = h.rho_hat;
  s["c_delta"] = to_json(h.c_delta(opt.delta, opt.order));
  s["delta_rho"] = std::abs(opt.delta) * h.rho_hat;
  run.write_json("expand_summary.json", s);
  return 0;
}

inline int cmd_direct(const RunConfig& cfg, Complex delta, Run& run) {
  require_delta(delta);
  run.options()["delta"] = to_json(delta);
  auto mesh = load_mesh(cfg, cfg.h);
  physics::PhysicsConfig p = cfg.physics;
  p.delta = delta;
  auto u = direct::solve_transmission(mesh, p);
  run.mark("solve");
  auto f = run.open("direct_field.csv");
  fem::write_field_csv(f, u);
  ordered_json s;
  s["nodes"] = mesh->nodes.size();
  s["enz_absorption"] = direct::enz_absorption(u, delta);
  s["enz_flatness_h1"] = direct::enz_flatness(u);
  run.write_json("direct_summary.json", s);
  return 0;
}

struct SweepOptions {
  std::vector<Complex> deltas;
  int order = 2;
  WindowSpec window;
};

inline int cmd_sweep_delta(const RunConfig& cfg, const SweepOptions& opt, Run& run) {
  if (opt.deltas.empty()) fail(ErrorCode::ValidationError, "sweep needs at least one delta");
  for (Complex d : opt.deltas) require_delta(d);
  if (opt.order < 0) fail(ErrorCode::ValidationError, "order must be nonnegative");
  ordered_json dl = ordered_json::array();
  for (Complex d : opt.deltas) dl.push_back(to_json(d));
  run.options()["deltas"] = dl;
  run.options()["order"] = opt.order;
  auto mesh = load_mesh(cfg, cfg.h);
  auxiliary::Workspace ws(mesh, cfg.physics);
  auto a = auxiliary::compute_auxiliary(ws, cfg.physics.sources);
  correctors::Context cx{&ws, &a};
  auto h = correctors::build_hierarchy(cx, opt.order);
  run.mark("hierarchy");
  auto rows = direct::sweep(cx, h, opt.deltas, opt.order + 1, make_window(opt.window));
  run.mark("sweep");
  auto f = run.open("sweep_delta.csv");
  f << "delta_abs,delta_arg";
  for (int J = 0; J <= opt.order; ++J) f << ",h1_err_J" << J;
  f << '\n';
  for (const auto& r : rows) {
    f << csv(std::abs(r.delta)) << ',' << csv(std::arg(r.delta));
    for (double e : r.h1_error) f << ',' << csv(e);
    f << '\n';
  }
  ordered_json s;
  if (rows.size() >= 2) {
    ordered_json sl = ordered_json::array();
    for (int J = 0; J <= opt.order; ++J) {
      std::vector<double> x, y;
      for (const auto& r : rows) {
        x.push_back(std::abs(r.delta));
        y.push_back(r.h1_error[J]);
      }
      sl.push_back(direct::loglog_slope(x, y));
    }
    s["slopes"] = sl;
  }
  run.write_json("sweep_delta_summary.json", s);
  return 0;
}

inline int cmd_oracle_check(const RunConfig& cfg, Run& run) {
  auto g = concentric_setup(cfg);
  if (!g)
    fail(ErrorCode::ValidationError,
         "oracle-check needs concentric circles at the origin, real k and one annulus source centred at the origin");
  Complex d = cfg.physics.delta;
  if (d.imag() != 0.0 || !(d.real() > 0.0)) fail(ErrorCode::ValidationError, "oracle-check needs real positive delta");
  auto o = oracle::oracle_scalars(*g);
  auto u = oracle::oracle_transmission(*g, d.real());
  auto f = run.open("oracle_profile.csv");
  f << "r,u_re,u_im\n";
  const double rmax = cfg.domain.truncation_radius;
  const int n = cfg.run.profile_points;
  for (int i = 0; i < n; ++i) {
    double r = rmax * i / (n - 1);
    Complex v = u.value(r);
    f << csv(r) << ',' << csv(v.real()) << ',' << csv(v.imag()) << '\n';
  }
  run.mark("oracle");
  auto mesh = load_mesh(cfg, cfg.h);
  auxiliary::Workspace ws(mesh, cfg.physics);
  auto a = auxiliary::compute_auxiliary(ws, cfg.physics.sources);
  auto ud = direct::solve_transmission(mesh, cfg.physics, ws.views().global);
  run.mark("fem");
  fem::ScalarField ref = ud;
  for (int l = 0; l < ud.view->size(); ++l) {
    double r = norm(mesh->nodes[ud.view->nodes[l]]);
    ref.values[l] = r <= mesh->truncation_radius ? u.value(r) : Complex{};
  }
  fem::Window w = fem::Window::disk_window({{0.0, 0.0}, mesh->truncation_radius});
  double direct_gap = fem::l2_norm(ref - ud, w) / fem::l2_norm(ref, w);
  auto rel = [](Complex x, Complex y) { return std::abs(x - y) / std::abs(y); };
  ordered_json s;
  s["oracle"] = {{"beta", to_json(o.beta)}, {"c_star", to_json(o.c_star)}, {"mu_eff", to_json(o.mu_eff)},
                 {"flux_s", to_json(o.flux_s)}, {"matching_residual", u.matching_residual()}};
  s["fem"] = {{"beta", to_json(a.beta)}, {"c_star", to_json(a.c_star)}, {"mu_eff", to_json(a.mu_eff.volume)},
              {"flux_s", to_json(a.flux_s.total())}};
  s["relative_gap"] = {{"beta", rel(a.beta, o.beta)}, {"c_star", rel(a.c_star, o.c_star)},
                       {"mu_eff", rel(a.mu_eff.volume, o.mu_eff)}, {"direct_l2", direct_gap}};
  run.write_json("oracle_summary.json", s);
  return 0;
}

inline int cmd_radius(const RunConfig& cfg, Run& run) {
  auto mesh = load_mesh(cfg, cfg.h);
  auxiliary::Workspace ws(mesh, cfg.physics);
  auto a = auxiliary::compute_auxiliary(ws, cfg.physics.sources);
  correctors::Context cx{&ws, &a};
  auto r = correctors::estimate_radius(cx, cfg.run.rho_iterations, cfg.physics.seed);
  run.mark("radius");
  auto f = run.open("radius.csv");
  f << "iteration,growth\n";
  for (std::size_t i = 0; i < r.ratios.size(); ++i) f << i + 1 << ',' << csv(r.ratios[i]) << '\n';
  ordered_json s;
  s["rho_hat"] = r.rho_hat;
  s["convergence_radius"] = r.rho_hat > 0.0 ? 1.0 / r.rho_hat : std::numeric_limits<double>::infinity();
  s["spread"] = r.spread;
  s["iterations"] = cfg.run.rho_iterations;
  s["seed"] = cfg.physics.seed;
  run.write_json("radius_summary.json", s);
  return 0;
}

inline double resonance_target(const RunConfig& cfg) {
  if (auto* c = std::get_if<geometry::Circle>(&cfg.domain.dopant))
    return resonance::disk_eigenvalue(cfg.run.resonance_order, c->radius);
  if (cfg.run.resonance_order != 0) fail(ErrorCode::ValidationError, "angular resonances need a circular dopant");
  return 0.0;
}

inline int cmd_resonance_sweep(const RunConfig& cfg, Run& run) {
  auto mesh = load_mesh(cfg, cfg.h);
  double target = resonance_target(cfg);
  auto views = auxiliary::Views::make(mesh);
  auto cluster = resonance::find_cluster(views.dopant, target);
  auto kind = resonance::classify(cluster);
  run.mark("eigen");
  ordered_json s;
  s["classification"] = resonance::excitation_name(kind);
  s["lambda_star"] = cluster.lambda_star;
  s["continuum_target"] = target;
  ordered_json means = ordered_json::array();
  for (double m : cluster.means) means.push_back(m);
  s["mode_means"] = means;
  auto f = run.open("resonance_sweep.csv");
  f << "gamma_re,gamma_im,cstar_abs,mueff_abs,phi_gap_h1\n";
  if (kind == resonance::Excitation::Excited) {
    resonance::StudyOptions so;
    so.target = target;
    if (!cfg.run.gammas.empty()) so.gammas = cfg.run.gammas;
    auto st = resonance::gamma_sweep(mesh, cfg.physics, so);
    run.mark("sweep");
    for (const auto* path : {&st.real_path, &st.lossy_path})
      for (const auto& r : *path)
        f << csv(r.gamma.real()) << ',' << csv(r.gamma.imag()) << ',' << csv(std::abs(r.c_star)) << ','
          << csv(std::abs(r.mu_eff)) << ',' << csv(r.phi_gap_h1) << '\n';
    s["c_bar"] = to_json(st.c_bar);
    s["c_bar_richardson_real"] = to_json(resonance::richardson_cbar(st.real_path));
    s["c_bar_richardson_lossy"] = to_json(resonance::richardson_cbar(st.lossy_path));
    if (st.real_path.size() >= 2) {
      auto a = resonance::path_slopes(st.real_path), b = resonance::path_slopes(st.lossy_path);
      s["slopes_real"] = {{"c_star", a.c_star}, {"mu_eff", a.mu_eff}, {"phi_gap", a.phi_gap}};
      s["slopes_lossy"] = {{"c_star", b.c_star}, {"mu_eff", b.mu_eff}, {"phi_gap", b.phi_gap}};
    }
  } else {
    auto ne = resonance::not_excited_study(mesh, cfg.physics, target, {Complex(0.5, 0.0), Complex(0.0, 0.5)});
    run.mark("deflated");
    s["c_star"] = to_json(ne.c_star);
    s["c_star_shifted"] = to_json(ne.c_star_shifted);
    s["chi0_relative_change"] = ne.chi0_change;
  }
  run.write_json("resonance_summary.json", s);
  return 0;
}

inline int cmd_poynting(const RunConfig& cfg, Complex delta, Run& run) {
  require_delta(delta);
  run.options()["delta"] = to_json(delta);
  auto mesh = load_mesh(cfg, cfg.h);
  physics::PhysicsConfig p = cfg.physics;
  p.delta = delta;
  auxiliary::Workspace ws(mesh, p);
  auto a = auxiliary::compute_auxiliary(ws, p.sources);
  correctors::Context cx{&ws, &a};
  auto phi0 = correctors::op_Pk(cx, correctors::seed(cx));
  auto u = direct::solve_transmission(mesh, p, ws.views().global);
  run.mark("solve");
  auto S = fields::compute_poynting(u, p.omega, delta);
  auto lim = fields::limit_poynting(phi0, a.c_star, p.omega);
  auto res = fields::ideal_fluid_residuals(phi0, a, p);
  auto f = run.open("poynting.csv");
  fields::write_vector_csv(f, S);
  ordered_json s;
  s["enz_l2_gap_to_limit"] = fields::enz_l2_gap(S, lim);
  s["residuals"] = {{"div", res.div},           {"curl", res.curl},     {"bc_omega", res.bc_omega},
                    {"bc_dopant", res.bc_dopant}, {"w_real", res.w_real}, {"w_imag", res.w_imag},
                    {"scale", res.scale}};
  s["div_constant"] = to_json(res.div_constant);
  run.write_json("poynting_summary.json", s);
  return 0;
}

inline int cmd_convergence_table(const RunConfig& cfg, Run& run) {
  std::vector<double> hs = cfg.run.h_list;
  if (hs.empty()) hs = {cfg.h, cfg.h / 2.0};
  if (cfg.mesh_file) fail(ErrorCode::ValidationError, "convergence-table builds its own meshes; drop mesh_file");
  auto g = concentric_setup(cfg);
  std::optional<oracle::OracleScalars> o;
  if (g) o = oracle::oracle_scalars(*g);
  struct Row {
    double h;
    std::size_t nodes;
    Complex beta, c_star, mu_v, mu_f;
    double rellich;
  };
  std::vector<Row> rows;
  for (double h : hs) {
    auto mesh = load_mesh(cfg, h);
    auxiliary::Workspace ws(mesh, cfg.physics);
    auto a = auxiliary::compute_auxiliary(ws, cfg.physics.sources);
    rows.push_back({h, mesh->nodes.size(), a.beta, a.c_star, a.mu_eff.volume, a.mu_eff.flux, a.rellich.residual});
    run.mark("h=" + csv(h));
  }
  // Reference: oracle when the setup allows it, else the finest mesh.
  std::size_t finest = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].h < rows[finest].h) finest = i;
  Complex rb = o ? o->beta : rows[finest].beta, rc = o ? o->c_star : rows[finest].c_star,
          rm = o ? o->mu_eff : rows[finest].mu_v;
  auto f = run.open("convergence_table.csv");
  f << "h,nodes,beta_re,beta_im,cstar_re,cstar_im,mueff_volume_re,mueff_flux_re,mueff_formula_gap,beta_gap,cstar_gap,"
       "mueff_gap,rellich_residual,reference\n";
  for (const auto& r : rows) {
    f << csv(r.h) << ',' << r.nodes << ',' << csv(r.beta.real()) << ',' << csv(r.beta.imag()) << ','
      << csv(r.c_star.real()) << ',' << csv(r.c_star.imag()) << ',' << csv(r.mu_v.real()) << ',' << csv(r.mu_f.real())
      << ',' << csv(std::abs(r.mu_v - r.mu_f) / std::abs(r.mu_v)) << ',' << csv(std::abs(r.beta - rb) / std::abs(rb))
      << ',' << csv(std::abs(r.c_star - rc) / std::abs(rc)) << ',' << csv(std::abs(r.mu_v - rm) / std::abs(rm)) << ','
      << csv(r.rellich) << ',' << (o ? "oracle" : "finest") << '\n';
  }
  return 0;
}

}  // namespace enz::cli
