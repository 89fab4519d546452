#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace enz {

using Complex = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

enum class ErrorCode {
  GeometryInvalid,
  MeshFailure,
  ZeroCoefficient,
  SingularSystem,
  IncompatibleData,
  TagMismatch,
  EmptyWindow,
  NoConvergence,
  ResonantDopant,
  BetaNearZero,
  DivergentSeries,
  Domain,
  SingularMatch,
  Degenerate,
  ParseError,
  ValidationError,
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::GeometryInvalid: return "GEOMETRY_INVALID";
    case ErrorCode::MeshFailure: return "MESH_FAILURE";
    case ErrorCode::ZeroCoefficient: return "ZERO_COEFFICIENT";
    case ErrorCode::SingularSystem: return "SINGULAR_SYSTEM";
    case ErrorCode::IncompatibleData: return "INCOMPATIBLE_DATA";
    case ErrorCode::TagMismatch: return "TAG_MISMATCH";
    case ErrorCode::EmptyWindow: return "EMPTY_WINDOW";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::ResonantDopant: return "RESONANT_DOPANT";
    case ErrorCode::BetaNearZero: return "BETA_NEAR_ZERO";
    case ErrorCode::DivergentSeries: return "DIVERGENT_SERIES";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::SingularMatch: return "SINGULAR_MATCH";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
  }
  return "UNKNOWN";
}

// Process exit status used by the command line tool for each error kind.
inline int exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// Neumaier compensated accumulator.
template <class T>
class CompensatedSum {
 public:
  void add(T v) {
    T t = sum_ + v;
    if constexpr (std::is_same_v<T, Complex>) {
      comp_ += Complex(correction(sum_.real(), v.real(), t.real()),
                       correction(sum_.imag(), v.imag(), t.imag()));
    } else {
      comp_ += correction(sum_, v, t);
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double correction(double s, double v, double t) {
    return std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
  }
  T sum_{};
  T comp_{};
};

// Worker count from ENZ_THREADS, defaulting to the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("ENZ_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
// that output does not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace enz
