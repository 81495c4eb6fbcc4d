#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "invgauss/atoms.hpp"
#include "invgauss/errors.hpp"
#include "invgauss/geometry.hpp"
#include "invgauss/kernels.hpp"
#include "invgauss/parallel.hpp"
#include "invgauss/probes.hpp"
#include "invgauss/quadrature.hpp"
#include "invgauss/rng.hpp"
#include "invgauss/special.hpp"

namespace invgauss {

// ---- Domination scans ----

struct ScanResult {
  double C = 0.0;                    // max ratio on the calibration sample
  double max_validation_ratio = 0.0;
  bool success = false;              // validation <= 2 C
  std::size_t samples = 0;
  std::size_t skipped_calibration = 0;  // pairs where the denominator vanished
  std::size_t skipped_validation = 0;
};

namespace detail {
inline Point uniform_in_ball(Rng& rng, std::size_t n, double radius) {
  Point p(n);
  while (true) {
    double r2 = 0.0;
    for (auto& v : p) {
      v = rng.uniform(-1.0, 1.0);
      r2 += v * v;
    }
    if (r2 <= 1.0) break;
  }
  for (auto& v : p) v *= radius;
  return p;
}

struct RatioSample {
  double log_ratio = -std::numeric_limits<double>::infinity();
  std::size_t skipped = 0;
};

// One global pair per task; pairs where the denominator vanishes are redrawn and counted.
inline RatioSample ratio_sample(const KernelSpec& num, const KernelSpec& den, double box, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  RatioSample out;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Point x = uniform_in_ball(rng, n, box), y = uniform_in_ball(rng, n, box);
    if (!in_region(x, y, Global{})) {
      ++out.skipped;
      continue;
    }
    const double ld = log_evaluate_positive(den, x, y);
    if (!std::isfinite(ld)) {
      ++out.skipped;
      continue;
    }
    out.log_ratio = log_evaluate_positive(num, x, y) - ld;
    return out;
  }
  throw NonConvergence("domination_scan: no admissible pair found", 0.0, 0.0);
}
}  // namespace detail

// Calibrates C = max num/den on global pairs with |x|, |y| <= calib_box and checks
// the ratio on a disjoint sample with |x|, |y| <= valid_box against 2 C.
inline ScanResult domination_scan(const KernelSpec& num, const KernelSpec& den, double calib_box, double valid_box,
                                  std::size_t samples, std::uint64_t seed, std::size_t n = 2, unsigned threads = 0) {
  if (samples == 0 || !(calib_box > 0.0) || !(valid_box > 0.0)) throw DomainError("domination_scan: invalid arguments");
  ScanResult r;
  r.samples = samples;
  auto run = [&](double box, std::uint64_t stream) {
    return parallel_map<detail::RatioSample>(
        samples, [&](std::size_t i) { return detail::ratio_sample(num, den, box, n, Rng::split(Rng::split(seed, stream), i)); }, threads);
  };
  const auto cal = run(calib_box, 0);
  const auto val = run(valid_box, 1);
  double lc = -std::numeric_limits<double>::infinity(), lv = lc;
  for (const auto& s : cal) {
    lc = std::max(lc, s.log_ratio);
    r.skipped_calibration += s.skipped;
  }
  for (const auto& s : val) {
    lv = std::max(lv, s.log_ratio);
    r.skipped_validation += s.skipped;
  }
  r.C = std::exp(lc);
  r.max_validation_ratio = std::exp(lv);
  r.success = lv <= lc + std::log(2.0);
  return r;
}

// ---- Weak type (1,1) quotients in one dimension ----

// A finite sum of weighted indicators of intervals.
struct StepFunction {
  struct Piece {
    double a, b, value;
  };
  std::vector<Piece> pieces;

  double operator()(double x) const {
    double v = 0.0;
    for (const auto& p : pieces)
      if (x > p.a && x < p.b) v += p.value;
    return v;
  }
  StepFunction scaled(double c) const {
    StepFunction s = *this;
    for (auto& p : s.pieces) p.value *= c;
    return s;
  }
};

// The one-dimensional hemisphere atom as a step function.
inline StepFunction step_function(const Atom& a) {
  if (a.dim() != 1 || !std::holds_alternative<Hemisphere>(a.kind)) throw DomainError("step_function: needs a one-dimensional hemisphere atom");
  const double v = a({0.5});
  return StepFunction{{{-1.0, 0.0, -v}, {0.0, 1.0, v}}};
}

namespace detail {
// log erfc(w), accurate for large positive w.
inline double log_erfc(double w) {
  if (w < 25.0) return std::log(std::erfc(w));
  const double w2 = w * w;
  return -w2 - std::log(w * std::sqrt(std::numbers::pi)) + std::log1p(-0.5 / w2 + 0.75 / (w2 * w2));
}

// e^{x^2} P_t 1_{(a,b)}(x) with q = e^{-t}, s = sqrt(1 - q^2).
inline double semigroup_indicator_scaled(double a, double b, double x, double q, double s) {
  const double za = (a * q - x) / s, zb = (b * q - x) / s;
  const double x2 = x * x;
  if (za >= 0.0) return 0.5 * (std::exp(x2 + log_erfc(za)) - std::exp(x2 + log_erfc(zb)));
  if (zb <= 0.0) return 0.5 * (std::exp(x2 + log_erfc(-zb)) - std::exp(x2 + log_erfc(-za)));
  return 0.5 * std::exp(x2) * (std::erf(zb) - std::erf(za));
}

// e^{x^2} d/dx P_t 1_{(a,b)}(x).
inline double semigroup_indicator_dx_scaled(double a, double b, double x, double q, double s) {
  const double za = (a * q - x) / s, zb = (b * q - x) / s;
  const double x2 = x * x;
  return (std::exp(x2 - za * za) - std::exp(x2 - zb * zb)) / (std::sqrt(std::numbers::pi) * s);
}

// Adaptive integral over w = log t in (-60, log 80), with breakpoints near the
// scales (x - c)^2 at which the step edges are resolved.
template <class F>
cplx log_time_integral(F&& f, const StepFunction& g, double x, const QuadratureConfig& cfg) {
  std::vector<double> br{-60.0, std::log(80.0)};
  for (const auto& p : g.pieces)
    for (double c : {p.a, p.b}) {
      const double d = std::abs(x - c);
      if (d > 0.0) {
        const double w = 2.0 * std::log(d);
        for (double o : {-4.0, 0.0, 2.0})
          if (w + o > br.front() && w + o < br.back()) br.push_back(w + o);
      }
    }
  for (double w : {-2.0, 0.0, 1.0, 2.0}) br.push_back(w);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  QuadratureConfig c = cfg;
  c.endpoint_policy = EndpointPolicy::None;
  cplx s = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) s += integrate(f, br[i], br[i + 1], c).value;
  return s;
}
}  // namespace detail

// e^{x^2} R_lambda f(x), R_lambda = d/dx (A + lambda)^{-1/2}, by subordination to the semigroup.
inline double riesz_step_scaled(double lambda, const StepFunction& g, double x, const QuadratureConfig& cfg = {1e-8, 1e-14}) {
  auto f = [&](double w) -> cplx {
    const double t = std::exp(w);
    const double q = std::exp(-t), s = std::sqrt(-std::expm1(-2.0 * t));
    double v = 0.0;
    for (const auto& p : g.pieces) v += p.value * detail::semigroup_indicator_dx_scaled(p.a, p.b, x, q, s);
    return std::sqrt(t) * std::exp(-lambda * t) * v;
  };
  return detail::log_time_integral(f, g, x, cfg).real() / std::sqrt(std::numbers::pi);
}

// e^{x^2} (A + lambda)^{iu} f(x) from the regularised subordination formula.
inline cplx impow_step_scaled(double u, double lambda, const StepFunction& g, double x, const QuadratureConfig& cfg = {1e-8, 1e-14}) {
  if (u == 0.0) throw DomainError("impow_step: u must be nonzero");
  const double fx = g(x);
  const double ex = std::exp(x * x);
  auto pt = [&](double t) {
    const double q = std::exp(-t), s = std::sqrt(-std::expm1(-2.0 * t));
    double v = 0.0;
    for (const auto& p : g.pieces) v += p.value * detail::semigroup_indicator_scaled(p.a, p.b, x, q, s);
    return v;
  };
  const cplx iu(0.0, u);
  auto f = [&](double w) -> cplx {
    const double t = std::exp(w);
    const cplx tp = std::exp(-iu * w);
    double v = std::exp(-lambda * t) * pt(t);
    if (t < 1.0) v -= fx * ex;
    return tp * v;
  };
  cplx s = detail::log_time_integral(f, g, x, cfg);
  // Regularisation at t -> 0: int_0^1 t^{-iu-1} dt = -1/(iu).
  if (fx != 0.0) s -= fx * ex / iu;
  return s * rgamma_c(-iu);
}

struct WeakTypeOptions {
  int grid_points = 10000;
  QuadratureConfig quad{1e-8, 1e-14};
  unsigned threads = 0;
};

struct WeakTypeResult {
  double quotient = 0.0;
  double alpha = 0.0;  // level at which the supremum is attained
  double f_norm = 0.0;
};

// sup_alpha alpha gamma_{-1}{|x| < cutoff : |T f(x)| > alpha} / ||f||_1 for T a Riesz
// component or an imaginary power, on a uniform grid of cell midpoints with trapezoid
// gamma_{-1} weights; an empty alpha_grid uses the sampled values of |T f| as levels.
inline WeakTypeResult weak_type_quotient(const KernelSpec& spec, const StepFunction& f, const std::vector<double>& alpha_grid,
                                         double cutoff, const WeakTypeOptions& opt = {}) {
  if (!(cutoff > 0.0) || opt.grid_points < 2) throw DomainError("weak_type_quotient: invalid cutoff or grid");
  const auto* rz = std::get_if<RieszComponent>(&spec);
  const auto* ip = std::get_if<ImaginaryPower>(&spec);
  if (!rz && !ip) throw DomainError("weak_type_quotient: needs a Riesz component or an imaginary power");
  if (rz && rz->j != 1) throw DomainError("weak_type_quotient: one-dimensional, component 1 only");
  const int N = opt.grid_points;
  const double h = 2.0 * cutoff / N;
  const double lsp = 0.5 * std::log(std::numbers::pi);
  // log |T f(x_k)| and log gamma_{-1}(cell k).
  const auto vals = parallel_map<std::pair<double, double>>(
      std::size_t(N),
      [&](std::size_t k) {
        const double x = -cutoff + (double(k) + 0.5) * h;
        const double S = rz ? std::abs(riesz_step_scaled(rz->lambda, f, x, opt.quad)) : std::abs(impow_step_scaled(ip->u, ip->lambda, f, x, opt.quad));
        const double lg = S > 0.0 ? std::log(S) - x * x : -std::numeric_limits<double>::infinity();
        const double xl = x - 0.5 * h, xr = x + 0.5 * h;
        const double m = std::max(xl * xl, xr * xr);
        const double lw = lsp + std::log(0.5 * h) + m + std::log(std::exp(xl * xl - m) + std::exp(xr * xr - m));
        return std::make_pair(lg, lw);
      },
      opt.threads);
  double fnorm = 0.0;
  for (const auto& p : f.pieces) {
    QuadratureConfig q{1e-12, 1e-300};
    fnorm += std::abs(p.value) * std::sqrt(std::numbers::pi) * integrate([](double y) { return std::exp(y * y); }, p.a, p.b, q).real();
  }
  if (!(fnorm > 0.0)) throw DomainError("weak_type_quotient: f vanishes");
  std::vector<std::size_t> idx(N);
  for (int k = 0; k < N; ++k) idx[k] = std::size_t(k);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return vals[i].first > vals[j].first; });
  WeakTypeResult res;
  res.f_norm = fnorm;
  double best = -std::numeric_limits<double>::infinity();
  auto lse = [](double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
  };
  if (alpha_grid.empty()) {
    double lm = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto& v = vals[idx[r]];
      if (!std::isfinite(v.first)) break;
      lm = lse(lm, v.second);
      if (r + 1 < idx.size() && vals[idx[r + 1]].first == v.first) continue;
      if (v.first + lm > best) {
        best = v.first + lm;
        res.alpha = std::exp(v.first);
      }
    }
  } else {
    for (double alpha : alpha_grid) {
      if (!(alpha > 0.0)) throw DomainError("weak_type_quotient: levels must be positive");
      const double la = std::log(alpha);
      double lm = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < idx.size() && vals[idx[r]].first > la; ++r) lm = lse(lm, vals[idx[r]].second);
      if (la + lm > best) {
        best = la + lm;
        res.alpha = alpha;
      }
    }
  }
  res.quotient = std::isfinite(best) ? std::exp(best) / fnorm : 0.0;
  return res;
}

// ---- Local Hormander-type integrals ----

struct HormanderOptions {
  int directions = 16;  // for n >= 2
  int y_samples = 5;
  double fd_step = 1e-4;  // relative to the radius
  double rho_max = 1e6;
  QuadratureConfig kernel{1e-10, 1e-300};
  QuadratureConfig outer{1e-4, 1e-300};
};

namespace detail {
// |grad_y k(x, y)| e^{|x|^2}, k the gamma_{-1} kernel of spec.
inline double kernel_grad_scaled(const KernelSpec& spec, const Point& x, const Point& y, double h, const QuadratureConfig& cfg) {
  auto k = [&](const Point& p) -> cplx {
    if (const auto* r = std::get_if<RieszComponent>(&spec)) return riesz_kernel_scaled(r->j, r->lambda, x, p, cfg);
    const auto& u = std::get<ImaginaryPower>(spec);
    return impow_kernel_scaled(u.u, u.lambda, x, p, cfg);
  };
  double g2 = 0.0;
  Point p = y;
  for (std::size_t d = 0; d < y.size(); ++d) {
    p[d] = y[d] + h;
    const cplx fp = k(p);
    p[d] = y[d] - h;
    const cplx fm = k(p);
    p[d] = y[d];
    g2 += std::norm((fp - fm) / (2.0 * h));
  }
  return std::sqrt(g2);
}
}  // namespace detail

inline void check_hormander_spec(const KernelSpec& spec, std::size_t n) {
  if (const auto* u = std::get_if<ImaginaryPower>(&spec)) {
    if (!(u->lambda > 0.0)) throw DomainError("hormander_diagnostic: imaginary powers need lambda > 0");
    return;
  }
  if (const auto* r = std::get_if<RieszComponent>(&spec)) {
    if (n != 1 || !(r->lambda > 1.0)) throw DomainError("hormander_diagnostic: Riesz components need n = 1 and lambda > 1");
    return;
  }
  throw DomainError("hormander_diagnostic: unsupported kernel");
}

// r_B sup_{y in B} int_{(2B)^c} |grad_y k(x, y)| dgamma_{-1}(x).
inline double hormander_value(const KernelSpec& spec, const Ball& B, const HormanderOptions& opt = {}) {
  const std::size_t n = B.center.size();
  check_hormander_spec(spec, n);
  const double r = B.radius;
  const SphereRule sr = sphere_rule(n, opt.directions);
  const double pin = std::pow(std::numbers::pi, 0.5 * double(n));
  std::vector<Point> ys{B.center};
  const int per_axis = std::max(0, (opt.y_samples - 1) / 2);
  for (std::size_t d = 0; d < n; ++d)
    for (int k = 1; k <= per_axis; ++k)
      for (double sg : {-1.0, 1.0}) {
        Point y = B.center;
        y[d] += sg * 0.9 * r * double(k) / per_axis;
        ys.push_back(y);
      }
  double best = 0.0;
  for (const Point& y : ys) {
    double total = 0.0;
    for (std::size_t m = 0; m < sr.dirs.size(); ++m) {
      auto g = [&](double rho) {
        const Point x = B.center + rho * sr.dirs[m];
        return detail::kernel_grad_scaled(spec, x, y, opt.fd_step * r, opt.kernel) * std::pow(rho, double(n) - 1.0);
      };
      // rho = 2r e^s up to rho_max; beyond it the integrand is extrapolated as a power law.
      const double smax = std::log(opt.rho_max / (2.0 * r));
      auto f = [&](double s) {
        const double rho = 2.0 * r * std::exp(s);
        return g(rho) * rho;
      };
      double v = 0.0;
      for (int k = 0; k < 8; ++k) v += integrate(f, smax * k / 8.0, smax * (k + 1) / 8.0, opt.outer).real();
      const double g1 = g(opt.rho_max), g0 = g(0.1 * opt.rho_max);
      if (g1 > 0.0 && g0 > g1) {
        const double p = std::log10(g0 / g1);
        if (p > 1.0) v += g1 * opt.rho_max / (p - 1.0);
        else v = std::numeric_limits<double>::infinity();
      }
      total += sr.weights[m] * v;
    }
    best = std::max(best, total * pin);
  }
  return r * best;
}

inline double hormander_diagnostic(const KernelSpec& spec, const std::vector<Ball>& balls, const HormanderOptions& opt = {}) {
  double v = 0.0;
  for (const Ball& b : balls) v = std::max(v, hormander_value(spec, b, opt));
  return v;
}

// Admissible balls centred on the first axis at the given distances, radius scale * min(1, 1/|c|).
inline std::vector<Ball> admissible_family(std::size_t n, const std::vector<double>& centers, double scale = 0.5) {
  std::vector<Ball> out;
  for (double c : centers) {
    Point p(n, 0.0);
    p[0] = c;
    out.push_back({p, scale * std::min(1.0, c > 0.0 ? 1.0 / c : 1.0)});
  }
  return out;
}

struct FamilyStability {
  double base = 0.0, extended = 0.0, halved = 0.0;
  bool stable = false;  // extended <= 1.5 base and halved <= 2 base
};

inline const std::vector<double>& base_centers() {
  static const std::vector<double> c{0.0, 1.0, 2.0, 4.0};
  return c;
}
inline const std::vector<double>& extended_centers() {
  static const std::vector<double> c{0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  return c;
}

inline FamilyStability hormander_stability(const KernelSpec& spec, std::size_t n = 1, const HormanderOptions& opt = {}) {
  FamilyStability s;
  s.base = hormander_diagnostic(spec, admissible_family(n, base_centers()), opt);
  s.extended = hormander_diagnostic(spec, admissible_family(n, extended_centers()), opt);
  s.halved = hormander_diagnostic(spec, admissible_family(n, base_centers(), 0.25), opt);
  s.stable = std::isfinite(s.base) && s.extended <= 1.5 * s.base && s.halved <= 2.0 * s.base;
  return s;
}

// ---- Semigroup localisation on admissible balls ----

// e^{-tA} 1_{(2B)^c}(x) in one dimension by quadrature of the Mehler kernel.
inline double semigroup_outside(const Ball& B, double t, double x, const QuadratureConfig& cfg = {1e-10, 1e-300}) {
  const double c = B.center[0], r = B.radius;
  const double q = std::exp(-t), den = -std::expm1(-2.0 * t);
  auto H = [&](double y) { return std::isfinite(y) ? std::exp(log_mehler_H(t, PairScalars({x}, {y}))) : 0.0; };
  auto Hm = [&](double y) { return H(-y); };
  const double width = 12.0 * std::sqrt(den) / q;
  QuadratureConfig qc = cfg;
  qc.endpoint_policy = EndpointPolicy::None;
  const double inf = std::numeric_limits<double>::infinity();
  const double hi0 = c + 2.0 * r, lo0 = -(c - 2.0 * r);
  double v = integrate(H, hi0, hi0 + width, qc).real() + integrate(H, hi0 + width, inf, qc).real();
  v += integrate(Hm, lo0, lo0 + width, qc).real() + integrate(Hm, lo0 + width, inf, qc).real();
  return v;
}

// gamma_{-1}(B)^{-1} int_B (e^{-tA} 1_{(2B)^c})^2 dgamma_{-1}, n = 1.
inline double takeda_lhs(const Ball& B, double t, const QuadratureConfig& cfg = {1e-10, 1e-300}) {
  if (B.center.size() != 1) throw DomainError("takeda_check: one-dimensional balls only");
  const double c = B.center[0], r = B.radius;
  const auto& g = gauss_legendre(32);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double x = c + r * g.x[i];
    const double w = r * g.w[i] * std::exp(x * x - c * c);
    const double p = semigroup_outside(B, t, x, cfg);
    num += w * p * p;
    den += w;
  }
  return num / den;
}

struct TakedaReport {
  std::vector<double> t, lhs, ratio;
  double c = 0.0;  // exponent constant used in e^{-c r^2 / t}
  double C = 0.0;  // calibrated at the largest t
  double max_ratio = 0.0;
  bool monotone = false;
  bool success = false;
};

// Fits c from the two largest times, uses c/2, calibrates C at the largest time and
// checks lhs(t) <= 2 C e^{-c r^2 / (2t)} on the rest of the grid.
inline TakedaReport takeda_check(const Ball& B, std::vector<double> t_grid = {}, const QuadratureConfig& cfg = {1e-10, 1e-300}) {
  if (!B.admissible(1.0)) throw AdmissibilityError("takeda_check: ball is not admissible");
  const double r2 = B.radius * B.radius;
  if (t_grid.empty())
    for (int k = 6; k >= 0; --k) t_grid.push_back(r2 * std::ldexp(1.0, -k));
  std::sort(t_grid.begin(), t_grid.end());
  if (t_grid.size() < 2) throw DomainError("takeda_check: need at least two times");
  for (double t : t_grid)
    if (!(t > 0.0) || t > r2 * (1.0 + 1e-12)) throw DomainError("takeda_check: times must lie in (0, r_B^2]");
  TakedaReport rep;
  rep.t = t_grid;
  for (double t : t_grid) rep.lhs.push_back(takeda_lhs(B, t, cfg));
  const std::size_t m = t_grid.size();
  const double t1 = t_grid[m - 1], t0 = t_grid[m - 2];
  const double slope = (std::log(rep.lhs[m - 1]) - std::log(rep.lhs[m - 2])) / (r2 / t0 - r2 / t1);
  rep.c = 0.5 * std::max(slope, 0.0);
  rep.C = rep.lhs[m - 1] * std::exp(rep.c * r2 / t1);
  rep.monotone = true;
  for (std::size_t i = 0; i < m; ++i) {
    rep.ratio.push_back(rep.lhs[i] * std::exp(rep.c * r2 / t_grid[i]) / rep.C);
    rep.max_ratio = std::max(rep.max_ratio, rep.ratio.back());
    if (i > 0 && rep.lhs[i] < rep.lhs[i - 1]) rep.monotone = false;
  }
  rep.success = rep.max_ratio <= 2.0;
  return rep;
}

// ---- Off-ball gradient of the shifted square root, n = 1 ----

namespace detail {
// int_A^B |v + m| e^{-v^2 / w} dv (A, B may be infinite).
inline double abs_linear_gauss(double A, double B, double m, double w) {
  if (!(B > A)) return 0.0;
  const double sw = std::sqrt(w);
  auto gauss_part = [&](double lo, double hi) { return 0.5 * w * (std::exp(-lo * lo / w) - std::exp(-hi * hi / w)); };
  auto erf_diff = [&](double lo, double hi) {
    const double a = lo / sw, b = hi / sw;
    if (a >= 0.0) return std::erfc(a) - std::erfc(b);
    if (b <= 0.0) return std::erfc(-b) - std::erfc(-a);
    return std::erf(b) - std::erf(a);
  };
  auto signed_int = [&](double lo, double hi) { return gauss_part(lo, hi) + m * 0.5 * std::sqrt(std::numbers::pi * w) * erf_diff(lo, hi); };
  const double k = -m;
  if (k <= A) return signed_int(A, B);
  if (k >= B) return -signed_int(A, B);
  return -signed_int(A, k) + signed_int(k, B);
}
}  // namespace detail

// I(y) = int_0^1 r^lambda (1-r^2)^{-3/2} (-log r)^{-3/2} int_{(4B)^c} |x - r y| e^{-(rx - y)^2/(1-r^2)} dx dr, n = 1.
inline double lemma4b_inner(double lambda, const Ball& B, double y, const QuadratureConfig& cfg = {1e-8, 1e-300}) {
  if (B.center.size() != 1) throw DomainError("lemma4b_inner: one-dimensional balls only");
  if (!(lambda >= 1.0)) throw DomainError("lemma4b_inner: lambda must be at least 1");
  const double c = B.center[0], rb = B.radius;
  const double inf = std::numeric_limits<double>::infinity();
  // Inner integral after v = r x - y, divided by r^2.
  auto inner = [&](double r) {
    const double w = -std::expm1(2.0 * std::log(r));
    const double m = w * y;
    const double lo = r * (c - 4.0 * rb) - y, hi = r * (c + 4.0 * rb) - y;
    return (detail::abs_linear_gauss(-inf, lo, m, w) + detail::abs_linear_gauss(hi, inf, m, w)) / (r * r);
  };
  // s = -log r.
  auto f = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double r = std::exp(-s);
    const double w = -std::expm1(-2.0 * s);
    const double v = inner(r);
    if (v == 0.0) return 0.0;
    return std::exp((lambda + 1.0) * std::log(r) - 1.5 * std::log(w) - 1.5 * std::log(s)) * v;
  };
  const double S0 = 30.0;
  QuadratureConfig q = cfg;
  q.endpoint_policy = EndpointPolicy::None;
  double v = 0.0;
  std::vector<double> br{0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0, 10.0, S0};
  for (std::size_t i = 0; i + 1 < br.size(); ++i) v += integrate(f, br[i], br[i + 1], q).real();
  // Beyond S0, r^2 is negligible: the inner integral is J / r^2 with J over the whole line.
  const double J = detail::abs_linear_gauss(-inf, inf, y, 1.0);
  const double a = lambda - 1.0;
  const double tail = a > 0.0 ? std::sqrt(a) * (2.0 * std::exp(-a * S0) / std::sqrt(a * S0) - 2.0 * std::sqrt(std::numbers::pi) * std::erfc(std::sqrt(a * S0)))
                              : 2.0 / std::sqrt(S0);
  return v + J * tail;
}

// max over the family and over y in B of r_B^2 I(y).
inline double lemma4b_family_value(double lambda, const std::vector<Ball>& balls, int y_samples = 5) {
  double best = 0.0;
  for (const Ball& b : balls)
    for (int k = 0; k < y_samples; ++k) {
      const double y = b.center[0] + b.radius * (y_samples == 1 ? 0.0 : -0.9 + 1.8 * k / (y_samples - 1));
      best = std::max(best, b.radius * b.radius * lemma4b_inner(lambda, b, y));
    }
  return best;
}

inline FamilyStability lemma4b_stability(double lambda) {
  FamilyStability s;
  s.base = lemma4b_family_value(lambda, admissible_family(1, base_centers()));
  s.extended = lemma4b_family_value(lambda, admissible_family(1, extended_centers()));
  s.halved = lemma4b_family_value(lambda, admissible_family(1, base_centers(), 0.25));
  s.stable = std::isfinite(s.base) && s.extended <= 1.5 * s.base && s.halved <= 2.0 * s.base;
  return s;
}

}  // namespace invgauss
