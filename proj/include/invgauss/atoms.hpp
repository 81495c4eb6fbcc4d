#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "invgauss/errors.hpp"
#include "invgauss/geometry.hpp"
#include "invgauss/quadrature.hpp"
#include "invgauss/spectral.hpp"

namespace invgauss {

using Evaluator = std::function<double(const Point&)>;

// Smooth function compactly supported in a ball, with zero gamma_{-1} mean.
struct BumpFunction {
  Ball support;
  Evaluator evaluator;

  double operator()(const Point& x) const { return evaluator(x); }
};

struct Hemisphere {};
struct CubeSign {
  double xi;
};
struct Generated {
  std::shared_ptr<const BumpFunction> psi;
  double lambda;
  double scale;  // a = scale * (A + lambda) psi
};
using AtomKind = std::variant<Hemisphere, CubeSign, Generated>;

// An atom is stored through `scaled(y) = a(y) e^{shift}` so that atoms far
// from the origin (where gamma_{-1} is huge and a is tiny) stay representable.
struct Atom {
  std::variant<Ball, Cube> support;
  std::optional<double> lambda_class;
  AtomKind kind;
  Evaluator scaled;
  double shift = 0.0;
  std::vector<Region> pieces;  // the support cut into pieces on which a is smooth
  double measure_scaled = 0.0;  // gamma_{-1}(support) e^{-shift}

  std::size_t dim() const {
    return std::visit([](const auto& s) { return s.center.size(); }, support);
  }
  double operator()(const Point& y) const { return scaled(y) * std::exp(-shift); }
  double support_measure() const { return measure_scaled * std::exp(shift); }
};

// gamma_{-1}(B(0, r)) by the radial integral.
inline double centered_ball_gamma_measure(std::size_t n, double r, const QuadratureConfig& cfg = {}) {
  const double dn = double(n);
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * dn) / std::tgamma(0.5 * dn);
  QuadratureConfig c = cfg;
  c.rel_tol = std::min(cfg.rel_tol, 1e-12);
  const double radial = integrate([&](double s) { return std::pow(s, dn - 1.0) * std::exp(s * s); }, 0.0, r, c).real();
  return std::pow(std::numbers::pi, 0.5 * dn) * sphere * radial;
}

// a = gamma_{-1}(B)^{-1} (chi_{E+} - chi_{E-}) on B(0,1), split by the sign of y_n.
inline Atom hemisphere_atom(std::size_t n) {
  if (n < 1) throw DomainError("hemisphere_atom: n must be at least 1");
  const double g = centered_ball_gamma_measure(n, 1.0);
  Atom a;
  a.support = Ball{Point(n, 0.0), 1.0};
  a.kind = Hemisphere{};
  a.measure_scaled = g;
  const double v = 1.0 / g;
  a.scaled = [v, n](const Point& y) {
    if (norm2(y) > 1.0) return 0.0;
    return y[n - 1] >= 0.0 ? v : -v;
  };
  const Point c(n, 0.0);
  a.pieces = {HalfBallRegion{c, 1.0, int(n) - 1, true}, HalfBallRegion{c, 1.0, int(n) - 1, false}};
  return a;
}

// Q(xi): centre (xi, 0, ..., 0), side 2/xi; a = -gamma_{-1}(Q)^{-1} (chi_{Q+} - chi_{Q-}) split by the sign of y_2.
inline Atom cube_atom(double xi, std::size_t n) {
  if (n < 2) throw DomainError("cube_atom: needs n >= 2");
  if (!(xi >= 2.0)) throw AdmissibilityError("cube_atom: Q(xi) is admissible only for xi >= 2");
  Point c(n, 0.0);
  c[0] = xi;
  const double h = 1.0 / xi;
  Atom a;
  a.support = Cube{c, h};
  a.kind = CubeSign{xi};
  a.shift = xi * xi;
  QuadratureConfig q;
  q.rel_tol = 1e-12;
  a.measure_scaled = cube_gamma_measure_scaled(Cube{c, h}, q);
  const double v = 1.0 / a.measure_scaled;
  a.scaled = [v, c, h](const Point& y) {
    for (std::size_t d = 0; d < y.size(); ++d)
      if (std::abs(y[d] - c[d]) > h) return 0.0;
    return y[1] >= 0.0 ? -v : v;
  };
  Point lo(n), hi(n);
  for (std::size_t d = 0; d < n; ++d) {
    lo[d] = c[d] - h;
    hi[d] = c[d] + h;
  }
  Point mid_lo = lo, mid_hi = hi;
  mid_lo[1] = 0.0;
  mid_hi[1] = 0.0;
  a.pieces = {BoxRegion{mid_lo, hi}, BoxRegion{lo, mid_hi}};
  return a;
}

// gamma_{-1}(Q)^{-1} int_{Q+} y_2 dgamma_{-1} for the cube Q(xi).
inline double cube_upper_moment(double xi, const QuadratureConfig& cfg = {}) {
  if (!(xi >= 2.0)) throw AdmissibilityError("cube_upper_moment: xi must be at least 2");
  // The density factorizes; only the y_2 factor differs between numerator and denominator.
  const double h = 1.0 / xi;
  QuadratureConfig c = cfg;
  c.rel_tol = std::min(cfg.rel_tol, 1e-12);
  const double num = integrate([](double s) { return s * std::exp(s * s); }, 0.0, h, c).real();
  const double den = integrate([](double s) { return std::exp(s * s); }, -h, h, c).real();
  return num / den;
}

namespace detail {
inline double smooth_bump(double s2) { return s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0; }
}  // namespace detail

// psi_0(x) = ((x - c).sigma0 / r) b(x) - kappa b(x), b(x) = exp(-1/(1 - |x - c|^2/r^2)),
// with kappa chosen so that the gamma_{-1} mean vanishes.
inline BumpFunction default_bump(const Ball& ball, const Point& sigma0, const QuadratureConfig& cfg = {}) {
  check_dims(ball.center, sigma0);
  if (std::abs(norm(sigma0) - 1.0) > 1e-12) throw DomainError("default_bump: sigma0 must be a unit vector");
  const Point c = ball.center;
  const double r = ball.radius;
  auto odd = [c, r, sigma0](const Point& x) {
    double s2 = 0.0, ip = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double u = (x[d] - c[d]) / r;
      s2 += u * u;
      ip += u * sigma0[d];
    }
    return ip * detail::smooth_bump(s2);
  };
  auto even = [c, r](const Point& x) {
    double s2 = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) s2 += (x[d] - c[d]) * (x[d] - c[d]) / (r * r);
    return detail::smooth_bump(s2);
  };
  const double c2 = norm2(c);
  QuadratureConfig q = cfg;
  q.rel_tol = std::min(cfg.rel_tol, 1e-12);
  q.abs_tol = 1e-300;
  RegionOptions opt;
  opt.max_order = 1024;
  const BallRegion reg{c, r};
  const double m_even = integrate_region([&](const Point& x) { return even(x) * std::exp(norm2(x) - c2); }, reg, q, opt).real();
  q.abs_tol = 1e-13 * m_even;
  const double m_odd = integrate_region([&](const Point& x) { return odd(x) * std::exp(norm2(x) - c2); }, reg, q, opt).real();
  const double kappa = m_odd / m_even;
  return BumpFunction{ball, [odd, even, kappa](const Point& x) { return odd(x) - kappa * even(x); }};
}

// (A + lambda) psi by finite differences.
inline double apply_shifted_A(const BumpFunction& psi, double lambda, const Point& x, double h) {
  return apply_A_fd([&](const Point& p) { return psi(p); }, x, h, true) + lambda * psi(x);
}

// a = (A + lambda) psi normalised so that ||a||_{L^2(gamma_{-1})} = gamma_{-1}(B)^{-1/2}.
inline Atom generated_atom(const BumpFunction& psi, double lambda, const QuadratureConfig& cfg = {}) {
  if (!(lambda >= 0.0)) throw DomainError("generated_atom: lambda must be non-negative");
  const Ball& b = psi.support;
  if (!b.admissible(1.0)) throw AdmissibilityError("generated_atom: support ball is not admissible");
  const std::size_t n = b.center.size();
  const double h = 1e-3 * b.radius;
  const double c2 = norm2(b.center);
  QuadratureConfig q = cfg;
  q.rel_tol = std::min(cfg.rel_tol, 1e-10);
  q.abs_tol = 1e-300;
  RegionOptions opt;
  opt.max_order = 1024;
  const BallRegion reg{b.center, b.radius};
  auto shared = std::make_shared<const BumpFunction>(psi);
  auto raw = [shared, lambda, h](const Point& x) { return apply_shifted_A(*shared, lambda, x, h); };
  // Norms are computed against gamma_{-1} e^{-|c|^2}.
  const double img2 = integrate_region([&](const Point& x) { const double v = raw(x); return v * v * std::exp(norm2(x) - c2); }, reg, q, opt).real();
  const double pre2 = integrate_region([&](const Point& x) { const double v = psi(x); return v * v * std::exp(norm2(x) - c2); }, reg, q, opt).real();
  if (!(img2 > 1e-20 * std::max(pre2, 1e-300)) || !(pre2 > 0.0)) throw DegenerateAtom("generated_atom: (A + lambda) psi vanishes");
  const double pin = std::pow(std::numbers::pi, 0.5 * double(n));
  const double gB = c2 == 0.0 ? centered_ball_gamma_measure(n, b.radius, q) : ball_gamma_measure_scaled(b, q);
  // ||a||^2 = scale^2 pin img2 e^{|c|^2} must equal 1 / (gB e^{|c|^2}).
  const double scale_scaled = 1.0 / std::sqrt(gB * pin * img2);
  Atom a;
  a.support = b;
  a.lambda_class = lambda;
  a.shift = c2;
  a.measure_scaled = gB;
  a.kind = Generated{shared, lambda, scale_scaled * std::exp(-c2)};
  a.scaled = [raw, scale_scaled](const Point& x) { return scale_scaled * raw(x); };
  a.pieces = {reg};
  return a;
}

// The preimage (A + lambda)^{-1} a of a generated atom.
inline double generated_preimage(const Atom& a, const Point& x) {
  const auto* g = std::get_if<Generated>(&a.kind);
  if (!g) throw DomainError("generated_preimage: atom was not generated from a bump");
  return g->scale * (*g->psi)(x);
}

// ---- Special functions ----

namespace detail {
// 2 int_0^inf s^{k} e^{-s^2 + 2 b s - |y|^2} w(s) ds with k = n + lambda - 1 (t = s^2).
template <class W>
double psi_like(double lambda, const Point& sigma, const Point& y, W&& weight, bool log_singular, const QuadratureConfig& cfg) {
  check_dims(sigma, y);
  if (std::abs(norm(sigma) - 1.0) > 1e-10) throw DomainError("special function: sigma must be a unit vector");
  if (!(lambda >= 0.0)) throw DomainError("special function: lambda must be non-negative");
  const double k = double(y.size()) + lambda - 1.0;
  const double b = dot(sigma, y), y2 = norm2(y);
  auto f = [&](double s) {
    if (s <= 0.0) return k == 0.0 ? 2.0 * weight(s) * std::exp(-y2) : 0.0;
    return 2.0 * weight(s) * std::exp(k * std::log(s) - s * s + 2.0 * b * s - y2);
  };
  QuadratureConfig c = cfg;
  c.rel_tol = std::min(cfg.rel_tol, 1e-12);
  c.abs_tol = std::min(cfg.abs_tol, 1e-15);
  // The integrand peaks near s = b and has Gaussian width 1.
  // Splitting at s = 1 keeps each piece of sign-definite weight.
  const double peak = std::max(1.0, b + 1.0);
  c.endpoint_policy = log_singular ? EndpointPolicy::LogSingularLeft : EndpointPolicy::None;
  const double head = integrate(f, 0.0, 1.0, c).real();
  c.endpoint_policy = EndpointPolicy::None;
  const double mid = peak > 1.0 ? integrate(f, 1.0, peak, c).real() : 0.0;
  const double tail = integrate(f, peak, std::numeric_limits<double>::infinity(), c).real();
  return head + mid + tail;
}
}  // namespace detail

// Psi_{lambda,sigma}(y) = int_0^inf e^{-t} t^{(n+lambda-2)/2} e^{2(sigma,y) sqrt t - |y|^2} dt.
inline double psi_special(double lambda, const Point& sigma, const Point& y, const QuadratureConfig& cfg = {}) {
  return detail::psi_like(lambda, sigma, y, [](double) { return 1.0; }, false, cfg);
}

// Phi_{lambda,sigma}: the same integral with the extra weight log(1/t).
inline double phi_special(double lambda, const Point& sigma, const Point& y, const QuadratureConfig& cfg = {}) {
  return detail::psi_like(lambda, sigma, y, [](double s) { return s > 0.0 ? -2.0 * std::log(s) : 0.0; }, true, cfg);
}

// ---- Pairings ----

// int_region f g dgamma_{-1}.
template <class F, class G>
double pairing(F&& f, G&& g, const Region& region, const QuadratureConfig& cfg = {}, const RegionOptions& opt = {}) {
  return integrate_region([&](const Point& x) { return f(x) * g(x) * gamma_minus1_density(x); }, region, cfg, opt).real();
}

// int a g dgamma_{-1} over the support of an atom, one smooth piece at a time.
template <class G>
double pairing(const Atom& a, G&& g, const QuadratureConfig& cfg = {}, const RegionOptions& opt = {}) {
  const double pin = std::pow(std::numbers::pi, 0.5 * double(a.dim()));
  double s = 0.0;
  for (const Region& r : a.pieces)
    s += integrate_region([&](const Point& y) { return a.scaled(y) * g(y) * pin * std::exp(norm2(y) - a.shift); }, r, cfg, opt).real();
  return s;
}

// Nodes y_k and weights w_k with sum_k w_k g(y_k) ~ e^{shift} int g(y) a(y) dy.
inline Cubature atom_cubature(const Atom& a, int order) {
  Cubature out;
  for (const Region& r : a.pieces) {
    Cubature q = region_cubature(r, order);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      out.weights.push_back(q.weights[i] * a.scaled(q.nodes[i]));
      out.nodes.push_back(std::move(q.nodes[i]));
    }
  }
  return out;
}

// Unit vectors: +-1 for n = 1, equispaced on the circle for n = 2, a Fibonacci net otherwise.
inline std::vector<Point> sigma_net(std::size_t n, int count) {
  std::vector<Point> out;
  if (n == 1) return {{1.0}, {-1.0}};
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / count;
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count, rr = std::sqrt(1.0 - z * z);
    Point p(n, 0.0);
    p[0] = rr * std::cos(ga * k);
    p[1] = rr * std::sin(ga * k);
    p[2] = z;
    out.push_back(p);
  }
  return out;
}

struct AtomReport {
  double l2_norm2 = 0.0;  // ||a||^2 gamma_{-1}(support)
  double mean = 0.0;      // int a dgamma_{-1} / ||a||_1
  double l1_norm = 0.0;
  double max_cancellation = 0.0;  // max over the test family of |(a, Psi_{lambda,sigma})|
  bool size_ok = false, mean_ok = false, cancel_ok = true;
  bool ok() const { return size_ok && mean_ok && cancel_ok; }
};

// Size, mean-zero and (for X^1_lambda atoms) cancellation against Psi_{lambda,sigma} on a sigma-net.
inline AtomReport check_atom(const Atom& a, int sigma_count = 8, double cancel_tol = 1e-6, const QuadratureConfig& cfg = {}) {
  AtomReport r;
  QuadratureConfig q = cfg;
  q.rel_tol = std::min(cfg.rel_tol, 1e-10);
  RegionOptions opt;
  opt.max_order = 1024;
  const double pin = std::pow(std::numbers::pi, 0.5 * double(a.dim()));
  auto w = [&](const Point& y) { return pin * std::exp(norm2(y) - a.shift); };
  double m = 0.0, l1 = 0.0, l2 = 0.0;
  QuadratureConfig q1 = q;
  q1.rel_tol = 1e-4;
  for (const Region& reg : a.pieces) {
    l1 += integrate_region([&](const Point& y) { return std::abs(a.scaled(y)) * w(y); }, reg, q1, opt).real();
    l2 += integrate_region([&](const Point& y) { const double v = a.scaled(y); return v * v * w(y); }, reg, q, opt).real();
  }
  q.abs_tol = 1e-11 * l1;
  for (const Region& reg : a.pieces) m += integrate_region([&](const Point& y) { return a.scaled(y) * w(y); }, reg, q, opt).real();
  // With a = scaled e^{-shift}: ||a||^2 gamma(support) = l2 * measure_scaled.
  r.l2_norm2 = l2 * a.measure_scaled;
  r.l1_norm = l1;
  r.mean = l1 > 0.0 ? m / l1 : 0.0;
  r.size_ok = r.l2_norm2 <= 1.0 + 1e-8;
  r.mean_ok = std::abs(r.mean) <= 1e-10;
  if (a.lambda_class) {
    q.abs_tol = 1e-3 * cancel_tol;
    for (const Point& s : sigma_net(a.dim(), sigma_count)) {
      const double p = pairing(a, [&](const Point& y) { return psi_special(*a.lambda_class, s, y); }, q, opt);
      r.max_cancellation = std::max(r.max_cancellation, std::abs(p));
    }
    r.cancel_ok = r.max_cancellation <= cancel_tol;
  }
  return r;
}

}  // namespace invgauss
