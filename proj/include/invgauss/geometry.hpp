#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include "invgauss/errors.hpp"
#include "invgauss/quadrature.hpp"

namespace invgauss {

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline Point operator+(const Point& a, const Point& b) {
  Point c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}
inline Point operator-(const Point& a, const Point& b) {
  Point c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return c;
}
inline Point operator*(double s, const Point& a) {
  Point c(a);
  for (double& v : c) v *= s;
  return c;
}

inline double dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline void check_dims(const Point& x, const Point& y) {
  if (x.size() != y.size() || x.empty()) throw DomainError("point dimensions do not match");
}

// Density of the inverse Gauss measure, pi^{n/2} e^{|x|^2}.
inline double gamma_minus1_density(const Point& x) {
  const double e = norm2(x);
  if (e > 700.0) throw OverflowError("gamma_minus1_density: exp(|x|^2) overflows");
  return std::pow(std::numbers::pi, 0.5 * double(x.size())) * std::exp(e);
}

inline double log_gamma_minus1_density(const Point& x) {
  return 0.5 * double(x.size()) * std::log(std::numbers::pi) + norm2(x);
}

// Normalized Gaussian density pi^{-n/2} e^{-|x|^2}.
inline double gauss_density(const Point& x) {
  return std::pow(std::numbers::pi, -0.5 * double(x.size())) * std::exp(-norm2(x));
}

struct PairGeometry {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 1.0;
  double theta = 0.0;
  double thetaPrime = 0.0;
  bool beta_infinite = false;
};

namespace detail {
inline double safe_angle(double ip, double na, double nb) {
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::acos(std::clamp(ip / (na * nb), -1.0, 1.0));
}
}  // namespace detail

inline PairGeometry pair_geometry(const Point& x, const Point& y) {
  check_dims(x, y);
  PairGeometry g;
  const double nx = norm(x), ny = norm(y);
  const Point d = x - y, s = x + y;
  const double nd = norm(d), ns = norm(s);
  g.alpha = nd * ns;
  if (ns > 0.0) g.beta = nd / ns;
  else if (nd > 0.0) {
    g.beta = std::numeric_limits<double>::infinity();
    g.beta_infinite = true;
  }
  g.eta = std::exp(0.5 * (nx * nx - ny * ny - g.alpha));
  g.theta = detail::safe_angle(dot(x, y), nx, ny);
  // Angle between y - x and y + x.
  g.thetaPrime = detail::safe_angle(-dot(d, s), nd, ns);
  return g;
}

struct Ball {
  Point center;
  double radius;

  bool admissible(double s) const {
    const double c = norm(center);
    return radius <= s * std::min(1.0, c > 0.0 ? 1.0 / c : std::numeric_limits<double>::infinity());
  }
};

// Axis-parallel cube given by its center and half side.
struct Cube {
  Point center;
  double half_side;
};

struct LocalN {
  double delta;
};
struct Global {};
using RegionTag = std::variant<LocalN, Global>;

inline bool in_local(const Point& x, const Point& y, double delta) {
  return dist(x, y) <= delta / (1.0 + norm(x) + norm(y));
}

inline bool in_region(const Point& x, const Point& y, const RegionTag& tag) {
  check_dims(x, y);
  if (const auto* l = std::get_if<LocalN>(&tag)) return in_local(x, y, l->delta);
  return !in_local(x, y, 1.0);
}

inline double tau(double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("tau: s must lie in (0,1)");
  return std::log1p(s) - std::log1p(-s);
}

inline double tau_inverse(double t) {
  if (!(t > 0.0)) throw DomainError("tau_inverse: t must be positive");
  return std::tanh(0.5 * t);
}

inline double varphi(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("varphi: sigma must be positive");
  return (sigma - 1.0) * (sigma - 1.0) / sigma;
}

// The two roots of alpha * varphi(sigma) = t, sigma_minus <= 1 <= sigma_plus.
inline std::pair<double, double> sigma_branches(double t, double alpha) {
  if (!(t >= 0.0) || !(alpha > 0.0)) throw DomainError("sigma_branches: need t >= 0, alpha > 0");
  const double sp = 1.0 + (t + std::sqrt(t * t + 4.0 * alpha * t)) / (2.0 * alpha);
  return {1.0 / sp, sp};
}

// gamma_{-1}(B) * e^{-|c_B|^2}; finite for any center.
inline double ball_gamma_measure_scaled(const Ball& b, const QuadratureConfig& quad = {}) {
  const std::size_t n = b.center.size();
  if (!(b.radius > 0.0) || n == 0) throw DomainError("ball_gamma_measure: invalid ball");
  const double c2 = norm2(b.center);
  const double pin = std::pow(std::numbers::pi, 0.5 * double(n));
  if (n == 1) {
    const double a = b.center[0] - b.radius, e = b.center[0] + b.radius;
    QuadratureConfig c = quad;
    return pin * integrate([&](double x) { return std::exp(x * x - c2); }, a, e, c).real();
  }
  auto f = [&](const Point& x) { return std::exp(norm2(x) - c2); };
  RegionOptions opt;
  opt.max_order = 128;
  return pin * integrate_region(f, BallRegion{b.center, b.radius}, quad, opt).real();
}

inline double ball_gamma_measure(const Ball& b, const QuadratureConfig& quad = {}) {
  const double c2 = norm2(b.center);
  if (c2 > 700.0) throw OverflowError("ball_gamma_measure: value overflows; use the scaled variant");
  return ball_gamma_measure_scaled(b, quad) * std::exp(c2);
}

// Euclidean volume of the unit ball in R^n.
inline double unit_ball_volume(std::size_t n) {
  return std::pow(std::numbers::pi, 0.5 * double(n)) / std::tgamma(0.5 * double(n) + 1.0);
}

// gamma_{-1}(Q) * e^{-|c_Q|^2} for an axis-parallel cube (the density factorizes).
inline double cube_gamma_measure_scaled(const Cube& q, const QuadratureConfig& quad = {}) {
  double prod = std::pow(std::numbers::pi, 0.5 * double(q.center.size()));
  for (double c : q.center) {
    const double a = c - q.half_side, b = c + q.half_side;
    prod *= integrate([&](double x) { return std::exp(x * x - c * c); }, a, b, quad).real();
  }
  return prod;
}

}  // namespace invgauss
