#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "invgauss/errors.hpp"
#include "invgauss/geometry.hpp"
#include "invgauss/quadrature.hpp"
#include "invgauss/special.hpp"

namespace invgauss {

// Physicists' Hermite polynomial by the three-term recurrence.
inline double hermite(int k, double x) {
  if (k < 0) throw DomainError("hermite: degree must be non-negative");
  double h0 = 1.0, h1 = 2.0 * x;
  if (k == 0) return h0;
  for (int j = 1; j < k; ++j) {
    const double h2 = 2.0 * x * h1 - 2.0 * j * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// H_k(x) gamma(x) in one dimension, gamma = pi^{-1/2} e^{-x^2}.
inline double hermite_gamma(int k, double x) { return hermite(k, x) * std::exp(-x * x) / std::sqrt(std::numbers::pi); }

// Tensor eigenfunction prod_d H_{k_d}(x_d) gamma(x); eigenvalue |k| + n.
inline double eigenfunction(const std::vector<int>& k, const Point& x) {
  double v = gauss_density(x);
  for (std::size_t d = 0; d < x.size(); ++d) v *= hermite(k[d], x[d]);
  return v;
}

inline double eigenvalue(const std::vector<int>& k) {
  double s = double(k.size());
  for (int v : k) s += v;
  return s;
}

namespace detail {
template <class F>
double apply_A_central(F& f, const Point& x, double h) {
  const double f0 = f(x);
  double lap = 0.0, drift = 0.0;
  Point p = x;
  for (std::size_t d = 0; d < x.size(); ++d) {
    p[d] = x[d] + h;
    const double fp = f(p);
    p[d] = x[d] - h;
    const double fm = f(p);
    p[d] = x[d];
    lap += (fp - 2.0 * f0 + fm) / (h * h);
    drift += x[d] * (fp - fm) / (2.0 * h);
  }
  return -0.5 * lap - drift;
}
}  // namespace detail

// Central-difference approximation of -1/2 Laplacian f - x . grad f.
template <class F>
double apply_A_fd(F&& f, const Point& x, double h = 1e-3, bool richardson = false) {
  if (!(h > 0.0)) throw DomainError("apply_A_fd: step must be positive");
  const double a = detail::apply_A_central(f, x, h);
  if (!richardson) return a;
  const double b = detail::apply_A_central(f, x, 0.5 * h);
  return (4.0 * b - a) / 3.0;
}

// R_lambda (H_k gamma) = coefficient * H_{k+1} gamma in one dimension.
inline std::pair<double, int> riesz_on_eigenfunction(int k, double lambda, int n = 1) {
  if (k < 0 || lambda < 0.0) throw DomainError("riesz_on_eigenfunction: need k >= 0, lambda >= 0");
  const double ev = double(k + n) + lambda;
  if (!(ev > 0.0)) throw DomainError("riesz_on_eigenfunction: zero eigenvalue");
  return {-1.0 / std::sqrt(ev), k + 1};
}

enum class Shift { None, MinusIdentity };

struct MultiplierSpec {
  double lambda;
  double mu;
  Shift shift = Shift::None;
};

// G_{lambda,mu}(z) = (z + lambda) / (z + mu).
inline double multiplier_eval(const MultiplierSpec& m, double eigenvalue) {
  const double z = m.shift == Shift::MinusIdentity ? eigenvalue - 1.0 : eigenvalue;
  const double den = z + m.mu;
  if (den == 0.0) throw DomainError("multiplier_eval: pole");
  return (z + m.lambda) / den;
}

struct IntertwiningSides {
  double lhs, rhs;
};

// (R_lambda) G_{mu,lambda}(A) and G_{mu,lambda}(A - I) (R_lambda) on H_k gamma, n = 1,
// both as coefficients of H_{k+1} gamma.
inline IntertwiningSides intertwining_sides(int k, double lambda, double mu) {
  const auto [c, deg] = riesz_on_eigenfunction(k, lambda);
  const double lhs = multiplier_eval({mu, lambda, Shift::None}, double(k + 1)) * c;
  const double rhs = multiplier_eval({mu, lambda, Shift::MinusIdentity}, double(deg + 1)) * c;
  return {lhs, rhs};
}

inline bool check_intertwining(int k, double lambda, double mu) {
  const auto s = intertwining_sides(k, lambda, mu);
  return std::abs(s.lhs - s.rhs) <= 1e-14 * std::max(1.0, std::abs(s.lhs));
}

// (1/Gamma(z)) int_0^inf e^{-lambda t} t^{z-1} e^{-(k+n) t} dt - (k+n+lambda)^{-z}.
inline cplx subordination_eigencheck(cplx z, double lambda, int k, int n = 1, const QuadratureConfig& cfg = {}) {
  if (!(z.real() > 0.0)) throw DomainError("subordination_eigencheck: need Re z > 0");
  const double a = double(k + n) + lambda;
  auto f = [&](double t) -> cplx {
    if (t <= 0.0) return 0.0;
    return std::exp((z - 1.0) * std::log(t) - a * t);
  };
  QuadratureConfig c = cfg;
  c.rel_tol = std::min(cfg.rel_tol, 1e-11);
  c.abs_tol = std::min(cfg.abs_tol, 1e-13);
  c.endpoint_policy = EndpointPolicy::LogSingularLeft;
  // Scale time so that the exponential decays at unit rate.
  auto g = [&](double s) { return f(s / a) / a; };
  const cplx head = integrate(g, 0.0, 1.0, c).value;
  c.endpoint_policy = EndpointPolicy::None;
  const cplx tail = integrate(g, 1.0, std::numeric_limits<double>::infinity(), c).value;
  return (head + tail) * rgamma_c(z) - std::exp(-z * std::log(a));
}

}  // namespace invgauss
