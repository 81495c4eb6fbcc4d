#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <variant>

#include "invgauss/errors.hpp"
#include "invgauss/geometry.hpp"
#include "invgauss/quadrature.hpp"
#include "invgauss/special.hpp"

namespace invgauss {

struct Heat {
  double t;
};
struct HeatMaximal {};
struct ComplexPower {
  cplx z;
  double lambda;
};
struct ImaginaryPower {
  double u;
  double lambda;
};
struct RieszComponent {
  int j;  // 1-based component index
  double lambda;
};
struct MajorantKbar {};
struct MajorantKlambda {
  double lambda;
};
struct MajorantKprime {
  double lambda;
};
struct LocalKmunu {
  double mu, nu;
};

using KernelSpec = std::variant<Heat, HeatMaximal, ComplexPower, ImaginaryPower, RieszComponent, MajorantKbar,
                                MajorantKlambda, MajorantKprime, LocalKmunu>;

enum class Measure { Lebesgue, Gamma };

inline constexpr double kDiagonalGuard = 1e-6;

struct PhiPsiVectors {
  Point phi, psi;
};

inline PhiPsiVectors phi_psi(double r, const Point& x, const Point& y) {
  check_dims(x, y);
  if (!(r > 0.0 && r < 1.0)) throw DomainError("phi_psi: r must lie in (0,1)");
  const double s = 1.0 / std::sqrt(1.0 - r * r);
  PhiPsiVectors v{Point(x.size()), Point(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    v.phi[i] = (r * y[i] - x[i]) * s;
    v.psi[i] = (r * x[i] - y[i]) * s;
  }
  return v;
}

// Scalars of a pair (x, y) from which every r-integrand is assembled.
// |x - r y| and |r x - y| are summed componentwise: from x - r y when r is
// small and from (x - y) + (1 - r) y when r is close to 1, so that neither
// large |y| nor x close to y loses precision.
struct PairScalars {
  int n;
  double X2, Y2, D2, DX, DY;
  Point x, y, d;

  PairScalars(const Point& x_, const Point& y_) : n(int(x_.size())), x(x_), y(y_), d(x_.size()) {
    check_dims(x, y);
    X2 = norm2(x);
    Y2 = norm2(y);
    D2 = DX = DY = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      d[i] = x[i] - y[i];
      D2 += d[i] * d[i];
      DX += d[i] * x[i];
      DY += d[i] * y[i];
    }
  }
  // |x - r y|^2 with omr = 1 - r.
  double xmry2(double omr) const {
    double s = 0.0;
    if (omr > 0.5) {
      const double r = 1.0 - omr;
      for (int i = 0; i < n; ++i) s += (x[i] - r * y[i]) * (x[i] - r * y[i]);
    } else {
      for (int i = 0; i < n; ++i) s += (d[i] + omr * y[i]) * (d[i] + omr * y[i]);
    }
    return s;
  }
  // |r x - y|^2.
  double rxmy2(double omr) const {
    double s = 0.0;
    if (omr > 0.5) {
      const double r = 1.0 - omr;
      for (int i = 0; i < n; ++i) s += (r * x[i] - y[i]) * (r * x[i] - y[i]);
    } else {
      for (int i = 0; i < n; ++i) s += (d[i] - omr * x[i]) * (d[i] - omr * x[i]);
    }
    return s;
  }
  // Where the mass of e^{-|x - r y|^2/(1-r^2)} (resp. |r x - y|) sits in r:
  // the minimiser, or the Gaussian width when the minimiser is near 0.
  double peak_phi() const { return Y2 > 0.0 ? std::max(0.5 * (X2 + Y2 - D2) / Y2, std::min(0.5, 1.0 / std::sqrt(Y2))) : 0.0; }
  double peak_psi() const { return X2 > 0.0 ? std::max(0.5 * (X2 + Y2 - D2) / X2, std::min(0.5, 1.0 / std::sqrt(X2))) : 0.0; }
};

namespace detail {

inline double one_minus_r2(double r, double omr) { return omr * (1.0 + r); }

// Integral over r in (0,1), split at 3/4.  The left piece uses r = 3/4 v^2,
// the right piece s = -log(1 - r) so that concentration at r -> 1 becomes a
// bump in s.  Both pieces live on one parameter interval [0, 2] and share a
// single adaptive error budget; r_hint (a likely peak) seeds extra breakpoints.
// g(r, 1 - r) may return double or complex.
template <class G>
Estimate r_integral(G&& g, const QuadratureConfig& cfg, double r_hint = -1.0) {
  const double s0 = std::log(4.0);
  auto h = [&](double u) -> cplx {
    if (u < 1.0) {
      const double r = 0.75 * u * u;
      if (r <= 0.0) return 0.0;
      return to_cplx(g(r, 1.0 - r)) * (1.5 * u);
    }
    const double w = 1.0 - (u - 1.0);
    if (w <= 0.0) return 0.0;
    const double omr = std::exp(-(s0 + (u - 1.0) / w));
    if (omr < 1e-300) return 0.0;
    return to_cplx(g(1.0 - omr, omr)) * (omr / (w * w));
  };
  std::vector<double> breaks{0.0, 1.0, 2.0};
  if (r_hint > 0.0 && r_hint < 0.75) {
    const double uh = std::sqrt(r_hint / 0.75);
    for (double f : {0.25, 0.5, 1.0, 1.5, 2.0})
      if (f * uh < 1.0) breaks.push_back(f * uh);
  } else if (r_hint >= 0.75 && r_hint < 1.0) {
    const double v = -std::log1p(-r_hint) - s0;
    breaks.push_back(1.0 + v / (1.0 + v));
  }
  std::sort(breaks.begin(), breaks.end());
  Estimate e = adapt_from(h, breaks, cfg);
  if (!e.converged) throw NonConvergence("r-integral did not converge", e.value, e.err);
  return e;
}

// -log r, accurate both for r near 0 and for r near 1.
inline double neg_log_r(double r, double omr) { return r < 0.5 ? -std::log(r) : -std::log1p(-omr); }

// log of int_0^1 exp(L(r, 1-r)) dr for a real log-integrand, with the maximum
// factored out so that very small kernels do not underflow.
template <class L>
double log_r_integral(L&& logf, const QuadratureConfig& cfg, double r_hint = -1.0) {
  double peak = -std::numeric_limits<double>::infinity();
  if (r_hint > 0.0 && r_hint < 1.0) peak = logf(r_hint, 1.0 - r_hint);
  for (int i = 1; i < 48; ++i) {
    const double r = 0.75 * i / 48.0;
    peak = std::max(peak, logf(r, 1.0 - r));
  }
  for (int i = 0; i < 64; ++i) {
    const double omr = 0.25 * std::exp(-0.5 * i);
    peak = std::max(peak, logf(1.0 - omr, omr));
  }
  if (!std::isfinite(peak)) return -std::numeric_limits<double>::infinity();
  QuadratureConfig c = cfg;
  c.abs_tol = 0.0;
  const Estimate e = r_integral([&](double r, double omr) { return std::exp(logf(r, omr) - peak); }, c, r_hint);
  return peak + std::log(e.real());
}

inline void guard_diagonal(const Point& x, const Point& y) {
  if (dist(x, y) < kDiagonalGuard) throw DiagonalProximity("kernel evaluation refused within 1e-6 of the diagonal");
}

}  // namespace detail

// ---- Mehler kernels ----

// Mehler kernel with respect to gamma_{-1}.
inline double mehler_h(double t, const Point& x, const Point& y) {
  check_dims(x, y);
  if (!(t > 0.0)) throw DomainError("mehler_h: t must be positive");
  const double n = double(x.size());
  const double q = std::exp(-t);
  const double s2 = norm2(x + y), d2 = norm2(x - y);
  return std::exp(-n * t - s2 / (2.0 * (1.0 + q)) - d2 / (-2.0 * std::expm1(-t))) /
         (std::pow(std::numbers::pi, n) * std::pow(-std::expm1(-2.0 * t), 0.5 * n));
}

// log of the Mehler kernel with respect to Lebesgue measure.
inline double log_mehler_H(double t, const PairScalars& p) {
  const double omq = -std::expm1(-t);
  const double den = -std::expm1(-2.0 * t);
  return -p.n * t - 0.5 * p.n * std::log(std::numbers::pi * den) - p.xmry2(omq) / den;
}

inline double mehler_H(double t, const Point& x, const Point& y) {
  if (!(t > 0.0)) throw DomainError("mehler_H: t must be positive");
  return std::exp(log_mehler_H(t, PairScalars(x, y)));
}

// log sup_t H_t(x, y): 200-point log grid in s = tanh(t/2), then golden section.
inline double log_maximal_H(const Point& x, const Point& y) {
  const PairScalars p(x, y);
  if (p.D2 == 0.0) return std::numeric_limits<double>::infinity();
  auto obj = [&](double s) { return log_mehler_H(tau(s), p); };
  constexpr int N = 200;
  const double lo = std::log(1e-10), hi = std::log(1.0 - 1e-12);
  double best = -std::numeric_limits<double>::infinity();
  int ib = 0;
  std::vector<double> grid(N);
  for (int i = 0; i < N; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * i / (N - 1));
    const double v = obj(grid[i]);
    if (v > best) {
      best = v;
      ib = i;
    }
  }
  double a = grid[std::max(0, ib - 1)], b = grid[std::min(N - 1, ib + 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = obj(c), fd = obj(d);
  for (int it = 0; it < 100 && (b - a) > 1e-14 * b; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = obj(d);
    }
  }
  return std::max({best, fc, fd});
}

inline double maximal_H(const Point& x, const Point& y) { return std::exp(log_maximal_H(x, y)); }

// ---- Global majorant ----

inline double phi_profile(const Point& x, const Point& y) {
  const PairGeometry g = pair_geometry(x, y);
  if (!(g.alpha > 0.0)) throw DomainError("phi_profile: alpha must be positive");
  const double n = double(x.size());
  const double base = std::pow(g.alpha, -0.5 * n);
  if (g.beta >= 1.0) return base;
  return base + std::pow(1.0 - g.beta, n);
}

inline double log_kbar(const Point& x, const Point& y) {
  if (!in_region(x, y, Global{})) return -std::numeric_limits<double>::infinity();
  const double n = double(x.size());
  const double X2 = norm2(x), Y2 = norm2(y);
  const double ns = norm(x + y), nd = norm(x - y);
  if (ns == 0.0) return -std::numeric_limits<double>::infinity();
  const double alpha = ns * nd;
  return -X2 + Y2 + 0.5 * n * std::log(ns / nd) + 0.5 * (X2 - Y2 - alpha) + std::log(phi_profile(x, y));
}

inline double kbar(const Point& x, const Point& y) { return std::exp(log_kbar(x, y)); }

// log K_lambda (Riesz majorant) and log K'_lambda (imaginary power majorant),
// both written in r = e^{-t}.
inline double log_majorant_klambda(double lambda, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  const PairScalars p(x, y);
  const double n = p.n;
  return detail::log_r_integral(
      [&](double r, double omr) {
        const double w = detail::one_minus_r2(r, omr);
        const double ph2 = p.xmry2(omr) / w;
        return (n + lambda - 1.0) * std::log(r) - 0.5 * (n + 2.0) * std::log(w) + 0.5 * std::log(ph2) - ph2;
      },
      cfg, p.peak_phi());
}

inline double log_majorant_kprime(double lambda, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  const PairScalars p(x, y);
  const double n = p.n;
  return detail::log_r_integral(
      [&](double r, double omr) {
        const double w = detail::one_minus_r2(r, omr);
        return (n + lambda - 1.0) * std::log(r) - 0.5 * (n + 2.0) * std::log(w) - p.xmry2(omr) / w;
      },
      cfg, p.peak_phi());
}

inline double majorant_klambda(double lambda, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  return std::exp(log_majorant_klambda(lambda, x, y, cfg));
}
inline double majorant_kprime(double lambda, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  return std::exp(log_majorant_kprime(lambda, x, y, cfg));
}

// ---- Complex powers ----

// (1/Gamma(-z)) int_0^inf e^{-lambda t} t^{-z-1} H_t(x,y) dt.
inline cplx complex_power_kernel(cplx z, double lambda, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  detail::guard_diagonal(x, y);
  const cplx c = rgamma_c(-z);
  if (c == 0.0) return 0.0;
  const PairScalars p(x, y);
  auto f = [&](double t) -> cplx {
    if (t <= 0.0) return 0.0;
    return std::exp((-z - 1.0) * std::log(t) - lambda * t + log_mehler_H(t, p));
  };
  const double t0 = std::min(1.0, p.D2);
  QuadratureConfig q = cfg;
  q.endpoint_policy = EndpointPolicy::None;
  const Estimate a = integrate(f, 0.0, t0, q);
  const Estimate b = integrate(f, t0, std::numeric_limits<double>::infinity(), q);
  return c * (a.value + b.value);
}

// int_0^inf e^{-lambda t} t^{-Re z - 1} H_t dt, the absolute integral behind K_z.
inline double complex_power_abs_integral(double re_z, double lambda, const Point& x, const Point& y,
                                         const QuadratureConfig& cfg = {}) {
  detail::guard_diagonal(x, y);
  const PairScalars p(x, y);
  auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp((-re_z - 1.0) * std::log(t) - lambda * t + log_mehler_H(t, p));
  };
  const double t0 = std::min(1.0, p.D2);
  QuadratureConfig q = cfg;
  q.endpoint_policy = EndpointPolicy::None;
  return integrate(f, 0.0, t0, q).real() + integrate(f, t0, std::numeric_limits<double>::infinity(), q).real();
}

// ---- Imaginary powers ----

namespace detail {
// int_0^1 r^{n+lambda-1} (-log r)^{-iu-1} (1-r^2)^{-n/2} e^{-Q(r)} dr with Q = |phi|^2 or |psi|^2.
inline cplx impow_r_integral(double u, double lambda, const PairScalars& p, bool use_psi, const QuadratureConfig& cfg) {
  const double n = p.n;
  return r_integral(
             [&](double r, double omr) -> cplx {
               const double w = one_minus_r2(r, omr);
               const double q = (use_psi ? p.rxmy2(omr) : p.xmry2(omr)) / w;
               const double mlr = neg_log_r(r, omr);
               const double mag = std::exp((n + lambda - 1.0) * std::log(r) - std::log(mlr) - 0.5 * n * std::log(w) - q);
               const double ph = -u * std::log(mlr);
               return cplx(mag * std::cos(ph), mag * std::sin(ph));
             },
             cfg, use_psi ? p.peak_psi() : p.peak_phi())
      .value;
}
}  // namespace detail

// Kernel of (A + lambda)^{iu}; the Gamma variant is with respect to gamma_{-1}.
inline cplx impow_kernel(double u, double lambda, const Point& x, const Point& y, Measure m = Measure::Lebesgue,
                         const QuadratureConfig& cfg = {}) {
  if (u == 0.0) throw DomainError("impow_kernel: u must be nonzero");
  detail::guard_diagonal(x, y);
  const PairScalars p(x, y);
  const double n = p.n;
  const cplx c = impow_constant(u);
  if (m == Measure::Lebesgue) return c * std::pow(std::numbers::pi, -0.5 * n) * detail::impow_r_integral(u, lambda, p, false, cfg);
  return c * std::pow(std::numbers::pi, -n) * std::exp(-p.X2) * detail::impow_r_integral(u, lambda, p, true, cfg);
}

// e^{|x|^2} k(x, y): the gamma_{-1} kernel with its e^{-|x|^2} factor removed.
inline cplx impow_kernel_scaled(double u, double lambda, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  if (u == 0.0) throw DomainError("impow_kernel: u must be nonzero");
  detail::guard_diagonal(x, y);
  const PairScalars p(x, y);
  return impow_constant(u) * std::pow(std::numbers::pi, -double(p.n)) * detail::impow_r_integral(u, lambda, p, true, cfg);
}

// ---- Riesz transforms ----

namespace detail {
// int_0^1 r^{n+lambda-1} (1-r^2)^{-(n+2)/2} (-log r)^{-1/2} (x_j - r y_j) e^{-Q(r)} dr.
inline double riesz_r_integral(double xj, double yj, double lambda, const PairScalars& p, bool use_psi,
                               const QuadratureConfig& cfg) {
  const double n = p.n;
  return r_integral(
             [&](double r, double omr) {
               const double w = one_minus_r2(r, omr);
               const double q = (use_psi ? p.rxmy2(omr) : p.xmry2(omr)) / w;
               const double mlr = neg_log_r(r, omr);
               const double lin = (xj - yj) + omr * yj;
               return lin * std::exp((n + lambda - 1.0) * std::log(r) - 0.5 * (n + 2.0) * std::log(w) -
                                     0.5 * std::log(mlr) - q);
             },
             cfg, use_psi ? p.peak_psi() : p.peak_phi())
      .real();
}
}  // namespace detail

inline double riesz_kernel(int j, double lambda, const Point& x, const Point& y, Measure m = Measure::Lebesgue,
                           const QuadratureConfig& cfg = {}) {
  check_dims(x, y);
  if (j < 1 || j > int(x.size())) throw DomainError("riesz_kernel: component out of range");
  detail::guard_diagonal(x, y);
  const PairScalars p(x, y);
  const double n = p.n;
  const double xj = x[j - 1], yj = y[j - 1];
  if (m == Measure::Lebesgue)
    return -2.0 * std::pow(std::numbers::pi, -0.5 * (n + 1.0)) * detail::riesz_r_integral(xj, yj, lambda, p, false, cfg);
  return -2.0 * std::pow(std::numbers::pi, -n - 0.5) * std::exp(-p.X2) *
         detail::riesz_r_integral(xj, yj, lambda, p, true, cfg);
}

inline double riesz_kernel_scaled(int j, double lambda, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  check_dims(x, y);
  if (j < 1 || j > int(x.size())) throw DomainError("riesz_kernel: component out of range");
  detail::guard_diagonal(x, y);
  const PairScalars p(x, y);
  return -2.0 * std::pow(std::numbers::pi, -double(p.n) - 0.5) * detail::riesz_r_integral(x[j - 1], y[j - 1], lambda, p, true, cfg);
}

// ---- Local kernel ----

inline double local_kmunu(double mu, double nu, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  check_dims(x, y);
  if (!(mu > nu + 1.0) || nu < 0.0) throw DomainError("local_kmunu: need mu > nu + 1, nu >= 0");
  if (!in_local(x, y, 2.0)) throw DomainError("local_kmunu: pair outside the local region N_2");
  detail::guard_diagonal(x, y);
  const PairScalars p(x, y);
  const double n = p.n;
  return std::exp(detail::log_r_integral(
      [&](double r, double omr) {
        const double w = detail::one_minus_r2(r, omr);
        const double d2 = p.xmry2(omr);
        return 0.5 * nu * std::log(d2) - 0.5 * (n + mu) * std::log(w) - d2 / w;
      },
      cfg, p.peak_phi()));
}

// ---- Dispatch ----

// Kernel value with respect to Lebesgue measure (complex for the power families).
inline cplx evaluate(const KernelSpec& spec, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  return std::visit(
      [&](const auto& s) -> cplx {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Heat>) return mehler_H(s.t, x, y);
        else if constexpr (std::is_same_v<S, HeatMaximal>) return maximal_H(x, y);
        else if constexpr (std::is_same_v<S, ComplexPower>) return complex_power_kernel(s.z, s.lambda, x, y, cfg);
        else if constexpr (std::is_same_v<S, ImaginaryPower>) return impow_kernel(s.u, s.lambda, x, y, Measure::Lebesgue, cfg);
        else if constexpr (std::is_same_v<S, RieszComponent>) return riesz_kernel(s.j, s.lambda, x, y, Measure::Lebesgue, cfg);
        else if constexpr (std::is_same_v<S, MajorantKbar>) return kbar(x, y);
        else if constexpr (std::is_same_v<S, MajorantKlambda>) return majorant_klambda(s.lambda, x, y, cfg);
        else if constexpr (std::is_same_v<S, MajorantKprime>) return majorant_kprime(s.lambda, x, y, cfg);
        else return local_kmunu(s.mu, s.nu, x, y, cfg);
      },
      spec);
}

// log of a positive kernel (heat, maximal heat and the majorants).
inline double log_evaluate_positive(const KernelSpec& spec, const Point& x, const Point& y, const QuadratureConfig& cfg = {}) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Heat>) return log_mehler_H(s.t, PairScalars(x, y));
        else if constexpr (std::is_same_v<S, HeatMaximal>) return log_maximal_H(x, y);
        else if constexpr (std::is_same_v<S, MajorantKbar>) return log_kbar(x, y);
        else if constexpr (std::is_same_v<S, MajorantKlambda>) return log_majorant_klambda(s.lambda, x, y, cfg);
        else if constexpr (std::is_same_v<S, MajorantKprime>) return log_majorant_kprime(s.lambda, x, y, cfg);
        else return std::log(std::abs(evaluate(spec, x, y, cfg)));
      },
      spec);
}

}  // namespace invgauss
