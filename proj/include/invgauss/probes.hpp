#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <variant>
#include <vector>

#include "invgauss/atoms.hpp"
#include "invgauss/classify.hpp"
#include "invgauss/errors.hpp"
#include "invgauss/geometry.hpp"
#include "invgauss/kernels.hpp"
#include "invgauss/quadrature.hpp"

namespace invgauss {

// ---- Applying kernels to atoms ----

inline bool is_singular(const KernelSpec& spec) {
  return std::holds_alternative<ComplexPower>(spec) || std::holds_alternative<ImaginaryPower>(spec) ||
         std::holds_alternative<RieszComponent>(spec) || std::holds_alternative<HeatMaximal>(spec) ||
         std::holds_alternative<LocalKmunu>(spec) || std::holds_alternative<MajorantKlambda>(spec) ||
         std::holds_alternative<MajorantKprime>(spec);
}

// Euclidean distance from x to the closed support of an atom.
inline double support_distance(const Atom& a, const Point& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) return std::max(0.0, dist(x, s.center) - s.radius);
        else {
          double d2 = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = std::max(0.0, std::abs(x[i] - s.center[i]) - s.half_side);
            d2 += e * e;
          }
          return std::sqrt(d2);
        }
      },
      a.support);
}

// Largest distance from p to a point of the support.
inline double support_reach(const Atom& a, const Point& p) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) return dist(p, s.center) + s.radius;
        else {
          double d2 = 0.0;
          for (std::size_t i = 0; i < p.size(); ++i) {
            const double e = std::abs(p[i] - s.center[i]) + s.half_side;
            d2 += e * e;
          }
          return std::sqrt(d2);
        }
      },
      a.support);
}

// e^{|x|^2 - shift} K(x, y) with K the Lebesgue kernel of `spec`, so that
// e^{|x|^2} T a(x) = int (this) * a.scaled(y) dy.
inline cplx scaled_lebesgue_kernel(const KernelSpec& spec, const Point& x, const Point& y, double shift,
                                   const QuadratureConfig& cfg = {}) {
  const double pin = std::pow(std::numbers::pi, 0.5 * double(x.size()));
  const double wy = pin * std::exp(norm2(y) - shift);
  if (const auto* r = std::get_if<RieszComponent>(&spec)) return riesz_kernel_scaled(r->j, r->lambda, x, y, cfg) * wy;
  if (const auto* u = std::get_if<ImaginaryPower>(&spec)) return impow_kernel_scaled(u->u, u->lambda, x, y, cfg) * wy;
  if (std::holds_alternative<ComplexPower>(spec)) return evaluate(spec, x, y, cfg) * std::exp(norm2(x) - shift);
  return std::exp(log_evaluate_positive(spec, x, y, cfg) + norm2(x) - shift);
}

struct ApplyOptions {
  QuadratureConfig quad{1e-7, 1e-300};
  RegionOptions region{8, 256};
};

// e^{|x|^2} T a(x): finite even where T a(x) itself underflows.
inline cplx apply_operator_scaled(const KernelSpec& spec, const Atom& a, const Point& x, const ApplyOptions& opt = {}) {
  if (x.size() != a.dim()) throw DomainError("apply_operator: dimension mismatch");
  if (is_singular(spec) && support_distance(a, x) < kDiagonalGuard)
    throw DiagonalProximity("apply_operator: x lies within 1e-6 of the atom support");
  cplx s = 0.0;
  for (const Region& r : a.pieces)
    s += integrate_region([&](const Point& y) { return scaled_lebesgue_kernel(spec, x, y, a.shift, opt.quad) * a.scaled(y); }, r,
                          opt.quad, opt.region)
             .value;
  return s;
}

inline cplx apply_operator(const KernelSpec& spec, const Atom& a, const Point& x, const ApplyOptions& opt = {}) {
  return apply_operator_scaled(spec, a, x, opt) * std::exp(-norm2(x));
}

// T f(x) = int K(x, y) f(y) dy for f supported in `support`.
template <class F>
cplx apply_operator(const KernelSpec& spec, F&& f, const Region& support, const Point& x, const ApplyOptions& opt = {}) {
  return integrate_region([&](const Point& y) { return evaluate(spec, x, y, opt.quad) * f(y); }, support, opt.quad, opt.region).value;
}

// ---- Truncated L^1(gamma_{-1}) norms ----

// int_region |T a| dgamma_{-1} for a region away from the support.
inline double truncated_l1(const KernelSpec& spec, const Atom& a, const Region& region, const ApplyOptions& inner = {},
                           const QuadratureConfig& outer = {1e-4, 1e-300}, const RegionOptions& outer_opt = {4, 64}) {
  if (const auto* an = std::get_if<AnnulusRegion>(&region)) {
    if (!(an->r_out > an->r_in)) return 0.0;
    const double eps = 1e-6;
    const bool in_hole = support_reach(a, an->center) + eps <= an->r_in;
    const bool beyond = support_distance(a, an->center) >= an->r_out + eps;
    if (!in_hole && !beyond) throw DomainError("truncated_l1: region meets the atom support");
  }
  const double pin = std::pow(std::numbers::pi, 0.5 * double(a.dim()));
  auto g = [&](const Point& x) { return std::abs(apply_operator_scaled(spec, a, x, inner)) * pin; };
  return integrate_region(g, region, outer, outer_opt).real();
}

// The set A_Q attached to the cube Q(xi): x_1 in (xi + 4/xi, xi + 1),
// x_2 in [nu/2, nu], |x_k| <= nu for k >= 3, nu = sqrt((x_1 - xi)/x_1).
struct AQRegion {
  double xi;
};

inline double aq_nu(double xi, double x1) { return std::sqrt((x1 - xi) / x1); }

struct AQOptions {
  int order_x1 = 16;
  int order_x2 = 8;
  int order_rest = 4;
  int inner_order = 12;
  QuadratureConfig quad{1e-8, 1e-300};
};

// int_{A_Q} |T a| dgamma_{-1}; x_1 is integrated in log(x_1 - xi), the remaining
// coordinates on their nu-scaled intervals, and the atom by a fixed product rule.
inline double truncated_l1(const KernelSpec& spec, const Atom& a, const AQRegion& aq, const AQOptions& opt = {}) {
  const std::size_t n = a.dim();
  if (n < 2) throw DomainError("truncated_l1: A_Q needs n >= 2");
  const double xi = aq.xi;
  if (!(xi >= 2.0)) throw DomainError("truncated_l1: A_Q needs xi >= 2");
  const Cubature cub = atom_cubature(a, opt.inner_order);
  const auto& g1 = gauss_legendre(opt.order_x1);
  const auto& g2 = gauss_legendre(opt.order_x2);
  const auto& g3 = gauss_legendre(opt.order_rest);
  const double u0 = std::log(4.0 / xi), u1 = 0.0;
  const double pin = std::pow(std::numbers::pi, 0.5 * double(n));
  // Tensor index over coordinates 3..n.
  const std::size_t rest = n - 2;
  std::size_t rest_count = 1;
  for (std::size_t k = 0; k < rest; ++k) rest_count *= std::size_t(opt.order_rest);
  double total = 0.0;
  for (int i = 0; i < opt.order_x1; ++i) {
    const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * g1.x[i];
    const double x1 = xi + std::exp(u);
    const double nu = aq_nu(xi, x1);
    const double w1 = 0.5 * (u1 - u0) * g1.w[i] * std::exp(u);
    for (int j = 0; j < opt.order_x2; ++j) {
      const double x2 = nu * (0.75 + 0.25 * g2.x[j]);
      const double w2 = 0.25 * nu * g2.w[j];
      for (std::size_t m = 0; m < rest_count; ++m) {
        Point x(n, 0.0);
        x[0] = x1;
        x[1] = x2;
        double w = w1 * w2;
        std::size_t idx = m;
        for (std::size_t k = 0; k < rest; ++k) {
          const std::size_t q = idx % std::size_t(opt.order_rest);
          idx /= std::size_t(opt.order_rest);
          x[2 + k] = nu * g3.x[q];
          w *= nu * g3.w[q];
        }
        cplx s = 0.0;
        for (std::size_t k = 0; k < cub.nodes.size(); ++k)
          s += scaled_lebesgue_kernel(spec, x, cub.nodes[k], a.shift, opt.quad) * cub.weights[k];
        total += w * std::abs(s) * pin;
      }
    }
  }
  return total;
}

// ---- Asymptotic probes ----

struct ProbeOptions {
  int sigma_count = 64;  // directions on S^{n-1} for n >= 2
  int atom_order = 24;
  double s_max = 10.0;   // t = s^2 is cut at s_max^2 (e^{-t} is negligible beyond)
  int pieces = 28;       // geometric pieces of [0, s_max] refining toward s = 0
  int points = 12;       // Gauss points per piece
};

// Directions on the unit sphere with surface weights (counting measure for n = 1).
struct SphereRule {
  std::vector<Point> dirs;
  std::vector<double> weights;
};

inline SphereRule sphere_rule(std::size_t n, int count) {
  SphereRule s;
  s.dirs = sigma_net(n, count);
  double area = 2.0;
  if (n >= 2) area = 2.0 * std::pow(std::numbers::pi, 0.5 * double(n)) / std::tgamma(0.5 * double(n));
  const double w = n == 1 ? 1.0 : area / double(s.dirs.size());
  s.weights.assign(s.dirs.size(), w);
  return s;
}

namespace detail {
struct ProbeGrid {
  std::vector<double> s, w;
};

// Composite Gauss rule on [0, top] with pieces shrinking geometrically toward 0.
inline ProbeGrid probe_grid(double top, const ProbeOptions& opt) {
  ProbeGrid g;
  const auto& gl = gauss_legendre(opt.points);
  double hi = top;
  for (int k = 0; k <= opt.pieces; ++k) {
    const double lo = k == opt.pieces ? 0.0 : 0.5 * hi;
    for (int i = 0; i < opt.points; ++i) {
      g.s.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[i]);
      g.w.push_back(0.5 * (hi - lo) * gl.w[i]);
    }
    hi = lo;
  }
  return g;
}

inline void check_probe_atom(const Atom& a, double rho) {
  if (!(rho >= 5.0)) throw DomainError("probe: rho must be at least 5");
  Point o(a.dim(), 0.0);
  if (support_reach(a, o) > 1.0 + 1e-12) throw DomainError("probe: atom must be supported in the closed unit ball");
}
}  // namespace detail

// Sphere-averaged modulus of the inner part of the kernel pairing of
// (A + lambda)^{iu} with f, at radius rho.  Decays like rho^{-1-lambda} / log rho^2
// times the Psi_{lambda} pairing of f.
inline double impow_probe(double rho, const Atom& a, double u = 1.0, double lambda = 0.0, const ProbeOptions& opt = {}) {
  detail::check_probe_atom(a, rho);
  const std::size_t n = a.dim();
  const Cubature cub = atom_cubature(a, opt.atom_order);
  const SphereRule sr = sphere_rule(n, opt.sigma_count);
  const auto grid = detail::probe_grid(std::min(rho / std::sqrt(3.0), opt.s_max), opt);
  const double rho2 = rho * rho, L = std::log(rho2);
  const double escale = std::exp(-a.shift);
  std::vector<double> y2(cub.nodes.size());
  for (std::size_t k = 0; k < y2.size(); ++k) y2[k] = norm2(cub.nodes[k]);
  double out = 0.0;
  for (std::size_t m = 0; m < sr.dirs.size(); ++m) {
    std::vector<double> sy(cub.nodes.size());
    for (std::size_t k = 0; k < sy.size(); ++k) sy[k] = dot(sr.dirs[m], cub.nodes[k]);
    cplx inner = 0.0;
    for (std::size_t i = 0; i < grid.s.size(); ++i) {
      const double s = grid.s[i], t = s * s;
      if (t <= 0.0) continue;
      const double ratio = std::log1p(rho2 / t) / L;
      const double q = 1.0 + t / rho2;
      const double mag = 2.0 * std::exp((double(n) + lambda - 1.0) * std::log(s) - t - (1.0 + 0.5 * lambda) * std::log(q) - std::log(ratio));
      const double ph = -u * std::log(ratio);
      const double b = 2.0 * std::sqrt(t * q);
      double G = 0.0;
      for (std::size_t k = 0; k < sy.size(); ++k) G += cub.weights[k] * std::exp(-t * y2[k] / rho2 + b * sy[k]);
      inner += grid.w[i] * mag * G * cplx(std::cos(ph), std::sin(ph));
    }
    out += sr.weights[m] * std::abs(inner) * escale;
  }
  return out / (std::pow(rho, 1.0 + lambda) * L);
}

// The Riesz analogue for component j: decays like rho^{-lambda} (log rho)^{-1/2}
// times the Psi_lambda pairing, or like rho^{-lambda} (log rho)^{-3/2} times the
// Phi_lambda pairing when the Psi_lambda pairings vanish.
inline double riesz_probe(double rho, double lambda, int j, const Atom& a, const ProbeOptions& opt = {}) {
  detail::check_probe_atom(a, rho);
  const std::size_t n = a.dim();
  if (j < 1 || j > int(n)) throw DomainError("riesz_probe: component out of range");
  const Cubature cub = atom_cubature(a, opt.atom_order);
  const SphereRule sr = sphere_rule(n, opt.sigma_count);
  const auto grid = detail::probe_grid(std::min(rho / std::sqrt(3.0), opt.s_max), opt);
  const double rho2 = rho * rho, L = std::log(rho2);
  const double escale = std::exp(-a.shift);
  std::vector<double> y2(cub.nodes.size()), yj(cub.nodes.size());
  for (std::size_t k = 0; k < y2.size(); ++k) {
    y2[k] = norm2(cub.nodes[k]);
    yj[k] = cub.nodes[k][j - 1];
  }
  double out = 0.0;
  for (std::size_t m = 0; m < sr.dirs.size(); ++m) {
    const double sj = sr.dirs[m][j - 1];
    std::vector<double> sy(cub.nodes.size());
    for (std::size_t k = 0; k < sy.size(); ++k) sy[k] = dot(sr.dirs[m], cub.nodes[k]);
    double inner = 0.0;
    for (std::size_t i = 0; i < grid.s.size(); ++i) {
      const double s = grid.s[i], t = s * s;
      if (t <= 0.0) continue;
      const double ratio = std::log1p(rho2 / t) / L;
      const double q = 1.0 + t / rho2;
      const double mag = 2.0 * std::exp((double(n) + lambda - 1.0) * std::log(s) - t - 0.5 * lambda * std::log(q) - 0.5 * std::log(ratio));
      const double b = 2.0 * std::sqrt(t * q);
      const double c = std::sqrt(t / q) / rho2;
      double G = 0.0;
      for (std::size_t k = 0; k < sy.size(); ++k) G += cub.weights[k] * (sj - yj[k] * c) * std::exp(-t * y2[k] / rho2 + b * sy[k]);
      inner += grid.w[i] * mag * G;
    }
    out += sr.weights[m] * std::abs(inner) * escale;
  }
  return out / (2.0 * std::pow(rho, lambda) * std::sqrt(std::log(rho)));
}

// Log-spaced grid of `count` points on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline ProbeSeries impow_series(const Atom& a, double u, double lambda, const std::vector<double>& rhos, const ProbeOptions& opt = {}) {
  ProbeSeries s;
  s.scale = rhos;
  s.kind = SeriesKind::Density;
  s.meta = "impow";
  for (double r : rhos) s.value.push_back(impow_probe(r, a, u, lambda, opt));
  return s;
}

inline ProbeSeries riesz_series(const Atom& a, double lambda, int j, const std::vector<double>& rhos, const ProbeOptions& opt = {}) {
  ProbeSeries s;
  s.scale = rhos;
  s.kind = SeriesKind::Density;
  s.meta = "riesz";
  for (double r : rhos) s.value.push_back(riesz_probe(r, lambda, j, a, opt));
  return s;
}

// ---- Limits of the compensated probes ----

enum class SpecialKind { Psi, Phi };

// int_{S^{n-1}} |w(sigma) (F_{lambda,sigma}, a)| dSigma with F = Psi or Phi and
// w = 1, or w = sigma_j when j > 0.  The pairings use a fixed product rule of
// the given order on the atom pieces.
inline double sphere_pairing_integral(const Atom& a, double lambda, SpecialKind kind, int j = 0, int sigma_count = 32,
                                      int order = 48) {
  const SphereRule sr = sphere_rule(a.dim(), sigma_count);
  const Cubature cub = atom_cubature(a, order);
  const double pin = std::pow(std::numbers::pi, 0.5 * double(a.dim()));
  const QuadratureConfig qc{1e-10, 1e-15};
  double out = 0.0;
  for (std::size_t m = 0; m < sr.dirs.size(); ++m) {
    const Point& s = sr.dirs[m];
    double p = 0.0;
    for (std::size_t k = 0; k < cub.nodes.size(); ++k) {
      const Point& y = cub.nodes[k];
      const double f = kind == SpecialKind::Psi ? psi_special(lambda, s, y, qc) : phi_special(lambda, s, y, qc);
      p += cub.weights[k] * f * pin * std::exp(norm2(y) - a.shift);
    }
    const double wj = j > 0 ? s[j - 1] : 1.0;
    out += sr.weights[m] * std::abs(wj * p);
  }
  return out;
}

// Limit of impow_probe * rho^{1+lambda} log rho^2.
inline double impow_probe_limit(const Atom& a, double lambda, int sigma_count = 32) {
  return std::pow(std::numbers::pi, -0.5 * double(a.dim())) * sphere_pairing_integral(a, lambda, SpecialKind::Psi, 0, sigma_count);
}

// Limit of riesz_probe * rho^lambda sqrt(log rho).
inline double riesz_probe_limit_leading(const Atom& a, double lambda, int j, int sigma_count = 32) {
  return 0.5 * std::pow(std::numbers::pi, -0.5 * double(a.dim())) * sphere_pairing_integral(a, lambda, SpecialKind::Psi, j, sigma_count);
}

// Limit of riesz_probe * rho^lambda (log rho)^{3/2} when the Psi_lambda pairings vanish.
inline double riesz_probe_limit_second(const Atom& a, double lambda, int j, int sigma_count = 32) {
  return 0.125 * std::pow(std::numbers::pi, -0.5 * double(a.dim())) * sphere_pairing_integral(a, lambda, SpecialKind::Phi, j, sigma_count);
}

}  // namespace invgauss
