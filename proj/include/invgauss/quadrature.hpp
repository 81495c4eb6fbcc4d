#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <queue>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "invgauss/errors.hpp"
#include "invgauss/rng.hpp"
#include "invgauss/special.hpp"

namespace invgauss {

using Point = std::vector<double>;

enum class EndpointPolicy { None, LogSingularLeft, GaussianConcentrationRight, ExpTail };

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_depth = 40;
  EndpointPolicy endpoint_policy = EndpointPolicy::None;
  int max_intervals = 4000;
};

struct Estimate {
  cplx value{0.0, 0.0};
  double err = 0.0;
  int subdivisions = 0;
  bool converged = true;

  double real() const { return value.real(); }
};

namespace detail {

inline constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                  0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                  0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
inline cplx to_cplx(const T& v) {
  if constexpr (std::is_same_v<std::decay_t<T>, cplx>) return v;
  else return cplx(double(v), 0.0);
}

struct Piece {
  double a, b;
  cplx val;
  double err;
  int depth;
  bool operator<(const Piece& o) const { return err < o.err; }
};

inline double qp_err(double diff, double resabs, double resasc) {
  double err = std::abs(diff);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
  return err;
}

// 15-point Kronrod / 7-point Gauss pair with QUADPACK error heuristic,
// applied to real and imaginary parts separately.
template <class F>
Piece gk15(F& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fv[15];
  fv[7] = to_cplx(f(c));
  for (int j = 0; j < 7; ++j) {
    fv[j] = to_cplx(f(c - h * xgk[j]));
    fv[14 - j] = to_cplx(f(c + h * xgk[j]));
  }
  cplx rk = fv[7] * wgk[7];
  cplx rg = fv[7] * wg[3];
  for (int j = 0; j < 7; ++j) {
    rk += (fv[j] + fv[14 - j]) * wgk[j];
    if (j % 2 == 1) rg += (fv[j] + fv[14 - j]) * wg[j / 2];
  }
  const cplx mean = rk * 0.5;
  double abs_re = std::abs(fv[7].real()) * wgk[7], abs_im = std::abs(fv[7].imag()) * wgk[7];
  double asc_re = std::abs(fv[7].real() - mean.real()) * wgk[7];
  double asc_im = std::abs(fv[7].imag() - mean.imag()) * wgk[7];
  for (int j = 0; j < 7; ++j) {
    abs_re += (std::abs(fv[j].real()) + std::abs(fv[14 - j].real())) * wgk[j];
    abs_im += (std::abs(fv[j].imag()) + std::abs(fv[14 - j].imag())) * wgk[j];
    asc_re += (std::abs(fv[j].real() - mean.real()) + std::abs(fv[14 - j].real() - mean.real())) * wgk[j];
    asc_im += (std::abs(fv[j].imag() - mean.imag()) + std::abs(fv[14 - j].imag() - mean.imag())) * wgk[j];
  }
  const double ah = std::abs(h);
  const cplx diff = (rk - rg) * h;
  double err = qp_err(diff.real(), abs_re * ah, asc_re * ah) + qp_err(diff.imag(), abs_im * ah, asc_im * ah);
  if (!std::isfinite(err) || !std::isfinite(rk.real()) || !std::isfinite(rk.imag()))
    err = std::numeric_limits<double>::infinity();
  return Piece{a, b, rk * h, err, depth};
}

// Globally adaptive bisection on [a, b].  Pieces with a non-finite error are
// counted separately so the running error total never becomes NaN.
// The initial partition is given by sorted breakpoints.
template <class F>
Estimate adapt_from(F& f, const std::vector<double>& breaks, const QuadratureConfig& cfg) {
  std::priority_queue<Piece> heap;
  cplx total = 0.0;
  double finite_err = 0.0;
  int infinite = 0;
  auto add = [&](const Piece& p, double sign) {
    total += sign * p.val;
    if (std::isfinite(p.err)) finite_err += sign * p.err;
    else infinite += int(sign);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) continue;
    const Piece first = gk15(f, breaks[i], breaks[i + 1], 0);
    heap.push(first);
    add(first, 1.0);
  }
  cplx frozen_val = 0.0;
  double frozen_err = 0.0;
  int frozen = 0, subdivisions = 0;
  while (!heap.empty()) {
    if (infinite == 0 && finite_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) break;
    if (int(heap.size()) + frozen >= cfg.max_intervals) break;
    Piece p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (p.depth >= cfg.max_depth || !(m > p.a && m < p.b)) {
      frozen_val += p.val;
      frozen_err += p.err;
      ++frozen;
      continue;
    }
    Piece l = gk15(f, p.a, m, p.depth + 1), r = gk15(f, m, p.b, p.depth + 1);
    ++subdivisions;
    add(p, -1.0);
    add(l, 1.0);
    add(r, 1.0);
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to limit drift from incremental updates.
  cplx v = frozen_val;
  double e = frozen_err;
  while (!heap.empty()) {
    v += heap.top().val;
    e += heap.top().err;
    heap.pop();
  }
  Estimate est{v, e, subdivisions, e <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(v))};
  if (!std::isfinite(e)) est.converged = false;
  return est;
}

template <class F>
Estimate adapt(F& f, double a, double b, const QuadratureConfig& cfg) {
  return adapt_from(f, {a, b}, cfg);
}

}  // namespace detail

// Integrate f over [a, b]; b may be +infinity (mapped by t = a + u/(1-u)).
// Never throws on non-convergence; inspect Estimate::converged.
template <class F>
Estimate try_integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  if (!(a < b)) {
    if (a == b) return Estimate{};
    throw DomainError("integrate: requires a < b");
  }
  if (std::isinf(b) || cfg.endpoint_policy == EndpointPolicy::ExpTail) {
    if (std::isinf(b) && cfg.endpoint_policy == EndpointPolicy::LogSingularLeft) {
      auto g = [&](double v) {
        const double w = 1.0 - v * v;
        return detail::to_cplx(f(a + v * v / w)) * (2.0 * v / (w * w));
      };
      return detail::adapt(g, 0.0, 1.0, cfg);
    }
    if (std::isinf(b)) {
      auto g = [&](double u) {
        const double w = 1.0 - u;
        return detail::to_cplx(f(a + u / w)) / (w * w);
      };
      return detail::adapt(g, 0.0, 1.0, cfg);
    }
  }
  const double L = b - a;
  switch (cfg.endpoint_policy) {
    case EndpointPolicy::LogSingularLeft: {
      auto g = [&](double u) { return detail::to_cplx(f(a + L * u * u)) * (2.0 * L * u); };
      return detail::adapt(g, 0.0, 1.0, cfg);
    }
    case EndpointPolicy::GaussianConcentrationRight: {
      auto g = [&](double u) {
        const double w = 1.0 - u;
        return detail::to_cplx(f(b - L * w * w)) * (2.0 * L * w);
      };
      return detail::adapt(g, 0.0, 1.0, cfg);
    }
    default: {
      auto g = [&](double x) { return detail::to_cplx(f(x)); };
      return detail::adapt(g, a, b, cfg);
    }
  }
}

template <class F>
Estimate integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  Estimate e = try_integrate(std::forward<F>(f), a, b, cfg);
  if (!e.converged) throw NonConvergence("integrate: tolerance not reached", e.value, e.err);
  return e;
}

// Integral over (0, inf); LogSingularLeft is honoured for a singularity at 0.  With a known exponential decay rate the range is cut
// where the certified tail bound |f(T)|/rate falls below abs_tol * 1e-3.
template <class F>
Estimate integrate_improper(F&& f, const QuadratureConfig& cfg = {}, std::optional<double> decay_rate = {}) {
  if (!decay_rate) {
    QuadratureConfig c = cfg;
    if (c.endpoint_policy != EndpointPolicy::LogSingularLeft) c.endpoint_policy = EndpointPolicy::None;
    return integrate(f, 0.0, std::numeric_limits<double>::infinity(), c);
  }
  const double rate = *decay_rate;
  if (!(rate > 0.0)) throw DomainError("integrate_improper: decay rate must be positive");
  QuadratureConfig c = cfg;
  Estimate acc{};
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 64; ++k) {
    Estimate piece = integrate(f, lo, hi, c);
    acc.value += piece.value;
    acc.err += piece.err;
    acc.subdivisions += piece.subdivisions + 1;
    const double tail = std::abs(detail::to_cplx(f(hi))) / rate;
    if (tail < cfg.abs_tol * 1e-3 ||
        (tail < cfg.rel_tol * 1e-3 * std::abs(acc.value) && std::abs(piece.value) < cfg.rel_tol * std::abs(acc.value))) {
      acc.err += tail;
      return acc;
    }
    lo = hi;
    hi *= 2.0;
  }
  throw NonConvergence("integrate_improper: tail not certified", acc.value, acc.err);
}

// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussRule {
  std::vector<double> x, w;
};

inline const GaussRule& gauss_legendre(int m) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5)), dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
    }
    r.x[i] = -z;
    r.x[m - 1 - i] = z;
    r.w[i] = r.w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return cache.emplace(m, std::move(r)).first->second;
}

// ---- n-dimensional regions ----

struct BallRegion {
  Point center;
  double radius;
};
struct CubeRegion {
  Point center;
  double half_side;
};
struct AnnulusRegion {
  Point center;
  double r_in, r_out;
};
// Surface of a sphere, integrated against surface measure.
struct SphereRegion {
  Point center;
  double radius;
};
// Half of a ball cut by the hyperplane through the center orthogonal to `axis`.
struct HalfBallRegion {
  Point center;
  double radius;
  int axis;
  bool upper;
};

// Axis-parallel box [lo, hi].
struct BoxRegion {
  Point lo, hi;
};

using Region = std::variant<BallRegion, CubeRegion, AnnulusRegion, SphereRegion, HalfBallRegion, BoxRegion>;

struct RegionOptions {
  int min_order = 8;
  int max_order = 256;
  std::uint64_t seed = 42;
  std::size_t mc_samples = 200000;
  double mc_rel_tol = 1e-2;
};

// A weighted point set that integrates over a region.
struct Cubature {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

namespace detail {

inline std::size_t region_dim(const Region& r) {
  return std::visit(
      [](const auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, BoxRegion>) return g.lo.size();
        else return g.center.size();
      },
      r);
}

// Radial-angular product rule on a shell r in [r0, r1] with angular interval
// [t0, t1] (n = 2) or polar-cosine interval [c0, c1] (n = 3).
inline Cubature shell_rule(const Point& c, double r0, double r1, int n, int order, int half_axis, bool upper) {
  Cubature q;
  const auto& g = gauss_legendre(order);
  if (n == 1) {
    auto add = [&](double lo, double hi) {
      for (int i = 0; i < order; ++i) {
        q.nodes.push_back({c[0] + 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.x[i]});
        q.weights.push_back(0.5 * (hi - lo) * g.w[i]);
      }
    };
    if (half_axis < 0 || upper) add(r0, r1);
    if (half_axis < 0 || !upper) add(-r1, -r0);
    return q;
  }
  if (n == 2) {
    const int ma = 2 * order;
    for (int i = 0; i < order; ++i) {
      const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * g.x[i];
      const double wr = 0.5 * (r1 - r0) * g.w[i] * r;
      if (half_axis < 0) {
        for (int k = 0; k < ma; ++k) {
          const double t = 2.0 * std::numbers::pi * (k + 0.5) / ma;
          q.nodes.push_back({c[0] + r * std::cos(t), c[1] + r * std::sin(t)});
          q.weights.push_back(wr * 2.0 * std::numbers::pi / ma);
        }
      } else {
        const auto& ga = gauss_legendre(ma);
        // Half plane {x_axis >= 0} (upper) or {x_axis < 0}.
        const double base = (half_axis == 1 ? 0.0 : -0.5 * std::numbers::pi) + (upper ? 0.0 : std::numbers::pi);
        for (int k = 0; k < ma; ++k) {
          const double t = base + 0.5 * std::numbers::pi * (1.0 + ga.x[k]);
          q.nodes.push_back({c[0] + r * std::cos(t), c[1] + r * std::sin(t)});
          q.weights.push_back(wr * 0.5 * std::numbers::pi * ga.w[k]);
        }
      }
    }
    return q;
  }
  // n == 3: spherical coordinates with the polar axis along `half_axis` (or x_3).
  const int ax = half_axis < 0 ? 2 : half_axis;
  const int a1 = (ax + 1) % 3, a2 = (ax + 2) % 3;
  const int ma = 2 * order;
  double c0 = -1.0, c1 = 1.0;
  if (half_axis >= 0) {
    if (upper) c0 = 0.0;
    else c1 = 0.0;
  }
  for (int i = 0; i < order; ++i) {
    const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * g.x[i];
    const double wr = 0.5 * (r1 - r0) * g.w[i] * r * r;
    for (int j = 0; j < order; ++j) {
      const double ct = 0.5 * (c0 + c1) + 0.5 * (c1 - c0) * g.x[j];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      const double wc = 0.5 * (c1 - c0) * g.w[j];
      for (int k = 0; k < ma; ++k) {
        const double p = 2.0 * std::numbers::pi * (k + 0.5) / ma;
        Point x(3);
        x[ax] = c[ax] + r * ct;
        x[a1] = c[a1] + r * st * std::cos(p);
        x[a2] = c[a2] + r * st * std::sin(p);
        q.nodes.push_back(std::move(x));
        q.weights.push_back(wr * wc * 2.0 * std::numbers::pi / ma);
      }
    }
  }
  return q;
}

}  // namespace detail

// Tensor cubature of a given order for n <= 3.
inline Cubature region_cubature(const Region& region, int order) {
  const std::size_t n = detail::region_dim(region);
  if (n < 1 || n > 3) throw DomainError("region_cubature: tensor rules need 1 <= n <= 3");
  return std::visit(
      [&](const auto& g) -> Cubature {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, BallRegion>) {
          return detail::shell_rule(g.center, 0.0, g.radius, int(n), order, -1, true);
        } else if constexpr (std::is_same_v<G, AnnulusRegion>) {
          return detail::shell_rule(g.center, g.r_in, g.r_out, int(n), order, -1, true);
        } else if constexpr (std::is_same_v<G, HalfBallRegion>) {
          return detail::shell_rule(g.center, 0.0, g.radius, int(n), order, g.axis, g.upper);
        } else if constexpr (std::is_same_v<G, CubeRegion> || std::is_same_v<G, BoxRegion>) {
          Cubature q;
          const auto& r = gauss_legendre(order);
          std::vector<int> idx(n, 0);
          Point mid(n), h(n);
          for (std::size_t d = 0; d < n; ++d) {
            if constexpr (std::is_same_v<G, CubeRegion>) {
              mid[d] = g.center[d];
              h[d] = g.half_side;
            } else {
              mid[d] = 0.5 * (g.lo[d] + g.hi[d]);
              h[d] = 0.5 * (g.hi[d] - g.lo[d]);
            }
          }
          while (true) {
            Point x(n);
            double w = 1.0;
            for (std::size_t d = 0; d < n; ++d) {
              x[d] = mid[d] + h[d] * r.x[idx[d]];
              w *= h[d] * r.w[idx[d]];
            }
            q.nodes.push_back(std::move(x));
            q.weights.push_back(w);
            std::size_t d = 0;
            while (d < n && ++idx[d] == order) idx[d++] = 0;
            if (d == n) break;
          }
          return q;
        } else {  // SphereRegion
          Cubature q;
          const double R = g.radius;
          if (n == 1) {
            q.nodes = {{g.center[0] + R}, {g.center[0] - R}};
            q.weights = {1.0, 1.0};
          } else if (n == 2) {
            const int m = 4 * order;
            for (int k = 0; k < m; ++k) {
              const double t = 2.0 * std::numbers::pi * k / m;
              q.nodes.push_back({g.center[0] + R * std::cos(t), g.center[1] + R * std::sin(t)});
              q.weights.push_back(2.0 * std::numbers::pi * R / m);
            }
          } else {
            const auto& r = gauss_legendre(order);
            const int m = 2 * order;
            for (int j = 0; j < order; ++j) {
              const double ct = r.x[j], st = std::sqrt(1.0 - ct * ct);
              for (int k = 0; k < m; ++k) {
                const double p = 2.0 * std::numbers::pi * (k + 0.5) / m;
                q.nodes.push_back({g.center[0] + R * st * std::cos(p), g.center[1] + R * st * std::sin(p),
                                   g.center[2] + R * ct});
                q.weights.push_back(R * R * r.w[j] * 2.0 * std::numbers::pi / m);
              }
            }
          }
          return q;
        }
      },
      region);
}

namespace detail {

inline Point mc_point(const Region& region, Rng& rng, double& volume) {
  const std::size_t n = region_dim(region);
  return std::visit(
      [&](const auto& g) -> Point {
        using G = std::decay_t<decltype(g)>;
        Point x(n);
        if constexpr (std::is_same_v<G, CubeRegion>) {
          volume = std::pow(2.0 * g.half_side, double(n));
          for (std::size_t d = 0; d < n; ++d) x[d] = g.center[d] + g.half_side * (2.0 * rng.uniform() - 1.0);
          return x;
        } else if constexpr (std::is_same_v<G, BoxRegion>) {
          volume = 1.0;
          for (std::size_t d = 0; d < n; ++d) {
            volume *= g.hi[d] - g.lo[d];
            x[d] = g.lo[d] + (g.hi[d] - g.lo[d]) * rng.uniform();
          }
          return x;
        } else {
          // Rejection from the bounding cube; volume of the bounding cube is
          // reported and points outside contribute zero.
          double R = 0.0;
          if constexpr (std::is_same_v<G, AnnulusRegion>) R = g.r_out;
          else R = g.radius;
          volume = std::pow(2.0 * R, double(n));
          for (std::size_t d = 0; d < n; ++d) x[d] = R * (2.0 * rng.uniform() - 1.0);
          double rr = 0.0;
          for (double v : x) rr += v * v;
          rr = std::sqrt(rr);
          bool inside = rr <= R;
          if constexpr (std::is_same_v<G, AnnulusRegion>) inside = inside && rr >= g.r_in;
          if constexpr (std::is_same_v<G, HalfBallRegion>) inside = inside && ((x[g.axis] >= 0.0) == g.upper);
          if constexpr (std::is_same_v<G, SphereRegion>) throw DomainError("sphere integration needs n <= 3");
          for (std::size_t d = 0; d < n; ++d) x[d] += g.center[d];
          if (!inside) x.clear();
          return x;
        }
      },
      region);
}

}  // namespace detail

// Integral over a region.  Tensor rules (orders doubled until two successive
// results agree) for n <= 3, seeded Monte Carlo otherwise.
template <class F>
Estimate integrate_region(F&& f, const Region& region, const QuadratureConfig& cfg = {}, const RegionOptions& opt = {}) {
  const std::size_t n = detail::region_dim(region);
  if (n <= 3) {
    auto apply = [&](int order) {
      Cubature q = region_cubature(region, order);
      cplx s = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += detail::to_cplx(f(q.nodes[i])) * q.weights[i];
      return s;
    };
    int order = opt.min_order;
    cplx prev = apply(order);
    int steps = 0;
    while (true) {
      const int next = order * 2;
      if (next > opt.max_order) throw NonConvergence("integrate_region: order limit reached", prev, std::abs(prev));
      cplx cur = apply(next);
      ++steps;
      const double err = std::abs(cur - prev);
      if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(cur))) return Estimate{cur, err, steps, true};
      prev = cur;
      order = next;
    }
  }
  Rng rng(opt.seed);
  cplx sum = 0.0;
  double sq = 0.0, volume = 1.0;
  for (std::size_t i = 0; i < opt.mc_samples; ++i) {
    Point x = detail::mc_point(region, rng, volume);
    if (x.empty()) continue;
    const cplx v = detail::to_cplx(f(x));
    sum += v;
    sq += std::norm(v);
  }
  const double N = double(opt.mc_samples);
  const cplx mean = sum / N;
  const double var = std::max(0.0, sq / N - std::norm(mean));
  const double se = volume * std::sqrt(var / N);
  const cplx value = volume * mean;
  if (se > std::max(cfg.abs_tol, opt.mc_rel_tol * std::abs(value)))
    throw MonteCarloVariance("integrate_region: Monte Carlo error above tolerance", value.real(), se);
  return Estimate{value, se, int(opt.mc_samples), true};
}

}  // namespace invgauss
