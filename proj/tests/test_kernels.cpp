#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "invgauss/kernels.hpp"
#include "invgauss/rng.hpp"
#include "invgauss/spectral.hpp"
#include "oracles.hpp"

using namespace invgauss;
using Catch::Approx;

namespace {
Point random_point(Rng& g, std::size_t n, double box) {
  Point p(n);
  for (double& v : p) v = g.uniform(-box, box);
  return p;
}

// A point y with |x - y| = d in a random direction.
Point at_distance(Rng& g, const Point& x, double d) {
  Point dir(x.size());
  double s = 0.0;
  do {
    s = 0.0;
    for (double& v : dir) {
      v = g.uniform(-1.0, 1.0);
      s += v * v;
    }
  } while (s < 1e-4 || s > 1.0);
  Point y(x);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += d * dir[i] / std::sqrt(s);
  return y;
}

// A pair in N_delta with |x - y| log-uniform down to 1e-4 of the allowed radius.
std::pair<Point, Point> local_pair(Rng& g, std::size_t n, double box, double delta) {
  const Point x = random_point(g, n, box);
  for (;;) {
    const double bound = delta / (1.0 + 2.0 * norm(x) + delta);
    const double d = bound * std::exp(g.uniform(std::log(1e-4), 0.0));
    Point y = at_distance(g, x, d);
    if (in_local(x, y, delta) && d > 1e-5) return {x, y};
  }
}

QuadratureConfig tight() {
  QuadratureConfig c;
  c.rel_tol = 1e-11;
  c.abs_tol = 1e-15;
  return c;
}
}  // namespace

TEST_CASE("phi and psi vectors") {
  Rng g(11);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + i % 3;
    const Point x = random_point(g, n, 4.0), y = random_point(g, n, 4.0);
    const double r = g.uniform(0.01, 0.99);
    const auto v = phi_psi(r, x, y);
    const double lhs = norm2(v.phi) - norm2(v.psi), rhs = norm2(x) - norm2(y);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
  CHECK_THROWS_AS(phi_psi(1.0, {0.0}, {1.0}), DomainError);
}

TEST_CASE("Mehler kernel: closed values, symmetry and the two measures") {
  for (double t : {0.05, 0.5, 2.0}) {
    const double expect = std::exp(-t) / std::sqrt(std::numbers::pi * (1.0 - std::exp(-2.0 * t)));
    CHECK(mehler_H(t, {0.0}, {0.0}) == Approx(expect).epsilon(1e-14));
  }
  Rng g(3);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + i % 3;
    const Point x = random_point(g, n, 2.5), y = random_point(g, n, 2.5);
    const double t = std::exp(g.uniform(-4.0, 2.0));
    CHECK(mehler_h(t, x, y) == Approx(mehler_h(t, y, x)).epsilon(1e-12));
    CHECK(mehler_H(t, x, y) == Approx(mehler_h(t, x, y) * gamma_minus1_density(y)).epsilon(1e-10));
    CHECK(mehler_h(t, x, y) > 0.0);
  }
}

TEST_CASE("Mehler kernel normalisation") {
  QuadratureConfig q = tight();
  for (double t : {0.01, 0.1, 1.0, 10.0})
    for (double x : {0.0, 1.0, 3.0}) {
      const double c = std::exp(t) * x, w = std::sqrt(std::expm1(2.0 * t));
      auto f = [&](double y) { return mehler_H(t, {x}, {y}); };
      const double total = integrate(f, c - 40 * w, c, q).real() + integrate(f, c, c + 40 * w, q).real();
      CHECK(std::abs(total - 1.0) <= 1e-8);
    }
}

TEST_CASE("Mehler semigroup property") {
  QuadratureConfig q = tight();
  for (double t : {0.3, 1.0})
    for (double s : {0.2, 0.8})
      for (double x : {0.0, 0.7})
        for (double y : {-0.4, 0.9}) {
          auto f = [&](double z) { return mehler_H(t, {x}, {z}) * mehler_H(s, {z}, {y}); };
          const double lhs = integrate(f, -30.0, 0.0, q).real() + integrate(f, 0.0, 30.0, q).real();
          CHECK(std::abs(lhs - mehler_H(t + s, {x}, {y})) <= 1e-6 * mehler_H(t + s, {x}, {y}));
        }
}

TEST_CASE("maximal Mehler kernel") {
  Rng g(8);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 1 + i % 2;
    const Point x = random_point(g, n, 3.0), y = random_point(g, n, 3.0);
    if (dist(x, y) < 1e-3) continue;
    const double m = maximal_H(x, y);
    CHECK(m >= mehler_H(1.0, x, y));
    CHECK(m == Approx(oracle::maximal_H_grid(x, y)).epsilon(1e-6));
  }
}

TEST_CASE("Phi profile and the global majorant") {
  // |x - y| = 2, |x + y| = 1: beta = 2, alpha = 2.
  CHECK(phi_profile({0.5, 0.0}, {-1.5, 0.0}) == Approx(0.5));
  // beta = 1 exactly selects the first branch.
  CHECK(phi_profile({1.0, 0.0}, {0.0, 1.0}) == Approx(0.5));
  CHECK_THROWS_AS(phi_profile({1.0, 0.0}, {1.0, 0.0}), DomainError);
  CHECK(kbar({0.0, 0.0}, {0.1, 0.0}) == 0.0);
  CHECK(kbar({1.0, 2.0}, {1.05, 2.0}) == 0.0);
  CHECK(kbar({3.0, 0.0}, {0.0, 0.0}) > 0.0);
}

TEST_CASE("Phi dominates its defining supremum") {
  auto sup_formula = [](const Point& x, const Point& y) {
    const PairGeometry p = pair_geometry(x, y);
    const double n = double(x.size());
    double best = 0.0;
    const double top = 1.0 / p.beta;
    for (int i = 1; i < 4000; ++i) {
      const double s = top * i / 4000.0;
      best = std::max(best, std::pow(1.0 - s * p.beta, n) * std::pow(s, -0.5 * n) * std::exp(-p.alpha * varphi(s) / 4.0));
    }
    return best;
  };
  Rng g(21);
  std::vector<double> ratios;
  while (ratios.size() < 2000) {
    const std::size_t n = 1 + ratios.size() % 2;
    const Point x = random_point(g, n, 5.0), y = random_point(g, n, 5.0);
    if (!in_region(x, y, Global{})) continue;
    ratios.push_back(sup_formula(x, y) / phi_profile(x, y));
  }
  double C = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) C = std::max(C, ratios[i]);
  for (std::size_t i = 1000; i < ratios.size(); ++i) CHECK(ratios[i] <= 2.0 * C);
}

TEST_CASE("complex powers vanish at positive integers") {
  CHECK(complex_power_kernel(1.0, 0.0, {0.2}, {0.9}) == 0.0);
  CHECK(complex_power_kernel(2.0, 1.0, {0.2, 0.1}, {0.9, 0.0}) == 0.0);
  CHECK_THROWS_AS(complex_power_kernel(0.5, 0.0, {0.2}, {0.2 + 1e-8}), DiagonalProximity);
}

TEST_CASE("complex power -1/2 reproduces the spectral image") {
  const QuadratureConfig kc = tight();
  for (int k : {0, 1})
    for (double x : {0.0, 0.5}) {
      auto f = [k](double y) { return hermite(k, y) * std::exp(-y * y); };
      auto K = [&](double y) { return complex_power_kernel(-0.5, 0.0, {x}, {y}, kc).real(); };
      auto paired = [&](double s) { return K(x + s) * f(x + s) + K(x - s) * f(x - s); };
      QuadratureConfig c;
      c.rel_tol = 1e-9;
      c.abs_tol = 1e-13;
      const double near = 1e-5;
      const double got = oracle::near_piece_log(paired, near) + integrate(paired, near, 1.0, c).real() +
                         integrate(paired, 1.0, oracle::kInf, c).real();
      const double expect = std::pow(k + 1.0, -0.5) * hermite(k, x) * std::exp(-x * x);
      CHECK(std::abs(got - expect) <= 1e-6);
    }
}

TEST_CASE("absolute complex-power integral is bounded by |x-y|^{-n} locally") {
  Rng g(31);
  for (double lambda : {0.0, 1.0})
    for (std::size_t n : {1u, 2u}) {
      std::vector<double> r;
      for (int i = 0; i < 1000; ++i) {
        auto [x, y] = local_pair(g, n, 4.0, 1.0);
        r.push_back(complex_power_abs_integral(0.0, lambda, x, y) * std::pow(dist(x, y), double(n)));
      }
      double C = 0.0;
      for (int i = 0; i < 500; ++i) C = std::max(C, r[i]);
      for (int i = 500; i < 1000; ++i) CHECK(r[i] <= 2.0 * C);
    }
}

TEST_CASE("imaginary power kernel: measures, majorant and spectral images") {
  Rng g(41);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + i % 2;
    const Point x = random_point(g, n, 2.0), y = random_point(g, n, 2.0);
    if (dist(x, y) < 1e-3) continue;
    const double u = g.uniform(0.3, 3.0), lambda = g.uniform(0.0, 2.0);
    const cplx K = impow_kernel(u, lambda, x, y, Measure::Lebesgue);
    const cplx k = impow_kernel(u, lambda, x, y, Measure::Gamma);
    CHECK(std::abs(K - k * gamma_minus1_density(y)) <= 1e-10 * std::abs(K) + 1e-300);
    const double C = 2.0 * std::abs(impow_constant(u)) * std::pow(std::numbers::pi, -0.5 * n);
    CHECK(std::abs(K) <= C * majorant_kprime(lambda, x, y) * (1.0 + 1e-7));
    CHECK(std::abs(impow_kernel_scaled(u, lambda, x, y) - k * std::exp(norm2(x))) <= 1e-10 * std::abs(k * std::exp(norm2(x))));
  }
  for (int k : {0, 1})
    for (double x : {0.0, 0.5}) {
      auto f = [k](double y) { return hermite_gamma(k, y); };
      const cplx got = oracle::impow_apply_1d(1.0, 0.0, f, x);
      const cplx expect = std::exp(cplx(0.0, 1.0) * std::log(k + 1.0)) * hermite_gamma(k, x);
      CHECK(std::abs(got - expect) <= 1e-5);
    }
  CHECK_THROWS_AS(impow_kernel(0.0, 0.0, {0.0}, {1.0}), DomainError);
}

TEST_CASE("Riesz kernel: parity, majorant and spectral images") {
  Rng g(51);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + i % 2;
    const Point x = random_point(g, n, 2.0), y = random_point(g, n, 2.0);
    if (dist(x, y) < 1e-3) continue;
    const double lambda = g.uniform(0.0, 2.5);
    const double K = riesz_kernel(1, lambda, x, y);
    const double C = 2.0 * std::sqrt(2.0) * std::pow(std::numbers::pi, -0.5 * (n + 1.0));
    CHECK(std::abs(K) <= C * majorant_klambda(lambda, x, y) * (1.0 + 1e-7));
    CHECK(K == Approx(riesz_kernel(1, lambda, x, y, Measure::Gamma) * gamma_minus1_density(y)).epsilon(1e-10));
    // K(x, 0) is odd in x.
    const Point mx = -1.0 * x, zero(n, 0.0);
    if (norm(x) > 1e-3)
      CHECK(riesz_kernel(1, lambda, x, zero) == Approx(-riesz_kernel(1, lambda, mx, zero)).epsilon(1e-9));
  }
  for (int k : {0, 1})
    for (double x : {0.3, 1.0}) {
      auto f = [k](double y) { return hermite_gamma(k, y); };
      const auto [c, deg] = riesz_on_eigenfunction(k, 0.0);
      CHECK(std::abs(oracle::riesz_apply_1d(0.0, f, x) - c * hermite_gamma(deg, x)) <= 1e-5);
    }
  // Spectral image with lambda > 0.
  auto f = [](double y) { return hermite_gamma(0, y); };
  const auto [c, deg] = riesz_on_eigenfunction(0, 1.0);
  CHECK(std::abs(oracle::riesz_apply_1d(1.0, f, 0.4) - c * hermite_gamma(deg, 0.4)) <= 1e-5);
  CHECK_THROWS_AS(riesz_kernel(3, 0.0, {0.0, 0.0}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(riesz_kernel(1, 0.0, {0.0, 0.0}, {0.0, 1e-7}), DiagonalProximity);
}

TEST_CASE("majorants decrease in lambda") {
  Rng g(61);
  for (int i = 0; i < 200; ++i) {
    const Point x = random_point(g, 2, 3.0), y = random_point(g, 2, 3.0);
    if (dist(x, y) < 1e-3) continue;
    CHECK(majorant_klambda(1.5, x, y) <= majorant_klambda(0.5, x, y) * (1.0 + 1e-9));
    CHECK(majorant_kprime(2.0, x, y) <= majorant_kprime(0.0, x, y) * (1.0 + 1e-9));
  }
}

TEST_CASE("local kernel K_{mu,nu}") {
  Rng g(71);
  auto scan = [&](double mu, double nu, std::size_t n) {
    std::vector<double> r;
    for (int i = 0; i < 1000; ++i) {
      auto [x, y] = local_pair(g, n, 3.0, 2.0);
      r.push_back(local_kmunu(mu, nu, x, y) * std::pow(dist(x, y), n + mu - nu - 2.0));
    }
    double C = 0.0;
    for (int i = 0; i < 500; ++i) C = std::max(C, r[i]);
    int bad = 0;
    for (int i = 500; i < 1000; ++i) bad += r[i] > 2.0 * C;
    return bad;
  };
  CHECK(scan(3.0, 1.0, 1) == 0);
  CHECK(scan(2.0, 0.0, 1) == 0);
  CHECK(scan(2.0, 0.0, 2) == 0);
  for (int i = 0; i < 100; ++i) {
    auto [x, y] = local_pair(g, 1, 3.0, 2.0);
    CHECK(local_kmunu(2.0, 0.0, x, y) <= local_kmunu(3.0, 0.0, x, y) * (1.0 + 1e-9));
  }
  CHECK_THROWS_AS(local_kmunu(1.0, 0.0, {0.0}, {0.1}), DomainError);
  CHECK_THROWS_AS(local_kmunu(3.0, 1.0, {0.0}, {5.0}), DomainError);
}

TEST_CASE("kernel dispatch") {
  const Point x{0.3, -0.2}, y{1.1, 0.4};
  CHECK(evaluate(Heat{0.5}, x, y).real() == Approx(mehler_H(0.5, x, y)));
  CHECK(evaluate(RieszComponent{2, 1.0}, x, y).real() == Approx(riesz_kernel(2, 1.0, x, y)));
  CHECK(std::abs(evaluate(ImaginaryPower{1.0, 0.0}, x, y) - impow_kernel(1.0, 0.0, x, y)) < 1e-14);
  CHECK(log_evaluate_positive(MajorantKprime{0.0}, x, y) == Approx(std::log(majorant_kprime(0.0, x, y))));
  CHECK(log_evaluate_positive(HeatMaximal{}, x, y) == Approx(log_maximal_H(x, y)));
}
