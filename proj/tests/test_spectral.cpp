#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "invgauss/rng.hpp"
#include "invgauss/spectral.hpp"

using namespace invgauss;
using Catch::Approx;

TEST_CASE("Hermite polynomials") {
  CHECK(hermite(0, 0.3) == 1.0);
  CHECK(hermite(1, 0.3) == Approx(0.6));
  CHECK(hermite(2, 1.0) == Approx(2.0));
  for (double x : {-1.7, -0.2, 0.0, 0.9, 2.4})
    for (int k = 1; k < 15; ++k) {
      const double res = hermite(k + 1, x) - 2 * x * hermite(k, x) + 2 * k * hermite(k - 1, x);
      CHECK(std::abs(res) <= 1e-10 * std::max(1.0, std::abs(hermite(k + 1, x))));
    }
  CHECK_THROWS_AS(hermite(-1, 0.0), DomainError);
}

TEST_CASE("finite-difference A on Hermite eigenfunctions") {
  auto one = [](const Point&) { return 1.0; };
  CHECK(std::abs(apply_A_fd(one, {0.4, -1.2})) <= 1e-9);
  for (int k = 0; k <= 3; ++k) {
    auto f = [k](const Point& p) { return hermite_gamma(k, p[0]); };
    for (double x : {-1.1, 0.35, 0.8, 1.6}) {
      const double expect = (k + 1) * hermite_gamma(k, x);
      const double got = apply_A_fd(f, {x}, 1e-3);
      CHECK(std::abs(got - expect) <= 1e-4 * std::max(std::abs(expect), 1e-2));
    }
  }
  // Tensor eigenfunction in two dimensions, eigenvalue |k| + n.
  const std::vector<int> k{2, 1};
  auto f = [&](const Point& p) { return eigenfunction(k, p); };
  const Point x{0.3, -0.7};
  CHECK(apply_A_fd(f, x, 1e-3, true) == Approx(eigenvalue(k) * eigenfunction(k, x)).epsilon(1e-6));
  CHECK(eigenvalue(k) == 5.0);
}

TEST_CASE("finite-difference A converges at second order") {
  auto f = [](const Point& p) { return std::sin(p[0]) * std::exp(-0.5 * p[0] * p[0]); };
  // Exact -f''/2 - x f'.
  const double x = 0.7;
  const double e = std::exp(-0.5 * x * x);
  const double fp = (std::cos(x) - x * std::sin(x)) * e;
  const double fpp = (-std::sin(x) - std::sin(x) - x * std::cos(x)) * e - x * (std::cos(x) - x * std::sin(x)) * e;
  const double exact = -0.5 * fpp - x * fp;
  const double e1 = std::abs(apply_A_fd(f, {x}, 0.02) - exact);
  const double e2 = std::abs(apply_A_fd(f, {x}, 0.01) - exact);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.05));
  CHECK(std::abs(apply_A_fd(f, {x}, 0.02, true) - exact) < e2 / 10);
}

TEST_CASE("Riesz transform on eigenfunctions") {
  auto [c0, d0] = riesz_on_eigenfunction(0, 0.0);
  CHECK(c0 == -1.0);
  CHECK(d0 == 1);
  auto [c1, d1] = riesz_on_eigenfunction(1, 1.0);
  CHECK(c1 == Approx(-1.0 / std::sqrt(3.0)));
  CHECK(d1 == 2);
  // Derivative oracle: d/dx (H_k gamma) = -H_{k+1} gamma.
  for (int k = 0; k < 5; ++k)
    for (double x : {-0.6, 0.2, 1.3}) {
      const double h = 1e-5;
      const double deriv = (hermite_gamma(k, x + h) - hermite_gamma(k, x - h)) / (2 * h);
      CHECK(deriv == Approx(-hermite_gamma(k + 1, x)).epsilon(1e-6).margin(1e-9));
    }
}

TEST_CASE("multipliers") {
  CHECK(multiplier_eval({2.0, 2.0}, 7.0) == 1.0);
  CHECK(multiplier_eval({2.0, 0.0}, 1.0) == Approx(3.0));
  CHECK(multiplier_eval({0.0, 0.0, Shift::MinusIdentity}, 3.0) == 1.0);
  CHECK_THROWS_AS(multiplier_eval({1.0, 0.0, Shift::MinusIdentity}, 1.0), DomainError);
  for (double l : {0.0, 0.5, 1.0, 2.0})
    for (double m : {0.0, 0.5, 1.0, 2.0}) {
      double sup = 0.0;
      for (int k = 0; k < 2000; ++k) {
        const double z = k + 1.0;
        sup = std::max(sup, std::abs(multiplier_eval({l, m}, z)));
        CHECK(multiplier_eval({l, m}, z) * multiplier_eval({m, l}, z) == Approx(1.0).epsilon(1e-15));
      }
      CHECK(sup <= (1.0 + l) / (1.0 + std::min(l, m)) * (1.0 + m) + 1e-12);
    }
}

TEST_CASE("intertwining identity") {
  auto s = intertwining_sides(0, 1.0, 0.0);
  CHECK(s.lhs == Approx(-0.5 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.rhs == Approx(-0.5 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(check_intertwining(3, 1.5, 1.5));
  Rng g(99);
  for (int i = 0; i < 100; ++i) {
    const int k = int(g.next() % 40);
    CHECK(check_intertwining(k, g.uniform(0.0, 3.0), g.uniform(0.0, 3.0)));
  }
}

TEST_CASE("subordination eigen-identity") {
  CHECK(std::abs(subordination_eigencheck(1.0, 0.0, 0)) <= 1e-8);
  CHECK(std::abs(subordination_eigencheck(0.5, 1.0, 2)) <= 1e-8);
  CHECK(std::abs(subordination_eigencheck(cplx(1.0, 1.0), 0.5, 3)) <= 1e-8);
  for (int k = 0; k <= 10; ++k)
    for (double l : {0.0, 1.0, 2.0})
      for (cplx z : {cplx(0.5), cplx(1.0), cplx(1.5), cplx(1.0, 1.0)})
        CHECK(std::abs(subordination_eigencheck(z, l, k)) <= 1e-8);
  CHECK_THROWS_AS(subordination_eigencheck(cplx(0.0, 1.0), 0.0, 0), DomainError);
}

TEST_CASE("spectral gap") {
  for (int n = 1; n <= 4; ++n) CHECK(eigenvalue(std::vector<int>(n, 0)) == n);
}
