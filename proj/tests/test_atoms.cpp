#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numbers>

#include "invgauss/atoms.hpp"

using namespace invgauss;
using Catch::Approx;

namespace {

// Closed forms of Psi_{0,sigma} in one and two dimensions (t = s^2, complete the square).
double psi0_n1(double sigma, double y) { return std::sqrt(std::numbers::pi) * std::erfc(-sigma * y); }
double psi0_n2(const Point& sigma, const Point& y) {
  const double b = dot(sigma, y);
  return std::exp(-norm2(y)) + std::sqrt(std::numbers::pi) * b * std::exp(b * b - norm2(y)) * std::erfc(-b);
}

}  // namespace

TEST_CASE("unit ball measure against closed forms") {
  // n = 1: pi^{1/2} int_{-1}^{1} e^{x^2}; n = 2: pi^2 (e - 1).
  CHECK(centered_ball_gamma_measure(2, 1.0) == Approx(std::numbers::pi * std::numbers::pi * (std::exp(1.0) - 1.0)).epsilon(1e-12));
  double series = 0.0, term = 1.0;
  for (int k = 0; k < 40; ++k) {
    series += 2.0 * term / (2 * k + 1);
    term /= (k + 1);
  }
  CHECK(centered_ball_gamma_measure(1, 1.0) == Approx(std::sqrt(std::numbers::pi) * series).epsilon(1e-12));
}

TEST_CASE("hemisphere atom") {
  for (std::size_t n : {1, 2, 3}) {
    const Atom a = hemisphere_atom(n);
    const AtomReport r = check_atom(a);
    CHECK(std::abs(r.mean) <= 1e-10);
    CHECK(r.l2_norm2 == Approx(1.0).epsilon(1e-8));
    CHECK(r.l1_norm == Approx(1.0).epsilon(1e-8));
    CHECK(r.ok());
    Point en(n, 0.0);
    en[n - 1] = 1.0;
    CHECK(pairing(a, [&](const Point& y) { return psi_special(0.0, en, y); }) > 0.0);
  }
  CHECK(hemisphere_atom(2)({0.3, 0.2}) > 0.0);
  CHECK(hemisphere_atom(2)({0.3, -0.2}) < 0.0);
  CHECK(hemisphere_atom(2)({0.9, 0.9}) == 0.0);
}

TEST_CASE("cube atom") {
  CHECK_THROWS_AS(cube_atom(1.5, 2), AdmissibilityError);
  CHECK_THROWS_AS(cube_atom(10.0, 1), DomainError);
  for (double xi : {2.0, 10.0, 50.0, 200.0}) {
    const Atom a = cube_atom(xi, 2);
    const AtomReport r = check_atom(a);
    CHECK(std::abs(r.mean) <= 1e-10);
    CHECK(r.l2_norm2 == Approx(1.0).epsilon(1e-8));
    // Q(xi) has centre norm xi and side 2/xi.
    const Cube& q = std::get<Cube>(a.support);
    CHECK(2.0 * q.half_side <= 2.0 * std::min(1.0, 1.0 / norm(q.center)) + 1e-15);
    CHECK(a.scaled({xi, 0.5 / xi}) < 0.0);
    CHECK(a.scaled({xi, -0.5 / xi}) > 0.0);
  }
  // Moment in closed form: (e^{h^2} - 1) / 2 over 2 sum_k h^{2k+1} / (k! (2k+1)).
  auto oracle = [](double xi) {
    const double h = 1.0 / xi;
    double den = 0.0, term = h;
    for (int k = 0; k < 30; ++k) {
      den += 2.0 * term / (2 * k + 1);
      term *= h * h / (k + 1);
    }
    return 0.5 * std::expm1(h * h) / den;
  };
  const double c = 10.0 * cube_upper_moment(10.0);
  for (double xi : {10.0, 50.0, 100.0}) {
    CHECK(cube_upper_moment(xi) == Approx(oracle(xi)).epsilon(1e-12));
    CHECK(xi * cube_upper_moment(xi) >= 0.5 * c);
  }
}

TEST_CASE("Psi special function") {
  for (std::size_t n : {1, 2, 3})
    for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
      Point s(n, 0.0);
      s[0] = 1.0;
      CHECK(psi_special(lambda, s, Point(n, 0.0)) == Approx(std::tgamma(0.5 * (n + lambda))).epsilon(1e-11));
    }
  CHECK(psi_special(0.0, {1.0, 0.0}, {0.0, 0.0}) == Approx(1.0).epsilon(1e-12));
  for (double y : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    CHECK(psi_special(0.0, {1.0}, {y}) == Approx(psi0_n1(1.0, y)).epsilon(1e-10));
    CHECK(psi_special(0.0, {-1.0}, {y}) == Approx(psi0_n1(-1.0, y)).epsilon(1e-10));
  }
  const Point s2{std::cos(0.4), std::sin(0.4)};
  for (const Point& y : std::vector<Point>{{0.3, -0.2}, {1.5, 0.5}, {-2.0, 1.0}, {0.0, 4.0}})
    CHECK(psi_special(0.0, s2, y) == Approx(psi0_n2(s2, y)).epsilon(1e-10));
  CHECK_THROWS_AS(psi_special(0.0, {2.0, 0.0}, {0.0, 0.0}), DomainError);
}

TEST_CASE("Psi gradient identity and lambda-harmonicity") {
  const Point s{std::cos(1.1), std::sin(1.1)};
  for (double lambda : {0.0, 0.5, 1.0, 2.0})
    for (const Point& y : std::vector<Point>{{0.2, 0.1}, {-0.5, 0.7}, {1.0, -0.3}}) {
      const double h = 1e-4;
      const double p = psi_special(lambda, s, y), p1 = psi_special(lambda + 1.0, s, y);
      for (int d = 0; d < 2; ++d) {
        Point a = y, b = y;
        a[d] += h;
        b[d] -= h;
        const double fd = (psi_special(lambda, s, a) - psi_special(lambda, s, b)) / (2.0 * h);
        CHECK(fd == Approx(-2.0 * y[d] * p + 2.0 * s[d] * p1).margin(1e-5));
      }
      const double res = apply_A_fd([&](const Point& x) { return psi_special(lambda, s, x); }, y, 1e-2, true) + lambda * p;
      CHECK(std::abs(res) <= 1e-4 * std::abs(p));
    }
  // |grad Psi(0)| = 2 Psi_{lambda+1}(0) > 0.
  for (double lambda : {0.0, 1.0}) {
    const double h = 1e-5;
    const double g0 = (psi_special(lambda, s, {h, 0.0}) - psi_special(lambda, s, {-h, 0.0})) / (2 * h);
    const double g1 = (psi_special(lambda, s, {0.0, h}) - psi_special(lambda, s, {0.0, -h})) / (2 * h);
    CHECK(std::hypot(g0, g1) == Approx(2.0 * psi_special(lambda + 1.0, s, {0.0, 0.0})).epsilon(1e-6));
  }
}

TEST_CASE("Phi special function") {
  // Phi(0) = -Gamma'(a) = -Gamma(a) digamma(a) with a = (n + lambda)/2.
  CHECK(phi_special(0.0, {1.0, 0.0}, {0.0, 0.0}) == Approx(-boost::math::digamma(1.0)).epsilon(1e-10));
  CHECK(phi_special(0.0, {1.0, 0.0}, {0.0, 0.0}) == Approx(0.5772156649015329).epsilon(1e-10));
  for (std::size_t n : {1, 2, 3})
    for (double lambda : {0.0, 0.5, 1.0}) {
      const double a = 0.5 * (n + lambda);
      Point s(n, 0.0);
      s[n - 1] = 1.0;
      CHECK(phi_special(lambda, s, Point(n, 0.0)) == Approx(-std::tgamma(a) * boost::math::digamma(a)).epsilon(1e-9));
    }
  const Point s{std::cos(0.3), std::sin(0.3)};
  for (const Point& y : std::vector<Point>{{0.2, 0.1}, {-0.5, 0.7}}) {
    CHECK(phi_special(0.5, s, y) == Approx(phi_special(0.5, -1.0 * s, -1.0 * y)).epsilon(1e-12));
    for (double lambda : {0.0, 0.5, 1.0}) {
      const double lhs = apply_A_fd([&](const Point& x) { return phi_special(lambda, s, x); }, y, 1e-2, true) +
                         lambda * phi_special(lambda, s, y);
      CHECK(lhs == Approx(2.0 * psi_special(lambda, s, y)).epsilon(1e-4));
    }
  }
}

TEST_CASE("default bump") {
  const Point s0{1.0, 0.0};
  for (const Ball& b : {Ball{{0.0, 0.0}, 1.0}, Ball{{2.0, 0.0}, 0.4}, Ball{{1.0, 1.0}, 0.5}}) {
    const BumpFunction psi = default_bump(b, s0);
    const double scale = pairing([&](const Point& x) { return std::abs(psi(x)); }, [](const Point&) { return 1.0; },
                                 BallRegion{b.center, b.radius}, QuadratureConfig{1e-3, 1e-300});
    const double m = pairing([&](const Point& x) { return psi(x); }, [](const Point&) { return 1.0; }, BallRegion{b.center, b.radius},
                             QuadratureConfig{1e-12, 1e-12 * scale});
    CHECK(std::abs(m) <= 1e-10 * scale);
    Point out = b.center;
    out[0] += b.radius * 1.0001;
    CHECK(psi(out) == 0.0);
  }
}

TEST_CASE("generated atoms") {
  const Point s0{1.0, 0.0};
  const BumpFunction psi = default_bump(Ball{{0.0, 0.0}, 1.0}, s0);
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    const Atom a = generated_atom(psi, lambda);
    const AtomReport r = check_atom(a, 8, 1e-6);
    CHECK(r.size_ok);
    CHECK(r.l2_norm2 == Approx(1.0).epsilon(1e-6));
    CHECK(r.mean_ok);
    CHECK(r.max_cancellation <= 1e-6);
    // Support preservation: ||(A + lambda)^{-1} a|| <= r_B^2 gamma(B)^{-1/2}.
    const double pre2 = pairing([&](const Point& x) { const double v = generated_preimage(a, x); return v * v; },
                                [](const Point&) { return 1.0; }, BallRegion{{0.0, 0.0}, 1.0}, QuadratureConfig{1e-10, 1e-300});
    CHECK(pre2 * a.support_measure() <= 1.0);
    Point out{1.01, 0.0};
    CHECK(a(out) == 0.0);
    CHECK(generated_preimage(a, out) == 0.0);
    // Cross-class pairing (a_lambda, Psi_mu) = (lambda - mu) (preimage, Psi_mu).
    for (double mu : {0.0, 0.5, 1.0, 2.0}) {
      if (mu == lambda) continue;
      auto P = [&](const Point& y) { return psi_special(mu, s0, y); };
      const double lhs = pairing(a, P);
      const double rhs = (lambda - mu) * pairing([&](const Point& y) { return generated_preimage(a, y); }, P,
                                                 BallRegion{{0.0, 0.0}, 1.0}, QuadratureConfig{1e-10, 1e-300});
      CHECK(std::abs(lhs) > 1e-3);
      CHECK(lhs == Approx(rhs).epsilon(1e-5));
    }
  }
  // Phi pairing of a_lambda is twice the Psi pairing of the preimage.
  const Atom a = generated_atom(psi, 0.5);
  const double lhs = pairing(a, [&](const Point& y) { return phi_special(0.5, s0, y); });
  const double rhs = 2.0 * pairing([&](const Point& y) { return generated_preimage(a, y); },
                                   [&](const Point& y) { return psi_special(0.5, s0, y); }, BallRegion{{0.0, 0.0}, 1.0},
                                   QuadratureConfig{1e-10, 1e-300});
  CHECK(lhs == Approx(rhs).epsilon(1e-5));
  CHECK(std::abs(lhs) > 1e-3);
}

TEST_CASE("generated atoms away from the origin and in one dimension") {
  const BumpFunction psi = default_bump(Ball{{2.0, 0.0}, 0.4}, {0.0, 1.0});
  const Atom a = generated_atom(psi, 1.0);
  CHECK(check_atom(a, 8, 1e-6).ok());
  const Atom b = generated_atom(default_bump(Ball{{0.0}, 1.0}, {1.0}), 0.5);
  CHECK(check_atom(b, 2, 1e-6).ok());
  CHECK_THROWS_AS(generated_atom(psi, -1.0), DomainError);
  CHECK_THROWS_AS(generated_atom(default_bump(Ball{{3.0, 0.0}, 1.0}, {1.0, 0.0}), 0.0), AdmissibilityError);
  const BumpFunction zero{Ball{{0.0, 0.0}, 1.0}, [](const Point&) { return 0.0; }};
  CHECK_THROWS_AS(generated_atom(zero, 1.0), DegenerateAtom);
}

TEST_CASE("pairing is bilinear and atoms are mean-zero") {
  const Atom a = hemisphere_atom(2);
  const Point s{0.6, 0.8};
  auto f = [&](const Point& y) { return psi_special(0.0, s, y); };
  auto g = [&](const Point& y) { return std::cos(y[0]) + y[1] * y[1]; };
  const double pf = pairing(a, f), pg = pairing(a, g);
  const double pc = pairing(a, [&](const Point& y) { return 2.5 * f(y) - 1.5 * g(y); });
  CHECK(pc == Approx(2.5 * pf - 1.5 * pg).margin(1e-12));
  CHECK(std::abs(pairing(a, [](const Point&) { return 1.0; })) <= 1e-12);
  const Region B = BallRegion{{0.0, 0.0}, 1.0};
  const double x1 = pairing(f, g, B), x2 = pairing(g, f, B);
  CHECK(x1 == Approx(x2).epsilon(1e-12));
}
