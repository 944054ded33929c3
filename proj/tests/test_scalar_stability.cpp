#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "msstab/polystab.hpp"
#include "msstab/scalar_stability.hpp"

using namespace msstab;
using C = std::complex<double>;
using RC = ReducedCoeffs<double>;

namespace {

RC make_rc(C a, C b, C c, C d) {
  RC rc;
  rc.a = a;
  rc.b = b;
  rc.c = c;
  rc.d = d;
  return rc;
}

RC random_rc(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> r(0, rmax), t(0, 2 * M_PI);
  auto z = [&] { return std::polar(r(rng), t(rng)); };
  return make_rc(z(), z(), z(), z());
}

// Characteristic polynomial coefficients of S from det(zI - S) at five
// points, solved as a Vandermonde system.
std::array<C, 4> charpoly_by_interpolation(const StabilityMatrixScalar<double>& S) {
  Eigen::Matrix<C, 5, 5> V;
  Eigen::Matrix<C, 5, 1> rhs;
  const std::array<C, 5> nodes{C(0), C(1), C(-1), C(0, 1), C(2, -1)};
  for (int k = 0; k < 5; ++k) {
    const C z = nodes[k];
    rhs(k) = (z * Eigen::Matrix<C, 4, 4>::Identity() - S).determinant();
    for (int j = 0; j < 5; ++j) V(k, j) = std::pow(z, 4 - j);
  }
  const Eigen::Matrix<C, 5, 1> coef = V.fullPivLu().solve(rhs);
  return {coef(1), coef(2), coef(3), coef(4)};
}

}  // namespace

TEST_CASE("stability matrix of the zero recurrence") {
  const auto S = build_stability_matrix(RC{});
  Eigen::Matrix<C, 4, 4> expect = Eigen::Matrix<C, 4, 4>::Zero();
  expect(3, 0) = 1;
  CHECK(S == expect);
}

TEST_CASE("stability matrix entries at an AB2 point") {
  const auto rc = reduce_xy<double>(catalog(Scheme::AB2), C(-0.625), C(0.125));
  CHECK(rc.a == C(0.0625));
  CHECK(rc.b == C(0.125));
  CHECK(rc.c == C(0.3125));
  CHECK(rc.d == C(0));
  const auto S = build_stability_matrix(rc);
  CHECK(S(0, 0) == C(0.01953125));
  CHECK(S(0, 3) == C(0.09765625));
  CHECK(S.row(3) == Eigen::Matrix<C, 1, 4>(1, 0, 0, 0));
}

TEST_CASE("characteristic polynomial matches the coefficient formulas") {
  std::mt19937_64 rng(12);
  for (int s = 0; s < 500; ++s) {
    const auto rc = random_rc(rng, 1.5);
    const auto S = build_stability_matrix(rc);
    CHECK(S(0, 0).imag() == 0);
    CHECK(S(0, 0).real() >= 0);
    const auto cp = charpoly_by_interpolation(S);
    const auto p = quartic_coeffs(rc);
    const std::array<double, 4> pv{p.p1, p.p2, p.p3, p.p4};
    for (int k = 0; k < 4; ++k) {
      REQUIRE(std::abs(cp[k] - pv[k]) <= 1e-9 * std::max(1.0, std::abs(pv[k])));
    }
    CHECK(p.p4 >= 0);
  }
  const auto ab2 = reduce_xy<double>(catalog(Scheme::AB2), C(-0.625), C(std::sqrt(0.5)));
  const auto cp = charpoly_by_interpolation(build_stability_matrix(ab2));
  const auto p = quartic_coeffs(ab2);
  CHECK(std::abs(cp[0] - p.p1) < 1e-12);
  CHECK(std::abs(cp[1] - p.p2) < 1e-12);
  CHECK(std::abs(cp[2] - p.p3) < 1e-12);
  CHECK(std::abs(cp[3] - p.p4) < 1e-12);
}

TEST_CASE("quartic coefficients of special cases") {
  const auto zero = quartic_coeffs(RC{});
  CHECK(zero.p1 == 0);
  CHECK(zero.p2 == 0);
  CHECK(zero.p3 == 0);
  CHECK(zero.p4 == 0);
  const double a = 0.3, c = -0.7;
  const auto p = quartic_coeffs(make_rc(a, 0, c, 0));
  CHECK(p.p1 == doctest::Approx(-a * a));
  CHECK(p.p2 == doctest::Approx(-2 * c * c - 2 * a * a * c));
  CHECK(p.p3 == doctest::Approx(-a * a * c * c));
  CHECK(p.p4 == doctest::Approx(c * c * c * c));
}

TEST_CASE("two forms of p3 agree") {
  std::mt19937_64 rng(13);
  for (int s = 0; s < 1000; ++s) {
    const auto rc = random_rc(rng, 1.5);
    const double p3 = quartic_coeffs(rc).p3;
    const double alt = -2 * (std::conj(rc.a) * rc.b * rc.c * std::conj(rc.d)).real() +
                       std::norm(rc.c) * (std::norm(rc.b) - std::norm(rc.a));
    REQUIRE(std::abs(p3 - alt) <= 1e-13 * std::max(1.0, std::abs(p3)));
  }
}

TEST_CASE("theorem conditions on trivial inputs") {
  CHECK(theorem_conditions(RC{}).stable());
  const auto v = theorem_conditions(make_rc(0, 0, 1, 1));
  CHECK(v.unstable());
  REQUIRE(v.failed_condition);
  CHECK(*v.failed_condition == 1);
}

TEST_CASE("theorem conditions agree with the quartic criteria") {
  std::mt19937_64 rng(14);
  int compared = 0, stable = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto rc = random_rc(rng, 1.5);
    const auto p = quartic_coeffs(rc);
    const double rho = root_radius(p);
    if (std::abs(rho - 1) <= 1e-9) continue;
    const auto th = theorem_conditions(rc);
    const auto jury = schur_cohn_jury(p);
    if (th.marginal() || jury.marginal()) continue;
    const Status expect = rho < 1 ? Status::Stable : Status::Unstable;
    REQUIRE(th.status == expect);
    REQUIRE(jury.status == expect);
    ++compared;
    stable += th.stable();
  }
  CHECK(compared > 9900);
  CHECK(stable > 50);
}

TEST_CASE("sufficient conditions imply stability") {
  CHECK(sufficient_conditions(RC{}));
  std::mt19937_64 rng(15);
  int hits = 0;
  for (int s = 0; s < 200000 && hits < 2000; ++s) {
    const auto rc = random_rc(rng, 0.8);
    if (!sufficient_conditions(rc)) continue;
    ++hits;
    REQUIRE(theorem_conditions(rc).status != Status::Unstable);
    REQUIRE(root_radius(quartic_coeffs(rc)) < 1);
  }
  CHECK(hits >= 1000);
}

TEST_CASE("sufficient conditions hold inside the AB2 region") {
  for (double x : {-0.9, -0.6, -0.3, -0.1}) {
    const double ymax = 2 * x * (x - 2) * (x + 1) / (x + 2);
    for (double frac : {0.1, 0.5, 0.9}) {
      const auto rc = reduce_xy<double>(catalog(Scheme::AB2), C(x), C(std::sqrt(frac * ymax)));
      CHECK(sufficient_conditions(rc));
      CHECK(theorem_conditions(rc).stable());
    }
  }
}

TEST_CASE("Adams-type proposition") {
  CHECK(abam_conditions(RC{}).stable());
  CHECK(abam_real_remark(0.25, std::sqrt(0.5), 0.25));
  CHECK(abam_conditions(make_rc(0.25, std::sqrt(0.5), 0.25, 0)).stable());
  CHECK(theorem_conditions(make_rc(0.25, std::sqrt(0.5), 0.25, 0)).stable());
  CHECK_THROWS_AS(abam_conditions(make_rc(0, 0, 0, 0.1)), Error);

  const auto am2 = reduce_xy<double>(catalog(Scheme::AM2), C(-12), C(0.5));
  CHECK(abam_conditions(am2).unstable());
  CHECK(theorem_conditions(am2).unstable());
}

TEST_CASE("Adams-type proposition matches the theorem where the sign clause holds") {
  std::mt19937_64 rng(16);
  int compared = 0, findings = 0;
  for (int s = 0; s < 20000; ++s) {
    auto rc = random_rc(rng, 1.2);
    rc.d = 0;
    const auto th = theorem_conditions(rc);
    const auto prop = abam_conditions(rc);
    if (th.marginal() || prop.marginal()) continue;
    const bool sign_holds = (rc.a * rc.a * std::conj(rc.c)).real() >= -std::norm(rc.a) * std::norm(rc.c);
    if (sign_holds) {
      REQUIRE(th.status == prop.status);
      ++compared;
    } else if (th.status != prop.status) {
      ++findings;
    }
  }
  CHECK(compared > 5000);
  MESSAGE("Adams-type sign-clause findings: " << findings);
}

TEST_CASE("Adams-type real remark on its literal domain") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5), uc(0.01, 0.99);
  int compared = 0;
  for (int s = 0; s < 5000; ++s) {
    const double a = u(rng), b = u(rng), c = uc(rng);
    const auto prop = abam_conditions(make_rc(a, b, c, 0));
    if (prop.marginal()) continue;
    REQUIRE(abam_real_remark(a, b, c) == prop.stable());
    ++compared;
  }
  CHECK(compared > 4000);
}

TEST_CASE("hereditary proposition") {
  CHECK(hereditary_conditions(RC{}).stable());
  CHECK(hereditary_real_remark(0.5, 0.2, std::sqrt(0.3)));
  CHECK(hereditary_conditions(make_rc(0.5, 0, 0.2, std::sqrt(0.3))).stable());
  CHECK(hereditary_conditions(make_rc(0.1, 0, 0.2, std::sqrt(1.1 - 0.04))).unstable());
  CHECK_THROWS_AS(hereditary_conditions(make_rc(0, 0.1, 0, 0)), Error);

  std::mt19937_64 rng(18);
  int compared = 0;
  for (int s = 0; s < 20000; ++s) {
    auto rc = random_rc(rng, 1.2);
    rc.b = 0;
    const auto th = theorem_conditions(rc);
    const auto prop = hereditary_conditions(rc);
    const bool sign_holds = (rc.a * rc.a * std::conj(rc.c)).real() >= -std::norm(rc.a) * std::norm(rc.c);
    if (th.marginal() || prop.marginal() || !sign_holds) continue;
    REQUIRE(th.status == prop.status);
    ++compared;
  }
  CHECK(compared > 5000);
}

TEST_CASE("test equation stability") {
  CHECK(sde_stable(ScalarTestEq<double>{-5.0, 2.0}));
  CHECK_FALSE(sde_stable(ScalarTestEq<double>{0.0, 0.0}));
  CHECK_FALSE(sde_stable(ScalarTestEq<double>{-1.0, std::sqrt(2.0) * (1 + 1e-15)}));
  CHECK(sde_stable(ScalarTestEq<double>{C(-1, 5), C(1, 0.5)}));
}

TEST_CASE("closed-form regions") {
  CHECK(region_ab2(0.125, -5.0, 2.0));
  CHECK(2 * -5.0 * (-0.625 - 2) * (-0.625 + 1) / (-0.625 + 2) == doctest::Approx(7.1591).epsilon(1e-4));
  CHECK_FALSE(region_ab2(1.0, -5.0, 2.0));
  CHECK(region_am2(0.125, -5.0, 2.0));
  CHECK(-5.0 * (-0.625 - 2) * (-0.625 + 6) / (2 * (3 + 0.625)) == doctest::Approx(9.7306).epsilon(1e-4));
  CHECK_FALSE(region_am2(1.0, -7.0, 0.0));
}

TEST_CASE("region membership equals the theorem on a coarse grid") {
  int compared = 0;
  for (int i = 0; i < 120; ++i) {
    const double x = -8 + (i + 0.5) * 8.0 / 120;
    for (int j = 0; j < 120; ++j) {
      const double Y = (j + 0.5) * 16.0 / 120;
      for (Scheme s : {Scheme::AB2, Scheme::AM2}) {
        const double margin = s == Scheme::AB2 ? region_ab2_margin_xy(x, Y) : region_am2_margin_xy(x, Y);
        if (std::abs(margin) <= 1e-6) continue;
        const auto v = theorem_conditions(reduce_xy<double>(catalog(s), C(x), C(std::sqrt(Y))));
        REQUIRE(v.stable() == (margin > 0));
        if (margin > 0) REQUIRE(Y < -2 * x);
        ++compared;
      }
    }
  }
  CHECK(compared > 28000);
}

TEST_CASE("step-size bounds") {
  const ScalarTestEq<double> eq{-5.0, 2.0};
  CHECK(h0_ab2(eq) == doctest::Approx((-6 + std::sqrt(516.0)) / 100).epsilon(1e-14));
  CHECK(h0_ab2(eq) == doctest::Approx(0.16714).epsilon(1e-3));
  CHECK(h0_am2(eq) == doctest::Approx((6 + std::sqrt(216.0)) / 25).epsilon(1e-14));
  CHECK(h0_am2(eq) == doctest::Approx(0.82788).epsilon(1e-4));
  CHECK(classify(Scheme::AB2, eq, 0.165).stable());
  CHECK(classify(Scheme::AB2, eq, 0.99 * h0_ab2(eq)).stable());
  CHECK(classify(Scheme::AM2, eq, 0.99 * h0_am2(eq)).stable());

  const ScalarTestEq<double> edge{-5.0, std::sqrt(10.0)};
  CHECK(h0_ab2(edge) == doctest::Approx(0).epsilon(1e-6));
  CHECK(h0_am2(edge) == doctest::Approx(0).epsilon(1e-6));

  CHECK_THROWS_AS(h0_ab2(ScalarTestEq<double>{-1.0, 2.0}), Error);
  CHECK_THROWS_AS(h0_am2(ScalarTestEq<double>{C(-1, 1), 0.5}), Error);
  CHECK(h0_ab2(ScalarTestEq<double>{C(-2, 1), C(0.5, 0.5)}) > 0);
}

TEST_CASE("step-size bounds are sufficient on random real parameters") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> lam(-20, -0.05), frac(0, 1);
  for (int s = 0; s < 1000; ++s) {
    const double l = lam(rng);
    const double mu = std::sqrt(frac(rng) * -2 * l);
    const ScalarTestEq<double> eq{l, mu};
    const double hab = h0_ab2(eq), ham = h0_am2(eq);
    if (hab > 0) REQUIRE(classify(Scheme::AB2, eq, 0.99 * hab).status != Status::Unstable);
    if (ham > 0) REQUIRE(classify(Scheme::AM2, eq, 0.99 * ham).status != Status::Unstable);
  }
}

TEST_CASE("classification at the experiment parameters") {
  const ScalarTestEq<double> eq{-5.0, 2.0};
  CHECK(classify(Scheme::BDF2, eq, 1.0).stable());
  CHECK(classify(Scheme::AB2, eq, 1.0).unstable());
  const ScalarTestEq<double> neutral{0.0, 0.0};
  for (Scheme s : kAllSchemes) CHECK_FALSE(classify(s, neutral, 1.0).stable());
  CHECK(classify(Scheme::AB2, neutral, 1.0).marginal());
}

TEST_CASE("improved and standard coincide without noise") {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> lam(-10, 2), hh(0.01, 4);
  for (int s = 0; s < 300; ++s) {
    const ScalarTestEq<double> eq{lam(rng), 0.0};
    const double h = hh(rng);
    for (Scheme st : {Scheme::AB2, Scheme::AM2, Scheme::BDF2}) {
      try {
        REQUIRE(classify(st, eq, h).status == classify(improved_variant(st), eq, h).status);
      } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::SingularDenominator);
      }
    }
  }
}

TEST_CASE("cross-checked classification") {
  const auto r = classify_checked(Scheme::AB2, ScalarTestEq<double>{-5.0, 2.0}, 0.125);
  CHECK(r.consistent());
  CHECK(r.theorem.stable());
  CHECK(r.rho < 1);
  REQUIRE(r.proposition);
  CHECK(r.proposition->stable());

  const auto bdf = classify_checked(Scheme::BDF2, ScalarTestEq<double>{-5.0, 2.0}, 1.0);
  CHECK(bdf.consistent());
  CHECK(bdf.rho == doctest::Approx(0.2477).epsilon(1e-3));
  CHECK_FALSE(bdf.proposition);
}
