#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "msstab/polystab.hpp"

using namespace msstab;
using C = std::complex<double>;
using Q = QuarticCoeffs<double>;

namespace {

// Monic expansion of prod (z - r_k).
Q expand(const std::array<C, 4>& r) {
  std::array<C, 5> c{C(1), 0, 0, 0, 0};  // descending
  for (const auto& root : r) {
    for (int k = 4; k >= 1; --k) c[k] -= root * c[k - 1];
  }
  return {c[1].real(), c[2].real(), c[3].real(), c[4].real()};
}

// Four roots, conjugate-closed so the coefficients are real.
std::array<C, 4> random_roots(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0, 1);
  auto disk = [&] { return std::polar(rmax * std::sqrt(u(rng)), 2 * M_PI * u(rng)); };
  auto real = [&] { return C(rmax * (2 * u(rng) - 1), 0); };
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: {
      const C z = disk(), w = disk();
      return {z, std::conj(z), w, std::conj(w)};
    }
    case 1: {
      const C z = disk();
      return {z, std::conj(z), real(), real()};
    }
    default:
      return {real(), real(), real(), real()};
  }
}

Q random_box(std::mt19937_64& rng, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  return {u(rng), u(rng), u(rng), u(rng)};
}

double min_root_gap(const Q& p) {
  const auto rs = quartic_roots(p);
  double gap = 1e300;
  for (const auto& z : rs.roots) gap = std::min(gap, std::abs(std::abs(z) - 1));
  return gap;
}

}  // namespace

TEST_CASE("schur coefficients of the zero tail") {
  const auto nu = schur_coefficients(Q{});
  CHECK(nu.nu0 == 0);
  CHECK(nu.nu1 == 0);
  CHECK(nu.nu2 == 0);
  CHECK(nu.nu3 == 0);
}

TEST_CASE("schur coefficients of z^4 - z^3") {
  const Q p{-1, 0, 0, 0};
  const auto nu = schur_coefficients(p);
  CHECK(nu.nu0 == 0);
  CHECK(nu.nu1 == 0);
  CHECK(nu.nu2 == 0);
  CHECK(nu.nu3 == doctest::Approx(-1).epsilon(1e-15));
  const auto asc = p.ascending();
  const auto rec = schur_recursion<double>(asc);
  CHECK(rec[3] == doctest::Approx(-1).epsilon(1e-15));
}

TEST_CASE("closed-form schur coefficients match the recursion at an AB2 point") {
  const double a = 0.25, c = 0.25;
  const Q p{-a * a, -2 * c * c - 2 * a * a * c, -a * a * c * c, c * c * c * c};
  CHECK(p.p1 == -0.0625);
  CHECK(p.p2 == -0.15625);
  CHECK(p.p3 == -0.00390625);
  CHECK(p.p4 == 0.00390625);
  const auto nu = schur_coefficients(p).as_array();
  const auto asc = p.ascending();
  const auto rec = schur_recursion<double>(asc);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(nu[k] - rec[k]) <= 1e-12);
}

TEST_CASE("closed form and recursion agree on random quartics") {
  std::mt19937_64 rng(11);
  int compared = 0;
  for (int s = 0; s < 5000; ++s) {
    const Q p = random_box(rng, 1.0);
    SchurCoefficients<double> nu;
    std::vector<double> rec;
    try {
      nu = schur_coefficients(p, 1e-6);
      const auto asc = p.ascending();
      rec = schur_recursion<double>(asc, 1e-6);
    } catch (const Error&) {
      continue;
    }
    ++compared;
    const auto arr = nu.as_array();
    for (int k = 0; k < 4; ++k) REQUIRE(std::abs(arr[k] - rec[k]) <= 1e-8 * std::max(1.0, std::abs(rec[k])));
  }
  CHECK(compared > 4000);
}

TEST_CASE("degenerate denominators are reported by index") {
  try {
    schur_coefficients(Q{0, 0, 0, 1});
    FAIL("expected DegenerateDenominator");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDenominator);
    CHECK(e.index() == 1);
  }
  // p4 = 0, p3 = 1: 1 - e^2 = 0
  try {
    schur_coefficients(Q{0, 0, 1, 0});
    FAIL("expected DegenerateDenominator");
  } catch (const Error& e) {
    CHECK(e.index() == 2);
  }
  // the nu verdict falls back to the roots instead of throwing
  CHECK(schur_nu_verdict(Q{0, 0, 1, 0}).status != Status::Stable);
}

TEST_CASE("general criterion on trivial polynomials") {
  CHECK(schur_cohn_general(Q{}).stable());
  CHECK_FALSE(schur_cohn_general(Q{-1, 0, 0, 0}).stable());
  CHECK(schur_cohn_jury(Q{}).stable());
}

TEST_CASE("jury criterion flags p4 beyond the unit disk") {
  const auto v = schur_cohn_jury(Q{0, 0, 0, 1.5});
  CHECK(v.unstable());
  REQUIRE(v.failed_condition);
  CHECK(*v.failed_condition == 1);
}

TEST_CASE("planted roots inside radius 0.95 are stable") {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 1000; ++s) {
    const Q p = expand(random_roots(rng, 0.95));
    REQUIRE(schur_cohn_general(p).stable());
    REQUIRE(schur_cohn_jury(p).stable());
    REQUIRE(schur_nu_verdict(p).stable());
  }
}

TEST_CASE("criteria agree with the root oracle on the box [-2,2]^4") {
  std::mt19937_64 rng(2024);
  int compared = 0, disagreements = 0, stable = 0;
  for (int s = 0; s < 10000; ++s) {
    const Q p = random_box(rng, 2.0);
    if (min_root_gap(p) <= 1e-9) continue;
    const double rho = root_radius(p);
    const Status expect = rho < 1 ? Status::Stable : Status::Unstable;
    ++compared;
    stable += expect == Status::Stable;
    const auto jury = schur_cohn_jury(p);
    const auto gen = schur_cohn_general(p);
    const auto nu = schur_nu_verdict(p);
    if (!jury.marginal() && jury.status != expect) ++disagreements;
    if (!gen.marginal() && gen.status != expect) ++disagreements;
    if (!nu.marginal() && nu.status != expect) ++disagreements;
  }
  CHECK(compared > 9900);
  CHECK(stable > 100);
  CHECK(disagreements == 0);
}

TEST_CASE("leading Schur-Cohn minors are positive exactly for stable quartics") {
  std::mt19937_64 rng(77);
  int compared = 0;
  for (int s = 0; s < 2000; ++s) {
    // half the samples from planted stable roots so both outcomes are exercised
    const Q p = s % 2 ? expand(random_roots(rng, 1.15)) : random_box(rng, 1.5);
    if (min_root_gap(p) <= 1e-6) continue;
    const auto m = schur_cohn_minors(p);
    const bool positive = std::all_of(m.begin(), m.end(), [](double v) { return v > 0; });
    REQUIRE(positive == (root_radius(p) < 1));
    ++compared;
  }
  CHECK(compared >= 1000);
}

TEST_CASE("minors match the Eigen determinant of the leading blocks") {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 200; ++s) {
    const Q p = random_box(rng, 1.5);
    const auto M = schur_cohn_matrix(p);
    const auto m = schur_cohn_minors(p);
    for (int k = 1; k <= 4; ++k) {
      const double ref = M.topLeftCorner(k, k).determinant();
      REQUIRE(std::abs(m[k - 1] - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("nu bounds agree with the general criterion") {
  std::mt19937_64 rng(8);
  int compared = 0;
  for (int s = 0; s < 5000; ++s) {
    const Q p = random_box(rng, 1.5);
    if (min_root_gap(p) <= 1e-9) continue;
    const auto gen = schur_cohn_general(p);
    const auto nu = schur_nu_verdict(p);
    if (gen.marginal() || nu.marginal()) continue;
    REQUIRE(gen.status == nu.status);
    ++compared;
  }
  CHECK(compared > 4500);
}

TEST_CASE("alternative third Jury condition agrees where the first two hold") {
  std::mt19937_64 rng(9);
  int compared = 0;
  for (int s = 0; s < 20000; ++s) {
    const Q p = random_box(rng, 2.0);
    const auto [p1, p2, p3, p4] = p;
    if (!(std::abs(p4) < 1 && std::abs(p1 + p3) < 1 + p2 + p4)) continue;
    const double d1 = 1 - p4 * p4;
    const double third = d1 * d1 - (p3 - p1 * p4) * (p3 - p1 * p4) -
                         std::abs(p2 * (1 - p4) * d1 - (p3 - p4 * p1) * (p1 - p4 * p3));
    const double alt = elaydi_third_margin(p);
    if (std::abs(third) <= 1e-12 || std::abs(alt) <= 1e-12) continue;
    REQUIRE((third > 0) == (alt > 0));
    ++compared;
  }
  CHECK(compared > 1000);
}

TEST_CASE("quartic roots of trivial polynomials") {
  const auto zero = quartic_roots(Q{});
  for (const auto& z : zero.roots) CHECK(std::abs(z) < 1e-3);
  CHECK(zero.residual <= 1e-10);

  const auto rs = quartic_roots(Q{-1, 0, 0, 0});
  CHECK(rs.spectral_radius() == doctest::Approx(1).epsilon(1e-9));
  int near_one = 0;
  for (const auto& z : rs.roots) near_one += std::abs(z - 1.0) < 1e-9;
  CHECK(near_one == 1);
}

TEST_CASE("planted real roots are recovered") {
  const std::array<C, 4> planted{0.4, 0.5, 0.7, 0.9};
  const Q p = expand(planted);
  CHECK(p.p1 == doctest::Approx(-2.5));
  CHECK(p.p2 == doctest::Approx(2.27));
  CHECK(p.p3 == doctest::Approx(-0.887));
  CHECK(p.p4 == doctest::Approx(0.126));
  auto rs = quartic_roots(p).roots;
  std::sort(rs.begin(), rs.end(), [](C u, C v) { return u.real() < v.real(); });
  for (int k = 0; k < 4; ++k) CHECK(std::abs(rs[k] - planted[k]) <= 1e-9);
}

TEST_CASE("roots satisfy Vieta relations for a generic quartic") {
  const Q p{-2.5, 2.21, -0.841, 0.1156};
  const auto rs = quartic_roots(p);
  C sum = 0, prod = 1;
  for (const auto& z : rs.roots) {
    sum += z;
    prod *= z;
  }
  CHECK(std::abs(sum - 2.5) <= 1e-9);
  CHECK(std::abs(prod - 0.1156) <= 1e-9);
  CHECK(rs.spectral_radius() > 1);  // this coefficient set has a real root near 1.0955
}

TEST_CASE("random planted roots are recovered") {
  std::mt19937_64 rng(21);
  for (int s = 0; s < 500; ++s) {
    const auto planted = random_roots(rng, 2.0);
    const Q p = expand(planted);
    const auto rs = quartic_roots(p);
    double rmax = 0;
    for (const auto& z : planted) rmax = std::max(rmax, std::abs(z));
    REQUIRE(rs.spectral_radius() == doctest::Approx(rmax).epsilon(1e-6));
  }
}
