#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "laxmono/cpoly.hpp"
#include "laxmono/error.hpp"
#include "oracles.hpp"

using namespace laxmono;

namespace {

constexpr double kPi = 3.141592653589793;
const Complex I{0.0, 1.0};

Quartic normal_form(double hh, double kh) { return Quartic::real(1.0, kh, 2.0 + hh, 0.0, 1.0); }

CoefficientPath circle_path(double ch, double ck, double r) {
  return [=](double s) {
    const double phi = 2.0 * kPi * s;
    return normal_form(ch + r * std::cos(phi), ck + r * std::sin(phi));
  };
}

RootSet make_roots(Complex a, Complex b, Complex c, Complex d) {
  RootSet r;
  r.roots = {a, b, c, d};
  return r;
}

}  // namespace

TEST_CASE("eval_poly and derivative") {
  CHECK(std::abs(eval_poly(Quartic::real(1, 0, 2, 0, 1), I)) == doctest::Approx(0.0));
  CHECK(eval_poly(Quartic::real(-1, 0, 0, 0, 1), 0.0) == Complex(-1.0));
  CHECK(eval_poly(normal_form(0.1, 0.0), 1.0).real() == doctest::Approx(4.1).epsilon(1e-15));
  const Quartic q = Quartic::real(3, -1, 2, 5, -2);
  const Complex z(0.3, -0.7), dz(1e-6, 0.0);
  const Complex fd = (eval_poly(q, z + dz) - eval_poly(q, z - dz)) / (2.0 * dz);
  CHECK(std::abs(eval_derivative(q, z) - fd) < 1e-8);
}

TEST_CASE("quartic constructor flags real coefficients") {
  CHECK(Quartic::real(1, 2, 3, 4, 5).real_coeffs);
  CHECK(Quartic(std::array<Complex, 5>{1, 2, 3, 4, 5}).real_coeffs);
  CHECK_FALSE(Quartic(std::array<Complex, 5>{1, I, 3, 4, 5}).real_coeffs);
}

TEST_CASE("solve_quartic on known polynomials") {
  const RootSet unity = solve_quartic(Quartic::real(-1, 0, 0, 0, 1));
  CHECK(oracle::multiset_distance(unity, make_roots(1.0, -1.0, I, -I)) < 1e-14);

  const RootSet dbl = solve_quartic(Quartic::real(1, 0, 2, 0, 1));
  CHECK(oracle::multiset_distance(dbl, make_roots(I, I, -I, -I)) < 1e-7);

  // (x - 1)(x - 2)(x - 3)(x - 4)
  const RootSet ints = solve_quartic(Quartic::real(24, -50, 35, -10, 1));
  CHECK(oracle::multiset_distance(ints, make_roots(1.0, 2.0, 3.0, 4.0)) < 1e-12);

  // Biquadratic branch: x^4 - 5x^2 + 4
  const RootSet bq = solve_quartic(Quartic::real(4, 0, -5, 0, 1));
  CHECK(oracle::multiset_distance(bq, make_roots(1.0, -1.0, 2.0, -2.0)) < 1e-14);

  // Complex coefficients from prescribed roots.
  const RootSet want = make_roots(Complex(1, 2), Complex(-0.5, 0.1), Complex(3, -1), Complex(0, -2));
  const RootSet got = solve_quartic(Quartic(oracle::expand(Complex(2, -1), want)));
  CHECK(oracle::multiset_distance(got, want) < 1e-12);
}

TEST_CASE("solve_quartic rejects a vanishing leading coefficient") {
  try {
    solve_quartic(Quartic::real(1, 1, 1, 1, 1e-301));
    FAIL("expected DegenerateLeadingCoefficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateLeadingCoefficient);
  }
  CHECK_NOTHROW(solve_quartic(Quartic::real(1, 1, 1, 1, 1e-299)));
}

TEST_CASE("discriminant against the root-product oracle") {
  CHECK(std::abs(discriminant(Quartic::real(1, 0, 2, 0, 1))) == 0.0);
  const Quartic unity = Quartic::real(-1, 0, 0, 0, 1);
  CHECK(std::abs(discriminant(unity) - Complex(-256.0)) < 1e-12);

  const Quartic sp = Quartic::real(1.0, 0.0, 2.0 * 1.1, -2.0 * 0.05, 1.0);
  const Complex d = discriminant(sp);
  CHECK(std::abs(d) > 1e-6);
  CHECK(std::abs(d - oracle::discriminant_from_roots(sp, solve_quartic(sp))) < 1e-10 * std::abs(d));

  std::mt19937_64 rng(7);
  for (int n = 0; n < 200; ++n) {
    const Quartic q = oracle::random_quartic(rng, n % 2 == 0);
    const Complex dq = discriminant(q);
    const Complex want = oracle::discriminant_from_roots(q, oracle::companion_roots(q));
    CHECK(std::abs(dq - want) <= 1e-7 * std::max(std::abs(dq), std::pow(q.max_abs_coeff(), 6) * 1e-6));
  }
}

TEST_CASE("match_roots") {
  const RootSet prev = make_roots(I + 0.1, I - 0.1, -I + 0.1, -I - 0.1);
  SUBCASE("identical sets") {
    const RootMatch m = match_roots(prev, prev);
    CHECK(m.perm.is_identity());
    CHECK(std::isinf(m.quality));
  }
  SUBCASE("small uniform motion") {
    RootSet next = prev;
    for (auto& z : next.roots) z += Complex(0.01, 0.0);
    const RootMatch m = match_roots(prev, next);
    CHECK(m.perm.is_identity());
    CHECK(m.quality > 1.0);
  }
  SUBCASE("shuffled output is undone") {
    const RootSet next = make_roots(prev[2], prev[0], prev[3], prev[1]);
    const RootMatch m = match_roots(prev, next);
    for (int i = 0; i < 4; ++i) CHECK(next[m.perm.image[i]] == prev[i]);
  }
  SUBCASE("large step across a near-collision is flagged") {
    const RootSet p2 = make_roots(Complex(-0.05, 1.0), Complex(0.05, 1.0), Complex(-0.05, -1.0), Complex(0.05, -1.0));
    const RootSet n2 = make_roots(Complex(0.0, 1.05), Complex(0.0, 0.95), Complex(0.0, -0.95), Complex(0.0, -1.05));
    const RootMatch m = match_roots(p2, n2);
    CHECK(m.quality < TrackOptions{}.guard);
  }
}

TEST_CASE("permutation helpers") {
  Permutation4 p;
  p.image = {1, 0, 3, 2};
  CHECK(p.is_double_transposition());
  CHECK(p.cycle_notation() == "(1 2)(3 4)");
  CHECK(p.after(p).is_identity());
  Permutation4 c;
  c.image = {1, 2, 0, 3};
  CHECK_FALSE(c.is_double_transposition());
  CHECK(c.cycle_notation() == "(1 2 3)");
  CHECK(Permutation4::identity().cycle_notation() == "()");
  Permutation4 t;
  t.image = {1, 0, 2, 3};
  CHECK_FALSE(t.is_double_transposition());
  // after(): i -> this.image[first.image[i]]
  CHECK(c.after(t).image == std::array<int, 4>{2, 1, 0, 3});
}

TEST_CASE("track_roots on a constant path") {
  const Quartic q = Quartic::real(24, -50, 35, -10, 1);
  const RootTrack tr = track_roots([&](double) { return q; }, {32, 3.0, 20});
  for (const auto& p : tr.step_perms) CHECK(p.is_identity());
  CHECK(loop_permutation(tr).is_identity());
  CHECK(tr.rootsets.size() == tr.params.size());
}

TEST_CASE("normal-form loop around the origin exchanges the roots near each double root") {
  const RootTrack tr = track_roots(circle_path(0.0, 0.0, 0.01));
  CHECK(oracle::multiset_distance(tr.rootsets.front(), tr.rootsets.back()) < 1e-12);
  for (double q : tr.quality) CHECK(q >= 3.0);

  const Permutation4 p = loop_permutation(tr);
  REQUIRE(p.is_double_transposition());
  const RootSet& r0 = tr.rootsets.front();
  for (int i = 0; i < 4; ++i) {
    CHECK((r0[i].imag() > 0) == (r0[p.image[i]].imag() > 0));
    // Tracked order: root i ends where root image[i] started.
    CHECK(std::abs(tr.rootsets.back()[i] - r0[p.image[i]]) < 1e-9);
  }
}

TEST_CASE("normal-form loop away from the origin is trivial at two resolutions") {
  const RootTrack coarse = track_roots(circle_path(0.5, 0.0, 0.1), {256, 3.0, 20});
  const RootTrack fine = track_roots(circle_path(0.5, 0.0, 0.1), {1024, 3.0, 20});
  CHECK(loop_permutation(coarse).is_identity());
  CHECK(loop_permutation(fine).is_identity());
}

TEST_CASE("loop permutation is stable under doubling the sample count") {
  for (int n : {16, 32, 64, 128}) {
    const Permutation4 a = loop_permutation(track_roots(circle_path(0.0, 0.0, 0.05), {n, 3.0, 20}));
    const Permutation4 b = loop_permutation(track_roots(circle_path(0.0, 0.0, 0.05), {2 * n, 3.0, 20}));
    CHECK(a == b);
  }
}

TEST_CASE("tracking through a double root is refused") {
  const CoefficientPath through = [](double s) { return normal_form(s - 0.5, 0.0); };
  try {
    track_roots(through, {16, 3.0, 20});
    FAIL("expected RefinementExhausted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RefinementExhausted);
  }
}

TEST_CASE("loop_permutation requires a closed path") {
  const RootTrack tr = track_roots([](double s) { return normal_form(0.5 + s, 0.0); }, {16, 3.0, 20});
  try {
    loop_permutation(tr);
    FAIL("expected NotClosed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotClosed);
  }
}

TEST_CASE("track_roots validates its options") {
  const CoefficientPath p = [](double) { return normal_form(1.0, 0.0); };
  CHECK_THROWS_AS(track_roots(p, {8, 3.0, 20}), std::invalid_argument);
  CHECK_THROWS_AS(track_roots(p, {16, 1.0, 20}), std::invalid_argument);
}

TEST_CASE("random ensemble: reconstruction, companion oracle, conjugate closure") {
  std::mt19937_64 rng(20240917);
  int tested = 0, skipped = 0;
  double worst_rec = 0.0, worst_oracle = 0.0, worst_conj = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const bool real = n % 2 == 0;
    const Quartic q = oracle::random_quartic(rng, real);
    const double scale = q.max_abs_coeff();
    if (std::abs(discriminant(q)) / std::pow(scale, 6) < 1e-12) {
      ++skipped;
      continue;
    }
    ++tested;
    const RootSet r = solve_quartic(q);
    const auto rec = oracle::expand(q.a[4], r);
    for (int i = 0; i < 5; ++i) worst_rec = std::max(worst_rec, std::abs(rec[i] - q.a[i]) / scale);

    const RootSet ref = oracle::companion_roots(q);
    double rmax = 1.0;
    for (const auto& z : ref.roots) rmax = std::max(rmax, std::abs(z));
    worst_oracle = std::max(worst_oracle, oracle::multiset_distance(r, ref) / rmax);

    if (real) {
      RootSet c;
      for (int i = 0; i < 4; ++i) c[i] = std::conj(r[i]);
      worst_conj = std::max(worst_conj, oracle::multiset_distance(r, c) / rmax);
    }
  }
  MESSAGE("tested ", tested, " skipped ", skipped, " rec ", worst_rec, " oracle ", worst_oracle, " conj ", worst_conj);
  CHECK(tested > 9000);
  CHECK(worst_rec < 1e-9);
  CHECK(worst_oracle < 1e-9);
  CHECK(worst_conj < 1e-9);
}
