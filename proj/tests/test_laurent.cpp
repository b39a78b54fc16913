#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "laxtower/errors.hpp"
#include "laxtower/laurent.hpp"
#include "laxtower/random.hpp"

using namespace laxtower;

namespace {

const FourierField kSin = FourierField::harmonic(1, 0.0, 1.0);

Algebra benny_algebra(int cap = 16, int lo = -12, int hi = 6) {
  return Algebra(AlgebraContext::for_rmatrix(RMatrixName::benny, cap, lo, hi));
}

// Product oracle: sample every coefficient on a grid, multiply pointwise
// degree by degree, transform back.
LaurentElement grid_product(const LaurentElement& u, const LaurentElement& v, int band) {
  const int n = 4 * band + 1;
  std::map<int, std::vector<double>> acc;
  for (int i = u.lo(); i <= u.hi(); ++i) {
    for (int j = v.lo(); j <= v.hi(); ++j) {
      const auto a = u.coeff(i).sample(n);
      const auto b = v.coeff(j).sample(n);
      auto& s = acc[i + j];
      s.resize(n, 0.0);
      for (int p = 0; p < n; ++p) s[p] += a[p] * b[p];
    }
  }
  LaurentElement out;
  for (auto& [d, vals] : acc) out.set(d, FourierField::from_grid(vals, band));
  return out;
}

}  // namespace

TEST_CASE("monomial product and unit") {
  const Algebra alg = benny_algebra();
  const LaurentElement a = LaurentElement::monomial(1, kSin);
  const LaurentElement p = alg.multiply(a, LaurentElement::lambda_power(-1));
  CHECK(p.lo() == 0);
  CHECK(p.hi() == 0);
  CHECK(max_mode_difference(p.coeff(0), kSin) == 0.0);

  Rng rng(3);
  const LaurentElement u = rng.element(-2, 2, 3);
  CHECK(max_difference(alg.multiply(LaurentElement::one(), u), u) == 0.0);
}

TEST_CASE("multiply matches the grid oracle and obeys ring laws") {
  const Algebra alg = benny_algebra(32);
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    const LaurentElement u = rng.element(-3, 2, 4);
    const LaurentElement v = rng.element(-2, 3, 5);
    const LaurentElement w = rng.element(-1, 1, 3);
    const LaurentElement uv = alg.multiply(u, v);
    CHECK(max_difference(uv, grid_product(u, v, 9)) < 1e-12);
    CHECK(max_difference(uv, alg.multiply(v, u)) < 1e-12);
    CHECK(max_difference(alg.multiply(uv, w), alg.multiply(u, alg.multiply(v, w))) < 1e-12);
    CHECK(max_difference(alg.multiply(u, v + w), uv + alg.multiply(u, w)) < 1e-12);
  }
}

TEST_CASE("multiply reports overflow instead of truncating") {
  const Algebra alg = benny_algebra(4, -3, 3);
  CHECK_THROWS_AS(alg.multiply(LaurentElement::lambda_power(2), LaurentElement::lambda_power(2)),
                  DegreeOverflow);
  const LaurentElement f = LaurentElement::monomial(0, FourierField::harmonic(3, 1.0, 0.0));
  CHECK_THROWS_AS(alg.multiply(f, f), ModeOverflow);
}

TEST_CASE("partial derivatives") {
  const Algebra alg = benny_algebra();
  const LaurentElement d = alg.d_lambda(LaurentElement::lambda_power(2));
  CHECK(max_difference(d, 2.0 * LaurentElement::lambda_power(1)) == 0.0);
  CHECK(Algebra::d_x(LaurentElement::constant(4.0)).is_zero());
  CHECK(alg.d_lambda(LaurentElement::constant(4.0)).is_zero());

  Rng rng(13);
  const LaurentElement u = rng.element(-1, 1, 2);
  const LaurentElement ux = Algebra::d_x(u);
  const double h = 1e-3;
  for (int deg = -1; deg <= 1; ++deg) {
    const FourierField& f = u.coeff(deg);
    for (double x : {0.1, 0.45, 0.8}) {
      auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
      const double oracle = (4 * central(h / 2) - central(h)) / 3;
      CHECK(std::abs(ux.coeff(deg)(x) - oracle) < 1e-8);
    }
  }

  const Algebra wide = benny_algebra(32, -20, 20);
  const LaurentElement v = rng.element(-2, 2, 3);
  const LaurentElement w = rng.element(-1, 3, 2);
  const LaurentElement uv = wide.multiply(v, w);
  CHECK(max_difference(Algebra::d_x(uv), wide.multiply(Algebra::d_x(v), w) +
                                             wide.multiply(v, Algebra::d_x(w))) < 1e-11);
  CHECK(max_difference(wide.d_lambda(uv), wide.multiply(wide.d_lambda(v), w) +
                                              wide.multiply(v, wide.d_lambda(w))) < 1e-11);
  CHECK_THROWS_AS(benny_algebra(16, -2, 2).d_lambda(LaurentElement::lambda_power(-2)),
                  DegreeOverflow);
}

TEST_CASE("traces") {
  CHECK(Algebra::trace(LaurentElement::lambda_power(-1), Variant::minus_one) == 1.0);
  CHECK(Algebra::trace(LaurentElement::monomial(0, kSin + FourierField::constant(2.0)),
                       Variant::minus_one) == 0.0);
  LaurentElement L;
  const FourierField u1 = FourierField::constant(1.5) + FourierField::harmonic(2, 0.3, 0.1);
  L.set(1, u1);
  L.set(0, FourierField::constant(3.0) + FourierField::harmonic(1, 1.0, 0.0));
  L.set(-1, u1);
  CHECK(Algebra::trace(L, Variant::zero) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("pairing") {
  CHECK(Algebra::pairing(LaurentElement::lambda_power(1), LaurentElement::lambda_power(-2),
                         Variant::minus_one) == 1.0);
  const Algebra alg = benny_algebra(32, -20, 20);
  Rng rng(17);
  for (Variant var : {Variant::minus_one, Variant::zero}) {
    for (int t = 0; t < 10; ++t) {
      const LaurentElement x = rng.element(-3, 3, 3);
      const LaurentElement y = rng.element(-3, 2, 4);
      const LaurentElement z = rng.element(-2, 3, 2);
      CHECK(Algebra::pairing(x, y, var) == doctest::Approx(Algebra::pairing(y, x, var)).epsilon(1e-14));
      // the pairing is the trace of the full product
      CHECK(std::abs(Algebra::pairing(x, y, var) - Algebra::trace(alg.multiply(x, y), var)) < 1e-12);
      CHECK(std::abs(Algebra::pairing(alg.multiply(x, y), z, var) -
                     Algebra::pairing(x, alg.multiply(y, z), var)) < 1e-12);
    }
  }
}

TEST_CASE("pairing is nondegenerate on random elements") {
  Rng rng(23);
  const LaurentElement u = rng.element(-2, 2, 2);
  bool found = false;
  for (int d = -3; d <= 3 && !found; ++d) {
    for (int k = 0; k <= 2 && !found; ++k) {
      for (int part = 0; part < 2 && !found; ++part) {
        const LaurentElement b = LaurentElement::monomial(
            d, FourierField::harmonic(k, part == 0 ? 1.0 : 0.0, part == 1 ? 1.0 : 0.0));
        found = std::abs(Algebra::pairing(u, b, Variant::minus_one)) > 1e-14;
      }
    }
  }
  CHECK(found);
}

TEST_CASE("powers") {
  const Algebra alg = benny_algebra();
  Rng rng(2);
  const LaurentElement L = rng.element(-1, 1, 2);
  CHECK(max_difference(alg.power(L, 0), LaurentElement::one()) == 0.0);
  CHECK(max_difference(alg.power(L, 1), L) == 0.0);

  LaurentElement M = LaurentElement::lambda_power(1);
  M.set(-1, kSin);
  LaurentElement expected = LaurentElement::lambda_power(2);
  expected.set(0, 2.0 * kSin);
  // sin² = 1/2 - cos(4πx)/2
  expected.set(-2, FourierField::constant(0.5) + FourierField::harmonic(2, -0.5, 0.0));
  CHECK(max_difference(alg.power(M, 2), expected) < 1e-15);
}

TEST_CASE("inverse") {
  const Algebra alg = benny_algebra(24, -12, 6);
  auto lam = alg.invert(LaurentElement::lambda_power(1), 4);
  CHECK(max_difference(lam.element, LaurentElement::lambda_power(-1)) == 0.0);
  CHECK(lam.residual == 0.0);
  auto one = alg.invert(LaurentElement::one(), 3);
  CHECK(max_difference(one.element, LaurentElement::one()) == 0.0);

  LaurentElement L = LaurentElement::lambda_power(1);
  L.set(0, 0.1 * kSin);
  auto inv = alg.invert(L, 6);
  CHECK(inv.element.hi() == -1);
  CHECK(inv.element.lo() == -6);
  CHECK(inv.residual < 2 * std::pow(0.1, 6));
  // residual bounded by the dropped tail, which decays geometrically
  CHECK(alg.invert(L, 8).residual < 2 * std::pow(0.1, 8));

  LaurentElement M = LaurentElement::monomial(1, FourierField::constant(1.0) + 0.1 * kSin);
  auto minv = alg.invert(M, 8);
  CHECK(minv.residual < 1e-13);

  CHECK_THROWS_AS(alg.invert(LaurentElement::monomial(1, kSin), 4), NotInvertible);
  CHECK_THROWS_AS(alg.invert(LaurentElement{}, 4), NotInvertible);
}
