#include <cmath>

#include "doctest.h"
#include "laxtower/lie.hpp"

using namespace laxtower;

namespace {

constexpr RMatrixName kAllSpecs[] = {RMatrixName::benny, RMatrixName::dtoda, RMatrixName::dkp,
                                     RMatrixName::dmkp, RMatrixName::ddym};

Algebra wide_algebra(RMatrixName r) {
  return Algebra(AlgebraContext::for_rmatrix(r, 32, -30, 30));
}

}  // namespace

TEST_CASE("lie bracket basics") {
  const FourierField f = FourierField::harmonic(2, 0.4, -0.3) + FourierField::constant(1.0);
  for (RMatrixName r : {RMatrixName::benny, RMatrixName::dtoda}) {
    const Algebra alg = wide_algebra(r);
    Rng rng(1);
    const LaurentElement u = rng.element(-2, 2, 3);
    CHECK(lie_bracket(alg, u, u).is_zero());
  }
  const Algebra alg = wide_algebra(RMatrixName::benny);
  const LaurentElement b =
      lie_bracket(alg, LaurentElement::lambda_power(1), LaurentElement::monomial(0, f));
  CHECK(max_difference(b, LaurentElement::monomial(0, f.derivative())) < 1e-15);
  const LaurentElement b0 = lie_bracket(alg, LaurentElement::lambda_power(1),
                                        LaurentElement::monomial(0, f), Variant::zero);
  CHECK(max_difference(b0, LaurentElement::monomial(1, f.derivative())) < 1e-15);
}

TEST_CASE("jacobi, leibniz and trace of brackets") {
  for (Variant var : {Variant::minus_one, Variant::zero}) {
    const Algebra alg = wide_algebra(var == Variant::zero ? RMatrixName::dtoda : RMatrixName::benny);
    Rng rng(var == Variant::zero ? 31 : 30);
    for (int t = 0; t < 10; ++t) {
      const LaurentElement u = rng.element(-1, 1, 2, 0.5);
      const LaurentElement v = rng.element(-1, 1, 2, 0.5);
      const LaurentElement w = rng.element(-1, 1, 2, 0.5);
      const LaurentElement cyc = lie_bracket(alg, lie_bracket(alg, u, v), w) +
                                 lie_bracket(alg, lie_bracket(alg, v, w), u) +
                                 lie_bracket(alg, lie_bracket(alg, w, u), v);
      CHECK(cyc.max_abs_mode() < 1e-10);
      const LaurentElement lhs = lie_bracket(alg, u, alg.multiply(v, w));
      const LaurentElement rhs =
          alg.multiply(lie_bracket(alg, u, v), w) + alg.multiply(v, lie_bracket(alg, u, w));
      CHECK(max_difference(lhs, rhs) < 1e-11);
      CHECK(std::abs(alg.trace(lie_bracket(alg, u, v))) < 1e-11);
    }
  }
}

TEST_CASE("projections") {
  Rng rng(4);
  const LaurentElement u = rng.element(-4, 4, 2);
  for (RMatrixName r : kAllSpecs) {
    const RMatrixSpec spec = RMatrixSpec::get(r);
    const LaurentElement p = project(u, spec.plus);
    const LaurentElement m = project(u, spec.minus);
    CHECK(max_difference(project(p, spec.plus), p) == 0.0);
    CHECK(max_difference(project(m, spec.minus), m) == 0.0);
    CHECK(max_difference(p + m, u) < 1e-15);
  }

  const FourierField u1 = FourierField::constant(1.0) + FourierField::harmonic(1, 0.2, 0.0);
  const FourierField u0 = FourierField::harmonic(1, 0.0, 0.5);
  LaurentElement L;
  L.set(1, u1);
  L.set(0, u0);
  L.set(-1, u1);
  LaurentElement k;
  k.set(1, u1);
  k.set(-1, -u1);
  LaurentElement l;
  l.set(0, u0);
  l.set(-1, 2.0 * u1);
  CHECK(max_difference(project(L, SubspaceId::todak()), k) == 0.0);
  CHECK(max_difference(project(L, SubspaceId::todal()), l) == 0.0);

  LaurentElement B = LaurentElement::lambda_power(1);
  B.set(0, u0);
  B.set(-1, u1);
  CHECK(max_difference(project(B, SubspaceId::ge_k(1)), LaurentElement::lambda_power(1)) == 0.0);
}

TEST_CASE("r-matrix involution and adjoint") {
  for (RMatrixName r : kAllSpecs) {
    const RMatrixSpec spec = RMatrixSpec::get(r);
    Rng rng(50);
    const LaurentElement kp = project(rng.element(-3, 3, 2), spec.plus);
    const LaurentElement lm = project(rng.element(-3, 3, 2), spec.minus);
    CHECK(max_difference(r_apply(kp, r), kp) == 0.0);
    CHECK(max_difference(r_apply(lm, r), -lm) == 0.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const LaurentElement u = rng.element(-4, 4, 2);
      const LaurentElement v = rng.element(-4, 4, 2);
      CHECK(max_difference(r_apply(r_apply(u, r), r), u) < 1e-15);
      worst = std::max(worst, std::abs(Algebra::pairing(r_apply(u, r), v, spec.bracket) -
                                       Algebra::pairing(u, r_adjoint_apply(v, r), spec.bracket)));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("r-bracket satisfies jacobi for every decomposition") {
  for (RMatrixName r : kAllSpecs) {
    const Algebra alg = wide_algebra(r);
    Rng rng(60);
    for (int t = 0; t < 10; ++t) {
      const LaurentElement x = rng.element(-2, 2, 2, 0.5);
      const LaurentElement y = rng.element(-2, 2, 2, 0.5);
      const LaurentElement z = rng.element(-2, 2, 2, 0.5);
      CHECK(r_bracket(alg, x, x).max_abs_mode() < 1e-14);
      CHECK(max_difference(r_bracket(alg, x, y), -r_bracket(alg, y, x)) < 1e-14);
      const LaurentElement cyc = r_bracket(alg, r_bracket(alg, x, y), z) +
                                 r_bracket(alg, r_bracket(alg, y, z), x) +
                                 r_bracket(alg, r_bracket(alg, z, x), y);
      CHECK(cyc.max_abs_mode() < 1e-10);
    }
  }
  const Algebra benny = wide_algebra(RMatrixName::benny);
  const LaurentElement y = LaurentElement::monomial(-1, FourierField::harmonic(1, 0.3, 0.7));
  CHECK(r_bracket(benny, LaurentElement::lambda_power(1), y).max_abs_mode() < 1e-15);
}

TEST_CASE("subalgebra closure") {
  Rng rng(70);
  for (int k : {0, 1, 2}) {
    CHECK(subalgebra_closure_defect(SubspaceId::le_k_minus_1(k), Variant::minus_one, rng) < 1e-12);
    CHECK(subalgebra_closure_defect(SubspaceId::ge_k(k), Variant::minus_one, rng) < 1e-12);
  }
  CHECK(subalgebra_closure_defect(SubspaceId::le_k_minus_1(3), Variant::minus_one, rng) > 0.1);
  CHECK(subalgebra_closure_defect(SubspaceId::todak(), Variant::zero, rng) < 1e-12);
  CHECK(subalgebra_closure_defect(SubspaceId::todal(), Variant::zero, rng) < 1e-12);
}
