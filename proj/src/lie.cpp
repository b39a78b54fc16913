#include "laxtower/lie.hpp"

#include <algorithm>
#include <climits>

namespace laxtower {

namespace {

LaurentElement raw_d_lambda(const LaurentElement& u) {
  LaurentElement out;
  if (u.is_zero()) return out;
  for (int d = u.lo(); d <= u.hi(); ++d) {
    if (d != 0) out.set(d - 1, static_cast<double>(d) * u.coeff(d));
  }
  return out;
}

LaurentElement todak_part(const LaurentElement& u) {
  LaurentElement k;
  if (u.is_zero()) return k;
  for (int i = 1; i <= u.hi(); ++i) {
    k.set(i, u.coeff(i));
    k.set(-i, -u.coeff(i));
  }
  return k;
}

}  // namespace

RMatrixSpec RMatrixSpec::get(RMatrixName name) {
  switch (name) {
    case RMatrixName::benny:
    case RMatrixName::dmkp:
      return {name, Variant::minus_one, SubspaceId::ge_k(1), SubspaceId::le_k_minus_1(1)};
    case RMatrixName::dkp:
      return {name, Variant::minus_one, SubspaceId::ge_k(0), SubspaceId::le_k_minus_1(0)};
    case RMatrixName::ddym:
      return {name, Variant::minus_one, SubspaceId::ge_k(2), SubspaceId::le_k_minus_1(2)};
    case RMatrixName::dtoda:
      return {name, Variant::zero, SubspaceId::todak(), SubspaceId::todal()};
  }
  return {name, Variant::minus_one, SubspaceId::ge_k(1), SubspaceId::le_k_minus_1(1)};
}

LaurentElement lie_bracket(const Algebra& alg, const LaurentElement& u, const LaurentElement& v,
                           Variant variant) {
  LaurentElement b = product(raw_d_lambda(u), Algebra::d_x(v)) -
                     product(Algebra::d_x(u), raw_d_lambda(v));
  if (variant == Variant::zero) b = b.shifted(1);
  return alg.checked(std::move(b));
}

LaurentElement project(const LaurentElement& u, SubspaceId s) {
  switch (s.kind) {
    case SubspaceKind::ge: return u.restricted(s.k, INT_MAX);
    case SubspaceKind::le: return u.restricted(INT_MIN, s.k - 1);
    case SubspaceKind::toda_k: return todak_part(u);
    case SubspaceKind::toda_l: return u - todak_part(u);
  }
  return {};
}

LaurentElement r_apply(const LaurentElement& u, RMatrixName name) {
  const RMatrixSpec spec = RMatrixSpec::get(name);
  const LaurentElement p = project(u, spec.plus);
  return p - (u - p);
}

LaurentElement r_adjoint_apply(const LaurentElement& u, RMatrixName name) {
  const RMatrixSpec spec = RMatrixSpec::get(name);
  LaurentElement plus_adj;
  if (spec.plus.kind == SubspaceKind::ge) {
    // tr₋₁ couples degree i with -1-i, so Π_{≥k}* = Π_{≤-1-k}.
    plus_adj = u.restricted(INT_MIN, -1 - spec.plus.k);
  } else if (!u.is_zero()) {
    // tr₀ couples i with -i: (Π_𝔨* v)_{-i} = v_{-i} - v_i for i > 0.
    for (int i = 1; i <= std::max(-u.lo(), u.hi()); ++i) {
      plus_adj.set(-i, u.coeff(-i) - u.coeff(i));
    }
  }
  // R* = Π₊* - Π₋* = 2Π₊* - Id.
  return 2.0 * plus_adj - u;
}

LaurentElement r_bracket(const Algebra& alg, const LaurentElement& X, const LaurentElement& Y) {
  const RMatrixName r = alg.context().rmatrix;
  return 0.5 * (lie_bracket(alg, r_apply(X, r), Y) + lie_bracket(alg, X, r_apply(Y, r)));
}

LaurentElement random_subspace_element(Rng& rng, SubspaceId s, int band, int depth) {
  switch (s.kind) {
    case SubspaceKind::ge: return rng.element(s.k, s.k + depth, band);
    case SubspaceKind::le: return rng.element(s.k - 1 - depth, s.k - 1, band);
    case SubspaceKind::toda_k: return todak_part(rng.element(-depth, depth, band));
    case SubspaceKind::toda_l: return rng.element(-depth, 0, band);
  }
  return {};
}

double subalgebra_closure_defect(SubspaceId s, Variant variant, Rng& rng, int pairs, int band) {
  AlgebraContext ctx = AlgebraContext::for_rmatrix(
      variant == Variant::zero ? RMatrixName::dtoda : RMatrixName::benny, 8 * band + 8, -64, 64);
  const Algebra alg(ctx);
  double defect = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const LaurentElement u = random_subspace_element(rng, s, band);
    const LaurentElement v = random_subspace_element(rng, s, band);
    const LaurentElement b = lie_bracket(alg, u, v, variant);
    defect = std::max(defect, (b - project(b, s)).max_abs_mode());
  }
  return defect;
}

}  // namespace laxtower
