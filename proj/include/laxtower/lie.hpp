#pragma once

#include "laxtower/laurent.hpp"
#include "laxtower/random.hpp"

namespace laxtower {

enum class SubspaceKind {
  ge,      ///< degrees ≥ k
  le,      ///< degrees ≤ k - 1
  toda_k,  ///< u_{-i} = -u_i for i > 0, u_0 = 0
  toda_l,  ///< degrees ≤ 0
};

struct SubspaceId {
  SubspaceKind kind;
  int k = 0;

  static SubspaceId ge_k(int k) { return {SubspaceKind::ge, k}; }
  static SubspaceId le_k_minus_1(int k) { return {SubspaceKind::le, k}; }
  static SubspaceId todak() { return {SubspaceKind::toda_k, 0}; }
  static SubspaceId todal() { return {SubspaceKind::toda_l, 0}; }
};

/// R = Π₊ - Π₋ for a direct sum decomposition into two subalgebras.
struct RMatrixSpec {
  RMatrixName name;
  Variant bracket;
  SubspaceId plus;
  SubspaceId minus;

  static RMatrixSpec get(RMatrixName name);
};

/// [u,v]₋₁ = u_λ v_x - u_x v_λ and [u,v]₀ = λ[u,v]₋₁.
LaurentElement lie_bracket(const Algebra& alg, const LaurentElement& u, const LaurentElement& v,
                           Variant variant);
inline LaurentElement lie_bracket(const Algebra& alg, const LaurentElement& u,
                                  const LaurentElement& v) {
  return lie_bracket(alg, u, v, alg.context().bracket);
}

/// Projection onto s along the complementary subspace of its decomposition.
LaurentElement project(const LaurentElement& u, SubspaceId s);

LaurentElement r_apply(const LaurentElement& u, RMatrixName name);
/// Adjoint of R for the pairing of the r-matrix's own variant.
LaurentElement r_adjoint_apply(const LaurentElement& u, RMatrixName name);

/// ½([RX,Y] + [X,RY]) with the context's r-matrix.
LaurentElement r_bracket(const Algebra& alg, const LaurentElement& X, const LaurentElement& Y);

/// Random element of s with coefficients in a few degrees next to the
/// subspace boundary.
LaurentElement random_subspace_element(Rng& rng, SubspaceId s, int band, int depth = 3);

/// Largest amplitude of [u,v] outside s over `pairs` random pairs from s.
double subalgebra_closure_defect(SubspaceId s, Variant variant, Rng& rng, int pairs = 20,
                                 int band = 2);

}  // namespace laxtower
