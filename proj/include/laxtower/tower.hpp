#pragma once

#include <span>
#include <string>

#include "laxtower/fd.hpp"
#include "laxtower/laurent.hpp"
#include "laxtower/lie.hpp"

namespace laxtower {

/// Scalar function of L together with its gradient dF(L), defined by
/// d/dt F(L + tE) = (dF(L), E) for the context pairing.
class Functional {
 public:
  enum class Kind { linear, trace_monomial, coordinate, composite };

  /// F(L) = (a, L).
  static Functional linear(LaurentElement a);
  /// F(L) = tr(L^k)/k, gradient L^{k-1}; k ≥ 1.
  static Functional trace_monomial(int k);
  /// Real (or imaginary) part of Fourier mode `wavenumber` of the
  /// coefficient of λ^degree; equals (g, L) for g = cos(2πkx) (or -sin(2πkx))
  /// in the pairing-dual degree.
  static Functional coordinate(int degree, int wavenumber, bool imaginary);
  /// Value only; brackets involving it are computed by directional derivatives.
  static Functional composite(ScalarMap eval, std::string label = "composite");

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  bool has_gradient() const { return kind_ != Kind::composite; }

  double eval(const Algebra& alg, const LaurentElement& L) const;
  /// Throws ConfigError for composite functionals (see fd_gradient).
  LaurentElement grad(const Algebra& alg, const LaurentElement& L) const;

 private:
  Kind kind_ = Kind::linear;
  std::string label_;
  LaurentElement a_;
  int k_ = 0;
  int degree_ = 0;
  bool imaginary_ = false;
  ScalarMap eval_;
};

/// Gradient of any functional by finite differences over the real Fourier
/// basis of degrees [lo, hi] and modes ≤ band.
LaurentElement fd_gradient(const Algebra& alg, const Functional& F, const LaurentElement& L,
                           int lo, int hi, int band);

/// The compatible family of brackets
///   {F,H}_(n)(L) = ½ (L, [R(L^{n+1} dF), dH] + [dF, R(L^{n+1} dH)])
/// and their Hamiltonian vector fields. L^{n+1} with n + 1 < 0 is formed from
/// the truncated inverse of L.
class BracketTower {
 public:
  explicit BracketTower(AlgebraContext ctx, int inverse_order = 8);

  const Algebra& algebra() const { return alg_; }
  const AlgebraContext& context() const { return alg_.context(); }
  RMatrixName rmatrix() const { return alg_.context().rmatrix; }
  int inverse_order() const { return inverse_order_; }

  /// V_m(L) = L^{m+1}.
  LaurentElement virasoro_field(const LaurentElement& L, int m) const;

  double bracket(const Functional& F, const Functional& H, const LaurentElement& L, int n) const;
  double bracket_with_gradients(const LaurentElement& L, const LaurentElement& dF,
                                const LaurentElement& dH, int n) const;

  /// X_H(L) = ½([R(L^{n+1}dH), L] + L^{n+1} R*([dH, L])), so that
  /// (dF, X_H) = {F,H}_(n).
  LaurentElement ham_field(const Functional& H, const LaurentElement& L, int n) const;
  LaurentElement ham_field_from_gradient(const LaurentElement& L, const LaurentElement& dH,
                                         int n) const;
  /// ½[R(L^{n+1}dH), L], the Lax form valid for ad-invariant H.
  LaurentElement lax_form(const LaurentElement& L, const LaurentElement& dH, int n) const;

  double derivative(const ScalarMap& f, const LaurentElement& L, const LaurentElement& W) const {
    return directional_derivative(f, L, W, alg_.context().fd_step);
  }

 private:
  Algebra alg_;
  int inverse_order_;
};

// Defects of the structural identities. Each returns an absolute residual.

/// ‖(dV_n·V_m - dV_m·V_n)(L) - (n-m) V_{m+n}(L)‖ with dV_n·W = (n+1)L^n W.
double virasoro_commutator_defect(const BracketTower& t, int m, int n, const LaurentElement& L);

/// |V_m{F,H}_(n) - {V_mF,H}_(n) - {F,V_mH}_(n) - (n-m){F,H}_(m+n)| where
/// V_mF(L) = (dF(L), L^{m+1}).
double lie_derivative_defect(const BracketTower& t, int m, int n, const Functional& F,
                             const Functional& H, const LaurentElement& L);

/// Cyclic sum for the bracket Σ_{n ∈ ns} {·,·}_(n); a single n gives the
/// Jacobi identity, two give compatibility.
double jacobi_defect(const BracketTower& t, std::span<const int> ns, const Functional& F,
                     const Functional& G, const Functional& H, const LaurentElement& L);
double jacobi_defect(const BracketTower& t, int n, const Functional& F, const Functional& G,
                     const Functional& H, const LaurentElement& L);
double compatibility_defect(const BracketTower& t, int m, int n, const Functional& F,
                            const Functional& G, const Functional& H, const LaurentElement& L);

/// |{tr L^j/j, tr L^k/k}_(n)(L)|.
double involution_defect(const BracketTower& t, int j, int k, int n, const LaurentElement& L);

/// |{F∘m, H∘m}_(0)(L1, L2) - {F,H}_(0)(L1 L2)| on A × A, m the product map.
double multiplicativity_defect(const BracketTower& t, const Functional& F, const Functional& H,
                               const LaurentElement& L1, const LaurentElement& L2);

/// {F,H}_(-n)(L) for n ≥ 2, using the truncated inverse.
double negative_bracket(const BracketTower& t, const Functional& F, const Functional& H,
                        const LaurentElement& L, int n);

struct InversionReport {
  double defect = 0.0;
  double residual = 0.0;  ///< inversion residual of L
};
/// |{F∘ι, H∘ι}_(n)(L) + {F,H}_(-n)(ι L)| with ι the truncated inverse.
InversionReport inversion_defect(const BracketTower& t, const Functional& F, const Functional& H,
                                 const LaurentElement& L, int n);

/// Z_k(L) = [R(L^k), L] (the Lax vector field of X(L) = L^k).
LaurentElement lax_vector_field(const BracketTower& t, const LaurentElement& L, int k);

/// ‖[Z_j, Z_k](L)‖ with Jacobians by finite differences.
double commuting_flows_defect(const BracketTower& t, int j, int k, const LaurentElement& L);

/// ‖(L_{V_m} Z_n - n Z_{m+n})(L)‖.
double degree1_invariant_defect(const BracketTower& t, int m, int n, const LaurentElement& L);

/// ‖L_{Z_k}^2 V_n (L)‖.
double second_lie_derivative_defect(const BracketTower& t, int k, int n, const LaurentElement& L);

/// |d/dε {F_a, F_b}_(n)(1 + εE) - (E, [a, b]_R)| for linear F_a, F_b.
double linearization_defect(const BracketTower& t, const LaurentElement& a,
                            const LaurentElement& b, const LaurentElement& E, int n);

}  // namespace laxtower
