#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "laxtower/fourier.hpp"

namespace laxtower {

/// u(x,λ) = Σ_d u_d(x) λ^d with finitely many nonzero coefficients.
///
/// Stored densely between the lowest and highest nonzero degree. The zero
/// element has no degrees at all; lo()/hi() must not be called on it.
class LaurentElement {
 public:
  LaurentElement() = default;

  static LaurentElement monomial(int degree, FourierField f);
  static LaurentElement constant(double c) { return monomial(0, FourierField::constant(c)); }
  static LaurentElement one() { return constant(1.0); }
  /// λ^d with constant coefficient 1.
  static LaurentElement lambda_power(int d) { return monomial(d, FourierField::constant(1.0)); }

  bool is_zero() const { return c_.empty(); }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  /// Coefficient of λ^d (zero when absent).
  const FourierField& coeff(int d) const;
  void set(int d, FourierField f);
  /// Dense coefficient array for degrees lo()..hi().
  std::span<const FourierField> dense() const { return c_; }

  LaurentElement& operator+=(const LaurentElement& o);
  LaurentElement& operator-=(const LaurentElement& o);
  LaurentElement& operator*=(double s);
  friend LaurentElement operator+(LaurentElement a, const LaurentElement& b) { return a += b; }
  friend LaurentElement operator-(LaurentElement a, const LaurentElement& b) { return a -= b; }
  friend LaurentElement operator*(LaurentElement a, double s) { return a *= s; }
  friend LaurentElement operator*(double s, LaurentElement a) { return a *= s; }
  friend LaurentElement operator-(LaurentElement a) { return a *= -1.0; }

  /// Multiplies every coefficient by the same function of x.
  LaurentElement scaled(const FourierField& f) const;
  /// Multiplies by λ^s.
  LaurentElement shifted(int s) const;
  /// Keeps degrees in [lo, hi].
  LaurentElement restricted(int lo, int hi) const;

  LaurentElement& prune(double tol);

  /// Largest Fourier band over all coefficients (-1 for zero).
  int band() const;
  double max_abs_mode() const;
  /// sqrt(Σ_d ‖u_d‖²).
  double l2_norm() const;
  /// max_d Σ_k |u_{d,k}|, an upper bound on the sup norm of every coefficient.
  double wiener_norm() const;

 private:
  void trim();

  int lo_ = 0;
  std::vector<FourierField> c_;
};

/// Max amplitude of u - v.
double max_difference(const LaurentElement& u, const LaurentElement& v);

/// Exact product with no window or cap checks and no pruning.
LaurentElement product(const LaurentElement& u, const LaurentElement& v);

enum class Variant { minus_one, zero };
enum class RMatrixName { benny, dtoda, dkp, dmkp, ddym };

std::string_view to_string(Variant v);
std::string_view to_string(RMatrixName r);
/// Throws ConfigError on unknown names.
RMatrixName parse_rmatrix(std::string_view name);

/// Everything an algebra operation needs besides its operands.
struct AlgebraContext {
  Variant bracket = Variant::minus_one;
  Variant pairing = Variant::minus_one;
  RMatrixName rmatrix = RMatrixName::benny;
  int mode_cap = 16;
  int deg_min = -12;
  int deg_max = 6;
  double prune_tol = 1e-14;
  double fd_step = 1e-5;

  /// Context with the bracket and pairing that belong to the r-matrix.
  static AlgebraContext for_rmatrix(RMatrixName r, int mode_cap, int deg_min, int deg_max);
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Commutative algebra operations bound to a context: every result is pruned
/// and checked against the degree window and the mode cap.
class Algebra {
 public:
  explicit Algebra(AlgebraContext ctx);

  const AlgebraContext& context() const { return ctx_; }

  LaurentElement multiply(const LaurentElement& u, const LaurentElement& v) const;
  LaurentElement d_lambda(const LaurentElement& u) const;
  static LaurentElement d_x(const LaurentElement& u);
  static double trace(const LaurentElement& u, Variant v);
  double trace(const LaurentElement& u) const { return trace(u, ctx_.pairing); }
  /// tr(uv), computed without forming the full product.
  static double pairing(const LaurentElement& u, const LaurentElement& v, Variant var);
  double pairing(const LaurentElement& u, const LaurentElement& v) const {
    return pairing(u, v, ctx_.pairing);
  }
  LaurentElement power(const LaurentElement& L, int k) const;

  struct Inverse {
    LaurentElement element;
    /// Wiener norm of L·M - 1.
    double residual = 0.0;
  };
  /// Truncated inverse around the dominant (highest-degree) monomial λ^d c(x):
  /// M = λ^{-d} c^{-1} Σ_{j<order} (-ρ)^j keeping degrees ≥ -(order-1) of the
  /// series, where L = λ^d c (1 + ρ).
  Inverse invert(const LaurentElement& L, int order) const;

  /// Prunes and throws DegreeOverflow / ModeOverflow if u does not fit.
  LaurentElement checked(LaurentElement u) const;

 private:
  AlgebraContext ctx_;
};

}  // namespace laxtower
