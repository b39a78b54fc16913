#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "laxtower/fourier.hpp"
#include "laxtower/hierarchy.hpp"

namespace laxtower {

/// One FourierField per field component; used for states, tangent vectors
/// and covectors δH/δu alike.
using FieldTuple = std::vector<FourierField>;

/// Polynomial in the field components u_i and their first x-derivatives u_{i,x}.
class Poly {
 public:
  static constexpr int kMaxFields = 6;

  Poly() = default;
  static Poly constant(double c);
  static Poly u(int i);
  static Poly ux(int i);

  bool is_zero() const { return terms_.empty(); }
  /// Highest component index that occurs, -1 for constants.
  int max_field() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return -1.0 * a; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(double s, const Poly& a);
  friend Poly operator*(const Poly& a, double s) { return s * a; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  /// Coefficient of u_{k,x} in a polynomial that is at most linear in the derivatives.
  Poly derivative_coefficient(int k) const;
  /// Spectral evaluation; missing components count as zero.
  FourierField eval(const FieldTuple& u) const;
  /// Pointwise evaluation from values of u and u_x.
  double eval_at(std::span<const double> u, std::span<const double> ux) const;
  std::string str(const std::vector<std::string>& names) const;

 private:
  using Key = std::array<std::uint8_t, 2 * kMaxFields>;
  std::map<Key, double> terms_;
};

using PolyMatrix = std::vector<std::vector<Poly>>;

/// left_i · D⁻¹(Σ_j right_j ξ_j)
struct NonlocalTerm {
  std::vector<Poly> left;
  std::vector<Poly> right;
};

/// (Bξ)_i = g_ij Dξ_j + b_ij ξ_j + Σ_α left^α_i D⁻¹(right^α · ξ), where b is
/// linear in the derivatives u_{k,x}.
struct HydroOperator {
  std::string name;
  std::vector<std::string> fields;
  PolyMatrix g;
  PolyMatrix b;
  std::vector<NonlocalTerm> tail;

  int dim() const { return static_cast<int>(fields.size()); }
  /// Matrix multiplying u_{k,x} in b.
  PolyMatrix b_component(int k) const;
};

/// Exact spectral application. D⁻¹ returns the zero-mean antiderivative and
/// throws NonzeroMeanInNonlocalTail if its argument has a mean.
FieldTuple apply_operator(const HydroOperator& B, const FieldTuple& u, const FieldTuple& xi);

/// Whether an operator table is taken as typeset or with the typographical
/// slips fixed (the fixed form is the one the generated operators reproduce).
enum class Transcription { printed, corrected };

/// Closed-form structures on the reduced manifold: benny n = -1, 0, 1 and
/// dtoda n = -1, 0, 1, 2. Throws UnknownOperator otherwise.
HydroOperator builtin_operator(HierarchyName family, int n,
                               Transcription t = Transcription::corrected);
/// Same, by name "benny:B0", "dtoda:B-1", ...
HydroOperator builtin_operator(std::string_view name);
std::vector<std::string> builtin_operator_names();

/// Operators of X_H^{(n)} on the extended coordinates, before Dirac
/// reduction: benny n = 0 (u0, um1, um2), benny n = 1 (u0..um3), dtoda n = 2
/// (u0, u1, u2). Coefficients are evaluated with the extra fields at zero.
HydroOperator extended_operator_table(HierarchyName family, int n,
                                      Transcription t = Transcription::corrected);

struct TableDifference {
  int row = 0;
  int col = 0;
  std::string part;  ///< "g" or "b"
  std::string printed;
  std::string corrected;
};
/// Symbolic entrywise difference between the typeset and corrected tables.
std::vector<TableDifference> transcription_errata(const HydroOperator& printed,
                                                  const HydroOperator& corrected);

// ---- matrices over the real Fourier basis ----

/// Coordinates in the L²-orthonormal basis 1, √2cos(2πkx), √2sin(2πkx)
/// (k = 1..K), component-major.
Eigen::VectorXd to_coordinates(const FieldTuple& f, int K);
FieldTuple from_coordinates(const Eigen::VectorXd& c, int dim, int K);
FourierField basis_function(int position);
inline int block_size(int K) { return 2 * K + 1; }

using OperatorAction = std::function<FieldTuple(const FieldTuple&)>;

struct OperatorMatrix {
  Eigen::MatrixXd m;
  int dim = 0;
  int modes = 0;
};

/// Columns are the (Galerkin-truncated) action on the basis covectors.
OperatorMatrix assemble_matrix(const OperatorAction& op, int dim, int K);
/// Action on the columns of `basis` (coordinates of covectors), returned in
/// full coordinates.
Eigen::MatrixXd assemble_on(const OperatorAction& op, const Eigen::MatrixXd& basis, int dim, int K);
/// max|M + Mᵀ| / max(1, max|M|)
double skew_defect(const Eigen::MatrixXd& m);
/// Orthonormal basis of the numerical null space (σ ≤ rel_tol·σ_max).
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double rel_tol = 1e-9);
/// Orthonormal basis of the complement of span(constraints) (columns).
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& constraints, int size);

// ---- generated operators and Dirac reduction ----

struct ExtendedOperator {
  std::vector<std::string> fields;
  std::vector<int> degrees;  ///< λ-degree of each coordinate
  OperatorAction action;
  int dim() const { return static_cast<int>(fields.size()); }
};

/// ξ ↦ coordinates of X_H^{(n)}(L) where dH is assembled from ξ through the
/// pairing, on the pattern extended by the leaked degrees. For benny the
/// coordinates are u0, um1, …, um(n+1); for dtoda u0, u1, …, u_max(1,n) with
/// the λ^{±i} slots tied. u holds the reduced fields; the extra ones are zero.
ExtendedOperator build_extended_operator(const HierarchySpec& h, int n, const FieldTuple& u,
                                         int mode_cap = 256);

struct DiracReduction {
  OperatorMatrix reduced;
  Eigen::MatrixXd range;  ///< orthonormal basis of range(B_cc)
  Eigen::MatrixXd ck;     ///< B_ck
  Eigen::MatrixXd gauge;  ///< orthonormal basis of B_kc·ker(B_cc)
  /// Orthonormal directions ξ must avoid so that B_ck ξ stays in range(B_cc).
  Eigen::MatrixXd inadmissible;
  Eigen::MatrixXd kernel_image;  ///< B_kc applied to an orthonormal kernel basis
  int kernel_dim = 0;
  /// max ‖B_kc k‖ over unit kernel vectors k of B_cc.
  double kernel_sensitivity = 0.0;

  /// Relative distance of B_ck ξ from range(B_cc).
  double range_residual(const FieldTuple& xi) const;
  /// Reduced action; throws IllPosedReduction if range_residual > tol.
  FieldTuple apply(const FieldTuple& xi, double tol = 1e-8) const;
  /// Projection onto the orthogonal complement of the gauge directions.
  FieldTuple modulo_gauge(const FieldTuple& v) const;
  /// Removes the inadmissible directions from ξ.
  FieldTuple project_admissible(const FieldTuple& xi) const;
  /// max_k |⟨η, B_kc k⟩| over unit kernel vectors: how much the reduced
  /// bracket ⟨η, B_red ξ⟩ depends on the choice of pseudo-inverse solution.
  double kernel_pairing(const FieldTuple& eta) const;
};

/// B_red = B_kk − B_kc·B_cc⁺·B_ck with an SVD pseudo-inverse on range(B_cc).
/// When B_cc has a kernel the result is defined modulo `gauge` and only on
/// admissible covectors; for skew operators the two are orthogonal.
/// keep/constrain are component indices of the extended operator.
DiracReduction dirac_reduce(const OperatorMatrix& ext, const std::vector<int>& keep,
                            const std::vector<int>& constrain, double rank_tol = 1e-10);

/// Max |G(φe_j)_i − T(φe_j)_i| per entry (i, j) over φ ∈ {1, cos 2πkx, sin 2πkx : k ≤ kmax}.
/// `u` is passed to the table (extra fields zero).
Eigen::MatrixXd entrywise_defect(const OperatorAction& generated, const HydroOperator& table,
                                 const FieldTuple& u, int kmax);

// ---- recursion ----

/// 1/f truncated to |k| ≤ band; throws NotInvertible if f vanishes on the grid.
FourierField reciprocal(const FourierField& f, int band);

/// Inverse of the first structure with zero-mean D⁻¹; throws SectorViolation
/// if v is outside its range. Non-polynomial factors are truncated to `band`.
FieldTuple first_structure_inverse(HierarchyName family, const FieldTuple& u, const FieldTuple& v,
                                   int band = 64);
/// R v = B₀ B₋₁⁻¹ v.
FieldTuple recursion_apply(HierarchyName family, const FieldTuple& u, const FieldTuple& v,
                           int band = 64);

struct RecursionReport {
  int k = 0;
  double defect = 0.0;      ///< max ‖(R^k B₀ − B_k)ξ‖ modulo the integration constants
  double raw_defect = 0.0;  ///< same, without removing them
  int gauge_dim = 0;
};
/// Compares R^k B₀ with B_k on random zero-mean covectors of the given band,
/// projected onto the sector where every B₋₁⁻¹ is defined. The D⁻¹ constants
/// span B₀(ker B₋₁) and its images under R; they are removed before measuring.
RecursionReport recursion_defect(HierarchyName family, const FieldTuple& u, int k, Rng& rng,
                                 int probes = 8, int band = 3);

// ---- diagnostics ----

struct MetricReport {
  std::vector<double> det;  ///< det g on the grid
  double min_abs_det = 0.0;
  bool degenerate = false;
  /// benny: Δ = u0² − 4um1; dtoda: w1·w2
  std::vector<double> discriminant;
  double min_abs_discriminant = 0.0;
  double min_u1 = 0.0;  ///< dtoda only
};
MetricReport metric_degeneracy(const HydroOperator& B, HierarchyName family, const FieldTuple& u,
                               int grid_points, double tol = 1e-12);

using FieldFunctional = std::function<double(const FieldTuple&)>;
/// Spectral finite-difference gradient in the L² pairing, |k| ≤ K.
FieldTuple variational_derivative(const FieldFunctional& H, const FieldTuple& u, int K,
                                  double h = 1e-4);
/// δ(tr L^k/k)/δu from the coefficients of L^{k-1}.
FieldTuple trace_variational_derivative(const HierarchySpec& h, const Algebra& alg,
                                        const FieldTuple& u, int k);

/// ‖B_n δH_k/δu − coordinates of X^{(n)}_{H_k}(L)‖, H_k = tr L^k/k.
double flow_consistency_defect(HierarchyName family, int n, const FieldTuple& u, int k);

/// Cyclic sum of {A,{B,C}} for the linear functionals ∫a·u, ∫b·u, ∫c·u,
/// computed as directional derivatives along B(u)a etc.
double operator_jacobi_defect(const HydroOperator& B, const FieldTuple& u, const FieldTuple& a,
                              const FieldTuple& b, const FieldTuple& c, double h = 1e-5);

/// Gradients of the first-structure Casimirs (benny: ∫u0, ∫um1; dtoda: ∫u0, ∫ln u1).
std::vector<FieldTuple> casimir_gradients(HierarchyName family, const FieldTuple& u,
                                          int band = 64);
/// max ‖B₋₁ δC‖ over the Casimirs.
double casimir_kernel_defect(HierarchyName family, const FieldTuple& u, int band = 64);

/// Σ_i ∫ a_i b_i
double pairing(const FieldTuple& a, const FieldTuple& b);
double max_difference(const FieldTuple& a, const FieldTuple& b);

}  // namespace laxtower
