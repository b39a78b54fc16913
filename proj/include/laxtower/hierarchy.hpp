#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "laxtower/laurent.hpp"
#include "laxtower/random.hpp"
#include "laxtower/tower.hpp"

namespace laxtower {

enum class HierarchyName { benny, dtoda, dkp, dmkp, ddym };

std::string_view to_string(HierarchyName h);
/// Throws ConfigError on unknown names.
HierarchyName parse_hierarchy(std::string_view name);

/// A manifold of Lax operators inside the algebra, with coordinates.
///
///   benny  L = λ + u₀ + u₋₁λ⁻¹                      fields (u₀, u₋₁)
///   dtoda  L = u₁λ + u₀ + u₁λ⁻¹                     fields (u₀, u₁)
///   dkp    L = λ + Σ_{i≤0} u_iλ^i                   fields (u₀, u₋₁, …, u_t)
///   dmkp   same manifold as dkp, other r-matrix
///   ddym   L = Σ_{i≤1} u_iλ^i                       fields (u₁, u₀, …, u_t)
///
/// Infinite tails stop at the truncation degree t.
struct HierarchySpec {
  HierarchyName name = HierarchyName::benny;
  RMatrixName rmatrix = RMatrixName::benny;
  int truncation = -8;

  static HierarchySpec get(HierarchyName name, int truncation = -8);

  /// Field names in coordinate order, e.g. {"u0", "um1"}.
  std::vector<std::string> field_names() const;
  /// λ-degree carried by each coordinate.
  std::vector<int> field_degrees() const;
  int field_count() const { return static_cast<int>(field_degrees().size()); }
  /// Highest degree a tangent vector may have (1 for dtoda and ddym, 0 otherwise).
  int top_tangent_degree() const;
  /// True when the manifold has an infinite tail (cut at `truncation`).
  bool has_tail() const;
  /// Flow normalization: the evolution is L_t = scale · [Π₊(L^m), L].
  double flow_scale() const;

  LaurentElement assemble(const std::vector<FourierField>& fields) const;
  std::vector<FourierField> coordinates(const LaurentElement& L) const;
  /// Tangent vector ↔ coordinate velocities (the tied λ^{±1} slots of dtoda
  /// move together).
  LaurentElement assemble_tangent(const std::vector<FourierField>& velocities) const;
  std::vector<FourierField> tangent_coordinates(const LaurentElement& X) const;

  /// Largest amplitude of X outside the tangent space of the manifold (the
  /// infinite tails count as tangent at every depth).
  double transverse_defect(const LaurentElement& X) const;
  /// Degrees where X has a transverse component above tol.
  std::vector<int> transverse_degrees(const LaurentElement& X, double tol) const;

  /// Random point of the manifold; for dtoda u₁ stays positive.
  LaurentElement random_point(Rng& rng, int band, int tail_depth = 3) const;
};

/// Algebra context large enough for flows of order ≤ max_power.
AlgebraContext hierarchy_context(const HierarchySpec& h, int mode_cap, int max_power);

/// [Π₊(L^m), L]; also evaluates -[Π₋(L^m), L] and throws TangencyViolation
/// if the two disagree or the result leaves the manifold's tangent space.
LaurentElement lax_rhs(const HierarchySpec& h, const Algebra& alg, const LaurentElement& L, int m);

/// [tr(L^k)/k for k = 1..kmax] with the trace of the hierarchy's pairing.
std::vector<double> conserved_quantities(const HierarchySpec& h, const Algebra& alg,
                                         const LaurentElement& L, int kmax);

/// Casimirs of the first structure: benny (∫u₀, ∫u₋₁), dtoda (∫u₀, ∫ln u₁);
/// the tail hierarchies report ∫ of every coordinate.
std::vector<double> casimirs(const HierarchySpec& h, const std::vector<FourierField>& fields,
                             int grid_points);
std::vector<std::string> casimir_names(const HierarchySpec& h);

struct SubmanifoldReport {
  int n = 0;
  double defect = 0.0;
  std::vector<int> leak_degrees;
  bool is_poisson_submanifold = false;
};
/// Max transverse part of X_H^{(n)}(L) over random points L and random
/// linear and trace-monomial H.
SubmanifoldReport poisson_submanifold_defect(const HierarchySpec& h, int n, Rng& rng,
                                             int probes = 8, double tol = 1e-11);

struct RiemannInvariants {
  FourierField w1;  ///< u₀ - 2u₁
  FourierField w2;  ///< u₀ + 2u₁
  bool strictly_hyperbolic = false;  ///< u₁ ≠ 0 on the grid
  bool degenerate = false;           ///< w₁w₂ = 0 somewhere on the grid
  double min_abs_w1w2 = 0.0;
};
RiemannInvariants riemann_invariants(const FourierField& u0, const FourierField& u1,
                                     int grid_points);

// ---- time integration ----

struct EvolveOptions {
  int flow = 1;          ///< m in [Π₊(L^m), L]
  double dt = 1e-3;
  double T = 0.5;
  int modes = 32;        ///< Galerkin mode count K
  int sample_every = 0;  ///< 0: only first and last state
  int kmax = 5;          ///< conserved traces tr L^k/k, k ≤ kmax
  double blowup_fraction = 0.01;
};

struct FieldSnapshot {
  double time = 0.0;
  std::vector<FourierField> fields;
  std::vector<double> traces;
  std::vector<double> casimirs;
};

struct Trajectory {
  std::vector<FieldSnapshot> samples;
  int steps = 0;
  /// Largest amplitude removed by the Galerkin projection (modes above K and,
  /// for tail hierarchies, degrees below the truncation).
  double max_dropped = 0.0;
  double max_trace_drift = 0.0;
  double max_casimir_drift = 0.0;
  /// Minimum of u₁ over the grid and the trajectory (dtoda only).
  double min_u1 = 0.0;
};

/// Classical RK4 on the Fourier modes; each stage right-hand side is the
/// exact product projected onto |k| ≤ K. Throws BlowUp when the top third of
/// the modes carries more than blowup_fraction of a field's energy.
Trajectory evolve(const HierarchySpec& h, std::vector<FourierField> fields,
                  const EvolveOptions& opt);

/// Parses "u0=0.1*sin;um1=1" style initial data: each field is a sum of
/// terms c, c*sin, c*cos, c*sinK, c*cosK (K a wavenumber).
std::vector<FourierField> parse_initial_data(const HierarchySpec& h, std::string_view spec);

}  // namespace laxtower
