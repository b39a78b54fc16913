#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "laxtower/hierarchy.hpp"
#include "laxtower/laurent.hpp"

namespace laxtower {

/// One line of a verification report.
struct CheckRow {
  std::string check_id;
  std::string anchor;  ///< the identity being tested, in words
  std::string params;
  double defect = 0.0;
  double tol = 0.0;
  /// Rows that assert a failure (e.g. a subspace that must not close) pass
  /// when defect ≥ tol.
  bool lower_bound = false;
  bool pass = false;
};

CheckRow make_row(std::string check_id, std::string anchor, std::string params, double defect,
                  double tol, bool lower_bound = false);

struct SuiteOptions {
  std::uint64_t seed = 1;
  int probes = 20;
  int modes = 16;  ///< mode cap of the algebra
  int deg_min = -48;
  int deg_max = 48;
  std::vector<RMatrixName> specs = {RMatrixName::benny, RMatrixName::dtoda, RMatrixName::dkp,
                                    RMatrixName::dmkp, RMatrixName::ddym};
};

/// rmatrix, jacobi, compat, virasoro, liederiv, involution, laxform, mult,
/// inversion, flows, pde, submanifold, operators, reduce, recursion,
/// conservation, diagnostics.
std::vector<std::string> suite_names();
/// Throws ConfigError for an unknown suite.
std::vector<CheckRow> run_suite(std::string_view suite, const SuiteOptions& opt);

/// Generated extended operators against the tables, and Dirac reduction
/// against the closed forms. benny n ∈ {0, 1}, dtoda n = 2. With per_probe the
/// reduction rows are emitted for every probe instead of the worst one.
std::vector<CheckRow> reduction_checks(HierarchyName family, int n, int modes, std::uint64_t seed,
                                       int probes, bool per_probe = false);
/// R^k B₀ = B_k for the available k (benny 1, dtoda 1 and 2).
std::vector<CheckRow> recursion_checks(HierarchyName family, std::uint64_t seed, int probes);

struct ConservationSettings {
  HierarchyName family = HierarchyName::benny;
  int flow = 2;
  std::string init = "u0=0.1*sin;um1=1";
  double T = 0.5;
  double dt = 1e-3;
  int modes = 16;
};
/// Drift of the traces and Casimirs at dt, and the drift ratio between dt
/// and dt/2 (4 for second order, 16 for fourth).
std::vector<CheckRow> conservation_checks(const ConservationSettings& s);

bool all_pass(const std::vector<CheckRow>& rows);

}  // namespace laxtower
