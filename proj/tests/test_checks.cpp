#include <cmath>

#include "doctest.h"
#include "laxtower/checks.hpp"
#include "laxtower/errors.hpp"

using namespace laxtower;

TEST_CASE("row verdicts") {
  CHECK(make_row("a", "", "", 1e-12, 1e-10).pass);
  CHECK_FALSE(make_row("a", "", "", 1e-10, 1e-10).pass);
  CHECK_FALSE(make_row("a", "", "", NAN, 1e-10).pass);
  CHECK(make_row("a", "", "", 0.5, 0.1, true).pass);
  CHECK_FALSE(make_row("a", "", "", 0.05, 0.1, true).pass);
  CHECK(all_pass({}));
}

TEST_CASE("suite options are validated") {
  SuiteOptions o;
  CHECK_THROWS_AS(run_suite("nosuch", o), ConfigError);
  o.probes = 0;
  CHECK_THROWS_AS(run_suite("pde", o), ConfigError);
  CHECK_THROWS_AS(reduction_checks(HierarchyName::dtoda, 1, 16, 1, 2), ConfigError);
  CHECK_THROWS_AS(recursion_checks(HierarchyName::dkp, 1, 2), ConfigError);
  CHECK(suite_names().size() == 17);
}

TEST_CASE("suites are deterministic under a seed") {
  SuiteOptions o;
  o.probes = 3;
  o.specs = {RMatrixName::dtoda};
  const auto a = run_suite("involution", o);
  const auto b = run_suite("involution", o);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].params == b[i].params);
    CHECK(a[i].defect == b[i].defect);
  }
  o.seed = 2;
  const auto c = run_suite("involution", o);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].defect != c[i].defect;
  CHECK(differs);
  CHECK(all_pass(a));
}

TEST_CASE("per-probe reduction rows") {
  const auto rows = reduction_checks(HierarchyName::benny, 0, 16, 1, 2, true);
  int reductions = 0;
  for (const auto& r : rows) reductions += r.check_id == "dirac_reduction";
  CHECK(reductions == 2);
  CHECK(all_pass(rows));
}
