#include "laxtower/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "laxtower/errors.hpp"
#include "laxtower/lie.hpp"
#include "laxtower/operators.hpp"
#include "laxtower/tower.hpp"

namespace laxtower {

CheckRow make_row(std::string check_id, std::string anchor, std::string params, double defect,
                  double tol, bool lower_bound) {
  CheckRow r{std::move(check_id), std::move(anchor), std::move(params), defect, tol, lower_bound};
  r.pass = std::isfinite(defect) && (lower_bound ? defect >= tol : defect < tol);
  return r;
}

bool all_pass(const std::vector<CheckRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

namespace {

constexpr HierarchyName kHierarchies[] = {HierarchyName::benny, HierarchyName::dtoda,
                                          HierarchyName::dkp, HierarchyName::dmkp,
                                          HierarchyName::ddym};

/// "key=value" pairs joined by spaces.
class Params {
 public:
  template <class T>
  Params& operator()(const char* key, const T& value) {
    if (!empty_) s_ << ' ';
    empty_ = false;
    s_ << key << '=' << value;
    return *this;
  }
  operator std::string() const { return s_.str(); }

 private:
  std::ostringstream s_;
  bool empty_ = true;
};

/// Probe generators share one stream per suite; rows are produced in a fixed
/// order, so a seed fixes every report byte for byte.
std::uint64_t suite_seed(std::uint64_t seed, std::string_view suite) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : suite) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ULL;
  return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

BracketTower make_tower(RMatrixName r, const SuiteOptions& o, int cap_factor = 4) {
  return BracketTower(AlgebraContext::for_rmatrix(r, cap_factor * o.modes, o.deg_min, o.deg_max));
}

LaurentElement probe_point(Rng& rng) { return rng.element(-1, 1, 2, 0.5); }
Functional probe_linear(Rng& rng) { return Functional::linear(rng.element(-2, 2, 2, 0.5)); }
/// Every fourth probe uses an ad-invariant Hamiltonian.
Functional probe_functional(Rng& rng, int p) {
  return p % 4 == 3 ? Functional::trace_monomial(2 + p % 3) : probe_linear(rng);
}

/// Point and three functionals, drawn in a fixed order.
struct Probe {
  LaurentElement L;
  Functional F, G, H;
};
Probe draw_probe(Rng& rng, int p) {
  Probe q;
  q.L = probe_point(rng);
  q.F = probe_linear(rng);
  q.G = probe_linear(rng);
  q.H = probe_functional(rng, p);
  return q;
}

template <class F>
double worst_over(int probes, F&& f) {
  double w = 0.0;
  for (int p = 0; p < probes; ++p) w = std::max(w, f(p));
  return w;
}

std::string spec_name(RMatrixName r) { return std::string(to_string(r)); }
std::string fam_name(HierarchyName h) { return std::string(to_string(h)); }

// ---- structural identities of the tower ----

std::vector<CheckRow> rmatrix_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "rmatrix"));
  const int triples = std::max(o.probes, 50);
  for (RMatrixName r : o.specs) {
    const Algebra alg(AlgebraContext::for_rmatrix(r, 4 * o.modes, o.deg_min, o.deg_max));
    double jac = 0.0, anti = 0.0;
    for (int p = 0; p < triples; ++p) {
      const LaurentElement x = rng.element(-2, 2, 2, 0.5);
      const LaurentElement y = rng.element(-2, 2, 2, 0.5);
      const LaurentElement z = rng.element(-2, 2, 2, 0.5);
      const LaurentElement cyc = r_bracket(alg, r_bracket(alg, x, y), z) +
                                 r_bracket(alg, r_bracket(alg, y, z), x) +
                                 r_bracket(alg, r_bracket(alg, z, x), y);
      jac = std::max(jac, cyc.max_abs_mode());
      anti = std::max(anti, max_difference(r_bracket(alg, x, y), -r_bracket(alg, y, x)));
    }
    rows.push_back(make_row("rbracket_jacobi", "R-bracket satisfies the Jacobi identity",
                            Params()("spec", spec_name(r))("triples", triples), jac, 1e-10));
    rows.push_back(make_row("rbracket_antisymmetry", "R-bracket is antisymmetric",
                            Params()("spec", spec_name(r))("triples", triples), anti, 1e-14));
  }
  const char* closed_anchor = "degree subspaces of the -1 bracket close for k = 0, 1, 2";
  for (int k : {0, 1, 2}) {
    rows.push_back(make_row("subalgebra_closure", closed_anchor, Params()("subspace", "deg>=k")("k", k),
                            subalgebra_closure_defect(SubspaceId::ge_k(k), Variant::minus_one, rng),
                            1e-12));
    rows.push_back(make_row("subalgebra_closure", closed_anchor, Params()("subspace", "deg<=k-1")("k", k),
                            subalgebra_closure_defect(SubspaceId::le_k_minus_1(k), Variant::minus_one, rng),
                            1e-12));
  }
  rows.push_back(make_row("subalgebra_nonclosure", "degrees <= 2 do not close under the -1 bracket",
                          Params()("subspace", "deg<=k-1")("k", 3)("expect", "defect>=tol"),
                          subalgebra_closure_defect(SubspaceId::le_k_minus_1(3), Variant::minus_one, rng),
                          1e-1, true));
  rows.push_back(make_row("subalgebra_closure", "toda decomposition closes under the 0 bracket",
                          Params()("subspace", "toda_k"),
                          subalgebra_closure_defect(SubspaceId::todak(), Variant::zero, rng), 1e-12));
  rows.push_back(make_row("subalgebra_closure", "toda decomposition closes under the 0 bracket",
                          Params()("subspace", "toda_l"),
                          subalgebra_closure_defect(SubspaceId::todal(), Variant::zero, rng), 1e-12));
  return rows;
}

std::vector<CheckRow> jacobi_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "jacobi"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    for (int n = -1; n <= 3; ++n) {
      const double d = worst_over(o.probes, [&](int p) {
        const Probe q = draw_probe(rng, p);
        return jacobi_defect(t, n, q.F, q.G, q.H, q.L);
      });
      rows.push_back(make_row("tower_jacobi", "each bracket of the tower satisfies Jacobi",
                              Params()("spec", spec_name(r))("n", n)("probes", o.probes), d, 1e-5));
    }
  }
  return rows;
}

std::vector<CheckRow> compat_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "compat"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    for (int m = -1; m <= 3; ++m) {
      for (int n = m + 1; n <= 3; ++n) {
        const double d = worst_over(o.probes, [&](int p) {
          const Probe q = draw_probe(rng, p);
          return compatibility_defect(t, m, n, q.F, q.G, q.H, q.L);
        });
        rows.push_back(make_row("tower_compatibility", "the sum of two tower brackets satisfies Jacobi",
                                Params()("spec", spec_name(r))("m", m)("n", n)("probes", o.probes), d,
                                1e-5));
      }
    }
  }
  return rows;
}

std::vector<CheckRow> virasoro_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "virasoro"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    for (int m = -1; m <= 3; ++m) {
      for (int n = -1; n <= 3; ++n) {
        const double d = worst_over(o.probes, [&](int) {
          return virasoro_commutator_defect(t, m, n, probe_point(rng));
        });
        rows.push_back(make_row("virasoro_commutator", "V_m = L^(m+1) span a centerless Virasoro algebra",
                                Params()("spec", spec_name(r))("m", m)("n", n)("probes", o.probes), d,
                                1e-11));
      }
    }
  }
  return rows;
}

std::vector<CheckRow> liederiv_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "liederiv"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    for (int m = -1; m <= 3; ++m) {
      for (int n = -1; n <= 3; ++n) {
        const double d = worst_over(o.probes, [&](int p) {
          const Probe q = draw_probe(rng, p);
          return lie_derivative_defect(t, m, n, q.F, q.H, q.L);
        });
        rows.push_back(make_row("virasoro_lie_derivative",
                                "Lie derivative of the n-th bracket along V_m is (n-m) times bracket m+n",
                                Params()("spec", spec_name(r))("m", m)("n", n)("probes", o.probes), d,
                                1e-6));
      }
    }
  }
  return rows;
}

std::vector<CheckRow> involution_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "involution"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    for (int n = -1; n <= 3; ++n) {
      const double d = worst_over(o.probes, [&](int p) {
        const int j = 1 + p % 3, k = 2 + p % 2;
        return involution_defect(t, j, k, n, probe_point(rng));
      });
      rows.push_back(make_row("trace_involution", "trace monomials Poisson commute in every bracket",
                              Params()("spec", spec_name(r))("n", n)("probes", o.probes), d, 1e-11));
    }
  }
  return rows;
}

std::vector<CheckRow> laxform_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "laxform"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    for (int n = -1; n <= 3; ++n) {
      const double d = worst_over(o.probes, [&](int p) {
        const LaurentElement L = probe_point(rng);
        const Functional H = Functional::trace_monomial(1 + p % 4);
        return max_difference(t.ham_field(H, L, n), t.lax_form(L, H.grad(t.algebra(), L), n));
      });
      rows.push_back(make_row("lax_form", "ad-invariant H generates the Lax equation ½[R(L^(n+1) dH), L]",
                              Params()("spec", spec_name(r))("n", n)("probes", o.probes), d, 1e-12));
    }
  }
  return rows;
}

std::vector<CheckRow> mult_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "mult"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    const double d = worst_over(o.probes, [&](int p) {
      const LaurentElement L1 = probe_point(rng);
      const LaurentElement L2 = probe_point(rng);
      const Functional F = probe_functional(rng, p);
      const Functional H = probe_functional(rng, p + 1);
      return multiplicativity_defect(t, F, H, L1, L2);
    });
    rows.push_back(make_row("multiplicativity", "multiplication A x A -> A is a Poisson map for bracket 0",
                            Params()("spec", spec_name(r))("probes", o.probes), d, 1e-10));
  }
  return rows;
}

std::vector<CheckRow> inversion_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "inversion"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o, 6);
    for (int n = 0; n <= 2; ++n) {
      double residual = 0.0;
      const double d = worst_over(o.probes, [&](int) {
        const LaurentElement L = LaurentElement::monomial(1, FourierField::constant(1.0) + rng.field(2, 0.1));
        const Functional F = probe_linear(rng);
        const Functional H = probe_linear(rng);
        const auto rep = inversion_defect(t, F, H, L, n);
        residual = std::max(residual, rep.residual);
        return rep.defect;
      });
      rows.push_back(make_row("inversion", "inversion maps bracket n to minus bracket -n",
                              Params()("spec", spec_name(r))("n", n)("order", t.inverse_order())(
                                  "probes", o.probes)("inverse_residual", residual),
                              d, 1e-5));
    }
  }
  return rows;
}

std::vector<CheckRow> flows_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "flows"));
  for (RMatrixName r : o.specs) {
    const BracketTower t = make_tower(r, o);
    // unit-size difference steps keep every Fourier mode of the nested fields
    const BracketTower wide = make_tower(r, o, 10);
    for (int j = 1; j <= 3; ++j) {
      for (int k = j + 1; k <= 3; ++k) {
        const double d =
            worst_over(o.probes, [&](int) { return commuting_flows_defect(t, j, k, probe_point(rng)); });
        rows.push_back(make_row("commuting_flows", "the Lax fields Z_k = [R(L^k), L] commute",
                                Params()("spec", spec_name(r))("j", j)("k", k)("probes", o.probes), d,
                                1e-5));
      }
    }
    for (int m = -1; m <= 2; ++m) {
      for (int n = 1; n <= 3; ++n) {
        const double d = worst_over(o.probes, [&](int) {
          return degree1_invariant_defect(t, m, n, probe_point(rng));
        });
        rows.push_back(make_row("degree_one_invariance", "Lie derivative of Z_n along V_m is n Z_(m+n)",
                                Params()("spec", spec_name(r))("m", m)("n", n)("probes", o.probes), d,
                                1e-5));
      }
    }
    for (int k = 1; k <= 3; ++k) {
      for (int n = 0; n <= 2; ++n) {
        const double d = worst_over(o.probes, [&](int) {
          return second_lie_derivative_defect(wide, k, n, probe_point(rng));
        });
        rows.push_back(make_row("second_lie_derivative", "second Lie derivative of V_n along Z_k vanishes",
                                Params()("spec", spec_name(r))("k", k)("n", n)("probes", o.probes), d,
                                1e-5));
      }
    }
  }
  return rows;
}

// ---- hierarchies ----

double grid_difference(const FourierField& a, const std::vector<double>& b) {
  const auto v = a.sample(static_cast<int>(b.size()));
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i] - b[i]));
  return m;
}

std::vector<CheckRow> pde_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "pde"));
  const int n = 4 * o.modes + 1;
  struct Case {
    HierarchyName name;
    int m;
    const char* anchor;
    // pointwise right-hand side from (a, a_x, b, b_x)
    std::function<std::pair<double, double>(double, double, double, double)> rhs;
  };
  const Case cases[] = {
      {HierarchyName::benny, 2, "Benny flow m=2 is u0_t = u0 u0_x + um1_x, um1_t = (u0 um1)_x",
       [](double a, double ax, double b, double bx) { return std::pair(a * ax + bx, b * ax + a * bx); }},
      {HierarchyName::dtoda, 1, "dToda flow m=1 is u0_t = 4 u1 u1_x, u1_t = u1 u0_x",
       [](double, double ax, double b, double bx) { return std::pair(4 * b * bx, b * ax); }},
  };
  for (const Case& c : cases) {
    const HierarchySpec h = HierarchySpec::get(c.name);
    const Algebra alg(hierarchy_context(h, 4 * o.modes, 3));
    const double d = worst_over(o.probes, [&](int) {
      const FourierField u0 = rng.field(3, 0.5);
      const FourierField u1 = FourierField::constant(1.0) + rng.field(3, 0.3, true);
      const auto v = h.tangent_coordinates(h.flow_scale() * lax_rhs(h, alg, h.assemble({u0, u1}), c.m));
      const auto a = u0.sample(n), ax = u0.derivative().sample(n);
      const auto b = u1.sample(n), bx = u1.derivative().sample(n);
      std::vector<double> r0(n), r1(n);
      for (int j = 0; j < n; ++j) std::tie(r0[j], r1[j]) = c.rhs(a[j], ax[j], b[j], bx[j]);
      return std::max(grid_difference(v[0], r0), grid_difference(v[1], r1));
    });
    rows.push_back(make_row("pde_equivalence", c.anchor,
                            Params()("hierarchy", fam_name(c.name))("m", c.m)("scale", h.flow_scale())(
                                "grid", n)("probes", o.probes),
                            d, 1e-10));
  }
  return rows;
}

std::vector<CheckRow> submanifold_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  const std::map<HierarchyName, std::set<int>> admissible = {
      {HierarchyName::benny, {-1}},         {HierarchyName::dtoda, {-1, 0, 1}},
      {HierarchyName::dkp, {-1, 0}},        {HierarchyName::dmkp, {-1, 0, 1}},
      {HierarchyName::ddym, {-1, 0, 1, 2, 3}}};
  const int probes = std::max(4, o.probes / 3);
  for (HierarchyName name : kHierarchies) {
    const HierarchySpec h = HierarchySpec::get(name, -4);
    Rng rng(suite_seed(o.seed, "submanifold") + static_cast<int>(name));
    for (int n = -1; n <= 3; ++n) {
      const auto rep = poisson_submanifold_defect(h, n, rng, probes);
      const bool expect = admissible.at(name).count(n) == 1;
      Params p;
      p("hierarchy", fam_name(name))("n", n)("truncation", h.truncation)("probes", probes);
      if (expect) {
        rows.push_back(make_row("poisson_submanifold", "hamiltonian fields of bracket n are tangent",
                                p, rep.defect, 1e-11));
      } else {
        p("expect", "defect>=tol");
        rows.push_back(make_row("poisson_submanifold_leak", "bracket n leaves the Lax manifold", p,
                                rep.defect, 1e-3, true));
      }
      if (name == HierarchyName::benny && (n == 0 || n == 1)) {
        const std::set<int> expected = n == 0 ? std::set<int>{-2} : std::set<int>{-3, -2};
        const std::set<int> got(rep.leak_degrees.begin(), rep.leak_degrees.end());
        std::vector<int> diff;
        std::set_symmetric_difference(expected.begin(), expected.end(), got.begin(), got.end(),
                                      std::back_inserter(diff));
        std::string degs;
        for (int d : rep.leak_degrees) degs += (degs.empty() ? "" : ",") + std::to_string(d);
        rows.push_back(make_row("leak_degrees", "degrees through which bracket n leaves the Benny manifold",
                                Params()("hierarchy", "benny")("n", n)("degrees", "{" + degs + "}"),
                                static_cast<double>(diff.size()), 1.0));
      }
    }
  }
  return rows;
}

// ---- explicit operators ----

FieldTuple random_state(HierarchyName family, Rng& rng) {
  (void)family;
  return {rng.field(2, 0.4), FourierField::constant(1.0) + rng.field(2, 0.2, true)};
}

OperatorAction action_of(const HydroOperator& B, const FieldTuple& u) {
  return [B, u](const FieldTuple& xi) { return apply_operator(B, u, xi); };
}

std::vector<CheckRow> operators_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "operators"));
  const int K = std::min(o.modes, 12);
  for (const std::string& name : builtin_operator_names()) {
    const HydroOperator B = builtin_operator(name);
    const HierarchyName family = parse_hierarchy(name.substr(0, name.find(':')));
    double skew = 0.0, jac = 0.0;
    for (int p = 0; p < std::max(1, o.probes / 5); ++p) {
      const FieldTuple u = random_state(family, rng);
      if (B.tail.empty()) {
        skew = std::max(skew, skew_defect(assemble_matrix(action_of(B, u), 2, K).m));
        const FieldTuple a = {rng.field(2), rng.field(2)}, b = {rng.field(2), rng.field(2)},
                         c = {rng.field(2), rng.field(2)};
        jac = std::max(jac, operator_jacobi_defect(B, u, a, b, c));
      } else {
        // skew on the covectors the nonlocal tail accepts
        const FieldTuple w = {B.tail[0].right[0].eval(u), B.tail[0].right[1].eval(u)};
        const Eigen::MatrixXd Q = orthogonal_complement(to_coordinates(w, K), 2 * block_size(K));
        skew = std::max(skew, skew_defect(Q.transpose() * assemble_on(action_of(B, u), Q, 2, K)));
      }
    }
    rows.push_back(make_row("operator_skewness", "closed-form operator is skew-adjoint",
                            Params()("operator", name)("K", K), skew, 1e-9));
    if (B.tail.empty()) {
      rows.push_back(make_row("operator_jacobi", "closed-form operator satisfies Jacobi on linear functionals",
                              Params()("operator", name), jac, 1e-5));
    }
  }
  const FieldTuple u = random_state(HierarchyName::benny, rng);
  rows.push_back(make_row(
      "typeset_skewness", "the typeset second Benny structure is not skew (misplaced um1_x)",
      Params()("operator", "benny:B0")("transcription", "printed")("expect", "defect>=tol"),
      skew_defect(assemble_matrix(action_of(builtin_operator(HierarchyName::benny, 0, Transcription::printed), u),
                                  2, K)
                      .m),
      1e-3, true));

  for (HierarchyName family : {HierarchyName::benny, HierarchyName::dtoda}) {
    const int top = family == HierarchyName::benny ? -1 : 1;
    for (int n = -1; n <= top; ++n) {
      const double d = worst_over(4, [&](int p) {
        return flow_consistency_defect(family, n, random_state(family, rng), 1 + p);
      });
      rows.push_back(make_row("flow_consistency", "B_n dH_k/du equals the tower field of tr L^k/k",
                              Params()("family", fam_name(family))("n", n)("k", "1..4"), d, 1e-8));
    }
    rows.push_back(make_row("casimir_kernel", "Casimir gradients lie in the kernel of the first structure",
                            Params()("family", fam_name(family)),
                            casimir_kernel_defect(family, random_state(family, rng)), 1e-12));
  }
  return rows;
}

std::vector<CheckRow> reduce_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  for (auto [family, n] : {std::pair{HierarchyName::benny, 0}, std::pair{HierarchyName::benny, 1},
                           std::pair{HierarchyName::dtoda, 2}}) {
    auto r = reduction_checks(family, n, o.modes, o.seed, o.probes);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::vector<CheckRow> recursion_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows = recursion_checks(HierarchyName::benny, o.seed, o.probes);
  auto t = recursion_checks(HierarchyName::dtoda, o.seed, o.probes);
  rows.insert(rows.end(), t.begin(), t.end());
  return rows;
}

std::vector<CheckRow> conservation_suite(const SuiteOptions& o) {
  ConservationSettings b;
  b.modes = o.modes;
  ConservationSettings t = b;
  t.family = HierarchyName::dtoda;
  t.flow = 1;
  t.init = "u0=0.1*cos;u1=1";
  std::vector<CheckRow> rows = conservation_checks(b);
  auto r = conservation_checks(t);
  rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

/// Relative pointwise distance between two grid functions.
double relative_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  return m;
}

std::vector<CheckRow> diagnostics_suite(const SuiteOptions& o) {
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(o.seed, "diagnostics"));
  const int n = 4 * o.modes + 1;
  constexpr double kFlagTol = 1e-12;

  struct State {
    std::string label;
    FieldTuple u;
  };
  std::vector<State> benny_states, dtoda_states;
  for (int p = 0; p < 4; ++p) {
    benny_states.push_back({"random" + std::to_string(p), random_state(HierarchyName::benny, rng)});
    dtoda_states.push_back({"random" + std::to_string(p), random_state(HierarchyName::dtoda, rng)});
  }
  const FourierField a = FourierField::constant(2.0) + FourierField::harmonic(1, 0.5, 0.0);
  benny_states.push_back({"u0^2=4um1", {a, 0.25 * a * a}});
  benny_states.push_back({"u0=0,um1=-1", {FourierField{}, FourierField::constant(-1.0)}});
  dtoda_states.push_back({"u0=2cos,u1=1", {FourierField::harmonic(1, 2.0, 0.0), FourierField::constant(1.0)}});
  dtoda_states.push_back({"u0=0,u1=1", {FourierField{}, FourierField::constant(1.0)}});

  // det g in closed form from the grid values of u0 and the second field
  using Formula = std::function<double(double, double)>;
  auto delta = [](double u0, double v) { return u0 * u0 - 4.0 * v; };
  auto w1w2 = [](double u0, double v) { return (u0 - 2.0 * v) * (u0 + 2.0 * v); };
  const std::vector<std::tuple<std::string, HierarchyName, Formula, std::string>> dets = {
      {"benny:B0", HierarchyName::benny, [=](double x, double v) { return -delta(x, v); }, "-Delta"},
      {"benny:B1", HierarchyName::benny,
       [=](double x, double v) { return -delta(x, v) * delta(x, v); }, "-Delta^2"},
      {"dtoda:B-1", HierarchyName::dtoda, [](double, double v) { return -v * v; }, "-u1^2"},
      {"dtoda:B0", HierarchyName::dtoda, [=](double x, double v) { return -v * v * w1w2(x, v); },
       "-u1^2 w1w2"},
      {"dtoda:B1", HierarchyName::dtoda,
       [=](double x, double v) { return -v * v * std::pow(w1w2(x, v), 2); }, "-u1^2 (w1w2)^2"},
      {"dtoda:B2", HierarchyName::dtoda,
       [=](double x, double v) { return -v * v * std::pow(w1w2(x, v), 3); }, "-u1^2 (w1w2)^3"},
  };
  for (const auto& [op, family, formula, text] : dets) {
    const auto& states = family == HierarchyName::benny ? benny_states : dtoda_states;
    double det_defect = 0.0;
    int flag_mismatch = 0;
    for (const State& s : states) {
      const HydroOperator B = builtin_operator(op);
      const MetricReport m = metric_degeneracy(B, family, s.u, n, kFlagTol);
      const auto x = s.u[0].sample(n), v = s.u[1].sample(n);
      const auto xx = s.u[0].derivative().sample(n), vx = s.u[1].derivative().sample(n);
      double min_abs = INFINITY;
      for (int j = 0; j < n; ++j) {
        const double expected = formula(x[j], v[j]);
        min_abs = std::min(min_abs, std::abs(expected));
        // rounding of g00 g11 - g01 g10 scales with the size of the products
        const double pu[] = {x[j], v[j]}, pux[] = {xx[j], vx[j]};
        auto g = [&](int r, int c) { return B.g[r][c].eval_at(pu, pux); };
        const double scale = std::max(1.0, std::abs(g(0, 0) * g(1, 1)) + std::abs(g(0, 1) * g(1, 0)));
        det_defect = std::max(det_defect, std::abs(m.det[j] - expected) / scale);
      }
      flag_mismatch += m.degenerate != (min_abs <= kFlagTol);
    }
    rows.push_back(make_row("metric_determinant", "det g equals " + text + " pointwise (relative to |g00 g11| + |g01 g10|)",
                            Params()("operator", op)("grid", n)("states", states.size()), det_defect,
                            1e-13));
    rows.push_back(make_row("degeneracy_flag", "degenerate flag agrees with the analytic zero set",
                            Params()("operator", op)("tol", kFlagTol)("states", states.size()),
                            flag_mismatch, 1.0));
  }
  // benny Δ and the dToda Riemann invariants
  double disc = 0.0;
  int flag_mismatch = 0;
  for (const State& s : benny_states) {
    const MetricReport m = metric_degeneracy(builtin_operator("benny:B0"), HierarchyName::benny, s.u, n);
    const auto x = s.u[0].sample(n), v = s.u[1].sample(n);
    std::vector<double> e(n);
    for (int j = 0; j < n; ++j) e[j] = delta(x[j], v[j]);
    disc = std::max(disc, relative_difference(m.discriminant, e));
  }
  rows.push_back(make_row("benny_discriminant", "Delta = u0^2 - 4 um1 pointwise",
                          Params()("family", "benny")("grid", n)("states", benny_states.size()), disc, 1e-13));
  disc = 0.0;
  for (const State& s : dtoda_states) {
    const RiemannInvariants r = riemann_invariants(s.u[0], s.u[1], n);
    const auto x = s.u[0].sample(n), v = s.u[1].sample(n);
    std::vector<double> e1(n), e2(n), prod(n);
    double min_abs = INFINITY;
    for (int j = 0; j < n; ++j) {
      e1[j] = x[j] - 2.0 * v[j];
      e2[j] = x[j] + 2.0 * v[j];
      min_abs = std::min(min_abs, std::abs(e1[j] * e2[j]));
    }
    disc = std::max({disc, relative_difference(r.w1.sample(n), e1), relative_difference(r.w2.sample(n), e2)});
    flag_mismatch += r.degenerate != (min_abs <= kFlagTol);
  }
  rows.push_back(make_row("riemann_invariants", "w1,2 = u0 -/+ 2 u1 pointwise",
                          Params()("family", "dtoda")("grid", n)("states", dtoda_states.size()), disc, 1e-13));
  rows.push_back(make_row("riemann_degeneracy_flag", "w1 w2 = 0 flag agrees with the analytic zero set",
                          Params()("family", "dtoda")("states", dtoda_states.size()), flag_mismatch, 1.0));
  return rows;
}

using Suite = std::vector<CheckRow> (*)(const SuiteOptions&);
const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> s = {
      {"rmatrix", rmatrix_suite},       {"jacobi", jacobi_suite},
      {"compat", compat_suite},         {"virasoro", virasoro_suite},
      {"liederiv", liederiv_suite},     {"involution", involution_suite},
      {"laxform", laxform_suite},       {"mult", mult_suite},
      {"inversion", inversion_suite},   {"flows", flows_suite},
      {"pde", pde_suite},               {"submanifold", submanifold_suite},
      {"operators", operators_suite},   {"reduce", reduce_suite},
      {"recursion", recursion_suite},   {"conservation", conservation_suite},
      {"diagnostics", diagnostics_suite}};
  return s;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [n, f] : suites()) names.push_back(n);
  return names;
}

std::vector<CheckRow> run_suite(std::string_view suite, const SuiteOptions& opt) {
  if (opt.probes < 1) throw ConfigError("probes must be positive");
  if (opt.modes < 4) throw ConfigError("modes must be at least 4");
  if (opt.deg_min > -2 || opt.deg_max < 2) throw ConfigError("degree window must contain [-2, 2]");
  for (const auto& [n, f] : suites()) {
    if (n == suite) return f(opt);
  }
  throw ConfigError("unknown suite '" + std::string(suite) + "'");
}

std::vector<CheckRow> reduction_checks(HierarchyName family, int n, int modes, std::uint64_t seed,
                                       int probes, bool per_probe) {
  const bool benny = family == HierarchyName::benny;
  if (!((benny && (n == 0 || n == 1)) || (family == HierarchyName::dtoda && n == 2))) {
    throw ConfigError("reduction is available for benny n = 0, 1 and dtoda n = 2");
  }
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(seed, "reduce") + 7 * n + (benny ? 0 : 100));
  const HierarchySpec h = HierarchySpec::get(family);
  const FieldTuple u = random_state(family, rng);
  const ExtendedOperator E = build_extended_operator(h, n, u);
  const HydroOperator table = extended_operator_table(family, n);
  FieldTuple ue = u;
  ue.resize(E.dim());
  const std::string fam = fam_name(family);

  rows.push_back(make_row("extended_table", "generated extended operator matches the table entrywise",
                          Params()("family", fam)("n", n)("fields", E.dim())("kmax", 4),
                          entrywise_defect(E.action, table, ue, 4).maxCoeff(), 1e-9));
  const auto errata = transcription_errata(extended_operator_table(family, n, Transcription::printed), table);
  if (!errata.empty()) {
    const Eigen::MatrixXd printed =
        entrywise_defect(E.action, extended_operator_table(family, n, Transcription::printed), ue, 4);
    for (const TableDifference& e : errata) {
      rows.push_back(make_row(
          "typeset_entry_discrepancy", "typeset table entry disagrees with the generated operator",
          Params()("family", fam)("n", n)("entry", "(" + std::to_string(e.row) + "," + std::to_string(e.col) + ")")(
              "part", e.part)("printed", "'" + e.printed + "'")("generated", "'" + e.corrected + "'")(
              "expect", "defect>=tol"),
          printed(e.row, e.col), 1e-3, true));
    }
  }

  const int K = std::max(modes, 24);
  std::vector<int> constrain;
  for (int i = 2; i < E.dim(); ++i) constrain.push_back(i);
  const DiracReduction R = dirac_reduce(assemble_matrix(E.action, E.dim(), K), {0, 1}, constrain);
  const HydroOperator target = builtin_operator(family, n);
  const std::string op = fam + ":B" + std::to_string(n);
  const char* red_anchor = "Dirac reduction of the extended operator gives the closed form";
  const char* range_anchor = "admissible covectors keep B_ck xi in the range of B_cc";
  const char* pair_anchor = "reduced bracket does not depend on the kernel part of the constraint solve";
  double red = 0.0, pair = 0.0, range = 0.0;
  for (int p = 0; p < probes; ++p) {
    const FieldTuple xi = R.project_admissible({rng.field(4), rng.field(4)});
    FieldTuple expected = apply_operator(target, u, xi);
    for (auto& f : expected) f = f.truncated(K);
    const double d = max_difference(R.modulo_gauge(R.apply(xi)), R.modulo_gauge(expected));
    const double k = R.kernel_pairing(xi);
    const double g = R.range_residual(xi);
    if (per_probe) {
      rows.push_back(make_row("dirac_reduction", red_anchor,
                              Params()("operator", op)("K", K)("gauge_dim", R.gauge.cols())("probe", p), d,
                              1e-8));
      rows.push_back(make_row("dirac_range", range_anchor, Params()("operator", op)("probe", p), g, 1e-8));
      rows.push_back(make_row("dirac_kernel_independence", pair_anchor,
                              Params()("operator", op)("kernel_dim", R.kernel_dim)("probe", p), k, 1e-8));
    }
    red = std::max(red, d);
    pair = std::max(pair, k);
    range = std::max(range, g);
  }
  if (!per_probe) {
    rows.push_back(make_row("dirac_reduction", red_anchor,
                            Params()("operator", op)("K", K)("kernel_dim", R.kernel_dim)(
                                "gauge_dim", R.gauge.cols())("probes", probes),
                            red, 1e-8));
    rows.push_back(make_row("dirac_range", range_anchor, Params()("operator", op)("probes", probes), range,
                            1e-8));
    rows.push_back(make_row("dirac_kernel_independence", pair_anchor,
                            Params()("operator", op)("kernel_dim", R.kernel_dim)(
                                "kernel_sensitivity", R.kernel_sensitivity)("probes", probes),
                            pair, 1e-8));
  }
  return rows;
}

std::vector<CheckRow> recursion_checks(HierarchyName family, std::uint64_t seed, int probes) {
  if (family != HierarchyName::benny && family != HierarchyName::dtoda) {
    throw ConfigError("recursion checks are available for benny and dtoda");
  }
  std::vector<CheckRow> rows;
  Rng rng(suite_seed(seed, "recursion") + static_cast<int>(family));
  const FieldTuple u = random_state(family, rng);
  const int top = family == HierarchyName::benny ? 1 : 2;
  const double tol = family == HierarchyName::benny ? 1e-8 : 1e-7;
  for (int k = 1; k <= top; ++k) {
    const RecursionReport r = recursion_defect(family, u, k, rng, probes);
    rows.push_back(make_row("recursion", "B_k = R^k B_0 with R = B_0 B_-1^-1 on zero-mean covectors",
                            Params()("family", fam_name(family))("k", k)("probes", probes)(
                                "gauge_dim", r.gauge_dim)("raw_defect", r.raw_defect),
                            r.defect, tol));
  }
  return rows;
}

std::vector<CheckRow> conservation_checks(const ConservationSettings& s) {
  const HierarchySpec h = HierarchySpec::get(s.family);
  const auto init = parse_initial_data(h, s.init);
  EvolveOptions opt;
  opt.flow = s.flow;
  opt.T = s.T;
  opt.modes = s.modes;
  opt.dt = s.dt;
  const Trajectory coarse = evolve(h, init, opt);
  opt.dt = s.dt / 2;
  const Trajectory fine = evolve(h, init, opt);

  std::vector<CheckRow> rows;
  const std::string fam = fam_name(s.family);
  auto base = [&] {
    Params p;
    p("hierarchy", fam)("flow", s.flow)("T", s.T)("dt", s.dt)("K", s.modes)("init", "'" + s.init + "'");
    return p;
  };
  rows.push_back(make_row("trace_drift", "tr L^k/k, k <= 5, is conserved (max over time)",
                          base(), coarse.max_trace_drift, 1e-8));
  rows.push_back(make_row("casimir_drift", "first-structure Casimirs are conserved (max over time)", base(),
                          coarse.max_casimir_drift, 1e-8));
  auto ratio_row = [&](const char* id, const char* what, double c, double f) {
    // a quantity the scheme conserves to rounding has no convergence rate
    if (c < 1e-13) return;
    rows.push_back(make_row(id, what, base()("dt_fine", s.dt / 2)("ratio", c / f), std::abs(c / f - 16.0), 4.0));
  };
  ratio_row("trace_drift_order", "trace drift shrinks 16x when dt halves (|ratio - 16|)",
            coarse.max_trace_drift, fine.max_trace_drift);
  ratio_row("casimir_drift_order", "Casimir drift shrinks 16x when dt halves (|ratio - 16|)",
            coarse.max_casimir_drift, fine.max_casimir_drift);
  return rows;
}

}  // namespace laxtower
