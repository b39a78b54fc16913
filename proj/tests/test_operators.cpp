#include <cmath>
#include <numbers>

#include "doctest.h"
#include "laxtower/errors.hpp"
#include "laxtower/operators.hpp"

using namespace laxtower;
using F = FourierField;

namespace {

FieldTuple benny_u(Rng& rng) { return {rng.field(2, 0.4), F::constant(1.0) + rng.field(2, 0.2, true)}; }
FieldTuple dtoda_u(Rng& rng) { return {rng.field(2, 0.4), F::constant(1.0) + rng.field(2, 0.2, true)}; }

OperatorAction action_of(const HydroOperator& B, const FieldTuple& u) {
  return [B, u](const FieldTuple& xi) { return apply_operator(B, u, xi); };
}

FieldTuple truncated(FieldTuple f, int K) {
  for (auto& x : f) x = x.truncated(K);
  return f;
}

}  // namespace

TEST_CASE("operator application") {
  Rng rng(1);
  const FieldTuple u = benny_u(rng);
  const FieldTuple xi = {rng.field(3), rng.field(3)};

  HydroOperator Z;
  Z.name = "zero";
  Z.fields = {"u0", "um1"};
  Z.g = Z.b = PolyMatrix(2, std::vector<Poly>(2));
  for (const auto& f : apply_operator(Z, u, xi)) CHECK(f.is_zero());

  const FieldTuple y = apply_operator(builtin_operator("benny:B-1"), u, xi);
  CHECK(max_mode_difference(y[0], xi[1].derivative()) == 0.0);
  CHECK(max_mode_difference(y[1], xi[0].derivative()) == 0.0);
}

TEST_CASE("nonlocal tail against a mode-by-mode oracle") {
  Rng rng(2);
  const FieldTuple u = dtoda_u(rng);
  const HydroOperator B2 = builtin_operator(HierarchyName::dtoda, 2);
  REQUIRE(B2.tail.size() == 1);
  // w = (4u1u1x, u1u0x); make ξ admissible: ∫w·ξ = 0
  const F w0 = 4.0 * u[1] * u[1].derivative(), w1 = u[1] * u[0].derivative();
  FieldTuple xi = {rng.field(3), rng.field(3)};
  const double s = pairing({w0, w1}, xi) / pairing({w0, w1}, {w0, w1});
  xi[0] -= s * w0;
  xi[1] -= s * w1;

  HydroOperator local = B2;
  local.tail.clear();
  const FieldTuple full = apply_operator(B2, u, xi);
  const FieldTuple loc = apply_operator(local, u, xi);

  // the integrand on a fine grid, then D⁻¹ by dividing each mode by 2πik
  const int n = 257;
  const auto a0 = w0.sample(n), a1 = w1.sample(n), x0 = xi[0].sample(n), x1 = xi[1].sample(n);
  std::vector<double> g(n);
  for (int j = 0; j < n; ++j) g[j] = a0[j] * x0[j] + a1[j] * x1[j];
  const F arg = F::from_grid(g, 64);
  CHECK(std::abs(arg.mean()) < 1e-13);
  std::vector<Complex> modes(65);
  for (int k = 1; k <= 64; ++k) modes[k] = arg.mode(k) / Complex(0.0, 2.0 * std::numbers::pi * k);
  const F inv = F::from_nonnegative_modes(modes);
  CHECK(max_mode_difference(full[0], loc[0] - w0 * inv) < 1e-10);
  CHECK(max_mode_difference(full[1], loc[1] - w1 * inv) < 1e-10);

  CHECK_THROWS_AS(apply_operator(B2, u, {F{}, F::constant(1.0)}), NonzeroMeanInNonlocalTail);
}

TEST_CASE("builtin operators") {
  const HydroOperator b = builtin_operator("benny:B-1");
  CHECK(b.g[0][1] == Poly::constant(1.0));
  CHECK(b.g[0][0].is_zero());
  CHECK(b.b[0][1].is_zero());

  const HydroOperator t = builtin_operator("dtoda:B-1");
  CHECK(t.g[0][1] == Poly::u(1));
  CHECK(t.b[0][1] == Poly::ux(1));
  CHECK(t.b_component(1)[0][1] == Poly::constant(1.0));
  CHECK(t.b[1][0].is_zero());

  const HydroOperator t1 = builtin_operator("dtoda:B1");
  const Poly a = Poly::u(0), v = Poly::u(1);
  CHECK(t1.g[0][0] == 8.0 * a * v * v);
  CHECK(t1.g[0][1] == 4.0 * v * v * v + a * a * v);
  CHECK(t1.g[1][1] == 2.0 * a * v * v);

  CHECK(builtin_operator_names().size() == 7);
  CHECK_THROWS_AS(builtin_operator("kp:B0"), UnknownOperator);
  CHECK_THROWS_AS(builtin_operator("benny:B2"), UnknownOperator);
  CHECK_THROWS_AS(builtin_operator("benny:X0"), UnknownOperator);
  CHECK_THROWS_AS(builtin_operator("benny"), UnknownOperator);
  CHECK(b.g[0][1].str(b.fields) == "1");
  CHECK(t1.g[0][1].str(t1.fields) == "4*u1^3 + u0^2*u1");
}

TEST_CASE("assembled matrices") {
  Rng rng(3);
  const FieldTuple u = benny_u(rng);
  HydroOperator Z = builtin_operator("benny:B-1");
  Z.g = PolyMatrix(2, std::vector<Poly>(2));
  CHECK(assemble_matrix(action_of(Z, u), 2, 6).m.isZero(0.0));

  const OperatorMatrix M = assemble_matrix(action_of(builtin_operator("benny:B-1"), u), 2, 12);
  CHECK(skew_defect(M.m) < 1e-12);
  const Eigen::MatrixXd ker = kernel_basis(M.m);
  REQUIRE(ker.cols() == 2);
  // the kernel is spanned by the constant covectors (Casimirs ∫u0, ∫um1)
  const Eigen::VectorXd c0 = to_coordinates({F::constant(1.0), F{}}, 12);
  const Eigen::VectorXd c1 = to_coordinates({F{}, F::constant(1.0)}, 12);
  CHECK((ker * (ker.transpose() * c0) - c0).norm() < 1e-12);
  CHECK((ker * (ker.transpose() * c1) - c1).norm() < 1e-12);

  // coordinates round trip
  const FieldTuple f = {rng.field(5), rng.field(5)};
  CHECK(max_difference(from_coordinates(to_coordinates(f, 5), 2, 5), f) < 1e-15);
  CHECK(std::abs(to_coordinates(f, 5).dot(to_coordinates(u, 5)) - pairing(f, truncated(u, 5))) < 1e-14);
}

TEST_CASE("builtin operators are skew and satisfy Jacobi") {
  Rng rng(4);
  for (const std::string& name : builtin_operator_names()) {
    CAPTURE(name);
    const HydroOperator B = builtin_operator(name);
    const FieldTuple u = name[0] == 'b' ? benny_u(rng) : dtoda_u(rng);
    const int K = 12;
    if (B.tail.empty()) {
      CHECK(skew_defect(assemble_matrix(action_of(B, u), 2, K).m) < 1e-9);
      const FieldTuple a = {rng.field(2), rng.field(2)}, b = {rng.field(2), rng.field(2)},
                       c = {rng.field(2), rng.field(2)};
      CHECK(operator_jacobi_defect(B, u, a, b, c) < 1e-5);
    } else {
      // restricted to covectors with ∫w·ξ = 0
      const FieldTuple w = {B.tail[0].right[0].eval(u), B.tail[0].right[1].eval(u)};
      const Eigen::MatrixXd Q = orthogonal_complement(to_coordinates(w, K), 2 * block_size(K));
      const Eigen::MatrixXd A = assemble_on(action_of(B, u), Q, 2, K);
      CHECK(skew_defect(Q.transpose() * A) < 1e-9);
    }
  }
  // the typeset second benny structure is not skew
  const FieldTuple u = benny_u(rng);
  const HydroOperator P = builtin_operator(HierarchyName::benny, 0, Transcription::printed);
  CHECK(skew_defect(assemble_matrix(action_of(P, u), 2, 8).m) > 1e-3);
}

TEST_CASE("transcription errata") {
  const auto b0 = transcription_errata(builtin_operator(HierarchyName::benny, 0, Transcription::printed),
                                       builtin_operator(HierarchyName::benny, 0));
  REQUIRE(b0.size() == 2);
  CHECK(b0[0].row == 1);
  CHECK(b0[0].col == 0);
  CHECK(b0[0].printed == "um1_x");
  CHECK(b0[1].col == 1);
  CHECK(b0[1].corrected == "um1_x");

  const auto x1 = transcription_errata(extended_operator_table(HierarchyName::benny, 1, Transcription::printed),
                                       extended_operator_table(HierarchyName::benny, 1));
  REQUIRE(x1.size() == 1);
  CHECK(x1[0].row == 1);
  CHECK(x1[0].col == 1);
  CHECK(x1[0].part == "b");

  for (int n = -1; n <= 2; ++n) {
    CHECK(transcription_errata(builtin_operator(HierarchyName::dtoda, n, Transcription::printed),
                               builtin_operator(HierarchyName::dtoda, n))
              .empty());
  }
  CHECK(transcription_errata(extended_operator_table(HierarchyName::dtoda, 2, Transcription::printed),
                             extended_operator_table(HierarchyName::dtoda, 2))
            .empty());
  CHECK_THROWS_AS(extended_operator_table(HierarchyName::dtoda, 1), UnknownOperator);
}

TEST_CASE("generated operators reproduce the tables entrywise") {
  Rng rng(5);
  const FieldTuple ub = benny_u(rng);
  const FieldTuple ut = dtoda_u(rng);
  const HierarchySpec benny = HierarchySpec::get(HierarchyName::benny);
  const HierarchySpec dtoda = HierarchySpec::get(HierarchyName::dtoda);

  auto extended = [](FieldTuple u, int dim) {
    u.resize(dim);
    return u;
  };

  const ExtendedOperator e_1 = build_extended_operator(benny, -1, ub);
  CHECK(e_1.dim() == 2);
  CHECK(entrywise_defect(e_1.action, builtin_operator("benny:B-1"), ub, 4).maxCoeff() < 1e-9);

  const ExtendedOperator e0 = build_extended_operator(benny, 0, ub);
  CHECK(e0.degrees == std::vector<int>{0, -1, -2});
  const HydroOperator x0 = extended_operator_table(HierarchyName::benny, 0);
  CHECK(entrywise_defect(e0.action, x0, extended(ub, 3), 4).maxCoeff() < 1e-9);

  const ExtendedOperator e1 = build_extended_operator(benny, 1, ub);
  CHECK(e1.fields == std::vector<std::string>{"u0", "um1", "um2", "um3"});
  CHECK(entrywise_defect(e1.action, extended_operator_table(HierarchyName::benny, 1), extended(ub, 4), 4)
            .maxCoeff() < 1e-9);
  const Eigen::MatrixXd printed = entrywise_defect(
      e1.action, extended_operator_table(HierarchyName::benny, 1, Transcription::printed), extended(ub, 4), 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK((printed(i, j) > 1e-3) == (i == 1 && j == 1));
  }

  for (int n = -1; n <= 1; ++n) {
    const ExtendedOperator e = build_extended_operator(dtoda, n, ut);
    CHECK(e.dim() == 2);
    CHECK(entrywise_defect(e.action, builtin_operator(HierarchyName::dtoda, n), ut, 4).maxCoeff() < 1e-9);
  }
  const ExtendedOperator e2 = build_extended_operator(dtoda, 2, ut);
  CHECK(e2.degrees == std::vector<int>{0, 1, 2});
  CHECK(entrywise_defect(e2.action, extended_operator_table(HierarchyName::dtoda, 2), extended(ut, 3), 4)
            .maxCoeff() < 1e-9);

  // the extra coordinates are exactly the leaked degrees
  Rng probe(6);
  CHECK(poisson_submanifold_defect(benny, 0, probe).leak_degrees == std::vector<int>{-2});
}

TEST_CASE("dirac reduction") {
  Rng rng(7);
  const FieldTuple ub = benny_u(rng);
  const FieldTuple ut = dtoda_u(rng);
  const int K = 24;

  SUBCASE("constraining nothing") {
    const OperatorMatrix M = assemble_matrix(action_of(builtin_operator("benny:B0"), ub), 2, 6);
    const DiracReduction R = dirac_reduce(M, {0, 1}, {});
    CHECK((R.reduced.m - M.m).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("benny second structure") {
    const ExtendedOperator E = build_extended_operator(HierarchySpec::get(HierarchyName::benny), 0, ub);
    const DiracReduction R = dirac_reduce(assemble_matrix(E.action, 3, K), {0, 1}, {2});
    CHECK(R.kernel_dim == 1);
    CHECK(R.kernel_sensitivity < 1e-8);
    CHECK(R.gauge.cols() == 0);
    const HydroOperator B0 = builtin_operator("benny:B0");
    for (int p = 0; p < 50; ++p) {
      const FieldTuple xi = {rng.field(4), rng.field(4)};
      CHECK(max_difference(R.apply(xi), truncated(apply_operator(B0, ub, xi), K)) < 1e-8);
    }
  }

  SUBCASE("benny third structure") {
    const ExtendedOperator E = build_extended_operator(HierarchySpec::get(HierarchyName::benny), 1, ub);
    const DiracReduction R = dirac_reduce(assemble_matrix(E.action, 4, K), {0, 1}, {2, 3});
    CHECK(R.kernel_dim == 2);
    REQUIRE(R.gauge.cols() == 1);
    REQUIRE(R.inadmissible.cols() == 1);
    // both directions are u_x
    const Eigen::VectorXd ux = to_coordinates({ub[0].derivative(), ub[1].derivative()}, K).normalized();
    CHECK(std::abs(std::abs(R.gauge.col(0).dot(ux)) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(R.inadmissible.col(0).dot(ux)) - 1.0) < 1e-10);
    const HydroOperator B1 = builtin_operator("benny:B1");
    for (int p = 0; p < 20; ++p) {
      const FieldTuple xi = R.project_admissible({rng.field(4), rng.field(4)});
      CHECK(R.kernel_pairing(xi) < 1e-8);
      const FieldTuple d = R.modulo_gauge(R.apply(xi));
      CHECK(max_difference(d, R.modulo_gauge(truncated(apply_operator(B1, ub, xi), K))) < 1e-8);
    }
    CHECK_THROWS_AS(R.apply({ub[0].derivative(), ub[1].derivative()}), IllPosedReduction);
  }

  SUBCASE("dtoda fourth structure") {
    const ExtendedOperator E = build_extended_operator(HierarchySpec::get(HierarchyName::dtoda), 2, ut);
    const DiracReduction R = dirac_reduce(assemble_matrix(E.action, 3, K), {0, 1}, {2});
    CHECK(R.kernel_dim == 1);
    REQUIRE(R.gauge.cols() == 1);
    // the gauge direction is the nonlocal factor w = (4u1u1x, u1u0x)
    const Eigen::VectorXd w =
        to_coordinates({4.0 * ut[1] * ut[1].derivative(), ut[1] * ut[0].derivative()}, K).normalized();
    CHECK(std::abs(std::abs(R.gauge.col(0).dot(w)) - 1.0) < 1e-10);
    const HydroOperator B2 = builtin_operator("dtoda:B2");
    for (int p = 0; p < 20; ++p) {
      const FieldTuple xi = R.project_admissible({rng.field(4), rng.field(4)});
      CHECK(R.kernel_pairing(xi) < 1e-8);
      const FieldTuple d = R.modulo_gauge(R.apply(xi));
      CHECK(max_difference(d, R.modulo_gauge(truncated(apply_operator(B2, ut, xi), K))) < 1e-8);
    }
  }
}

TEST_CASE("recursion operators") {
  Rng rng(8);
  const FieldTuple ub = benny_u(rng);
  const FieldTuple ut = dtoda_u(rng);
  CHECK(recursion_defect(HierarchyName::benny, ub, 0, rng).defect == 0.0);
  const RecursionReport b1 = recursion_defect(HierarchyName::benny, ub, 1, rng);
  CHECK(b1.defect < 1e-8);
  CHECK(b1.raw_defect > 1e-3);  // the D⁻¹ constants do not vanish on their own
  CHECK(recursion_defect(HierarchyName::dtoda, ut, 1, rng).defect < 1e-7);
  const RecursionReport t2 = recursion_defect(HierarchyName::dtoda, ut, 2, rng);
  CHECK(t2.defect < 1e-7);
  CHECK(t2.gauge_dim == 2);

  CHECK_THROWS_AS(first_structure_inverse(HierarchyName::benny, ub, {F::constant(1.0), F{}}), SectorViolation);
  CHECK_THROWS_AS(first_structure_inverse(HierarchyName::dtoda, ut, {F{}, ut[1]}), SectorViolation);
  const FieldTuple v = {rng.field(3, 1.0, true), rng.field(3, 1.0, true)};
  const FieldTuple xi = first_structure_inverse(HierarchyName::benny, ub, v);
  CHECK(max_difference(apply_operator(builtin_operator("benny:B-1"), ub, xi), v) < 1e-15);
  CHECK_THROWS_AS(recursion_defect(HierarchyName::dkp, ub, 1, rng), UnknownOperator);
}

TEST_CASE("metric degeneracy") {
  const int n = 33;
  const MetricReport c = metric_degeneracy(builtin_operator("benny:B0"), HierarchyName::benny,
                                           {F{}, F::constant(-1.0)}, n);
  CHECK(c.min_abs_discriminant == doctest::Approx(4.0));
  CHECK_FALSE(c.degenerate);

  // u0² = 4um1 everywhere
  const F u0 = F::constant(2.0) + F::harmonic(1, 0.5, 0.0);
  const MetricReport d = metric_degeneracy(builtin_operator("benny:B0"), HierarchyName::benny,
                                           {u0, 0.25 * u0 * u0}, n);
  CHECK(d.degenerate);
  CHECK(d.min_abs_discriminant < 1e-12);

  Rng rng(9);
  const FieldTuple ut = dtoda_u(rng);
  const MetricReport t = metric_degeneracy(builtin_operator("dtoda:B-1"), HierarchyName::dtoda, ut, n);
  const auto u1 = ut[1].sample(n);
  for (int j = 0; j < n; ++j) CHECK(std::abs(t.det[j] + u1[j] * u1[j]) < 1e-13);
  CHECK(t.min_u1 > 0.0);
  CHECK_FALSE(t.degenerate);
}

TEST_CASE("variational derivatives") {
  Rng rng(10);
  const FieldTuple u = benny_u(rng);
  const FieldTuple g = variational_derivative([](const FieldTuple& v) { return v[0].mean(); }, u, 4);
  CHECK(max_difference(g, {F::constant(1.0), F{}}) < 1e-10);

  const HierarchySpec h = HierarchySpec::get(HierarchyName::benny);
  const Algebra alg(hierarchy_context(h, 64, 4));
  auto trace = [&](int k) {
    return [&, k](const FieldTuple& v) { return conserved_quantities(h, alg, h.assemble(v), k).back(); };
  };
  // tr L²/2 = ∫u0 um1
  CHECK(max_difference(trace_variational_derivative(h, alg, u, 2), {u[1], u[0]}) < 1e-15);
  // tr L³/3 = ∫(u0² um1 + um1²)
  const FieldTuple t3 = trace_variational_derivative(h, alg, u, 3);
  CHECK(max_difference(t3, {2.0 * u[0] * u[1], u[0] * u[0] + 2.0 * u[1]}) < 1e-14);
  for (int k = 2; k <= 4; ++k) {
    CHECK(max_difference(variational_derivative(trace(k), u, 12), trace_variational_derivative(h, alg, u, k)) <
          1e-8);
  }
}

TEST_CASE("flow consistency and casimirs") {
  Rng rng(11);
  const FieldTuple ub = benny_u(rng);
  const FieldTuple ut = dtoda_u(rng);
  for (int k = 1; k <= 4; ++k) {
    CHECK(flow_consistency_defect(HierarchyName::benny, -1, ub, k) < 1e-8);
    for (int n = -1; n <= 1; ++n) CHECK(flow_consistency_defect(HierarchyName::dtoda, n, ut, k) < 1e-8);
  }
  CHECK(casimir_kernel_defect(HierarchyName::benny, ub) == 0.0);
  CHECK(casimir_kernel_defect(HierarchyName::dtoda, ut) < 1e-12);
}
