#include "laxtower/tower.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laxtower/errors.hpp"

namespace laxtower {

namespace {

int dual_degree(Variant v, int degree) { return (v == Variant::minus_one ? -1 : 0) - degree; }

}  // namespace

Functional Functional::linear(LaurentElement a) {
  Functional f;
  f.kind_ = Kind::linear;
  f.label_ = "linear";
  f.a_ = std::move(a);
  return f;
}

Functional Functional::trace_monomial(int k) {
  if (k < 1) throw ConfigError("trace monomial needs k >= 1");
  Functional f;
  f.kind_ = Kind::trace_monomial;
  f.label_ = "tr L^" + std::to_string(k) + "/" + std::to_string(k);
  f.k_ = k;
  return f;
}

Functional Functional::coordinate(int degree, int wavenumber, bool imaginary) {
  if (wavenumber < 0 || (wavenumber == 0 && imaginary)) {
    throw ConfigError("coordinate functional needs k > 0 for the imaginary part");
  }
  Functional f;
  f.kind_ = Kind::coordinate;
  f.label_ = std::string(imaginary ? "Im" : "Re") + " u_" + std::to_string(degree) + "[" +
             std::to_string(wavenumber) + "]";
  f.degree_ = degree;
  f.k_ = wavenumber;
  f.imaginary_ = imaginary;
  return f;
}

Functional Functional::composite(ScalarMap eval, std::string label) {
  Functional f;
  f.kind_ = Kind::composite;
  f.label_ = std::move(label);
  f.eval_ = std::move(eval);
  return f;
}

double Functional::eval(const Algebra& alg, const LaurentElement& L) const {
  switch (kind_) {
    case Kind::linear: return alg.pairing(a_, L);
    case Kind::trace_monomial: return alg.trace(alg.power(L, k_)) / k_;
    case Kind::coordinate: {
      const Complex c = L.coeff(degree_).mode(k_);
      return imaginary_ ? c.imag() : c.real();
    }
    case Kind::composite: return eval_(L);
  }
  return 0.0;
}

LaurentElement Functional::grad(const Algebra& alg, const LaurentElement& L) const {
  switch (kind_) {
    case Kind::linear: return a_;
    case Kind::trace_monomial: return alg.power(L, k_ - 1);
    case Kind::coordinate:
      // ∫ u cos(2πkx) = Re u_k and ∫ u (-sin 2πkx) = Im u_k.
      return LaurentElement::monomial(
          dual_degree(alg.context().pairing, degree_),
          FourierField::harmonic(k_, imaginary_ ? 0.0 : 1.0, imaginary_ ? -1.0 : 0.0));
    case Kind::composite: break;
  }
  throw ConfigError("composite functional '" + label_ + "' has no closed-form gradient");
}

LaurentElement fd_gradient(const Algebra& alg, const Functional& F, const LaurentElement& L,
                           int lo, int hi, int band) {
  const Variant var = alg.context().pairing;
  const double h = alg.context().fd_step;
  ScalarMap f = [&](const LaurentElement& M) { return F.eval(alg, M); };
  LaurentElement g;
  for (int d = lo; d <= hi; ++d) {
    FourierField coeff;
    for (int k = 0; k <= band; ++k) {
      for (int part = 0; part < (k == 0 ? 1 : 2); ++part) {
        const FourierField e = FourierField::harmonic(k, part == 0 ? 1.0 : 0.0, part == 1 ? 1.0 : 0.0);
        const double dF = directional_derivative(f, L, LaurentElement::monomial(d, e), h);
        // Dual basis under ∫: cos ↔ 2cos, sin ↔ 2sin, 1 ↔ 1.
        coeff += (k == 0 ? 1.0 : 2.0) * dF * e;
      }
    }
    g.set(dual_degree(var, d), coeff);
  }
  return g;
}

BracketTower::BracketTower(AlgebraContext ctx, int inverse_order)
    : alg_(ctx), inverse_order_(inverse_order) {}

LaurentElement BracketTower::virasoro_field(const LaurentElement& L, int m) const {
  if (m + 1 >= 0) return alg_.power(L, m + 1);
  return alg_.power(alg_.invert(L, inverse_order_).element, -(m + 1));
}

double BracketTower::bracket_with_gradients(const LaurentElement& L, const LaurentElement& dF,
                                            const LaurentElement& dH, int n) const {
  const LaurentElement P = virasoro_field(L, n);
  const RMatrixName r = rmatrix();
  const LaurentElement s = lie_bracket(alg_, r_apply(alg_.multiply(P, dF), r), dH) +
                           lie_bracket(alg_, dF, r_apply(alg_.multiply(P, dH), r));
  return 0.5 * alg_.pairing(L, s);
}

double BracketTower::bracket(const Functional& F, const Functional& H, const LaurentElement& L,
                             int n) const {
  if (F.has_gradient() && H.has_gradient()) {
    return bracket_with_gradients(L, F.grad(alg_, L), H.grad(alg_, L), n);
  }
  // {G,H} = (dG, X_H) = D_{X_H} G for a functional G known only by value.
  if (!F.has_gradient() && H.has_gradient()) {
    return derivative([&](const LaurentElement& M) { return F.eval(alg_, M); }, L,
                      ham_field(H, L, n));
  }
  if (F.has_gradient() && !H.has_gradient()) {
    return -derivative([&](const LaurentElement& M) { return H.eval(alg_, M); }, L,
                       ham_field(F, L, n));
  }
  throw ConfigError("bracket of two composite functionals is not supported");
}

LaurentElement BracketTower::ham_field_from_gradient(const LaurentElement& L,
                                                     const LaurentElement& dH, int n) const {
  const LaurentElement P = virasoro_field(L, n);
  const RMatrixName r = rmatrix();
  const LaurentElement first = lie_bracket(alg_, r_apply(alg_.multiply(P, dH), r), L);
  const LaurentElement second = alg_.multiply(P, r_adjoint_apply(lie_bracket(alg_, dH, L), r));
  return 0.5 * (first + second);
}

LaurentElement BracketTower::ham_field(const Functional& H, const LaurentElement& L, int n) const {
  return ham_field_from_gradient(L, H.grad(alg_, L), n);
}

LaurentElement BracketTower::lax_form(const LaurentElement& L, const LaurentElement& dH,
                                      int n) const {
  const LaurentElement P = virasoro_field(L, n);
  return 0.5 * lie_bracket(alg_, r_apply(alg_.multiply(P, dH), rmatrix()), L);
}

double virasoro_commutator_defect(const BracketTower& t, int m, int n, const LaurentElement& L) {
  const Algebra& alg = t.algebra();
  // dV_n(L)·W = (n+1) L^n W; zero for n = -1.
  auto apply_dv = [&](int k, const LaurentElement& W) {
    if (k == -1) return LaurentElement{};
    return static_cast<double>(k + 1) * alg.multiply(alg.power(L, k), W);
  };
  const LaurentElement lhs =
      apply_dv(n, t.virasoro_field(L, m)) - apply_dv(m, t.virasoro_field(L, n));
  LaurentElement rhs;
  if (n != m) rhs = static_cast<double>(n - m) * t.virasoro_field(L, m + n);
  return (lhs - rhs).max_abs_mode();
}

double lie_derivative_defect(const BracketTower& t, int m, int n, const Functional& F,
                             const Functional& H, const LaurentElement& L) {
  const Algebra& alg = t.algebra();
  const LaurentElement Vm = t.virasoro_field(L, m);
  const double lhs =
      t.derivative([&](const LaurentElement& M) { return t.bracket(F, H, M, n); }, L, Vm);
  auto vm_of = [&](const Functional& G) {
    return [&, G](const LaurentElement& M) {
      return alg.pairing(G.grad(alg, M), t.virasoro_field(M, m));
    };
  };
  // {V_mF, H} = D_{X_H}(V_mF) and {F, V_mH} = -D_{X_F}(V_mH).
  const double vf_h = t.derivative(vm_of(F), L, t.ham_field(H, L, n));
  const double f_vh = -t.derivative(vm_of(H), L, t.ham_field(F, L, n));
  double rhs = vf_h + f_vh;
  if (n != m) rhs += static_cast<double>(n - m) * t.bracket(F, H, L, m + n);
  return std::abs(lhs - rhs);
}

double jacobi_defect(const BracketTower& t, std::span<const int> ns, const Functional& F,
                     const Functional& G, const Functional& H, const LaurentElement& L) {
  auto sum_bracket = [&](const Functional& A, const Functional& B, const LaurentElement& M) {
    double s = 0.0;
    for (int n : ns) s += t.bracket(A, B, M, n);
    return s;
  };
  auto sum_field = [&](const Functional& A) {
    LaurentElement X;
    for (int n : ns) X += t.ham_field(A, L, n);
    return X;
  };
  // {{A,B},C} = D_{X_C} {A,B}.
  auto term = [&](const Functional& A, const Functional& B, const Functional& C) {
    return t.derivative([&](const LaurentElement& M) { return sum_bracket(A, B, M); }, L,
                        sum_field(C));
  };
  return std::abs(term(F, G, H) + term(G, H, F) + term(H, F, G));
}

double jacobi_defect(const BracketTower& t, int n, const Functional& F, const Functional& G,
                     const Functional& H, const LaurentElement& L) {
  const int ns[] = {n};
  return jacobi_defect(t, ns, F, G, H, L);
}

double compatibility_defect(const BracketTower& t, int m, int n, const Functional& F,
                            const Functional& G, const Functional& H, const LaurentElement& L) {
  const int ns[] = {m, n};
  return jacobi_defect(t, ns, F, G, H, L);
}

double involution_defect(const BracketTower& t, int j, int k, int n, const LaurentElement& L) {
  return std::abs(
      t.bracket(Functional::trace_monomial(j), Functional::trace_monomial(k), L, n));
}

double multiplicativity_defect(const BracketTower& t, const Functional& F, const Functional& H,
                               const LaurentElement& L1, const LaurentElement& L2) {
  const Algebra& alg = t.algebra();
  const LaurentElement L = alg.multiply(L1, L2);
  const LaurentElement dF = F.grad(alg, L);
  const LaurentElement dH = H.grad(alg, L);
  // d₁(F∘m) = L₂ dF(L₁L₂), d₂(F∘m) = L₁ dF(L₁L₂); the product bracket is the sum
  // of the factor brackets.
  const double lhs =
      t.bracket_with_gradients(L1, alg.multiply(L2, dF), alg.multiply(L2, dH), 0) +
      t.bracket_with_gradients(L2, alg.multiply(L1, dF), alg.multiply(L1, dH), 0);
  return std::abs(lhs - t.bracket_with_gradients(L, dF, dH, 0));
}

double negative_bracket(const BracketTower& t, const Functional& F, const Functional& H,
                        const LaurentElement& L, int n) {
  if (n < 2) throw ConfigError("negative_bracket expects n >= 2");
  return t.bracket(F, H, L, -n);
}

InversionReport inversion_defect(const BracketTower& t, const Functional& F, const Functional& H,
                                 const LaurentElement& L, int n) {
  const Algebra& alg = t.algebra();
  const auto inv = alg.invert(L, t.inverse_order());
  const LaurentElement& M = inv.element;
  const LaurentElement M2 = alg.multiply(M, M);
  // d(F∘ι)(L) = -L^{-2} dF(L^{-1}).
  const LaurentElement gF = -alg.multiply(M2, F.grad(alg, M));
  const LaurentElement gH = -alg.multiply(M2, H.grad(alg, M));
  const double lhs = t.bracket_with_gradients(L, gF, gH, n);
  const double rhs = t.bracket(F, H, M, -n);
  return {std::abs(lhs + rhs), inv.residual};
}

LaurentElement lax_vector_field(const BracketTower& t, const LaurentElement& L, int k) {
  const Algebra& alg = t.algebra();
  return lie_bracket(alg, r_apply(alg.power(L, k), t.rmatrix()), L);
}

double commuting_flows_defect(const BracketTower& t, int j, int k, const LaurentElement& L) {
  const double h = t.context().fd_step;
  FieldMap Zj = [&](const LaurentElement& M) { return lax_vector_field(t, M, j); };
  FieldMap Zk = [&](const LaurentElement& M) { return lax_vector_field(t, M, k); };
  // [X,Y] = dY·X - dX·Y.
  const LaurentElement c = directional_derivative(Zk, L, Zj(L), h) -
                           directional_derivative(Zj, L, Zk(L), h);
  return c.max_abs_mode();
}

double degree1_invariant_defect(const BracketTower& t, int m, int n, const LaurentElement& L) {
  const Algebra& alg = t.algebra();
  const double h = t.context().fd_step;
  FieldMap Zn = [&](const LaurentElement& M) { return lax_vector_field(t, M, n); };
  LaurentElement lie = directional_derivative(Zn, L, t.virasoro_field(L, m), h);
  if (m != -1) {
    lie -= static_cast<double>(m + 1) * alg.multiply(alg.power(L, m), Zn(L));
  }
  LaurentElement rhs;
  if (m + n >= 1) rhs = static_cast<double>(n) * lax_vector_field(t, L, m + n);
  return (lie - rhs).max_abs_mode();
}

double second_lie_derivative_defect(const BracketTower& t, int k, int n, const LaurentElement& L) {
  const Algebra& alg = t.algebra();
  // Nested differences amplify round-off by 1/h². Both maps are polynomial in
  // L, so repeated Richardson extrapolation at a step of order one is exact
  // apart from round-off.
  const double h = 1.0;
  const int levels = std::max(3, (k + n + 4) / 2);
  FieldMap Z = [&](const LaurentElement& M) { return lax_vector_field(t, M, k); };
  // W = [Z, V_n] = dV_n·Z - dZ·V_n.
  FieldMap W = [&](const LaurentElement& M) {
    LaurentElement w = -directional_derivative(Z, M, t.virasoro_field(M, n), h, levels);
    if (n != -1) w += static_cast<double>(n + 1) * alg.multiply(alg.power(M, n), Z(M));
    return w;
  };
  const LaurentElement c = directional_derivative(W, L, Z(L), h, levels) -
                           directional_derivative(Z, L, W(L), h, levels);
  return c.max_abs_mode();
}

double linearization_defect(const BracketTower& t, const LaurentElement& a,
                            const LaurentElement& b, const LaurentElement& E, int n) {
  const Functional Fa = Functional::linear(a);
  const Functional Fb = Functional::linear(b);
  const double slope = t.derivative(
      [&](const LaurentElement& M) { return t.bracket(Fa, Fb, M, n); }, LaurentElement::one(), E);
  return std::abs(slope - t.algebra().pairing(E, r_bracket(t.algebra(), a, b)));
}

}  // namespace laxtower
