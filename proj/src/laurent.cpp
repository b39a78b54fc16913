#include "laxtower/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laxtower/errors.hpp"
#include "laxtower/kernels.hpp"

namespace laxtower {

namespace {

const FourierField kZeroField{};

}  // namespace

LaurentElement LaurentElement::monomial(int degree, FourierField f) {
  LaurentElement u;
  u.set(degree, std::move(f));
  return u;
}

const FourierField& LaurentElement::coeff(int d) const {
  if (c_.empty() || d < lo_ || d > hi()) return kZeroField;
  return c_[d - lo_];
}

void LaurentElement::set(int d, FourierField f) {
  if (c_.empty()) {
    if (f.is_zero()) return;
    lo_ = d;
    c_.push_back(std::move(f));
    return;
  }
  if (d < lo_) {
    c_.insert(c_.begin(), lo_ - d, FourierField{});
    lo_ = d;
  } else if (d > hi()) {
    c_.resize(d - lo_ + 1);
  }
  c_[d - lo_] = std::move(f);
  trim();
}

LaurentElement& LaurentElement::operator+=(const LaurentElement& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  const int nlo = std::min(lo_, o.lo_);
  const int nhi = std::max(hi(), o.hi());
  if (nlo < lo_) c_.insert(c_.begin(), lo_ - nlo, FourierField{});
  lo_ = nlo;
  c_.resize(nhi - nlo + 1);
  for (int d = o.lo_; d <= o.hi(); ++d) (c_[d - lo_] += o.c_[d - o.lo_]).prune(0.0);
  trim();
  return *this;
}

LaurentElement& LaurentElement::operator-=(const LaurentElement& o) { return *this += -o; }

LaurentElement& LaurentElement::operator*=(double s) {
  if (s == 0.0) {
    c_.clear();
    return *this;
  }
  for (auto& f : c_) f *= s;
  return *this;
}

LaurentElement LaurentElement::scaled(const FourierField& f) const {
  LaurentElement out;
  if (is_zero() || f.is_zero()) return out;
  out.lo_ = lo_;
  out.c_.reserve(c_.size());
  for (const auto& c : c_) out.c_.push_back(c * f);
  out.trim();
  return out;
}

LaurentElement LaurentElement::shifted(int s) const {
  LaurentElement out = *this;
  out.lo_ += s;
  return out;
}

LaurentElement LaurentElement::restricted(int lo, int hi) const {
  LaurentElement out;
  if (is_zero()) return out;
  const int a = std::max(lo, lo_);
  const int b = std::min(hi, this->hi());
  if (a > b) return out;
  out.lo_ = a;
  out.c_.assign(c_.begin() + (a - lo_), c_.begin() + (b - lo_ + 1));
  out.trim();
  return out;
}

LaurentElement& LaurentElement::prune(double tol) {
  for (auto& f : c_) f.prune(tol);
  trim();
  return *this;
}

int LaurentElement::band() const {
  int b = -1;
  for (const auto& f : c_) b = std::max(b, f.band());
  return b;
}

double LaurentElement::max_abs_mode() const {
  double m = 0.0;
  for (const auto& f : c_) m = std::max(m, f.max_abs_mode());
  return m;
}

double LaurentElement::l2_norm() const {
  double s = 0.0;
  for (const auto& f : c_) {
    const double n = f.l2_norm();
    s += n * n;
  }
  return std::sqrt(s);
}

double LaurentElement::wiener_norm() const {
  double m = 0.0;
  for (const auto& f : c_) {
    double s = 0.0;
    for (const auto& a : f.modes()) s += std::abs(a);
    m = std::max(m, s);
  }
  return m;
}

void LaurentElement::trim() {
  std::size_t first = 0;
  while (first < c_.size() && c_[first].is_zero()) ++first;
  if (first == c_.size()) {
    c_.clear();
    lo_ = 0;
    return;
  }
  std::size_t last = c_.size();
  while (c_[last - 1].is_zero()) --last;
  if (first > 0 || last < c_.size()) {
    c_ = std::vector<FourierField>(c_.begin() + first, c_.begin() + last);
    lo_ += static_cast<int>(first);
  }
}

double max_difference(const LaurentElement& u, const LaurentElement& v) {
  return (u - v).max_abs_mode();
}

LaurentElement product(const LaurentElement& u, const LaurentElement& v) {
  LaurentElement out;
  if (u.is_zero() || v.is_zero()) return out;
  auto dense = kernels::laurent_product(u.dense(), v.dense());
  const int lo = u.lo() + v.lo();
  for (int i = static_cast<int>(dense.size()) - 1; i >= 0; --i) {
    if (!dense[i].is_zero()) out.set(lo + i, std::move(dense[i]));
  }
  return out;
}

std::string_view to_string(Variant v) { return v == Variant::minus_one ? "minus_one" : "zero"; }

std::string_view to_string(RMatrixName r) {
  switch (r) {
    case RMatrixName::benny: return "benny";
    case RMatrixName::dtoda: return "dtoda";
    case RMatrixName::dkp: return "dkp";
    case RMatrixName::dmkp: return "dmkp";
    case RMatrixName::ddym: return "ddym";
  }
  return "?";
}

RMatrixName parse_rmatrix(std::string_view name) {
  for (auto r : {RMatrixName::benny, RMatrixName::dtoda, RMatrixName::dkp, RMatrixName::dmkp,
                 RMatrixName::ddym}) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown r-matrix '" + std::string(name) + "'");
}

AlgebraContext AlgebraContext::for_rmatrix(RMatrixName r, int mode_cap, int deg_min, int deg_max) {
  AlgebraContext ctx;
  ctx.rmatrix = r;
  ctx.bracket = ctx.pairing = (r == RMatrixName::dtoda) ? Variant::zero : Variant::minus_one;
  ctx.mode_cap = mode_cap;
  ctx.deg_min = deg_min;
  ctx.deg_max = deg_max;
  return ctx;
}

void AlgebraContext::validate() const {
  if (bracket != pairing) throw ConfigError("bracket and pairing variants differ");
  const bool zero_variant = bracket == Variant::zero;
  if (zero_variant != (rmatrix == RMatrixName::dtoda)) {
    throw ConfigError("r-matrix " + std::string(to_string(rmatrix)) +
                      " does not belong to the " + std::string(to_string(bracket)) + " bracket");
  }
  if (mode_cap < 1) throw ConfigError("mode cap must be positive");
  if (deg_min > 0 || deg_max < 1) throw ConfigError("degree window must contain [0, 1]");
  if (!(prune_tol >= 0.0) || !(fd_step > 0.0)) throw ConfigError("bad tolerances");
}

Algebra::Algebra(AlgebraContext ctx) : ctx_(ctx) { ctx_.validate(); }

LaurentElement Algebra::checked(LaurentElement u) const {
  u.prune(ctx_.prune_tol);
  if (u.is_zero()) return u;
  if (u.lo() < ctx_.deg_min || u.hi() > ctx_.deg_max) {
    throw DegreeOverflow("λ-support [" + std::to_string(u.lo()) + ", " + std::to_string(u.hi()) +
                         "] leaves window [" + std::to_string(ctx_.deg_min) + ", " +
                         std::to_string(ctx_.deg_max) + "]");
  }
  if (u.band() > ctx_.mode_cap) {
    throw ModeOverflow("Fourier band " + std::to_string(u.band()) + " exceeds cap " +
                       std::to_string(ctx_.mode_cap));
  }
  return u;
}

LaurentElement Algebra::multiply(const LaurentElement& u, const LaurentElement& v) const {
  return checked(product(u, v));
}

LaurentElement Algebra::d_lambda(const LaurentElement& u) const {
  LaurentElement out;
  if (u.is_zero()) return out;
  for (int d = u.lo(); d <= u.hi(); ++d) {
    if (d != 0) out.set(d - 1, static_cast<double>(d) * u.coeff(d));
  }
  return checked(std::move(out));
}

LaurentElement Algebra::d_x(const LaurentElement& u) {
  LaurentElement out;
  if (u.is_zero()) return out;
  for (int d = u.lo(); d <= u.hi(); ++d) out.set(d, u.coeff(d).derivative());
  return out;
}

double Algebra::trace(const LaurentElement& u, Variant v) {
  return u.coeff(v == Variant::minus_one ? -1 : 0).mean();
}

double Algebra::pairing(const LaurentElement& u, const LaurentElement& v, Variant var) {
  if (u.is_zero() || v.is_zero()) return 0.0;
  const int s = var == Variant::minus_one ? -1 : 0;
  double acc = 0.0;
  for (int i = u.lo(); i <= u.hi(); ++i) {
    const FourierField& a = u.coeff(i);
    const FourierField& b = v.coeff(s - i);
    if (a.is_zero() || b.is_zero()) continue;
    const int band = std::min(a.band(), b.band());
    // ∫ a b dx = Σ_k a_k b_{-k} = Σ_k a_k conj(b_k)
    double t = (a.mode(0) * std::conj(b.mode(0))).real();
    for (int k = 1; k <= band; ++k) t += 2.0 * (a.mode(k) * std::conj(b.mode(k))).real();
    acc += t;
  }
  return acc;
}

LaurentElement Algebra::power(const LaurentElement& L, int k) const {
  if (k < 0) throw ConfigError("power needs a nonnegative exponent");
  LaurentElement out = LaurentElement::one();
  for (int i = 0; i < k; ++i) out = multiply(out, L);
  return out;
}

Algebra::Inverse Algebra::invert(const LaurentElement& L, int order) const {
  if (order < 1) throw ConfigError("inversion order must be positive");
  if (L.is_zero()) throw NotInvertible("zero element");
  const int d = L.hi();
  const FourierField& c = L.coeff(d);

  const int n = std::max(64, 8 * std::max(ctx_.mode_cap, c.band()) + 1);
  std::vector<double> values = c.sample(n);
  double vmax = 0.0;
  double vmin = std::abs(values[0]);
  for (double v : values) {
    vmax = std::max(vmax, std::abs(v));
    vmin = std::min(vmin, std::abs(v));
  }
  if (!(vmin > 1e-12 * vmax)) throw NotInvertible("dominant coefficient vanishes on the grid");
  for (double& v : values) v = 1.0 / v;
  FourierField cinv = FourierField::from_grid(values, ctx_.mode_cap);
  cinv.prune(ctx_.prune_tol);

  // ρ = λ^{-d} c^{-1} (L - λ^d c), degrees ≤ -1.
  const int lowest = -(order - 1);
  LaurentElement rest = L;
  rest.set(d, FourierField{});
  LaurentElement rho = rest.shifted(-d).restricted(lowest, -1);
  rho = rho.scaled(cinv).prune(ctx_.prune_tol);

  LaurentElement sum = LaurentElement::one();
  LaurentElement term = LaurentElement::one();
  for (int j = 1; j < order && !rho.is_zero(); ++j) {
    term = -product(term, rho).restricted(lowest, 0);
    term.prune(ctx_.prune_tol);
    if (term.is_zero()) break;
    sum += term;
  }
  Inverse inv;
  inv.element = checked(sum.scaled(cinv).shifted(-d));
  LaurentElement r = product(L, inv.element) - LaurentElement::one();
  inv.residual = r.wiener_norm();
  return inv;
}

}  // namespace laxtower
