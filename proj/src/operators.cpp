#include "laxtower/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "laxtower/errors.hpp"
#include "laxtower/fd.hpp"
#include "laxtower/lie.hpp"
#include "laxtower/tower.hpp"

namespace laxtower {

// ---------------------------------------------------------------- Poly

Poly Poly::constant(double c) {
  Poly p;
  if (c != 0.0) p.terms_[Key{}] = c;
  return p;
}

Poly Poly::u(int i) {
  if (i < 0 || i >= kMaxFields) throw ConfigError("field index out of range");
  Poly p;
  Key k{};
  k[i] = 1;
  p.terms_[k] = 1.0;
  return p;
}

Poly Poly::ux(int i) {
  if (i < 0 || i >= kMaxFields) throw ConfigError("field index out of range");
  Poly p;
  Key k{};
  k[kMaxFields + i] = 1;
  p.terms_[k] = 1.0;
  return p;
}

int Poly::max_field() const {
  int m = -1;
  for (const auto& [k, c] : terms_) {
    for (int i = 0; i < kMaxFields; ++i) {
      if (k[i] || k[kMaxFields + i]) m = std::max(m, i);
    }
  }
  return m;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [k, c] : o.terms_) {
    const double s = (terms_[k] += c);
    if (s == 0.0) terms_.erase(k);
  }
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -1.0 * o; }

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      Poly::Key k{};
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(ka[i] + kb[i]);
      Poly t;
      t.terms_[k] = ca * cb;
      out += t;
    }
  }
  return out;
}

Poly operator*(double s, const Poly& a) {
  Poly out;
  if (s == 0.0) return out;
  for (const auto& [k, c] : a.terms_) out.terms_[k] = s * c;
  return out;
}

Poly Poly::derivative_coefficient(int kf) const {
  Poly out;
  for (const auto& [k, c] : terms_) {
    int order = 0;
    for (int i = 0; i < kMaxFields; ++i) order += k[kMaxFields + i];
    if (order > 1) throw ConfigError("coefficient is not linear in the derivatives");
    if (k[kMaxFields + kf] == 1) {
      Key r = k;
      r[kMaxFields + kf] = 0;
      Poly t;
      t.terms_[r] = c;
      out += t;
    }
  }
  return out;
}

FourierField Poly::eval(const FieldTuple& u) const {
  FourierField out;
  std::vector<FourierField> ux(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) ux[i] = u[i].derivative();
  for (const auto& [k, c] : terms_) {
    FourierField t = FourierField::constant(c);
    bool zero = false;
    for (int i = 0; i < kMaxFields && !zero; ++i) {
      for (int p = 0; p < k[i]; ++p) {
        if (i >= static_cast<int>(u.size())) { zero = true; break; }
        t = t * u[i];
      }
      for (int p = 0; p < k[kMaxFields + i]; ++p) {
        if (i >= static_cast<int>(u.size())) { zero = true; break; }
        t = t * ux[i];
      }
    }
    if (!zero) out += t;
  }
  return out;
}

double Poly::eval_at(std::span<const double> u, std::span<const double> ux) const {
  double out = 0.0;
  for (const auto& [k, c] : terms_) {
    double t = c;
    for (int i = 0; i < kMaxFields; ++i) {
      const double a = i < static_cast<int>(u.size()) ? u[i] : 0.0;
      const double b = i < static_cast<int>(ux.size()) ? ux[i] : 0.0;
      for (int p = 0; p < k[i]; ++p) t *= a;
      for (int p = 0; p < k[kMaxFields + i]; ++p) t *= b;
    }
    out += t;
  }
  return out;
}

std::string Poly::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // highest total degree first reads more naturally
  std::vector<std::pair<Key, double>> ts(terms_.begin(), terms_.end());
  std::stable_sort(ts.begin(), ts.end(), [](const auto& x, const auto& y) {
    int dx = 0, dy = 0;
    for (auto e : x.first) dx += e;
    for (auto e : y.first) dy += e;
    return dx > dy;
  });
  for (const auto& [k, c] : ts) {
    double a = c;
    if (!first) {
      os << (a < 0 ? " - " : " + ");
      a = std::abs(a);
    } else if (a < 0) {
      os << "-";
      a = -a;
    }
    first = false;
    std::vector<std::string> factors;
    for (int i = 0; i < kMaxFields; ++i) {
      const std::string n = i < static_cast<int>(names.size()) ? names[i] : "u" + std::to_string(i);
      if (k[i] == 1) factors.push_back(n);
      if (k[i] > 1) factors.push_back(n + "^" + std::to_string(k[i]));
      if (k[kMaxFields + i] == 1) factors.push_back(n + "_x");
      if (k[kMaxFields + i] > 1) factors.push_back(n + "_x^" + std::to_string(k[kMaxFields + i]));
    }
    if (factors.empty() || a != 1.0) {
      std::ostringstream num;
      num << a;
      factors.insert(factors.begin(), num.str());
    }
    for (std::size_t f = 0; f < factors.size(); ++f) os << (f ? "*" : "") << factors[f];
  }
  return os.str();
}

// ---------------------------------------------------------------- operators

PolyMatrix HydroOperator::b_component(int k) const {
  PolyMatrix out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (const Poly& p : b[i]) out[i].push_back(p.derivative_coefficient(k));
  }
  return out;
}

FieldTuple apply_operator(const HydroOperator& B, const FieldTuple& u, const FieldTuple& xi) {
  const int n = B.dim();
  if (static_cast<int>(xi.size()) != n) throw ConfigError("covector has the wrong number of components");
  FieldTuple out(n);
  std::vector<FourierField> dxi(n);
  for (int j = 0; j < n; ++j) dxi[j] = xi[j].derivative();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!B.g[i][j].is_zero() && !dxi[j].is_zero()) out[i] += B.g[i][j].eval(u) * dxi[j];
      if (!B.b[i][j].is_zero() && !xi[j].is_zero()) out[i] += B.b[i][j].eval(u) * xi[j];
    }
  }
  for (const NonlocalTerm& t : B.tail) {
    FourierField arg;
    for (int j = 0; j < n; ++j) {
      if (!t.right[j].is_zero()) arg += t.right[j].eval(u) * xi[j];
    }
    if (std::abs(arg.mean()) > 1e-10 * std::max(1.0, arg.max_abs_mode())) {
      throw NonzeroMeanInNonlocalTail("nonlocal term of " + B.name + " applied to a function of mean " +
                                      std::to_string(arg.mean()));
    }
    const FourierField inv = arg.antiderivative();
    for (int i = 0; i < n; ++i) {
      if (!t.left[i].is_zero()) out[i] += t.left[i].eval(u) * inv;
    }
  }
  for (auto& f : out) f.prune(0.0);
  return out;
}

namespace {

PolyMatrix zeros(int n) { return PolyMatrix(n, std::vector<Poly>(n)); }

HydroOperator make(std::string name, std::vector<std::string> fields) {
  HydroOperator B;
  B.name = std::move(name);
  const int n = static_cast<int>(fields.size());
  B.fields = std::move(fields);
  B.g = zeros(n);
  B.b = zeros(n);
  return B;
}

Poly c(double v) { return Poly::constant(v); }

HydroOperator benny_operator(int n, Transcription t) {
  const Poly a = Poly::u(0), b = Poly::u(1), ax = Poly::ux(0), bx = Poly::ux(1);
  HydroOperator B = make("benny:B" + std::to_string(n), {"u0", "um1"});
  switch (n) {
    case -1:
      B.g = {{c(0), c(1)}, {c(1), c(0)}};
      break;
    case 0:
      B.g = {{c(2), a}, {a, 2 * b}};
      // typeset: u_{-1,x} multiplies the (1,0) slot, which breaks skew-symmetry
      if (t == Transcription::printed) {
        B.b = {{c(0), ax}, {bx, c(0)}};
      } else {
        B.b = {{c(0), ax}, {c(0), bx}};
      }
      break;
    case 1:
      B.g = {{4 * a, a * a + 4 * b}, {a * a + 4 * b, 4 * a * b}};
      B.b = {{2 * ax, 2 * a * ax + 2 * bx}, {2 * bx, 2 * b * ax + 2 * a * bx}};
      break;
    default:
      throw UnknownOperator("no closed-form benny structure B" + std::to_string(n));
  }
  return B;
}

HydroOperator dtoda_operator(int n) {
  const Poly a = Poly::u(0), v = Poly::u(1), ax = Poly::ux(0), vx = Poly::ux(1);
  HydroOperator B = make("dtoda:B" + std::to_string(n), {"u0", "u1"});
  switch (n) {
    case -1:
      B.g = {{c(0), v}, {v, c(0)}};
      B.b = {{c(0), vx}, {c(0), c(0)}};
      break;
    case 0:
      B.g = {{4 * v * v, a * v}, {a * v, v * v}};
      B.b = {{4 * v * vx, a * vx}, {v * ax, v * vx}};
      break;
    case 1:
      B.g = {{8 * a * v * v, 4 * v * v * v + a * a * v}, {4 * v * v * v + a * a * v, 2 * a * v * v}};
      B.b = {{4 * v * v * ax + 8 * a * v * vx, (a * a + 8 * v * v) * vx},
             {2 * a * v * ax + 4 * v * v * vx, v * v * ax + 2 * a * v * vx}};
      break;
    case 2: {
      const Poly v2 = v * v, v3 = v2 * v, v4 = v3 * v, a2 = a * a;
      B.g = {{16 * v4 + 12 * a2 * v2, 12 * a * v3 + a2 * a * v},
             {12 * a * v3 + a2 * a * v, 4 * v4 + 3 * a2 * v2}};
      B.b = {{12 * a * v2 * ax + (32 * v3 + 12 * a2 * v) * vx, 4 * v3 * ax + (24 * a * v2 + a2 * a) * vx},
             {(3 * a2 * v + 8 * v3) * ax + 12 * a * v2 * vx, 3 * a * v2 * ax + (8 * v3 + 3 * a2 * v) * vx}};
      const std::vector<Poly> w = {4 * v * vx, v * ax};
      B.tail.push_back({{-1.0 * w[0], -1.0 * w[1]}, w});
      break;
    }
    default:
      throw UnknownOperator("no closed-form dtoda structure B" + std::to_string(n));
  }
  return B;
}

}  // namespace

HydroOperator builtin_operator(HierarchyName family, int n, Transcription t) {
  switch (family) {
    case HierarchyName::benny:
      return benny_operator(n, t);
    case HierarchyName::dtoda:
      return dtoda_operator(n);
    default:
      throw UnknownOperator("no closed-form operators for " + std::string(to_string(family)));
  }
}

HydroOperator builtin_operator(std::string_view name) {
  const auto colon = name.find(':');
  if (colon == std::string_view::npos || name.substr(colon + 1, 1) != "B") {
    throw UnknownOperator("operator names look like benny:B0, got '" + std::string(name) + "'");
  }
  HierarchyName family;
  try {
    family = parse_hierarchy(name.substr(0, colon));
  } catch (const ConfigError&) {
    throw UnknownOperator("unknown family in '" + std::string(name) + "'");
  }
  const std::string idx(name.substr(colon + 2));
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(idx, &used);
    if (used != idx.size()) throw std::invalid_argument(idx);
  } catch (const std::exception&) {
    throw UnknownOperator("bad structure index in '" + std::string(name) + "'");
  }
  return builtin_operator(family, n);
}

std::vector<std::string> builtin_operator_names() {
  return {"benny:B-1", "benny:B0", "benny:B1", "dtoda:B-1", "dtoda:B0", "dtoda:B1", "dtoda:B2"};
}

HydroOperator extended_operator_table(HierarchyName family, int n, Transcription t) {
  if (family == HierarchyName::benny && n == 0) {
    const Poly a = Poly::u(0), b = Poly::u(1), ax = Poly::ux(0), bx = Poly::ux(1);
    HydroOperator B = make("benny:X0", {"u0", "um1", "um2"});
    B.g = {{c(1), a, b}, {a, 2 * b, c(0)}, {b, c(0), -1.0 * b * b}};
    B.b = {{c(0), ax, bx}, {c(0), bx, c(0)}, {c(0), c(0), -1.0 * b * bx}};
    return B;
  }
  if (family == HierarchyName::benny && n == 1) {
    const Poly a = Poly::u(0), b = Poly::u(1), ax = Poly::ux(0), bx = Poly::ux(1);
    HydroOperator B = make("benny:X1", {"u0", "um1", "um2", "um3"});
    B.g = {{2 * a, a * a + 3 * b, 2 * a * b, b * b},
           {a * a + 3 * b, 4 * a * b, b * b, c(0)},
           {2 * a * b, b * b, -2.0 * a * b * b, -1.0 * b * b * b},
           {b * b, c(0), -1.0 * b * b * b, c(0)}};
    // typeset "12 u_{-1} u_{0x}" in (1,1); skew-symmetry needs 2
    const double k11 = t == Transcription::printed ? 12.0 : 2.0;
    B.b = {{ax, 2 * a * ax + 2 * bx, 2 * a * bx + 2 * b * ax, 2 * b * bx},
           {bx, k11 * b * ax + 2 * a * bx, 2 * b * bx, c(0)},
           {c(0), c(0), -2.0 * a * b * bx - b * b * ax, -2.0 * b * b * bx},
           {c(0), c(0), -1.0 * b * b * bx, c(0)}};
    return B;
  }
  if (family == HierarchyName::dtoda && n == 2) {
    const Poly a = Poly::u(0), v = Poly::u(1), ax = Poly::ux(0), vx = Poly::ux(1);
    const Poly v2 = v * v, v3 = v2 * v, v4 = v3 * v, a2 = a * a, a3 = a2 * a;
    HydroOperator B = make("dtoda:X2", {"u0", "u1", "u2"});
    B.g = {{12 * v4 + 12 * a2 * v2, a3 * v + 12 * a * v3, 2 * v4},
           {a3 * v + 12 * a * v3, 4 * v4 + 3 * a2 * v2, c(0)},
           {2 * v4, c(0), -1.0 * v4}};
    B.b = {{24 * v3 * vx + 12 * a * v2 * ax + 12 * a2 * v * vx, 6 * v3 * ax + 24 * a * v2 * vx + a3 * vx,
            8 * v3 * vx},
           {3 * a2 * v * ax + 6 * v3 * ax + 12 * a * v2 * vx, 3 * a * v2 * ax + (8 * v3 + 3 * a2 * v) * vx,
            v3 * ax},
           {c(0), -1.0 * v3 * ax, -2.0 * v3 * vx}};
    return B;
  }
  throw UnknownOperator("no extended operator table for " + std::string(to_string(family)) + " n = " +
                        std::to_string(n));
}

std::vector<TableDifference> transcription_errata(const HydroOperator& printed,
                                                  const HydroOperator& corrected) {
  std::vector<TableDifference> out;
  for (int i = 0; i < corrected.dim(); ++i) {
    for (int j = 0; j < corrected.dim(); ++j) {
      if (!(printed.g[i][j] == corrected.g[i][j])) {
        out.push_back({i, j, "g", printed.g[i][j].str(printed.fields), corrected.g[i][j].str(corrected.fields)});
      }
      if (!(printed.b[i][j] == corrected.b[i][j])) {
        out.push_back({i, j, "b", printed.b[i][j].str(printed.fields), corrected.b[i][j].str(corrected.fields)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- matrices

FourierField basis_function(int p) {
  if (p == 0) return FourierField::constant(1.0);
  const int k = (p + 1) / 2;
  return p % 2 ? FourierField::harmonic(k, std::sqrt(2.0), 0.0) : FourierField::harmonic(k, 0.0, std::sqrt(2.0));
}

Eigen::VectorXd to_coordinates(const FieldTuple& f, int K) {
  const int bs = block_size(K);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f.size()) * bs);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int off = static_cast<int>(i) * bs;
    out[off] = f[i].mean();
    for (int k = 1; k <= K; ++k) {
      const Complex m = f[i].mode(k);
      out[off + 2 * k - 1] = std::sqrt(2.0) * m.real();
      out[off + 2 * k] = -std::sqrt(2.0) * m.imag();
    }
  }
  return out;
}

FieldTuple from_coordinates(const Eigen::VectorXd& c, int dim, int K) {
  const int bs = block_size(K);
  if (c.size() != dim * bs) throw ConfigError("coordinate vector has the wrong length");
  FieldTuple out(dim);
  for (int i = 0; i < dim; ++i) {
    std::vector<Complex> modes(K + 1);
    modes[0] = c[i * bs];
    for (int k = 1; k <= K; ++k) {
      modes[k] = Complex(c[i * bs + 2 * k - 1], -c[i * bs + 2 * k]) / std::sqrt(2.0);
    }
    out[i] = FourierField::from_nonnegative_modes(modes);
    out[i].prune(0.0);
  }
  return out;
}

OperatorMatrix assemble_matrix(const OperatorAction& op, int dim, int K) {
  const int n = dim * block_size(K);
  OperatorMatrix M;
  M.dim = dim;
  M.modes = K;
  M.m = assemble_on(op, Eigen::MatrixXd::Identity(n, n), dim, K);
  return M;
}

Eigen::MatrixXd assemble_on(const OperatorAction& op, const Eigen::MatrixXd& basis, int dim, int K) {
  const int n = dim * block_size(K);
  if (basis.rows() != n) throw ConfigError("basis has the wrong number of rows");
  Eigen::MatrixXd out(n, basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const FieldTuple y = op(from_coordinates(basis.col(j), dim, K));
    if (static_cast<int>(y.size()) != dim) throw ConfigError("operator changed the number of components");
    out.col(j) = to_coordinates(y, K);
  }
  return out;
}

double skew_defect(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m + m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > rel_tol * smax) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& constraints, int size) {
  if (constraints.cols() == 0) return Eigen::MatrixXd::Identity(size, size);
  return kernel_basis(constraints.transpose(), 1e-12);
}

// ---------------------------------------------------------------- extended operators

ExtendedOperator build_extended_operator(const HierarchySpec& h, int n, const FieldTuple& u,
                                         int mode_cap) {
  if (h.name != HierarchyName::benny && h.name != HierarchyName::dtoda) {
    throw ConfigError("extended operators are available for benny and dtoda");
  }
  if (n < -1) throw ConfigError("structure index must be ≥ -1");
  if (static_cast<int>(u.size()) != h.field_count()) throw ConfigError("wrong number of fields");
  ExtendedOperator E;
  const bool benny = h.name == HierarchyName::benny;
  const int count = benny ? n + 3 : std::max(2, n + 1);
  for (int i = 0; i < count; ++i) {
    E.degrees.push_back(benny ? -i : i);
    E.fields.push_back(benny ? (i == 0 ? "u0" : "um" + std::to_string(i)) : "u" + std::to_string(i));
  }
  const auto tower = std::make_shared<BracketTower>(
      AlgebraContext::for_rmatrix(h.rmatrix, mode_cap, -8 * (count + 4), 8 * (count + 4)));
  const LaurentElement L = h.assemble(u);
  const std::vector<int> degs = E.degrees;
  E.action = [tower, L, degs, benny, n](const FieldTuple& xi) {
    if (xi.size() != degs.size()) throw ConfigError("covector has the wrong number of components");
    LaurentElement dH;
    for (std::size_t i = 0; i < degs.size(); ++i) {
      // (dH, E) pairs the coordinate at degree d with the coefficient at -1-d (benny) or -d
      if (!xi[i].is_zero()) dH.set(benny ? -1 - degs[i] : -degs[i], xi[i]);
    }
    const LaurentElement X = tower->ham_field_from_gradient(L, dH, n);
    FieldTuple out;
    for (int d : degs) out.push_back(X.coeff(d));
    return out;
  };
  return E;
}

// ---------------------------------------------------------------- Dirac reduction

namespace {

std::vector<int> block_indices(const std::vector<int>& comps, int K) {
  std::vector<int> idx;
  const int bs = block_size(K);
  for (int c : comps) {
    for (int p = 0; p < bs; ++p) idx.push_back(c * bs + p);
  }
  return idx;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > rel_tol) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

DiracReduction dirac_reduce(const OperatorMatrix& ext, const std::vector<int>& keep,
                            const std::vector<int>& constrain, double rank_tol) {
  const int K = ext.modes;
  const auto ik = block_indices(keep, K);
  const auto ic = block_indices(constrain, K);
  DiracReduction R;
  R.reduced.dim = static_cast<int>(keep.size());
  R.reduced.modes = K;
  const Eigen::MatrixXd kk = ext.m(ik, ik);
  if (ic.empty()) {
    R.reduced.m = kk;
    R.ck = Eigen::MatrixXd(0, ik.size());
    R.range = Eigen::MatrixXd(0, 0);
    R.gauge = Eigen::MatrixXd(ik.size(), 0);
    R.inadmissible = Eigen::MatrixXd(ik.size(), 0);
    return R;
  }
  const Eigen::MatrixXd kc = ext.m(ik, ic);
  const Eigen::MatrixXd cc = ext.m(ic, ic);
  R.ck = ext.m(ic, ik);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > rank_tol * smax) ++rank;
  if (rank == 0) throw IllPosedReduction("constraint block vanishes");
  const Eigen::MatrixXd Ur = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXd Vr = svd.matrixV().leftCols(rank);
  const Eigen::VectorXd sinv = s.head(rank).cwiseInverse();
  const Eigen::MatrixXd pinv = Vr * sinv.asDiagonal() * Ur.transpose();
  R.range = Ur;
  R.reduced.m = kk - kc * pinv * R.ck;

  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(cc.cols() - rank);
  R.kernel_dim = static_cast<int>(kernel.cols());
  R.kernel_image = kc * kernel;
  for (Eigen::Index j = 0; j < R.kernel_image.cols(); ++j) {
    R.kernel_sensitivity = std::max(R.kernel_sensitivity, R.kernel_image.col(j).norm());
  }
  R.gauge = orthonormal_columns(R.kernel_image, 1e-8 * std::max(1.0, kc.norm()));
  // left kernel of B_cc: B_ck ξ must be orthogonal to it
  const Eigen::MatrixXd left = svd.matrixU().rightCols(cc.rows() - rank);
  R.inadmissible = orthonormal_columns(R.ck.transpose() * left, 1e-8 * std::max(1.0, R.ck.norm()));
  return R;
}

double DiracReduction::range_residual(const FieldTuple& xi) const {
  if (ck.rows() == 0) return 0.0;
  const Eigen::VectorXd r = ck * to_coordinates(xi, reduced.modes);
  const double nr = r.norm();
  if (nr == 0.0) return 0.0;
  return (r - range * (range.transpose() * r)).norm() / nr;
}

FieldTuple DiracReduction::apply(const FieldTuple& xi, double tol) const {
  if (static_cast<int>(xi.size()) != reduced.dim) throw ConfigError("covector has the wrong number of components");
  const double res = range_residual(xi);
  if (res > tol) {
    throw IllPosedReduction("constraint data leave the range of the constrained block (residual " +
                            std::to_string(res) + ")");
  }
  return from_coordinates(reduced.m * to_coordinates(xi, reduced.modes), reduced.dim, reduced.modes);
}

FieldTuple DiracReduction::modulo_gauge(const FieldTuple& v) const {
  Eigen::VectorXd c = to_coordinates(v, reduced.modes);
  if (gauge.cols() > 0) c -= gauge * (gauge.transpose() * c);
  return from_coordinates(c, reduced.dim, reduced.modes);
}

FieldTuple DiracReduction::project_admissible(const FieldTuple& xi) const {
  Eigen::VectorXd c = to_coordinates(xi, reduced.modes);
  if (inadmissible.cols() > 0) c -= inadmissible * (inadmissible.transpose() * c);
  return from_coordinates(c, reduced.dim, reduced.modes);
}

double DiracReduction::kernel_pairing(const FieldTuple& eta) const {
  if (kernel_image.cols() == 0) return 0.0;
  return (kernel_image.transpose() * to_coordinates(eta, reduced.modes)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd entrywise_defect(const OperatorAction& generated, const HydroOperator& table,
                                 const FieldTuple& u, int kmax) {
  const int n = table.dim();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int p = 0; p < block_size(kmax); ++p) {
      FieldTuple xi(n);
      xi[j] = basis_function(p);
      const FieldTuple a = generated(xi);
      const FieldTuple b = apply_operator(table, u, xi);
      for (int i = 0; i < n; ++i) d(i, j) = std::max(d(i, j), max_mode_difference(a[i], b[i]));
    }
  }
  return d;
}

// ---------------------------------------------------------------- recursion

FourierField reciprocal(const FourierField& f, int band) {
  const int n = std::max(64, 4 * std::max(band, f.band()) + 1);
  std::vector<double> v = f.sample(n);
  double lo = INFINITY, hi = 0.0;
  for (double x : v) {
    lo = std::min(lo, std::abs(x));
    hi = std::max(hi, std::abs(x));
  }
  if (!(lo > 1e-12 * hi)) throw NotInvertible("function vanishes on the grid");
  for (double& x : v) x = 1.0 / x;
  return FourierField::from_grid(v, band);
}

namespace {

void require_mean_zero(const FourierField& f, const char* what) {
  if (std::abs(f.mean()) > 1e-9 * std::max(1.0, f.max_abs_mode())) {
    throw SectorViolation(std::string(what) + " has mean " + std::to_string(f.mean()) +
                          "; the first structure cannot be inverted there");
  }
}

void require_family(HierarchyName family) {
  if (family != HierarchyName::benny && family != HierarchyName::dtoda) {
    throw UnknownOperator("recursion operators exist for benny and dtoda");
  }
}

}  // namespace

FieldTuple first_structure_inverse(HierarchyName family, const FieldTuple& u, const FieldTuple& v,
                                   int band) {
  require_family(family);
  if (v.size() != 2 || u.size() != 2) throw ConfigError("expected two components");
  if (family == HierarchyName::benny) {
    // B₋₁ξ = (Dξ1, Dξ0)
    require_mean_zero(v[0], "first component");
    require_mean_zero(v[1], "second component");
    return {v[1].antiderivative(), v[0].antiderivative()};
  }
  // B₋₁ξ = (D(u1ξ1), u1Dξ0)
  const FourierField r = reciprocal(u[1], band);
  require_mean_zero(v[0], "first component");
  const FourierField s = (v[1] * r).truncated(band);
  require_mean_zero(s, "second component divided by u1");
  return {s.antiderivative(), (r * v[0].antiderivative()).truncated(band)};
}

FieldTuple recursion_apply(HierarchyName family, const FieldTuple& u, const FieldTuple& v, int band) {
  return apply_operator(builtin_operator(family, 0), u, first_structure_inverse(family, u, v, band));
}

namespace {

/// Linear functionals whose vanishing keeps every inverse in R^k B₀ defined:
/// the means of the arguments of B₋₁⁻¹. Evaluated on a basis by recording
/// the means instead of throwing.
std::vector<double> sector_means(HierarchyName family, const FieldTuple& u, const FieldTuple& xi, int k,
                                 int band) {
  std::vector<double> means;
  const HydroOperator B0 = builtin_operator(family, 0);
  FieldTuple v = apply_operator(B0, u, xi);
  for (int j = 0; j < k; ++j) {
    FourierField second = v[1];
    if (family == HierarchyName::dtoda) second = (v[1] * reciprocal(u[1], band)).truncated(band);
    means.push_back(v[0].mean());
    means.push_back(second.mean());
    // continue with the mean-free parts so later stages stay defined
    FieldTuple w = v;
    w[0] -= FourierField::constant(v[0].mean());
    if (family == HierarchyName::benny) {
      w[1] -= FourierField::constant(v[1].mean());
    } else {
      w[1] -= second.mean() * u[1];
    }
    v = recursion_apply(family, u, w, band);
  }
  return means;
}

}  // namespace

RecursionReport recursion_defect(HierarchyName family, const FieldTuple& u, int k, Rng& rng, int probes,
                                 int band) {
  require_family(family);
  RecursionReport rep;
  rep.k = k;
  const HydroOperator B0 = builtin_operator(family, 0);
  const HydroOperator Bk = builtin_operator(family, k);
  if (k == 0) return rep;
  const int cap = 64;

  // sector: zero-mean covectors of the given band on which every stage is defined
  const int dim = 2, bs = block_size(band);
  Eigen::MatrixXd S(2 * k, dim * bs);
  for (int j = 0; j < dim * bs; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim * bs);
    e[j] = 1.0;
    const auto m = sector_means(family, u, from_coordinates(e, dim, band), k, cap);
    for (int r = 0; r < 2 * k; ++r) S(r, j) = m[r];
  }
  Eigen::MatrixXd C(dim * bs, 2 * k + dim);
  C.leftCols(2 * k) = S.transpose();
  C.col(2 * k) = to_coordinates({FourierField::constant(1.0), FourierField{}}, band);
  C.col(2 * k + 1) = to_coordinates({FourierField{}, FourierField::constant(1.0)}, band);
  const Eigen::MatrixXd Q = orthogonal_complement(C, dim * bs);

  // integration constants: R^j B₀ c for c in ker B₋₁, j < k
  std::vector<FieldTuple> gauge;
  std::vector<FieldTuple> layer;
  for (const FieldTuple& g : casimir_gradients(family, u, cap)) layer.push_back(apply_operator(B0, u, g));
  for (int j = 0; j < k; ++j) {
    std::vector<FieldTuple> next;
    for (auto& g : layer) {
      for (auto& f : g) f = f.truncated(cap);
      gauge.push_back(g);
      if (j + 1 < k) next.push_back(recursion_apply(family, u, g, cap));
    }
    layer = std::move(next);
  }
  const int K = cap;
  Eigen::MatrixXd G(dim * block_size(K), static_cast<Eigen::Index>(gauge.size()));
  for (std::size_t j = 0; j < gauge.size(); ++j) G.col(static_cast<Eigen::Index>(j)) = to_coordinates(gauge[j], K);
  const Eigen::MatrixXd Gq = orthonormal_columns(G, 1e-10);
  rep.gauge_dim = static_cast<int>(Gq.cols());

  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd z(Q.cols());
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.uniform(-1.0, 1.0);
    const FieldTuple xi = from_coordinates(Q * z, dim, band);
    FieldTuple v = apply_operator(B0, u, xi);
    for (int j = 0; j < k; ++j) v = recursion_apply(family, u, v, cap);
    const FieldTuple target = apply_operator(Bk, u, xi);
    Eigen::VectorXd d = to_coordinates(v, K) - to_coordinates(target, K);
    rep.raw_defect = std::max(rep.raw_defect, d.cwiseAbs().maxCoeff());
    if (Gq.cols() > 0) d -= Gq * (Gq.transpose() * d);
    rep.defect = std::max(rep.defect, d.cwiseAbs().maxCoeff());
  }
  return rep;
}

// ---------------------------------------------------------------- diagnostics

MetricReport metric_degeneracy(const HydroOperator& B, HierarchyName family, const FieldTuple& u,
                               int grid_points, double tol) {
  require_family(family);
  if (u.size() < 2) throw ConfigError("expected two fields");
  MetricReport rep;
  const int n = B.dim();
  std::vector<std::vector<double>> uv(u.size()), uxv(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv[i] = u[i].sample(grid_points);
    uxv[i] = u[i].derivative().sample(grid_points);
  }
  rep.min_abs_det = INFINITY;
  rep.min_abs_discriminant = INFINITY;
  rep.min_u1 = INFINITY;
  std::vector<double> pu(u.size()), pux(u.size());
  for (int x = 0; x < grid_points; ++x) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      pu[i] = uv[i][x];
      pux[i] = uxv[i][x];
    }
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = B.g[i][j].eval_at(pu, pux);
    }
    const double det = n == 2 ? g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) : g.determinant();
    rep.det.push_back(det);
    rep.min_abs_det = std::min(rep.min_abs_det, std::abs(det));
    const double disc = family == HierarchyName::benny ? pu[0] * pu[0] - 4.0 * pu[1]
                                                       : (pu[0] - 2.0 * pu[1]) * (pu[0] + 2.0 * pu[1]);
    rep.discriminant.push_back(disc);
    rep.min_abs_discriminant = std::min(rep.min_abs_discriminant, std::abs(disc));
    if (family == HierarchyName::dtoda) rep.min_u1 = std::min(rep.min_u1, pu[1]);
  }
  rep.degenerate = rep.min_abs_det <= tol;
  if (family != HierarchyName::dtoda) rep.min_u1 = 0.0;
  return rep;
}

FieldTuple variational_derivative(const FieldFunctional& H, const FieldTuple& u, int K, double h) {
  FieldTuple out(u.size());
  for (std::size_t c = 0; c < u.size(); ++c) {
    for (int p = 0; p < block_size(K); ++p) {
      const FourierField phi = basis_function(p);
      auto at = [&](double t) {
        FieldTuple v = u;
        v[c] += t * phi;
        return H(v);
      };
      const double d1 = (at(h) - at(-h)) / (2.0 * h);
      const double d2 = (at(h / 2) - at(-h / 2)) / h;
      const double d = (4.0 * d2 - d1) / 3.0;
      if (d != 0.0) out[c] += d * phi;
    }
  }
  return out;
}

FieldTuple trace_variational_derivative(const HierarchySpec& h, const Algebra& alg, const FieldTuple& u,
                                        int k) {
  if (k < 1) throw ConfigError("trace power must be ≥ 1");
  const LaurentElement P = alg.power(h.assemble(u), k - 1);
  const bool zero_pairing = RMatrixSpec::get(h.rmatrix).bracket == Variant::zero;
  FieldTuple out;
  for (int d : h.field_degrees()) {
    if (!zero_pairing) {
      out.push_back(P.coeff(-1 - d));
    } else {
      FourierField f = P.coeff(-d);
      if (h.name == HierarchyName::dtoda && d != 0) f += P.coeff(d);
      out.push_back(f);
    }
  }
  return out;
}

double flow_consistency_defect(HierarchyName family, int n, const FieldTuple& u, int k) {
  const HierarchySpec h = HierarchySpec::get(family);
  const BracketTower t(AlgebraContext::for_rmatrix(h.rmatrix, 256, -64, 64));
  const FieldTuple xi = trace_variational_derivative(h, t.algebra(), u, k);
  const FieldTuple lhs = apply_operator(builtin_operator(family, n), u, xi);
  const LaurentElement X = t.ham_field(Functional::trace_monomial(k), h.assemble(u), n);
  return max_difference(lhs, h.tangent_coordinates(X));
}

namespace {

LaurentElement pack(const FieldTuple& f) {
  LaurentElement e;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f[i].is_zero()) e.set(static_cast<int>(i), f[i]);
  }
  return e;
}

FieldTuple unpack(const LaurentElement& e, int dim) {
  FieldTuple f(dim);
  for (int i = 0; i < dim; ++i) f[i] = e.coeff(i);
  return f;
}

}  // namespace

double operator_jacobi_defect(const HydroOperator& B, const FieldTuple& u, const FieldTuple& a,
                              const FieldTuple& b, const FieldTuple& c, double h) {
  const int dim = B.dim();
  auto bracket = [&](const FieldTuple& x, const FieldTuple& y) {
    return [&B, x, y, dim](const LaurentElement& w) { return pairing(x, apply_operator(B, unpack(w, dim), y)); };
  };
  // {A,{B,C}} = -D_{B(u)a}{B,C}
  double sum = 0.0;
  const FieldTuple* f[3] = {&a, &b, &c};
  for (int r = 0; r < 3; ++r) {
    const FieldTuple& x = *f[r];
    const FieldTuple& y = *f[(r + 1) % 3];
    const FieldTuple& z = *f[(r + 2) % 3];
    const LaurentElement dir = pack(apply_operator(B, u, x));
    if (dir.is_zero()) continue;
    sum -= directional_derivative(bracket(y, z), pack(u), dir, h);
  }
  return std::abs(sum);
}

std::vector<FieldTuple> casimir_gradients(HierarchyName family, const FieldTuple& u, int band) {
  require_family(family);
  if (family == HierarchyName::benny) {
    return {{FourierField::constant(1.0), FourierField{}}, {FourierField{}, FourierField::constant(1.0)}};
  }
  return {{FourierField::constant(1.0), FourierField{}}, {FourierField{}, reciprocal(u[1], band)}};
}

double casimir_kernel_defect(HierarchyName family, const FieldTuple& u, int band) {
  const HydroOperator B = builtin_operator(family, -1);
  double d = 0.0;
  for (const FieldTuple& g : casimir_gradients(family, u, band)) {
    for (const FourierField& f : apply_operator(B, u, g)) d = std::max(d, f.max_abs_mode());
  }
  return d;
}

double pairing(const FieldTuple& a, const FieldTuple& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (!a[i].is_zero() && !b[i].is_zero()) s += (a[i] * b[i]).mean();
  }
  return s;
}

double max_difference(const FieldTuple& a, const FieldTuple& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const FourierField x = i < a.size() ? a[i] : FourierField{};
    const FourierField y = i < b.size() ? b[i] : FourierField{};
    m = std::max(m, max_mode_difference(x, y));
  }
  return m;
}

}  // namespace laxtower
