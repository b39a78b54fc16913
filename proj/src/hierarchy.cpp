#include "laxtower/hierarchy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "laxtower/errors.hpp"
#include "laxtower/lie.hpp"

namespace laxtower {

namespace {

std::string degree_name(int d) {
  return d < 0 ? "um" + std::to_string(-d) : "u" + std::to_string(d);
}

double mean_log(const FourierField& f, int grid_points) {
  const auto v = f.sample(grid_points);
  double s = 0.0;
  for (double x : v) {
    if (!(x > 0.0)) return std::nan("");
    s += std::log(x);
  }
  return s / static_cast<double>(v.size());
}

double min_on_grid(const FourierField& f, int grid_points) {
  const auto v = f.sample(grid_points);
  return *std::min_element(v.begin(), v.end());
}

// Fraction of the fluctuation energy held by modes above 2K/3.
double tail_energy_fraction(const FourierField& f, int K) {
  double total = 0.0;
  double tail = 0.0;
  for (int k = 1; k <= f.band(); ++k) {
    const double e = std::norm(f.mode(k));
    total += e;
    if (3 * k > 2 * K) tail += e;
  }
  return total > 1e-30 ? tail / total : 0.0;
}

}  // namespace

std::string_view to_string(HierarchyName h) {
  switch (h) {
    case HierarchyName::benny: return "benny";
    case HierarchyName::dtoda: return "dtoda";
    case HierarchyName::dkp: return "dkp";
    case HierarchyName::dmkp: return "dmkp";
    case HierarchyName::ddym: return "ddym";
  }
  return "?";
}

HierarchyName parse_hierarchy(std::string_view name) {
  for (auto h : {HierarchyName::benny, HierarchyName::dtoda, HierarchyName::dkp,
                 HierarchyName::dmkp, HierarchyName::ddym}) {
    if (to_string(h) == name) return h;
  }
  throw ConfigError("unknown hierarchy '" + std::string(name) + "'");
}

HierarchySpec HierarchySpec::get(HierarchyName name, int truncation) {
  if (truncation > -1) throw ConfigError("tail truncation must be ≤ -1");
  HierarchySpec h;
  h.name = name;
  h.truncation = truncation;
  switch (name) {
    case HierarchyName::benny: h.rmatrix = RMatrixName::benny; break;
    case HierarchyName::dtoda: h.rmatrix = RMatrixName::dtoda; break;
    case HierarchyName::dkp: h.rmatrix = RMatrixName::dkp; break;
    case HierarchyName::dmkp: h.rmatrix = RMatrixName::dmkp; break;
    case HierarchyName::ddym: h.rmatrix = RMatrixName::ddym; break;
  }
  return h;
}

std::vector<int> HierarchySpec::field_degrees() const {
  switch (name) {
    case HierarchyName::benny: return {0, -1};
    case HierarchyName::dtoda: return {0, 1};
    default: break;
  }
  std::vector<int> d;
  for (int i = top_tangent_degree(); i >= truncation; --i) d.push_back(i);
  return d;
}

std::vector<std::string> HierarchySpec::field_names() const {
  std::vector<std::string> names;
  for (int d : field_degrees()) names.push_back(degree_name(d));
  return names;
}

int HierarchySpec::top_tangent_degree() const {
  return (name == HierarchyName::dtoda || name == HierarchyName::ddym) ? 1 : 0;
}

bool HierarchySpec::has_tail() const {
  return name == HierarchyName::dkp || name == HierarchyName::dmkp || name == HierarchyName::ddym;
}

double HierarchySpec::flow_scale() const {
  // Benny flows are written as [R(¼L^m), L] = ½[Π₊(L^m), L].
  return name == HierarchyName::benny ? 0.5 : 1.0;
}

LaurentElement HierarchySpec::assemble(const std::vector<FourierField>& fields) const {
  const auto degs = field_degrees();
  if (fields.size() != degs.size()) throw ConfigError("wrong number of fields");
  LaurentElement L;
  if (name != HierarchyName::dtoda && name != HierarchyName::ddym) {
    L.set(1, FourierField::constant(1.0));
  }
  for (std::size_t i = 0; i < degs.size(); ++i) L += LaurentElement::monomial(degs[i], fields[i]);
  if (name == HierarchyName::dtoda) L += LaurentElement::monomial(-1, fields[1]);
  return L;
}

std::vector<FourierField> HierarchySpec::coordinates(const LaurentElement& L) const {
  std::vector<FourierField> out;
  for (int d : field_degrees()) out.push_back(L.coeff(d));
  return out;
}

LaurentElement HierarchySpec::assemble_tangent(const std::vector<FourierField>& v) const {
  const auto degs = field_degrees();
  if (v.size() != degs.size()) throw ConfigError("wrong number of velocities");
  LaurentElement X;
  for (std::size_t i = 0; i < degs.size(); ++i) X += LaurentElement::monomial(degs[i], v[i]);
  if (name == HierarchyName::dtoda) X += LaurentElement::monomial(-1, v[1]);
  return X;
}

std::vector<FourierField> HierarchySpec::tangent_coordinates(const LaurentElement& X) const {
  return coordinates(X);
}

std::vector<int> HierarchySpec::transverse_degrees(const LaurentElement& X, double tol) const {
  std::vector<int> out;
  if (X.is_zero()) return out;
  const auto degs = field_degrees();
  for (int d = X.lo(); d <= X.hi(); ++d) {
    const FourierField& c = X.coeff(d);
    bool tangent = false;
    if (has_tail()) {
      tangent = d <= top_tangent_degree();
    } else if (name == HierarchyName::dtoda && d == -1) {
      tangent = max_mode_difference(c, X.coeff(1)) <= tol;
    } else {
      tangent = std::find(degs.begin(), degs.end(), d) != degs.end();
    }
    if (!tangent && c.max_abs_mode() > tol) out.push_back(d);
  }
  return out;
}

double HierarchySpec::transverse_defect(const LaurentElement& X) const {
  if (X.is_zero()) return 0.0;
  double worst = 0.0;
  for (int d = X.lo(); d <= X.hi(); ++d) {
    const FourierField& c = X.coeff(d);
    if (has_tail()) {
      if (d > top_tangent_degree()) worst = std::max(worst, c.max_abs_mode());
    } else if (name == HierarchyName::dtoda) {
      if (d == -1) {
        worst = std::max(worst, max_mode_difference(c, X.coeff(1)));
      } else if (d < -1 || d > 1) {
        worst = std::max(worst, c.max_abs_mode());
      }
    } else if (d != 0 && d != -1) {
      worst = std::max(worst, c.max_abs_mode());
    }
  }
  return worst;
}

LaurentElement HierarchySpec::random_point(Rng& rng, int band, int tail_depth) const {
  std::vector<FourierField> f;
  for (int d : field_degrees()) {
    if (has_tail() && d < -tail_depth) {
      f.emplace_back();
    } else if ((name == HierarchyName::dtoda && d == 1) || (name == HierarchyName::benny && d == -1)) {
      f.push_back(FourierField::constant(1.0) + rng.field(band, 0.3, true));
    } else {
      f.push_back(rng.field(band, 0.5));
    }
  }
  return assemble(f);
}

AlgebraContext hierarchy_context(const HierarchySpec& h, int mode_cap, int max_power) {
  const auto degs = h.field_degrees();
  const int lo = std::min(-1, *std::min_element(degs.begin(), degs.end()));
  return AlgebraContext::for_rmatrix(h.rmatrix, mode_cap, (max_power + 2) * lo - 8,
                                     max_power + 8);
}

LaurentElement lax_rhs(const HierarchySpec& h, const Algebra& alg, const LaurentElement& L, int m) {
  if (m < 1) throw ConfigError("flow index must be positive");
  const RMatrixSpec spec = RMatrixSpec::get(h.rmatrix);
  const LaurentElement P = alg.power(L, m);
  const LaurentElement plus = project(P, spec.plus);
  const LaurentElement a = lie_bracket(alg, plus, L);
  const LaurentElement b = -lie_bracket(alg, P - plus, L);
  const double scale = std::max(1.0, a.max_abs_mode());
  if (max_difference(a, b) > 1e-10 * scale) {
    throw TangencyViolation("plus and minus forms of the Lax equation disagree");
  }
  if (h.transverse_defect(a) > 1e-10 * scale) {
    throw TangencyViolation("Lax flow leaves the manifold");
  }
  return a;
}

std::vector<double> conserved_quantities(const HierarchySpec&, const Algebra& alg,
                                         const LaurentElement& L, int kmax) {
  std::vector<double> out;
  LaurentElement P = LaurentElement::one();
  for (int k = 1; k <= kmax; ++k) {
    P = alg.multiply(P, L);
    out.push_back(alg.trace(P) / k);
  }
  return out;
}

std::vector<double> casimirs(const HierarchySpec& h, const std::vector<FourierField>& fields,
                             int grid_points) {
  switch (h.name) {
    case HierarchyName::benny: return {fields[0].mean(), fields[1].mean()};
    case HierarchyName::dtoda: return {fields[0].mean(), mean_log(fields[1], grid_points)};
    default: return {};
  }
}

std::vector<std::string> casimir_names(const HierarchySpec& h) {
  switch (h.name) {
    case HierarchyName::benny: return {"int_u0", "int_um1"};
    case HierarchyName::dtoda: return {"int_u0", "int_log_u1"};
    default: return {};
  }
}

SubmanifoldReport poisson_submanifold_defect(const HierarchySpec& h, int n, Rng& rng, int probes,
                                             double tol) {
  const BracketTower t(AlgebraContext::for_rmatrix(h.rmatrix, 64, -64, 64));
  SubmanifoldReport rep;
  rep.n = n;
  std::set<int> leaks;
  for (int p = 0; p < probes; ++p) {
    const LaurentElement L = h.random_point(rng, 2);
    const Functional H = (p % 4 == 3) ? Functional::trace_monomial(2 + p % 3)
                                      : Functional::linear(rng.element(-6, 6, 2, 0.5));
    const LaurentElement X = t.ham_field(H, L, n);
    rep.defect = std::max(rep.defect, h.transverse_defect(X));
    for (int d : h.transverse_degrees(X, tol)) leaks.insert(d);
  }
  rep.leak_degrees.assign(leaks.begin(), leaks.end());
  rep.is_poisson_submanifold = rep.defect < tol;
  return rep;
}

RiemannInvariants riemann_invariants(const FourierField& u0, const FourierField& u1,
                                     int grid_points) {
  RiemannInvariants r;
  r.w1 = u0 - 2.0 * u1;
  r.w2 = u0 + 2.0 * u1;
  const auto v1 = u1.sample(grid_points);
  const auto a = r.w1.sample(grid_points);
  const auto b = r.w2.sample(grid_points);
  r.strictly_hyperbolic = std::all_of(v1.begin(), v1.end(), [](double x) { return x != 0.0; });
  r.min_abs_w1w2 = INFINITY;
  for (int j = 0; j < grid_points; ++j) r.min_abs_w1w2 = std::min(r.min_abs_w1w2, std::abs(a[j] * b[j]));
  r.degenerate = r.min_abs_w1w2 <= 1e-12;
  return r;
}

Trajectory evolve(const HierarchySpec& h, std::vector<FourierField> fields,
                  const EvolveOptions& opt) {
  if (!(opt.dt > 0.0) || !(opt.T >= 0.0)) throw ConfigError("dt must be positive and T ≥ 0");
  if (opt.modes < 1) throw ConfigError("mode count must be positive");
  if (static_cast<int>(fields.size()) != h.field_count()) throw ConfigError("wrong number of fields");
  const int K = opt.modes;
  const int grid = 4 * K + 1;
  const Algebra alg(hierarchy_context(h, K * (std::max(opt.flow, opt.kmax) + 2) + 4,
                                      std::max(opt.flow, opt.kmax) + 1));
  const RMatrixSpec spec = RMatrixSpec::get(h.rmatrix);
  const double scale = h.flow_scale();

  Trajectory tr;
  auto project_fields = [&](std::vector<FourierField>& f) {
    for (auto& x : f) {
      const FourierField t = x.truncated(K);
      tr.max_dropped = std::max(tr.max_dropped, max_mode_difference(x, t));
      x = t;
    }
  };
  project_fields(fields);

  auto rhs = [&](const std::vector<FourierField>& f) {
    const LaurentElement L = h.assemble(f);
    const LaurentElement X =
        lie_bracket(alg, project(alg.power(L, opt.flow), spec.plus), L);
    if (h.transverse_defect(X) > 1e-10 * std::max(1.0, X.max_abs_mode())) {
      throw TangencyViolation("Lax flow leaves the manifold");
    }
    if (h.has_tail() && !X.is_zero()) {
      for (int d = X.lo(); d < h.truncation; ++d) {
        tr.max_dropped = std::max(tr.max_dropped, X.coeff(d).max_abs_mode());
      }
    }
    auto v = h.tangent_coordinates(X);
    for (auto& x : v) x *= scale;
    project_fields(v);
    return v;
  };
  auto axpy = [](const std::vector<FourierField>& y, double a, const std::vector<FourierField>& k) {
    std::vector<FourierField> out = y;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * k[i];
    return out;
  };
  auto snapshot = [&](double time) {
    FieldSnapshot s;
    s.time = time;
    s.fields = fields;
    s.traces = conserved_quantities(h, alg, h.assemble(fields), opt.kmax);
    s.casimirs = casimirs(h, fields, grid);
    return s;
  };
  auto track_u1 = [&]() {
    if (h.name == HierarchyName::dtoda) tr.min_u1 = std::min(tr.min_u1, min_on_grid(fields[1], grid));
  };

  const long long nsteps = opt.T == 0.0 ? 0 : std::max(1LL, std::llround(opt.T / opt.dt));
  const double dt = nsteps > 0 ? opt.T / static_cast<double>(nsteps) : 0.0;
  const FieldSnapshot first = snapshot(0.0);
  tr.samples.push_back(first);
  if (h.name == HierarchyName::dtoda) tr.min_u1 = min_on_grid(fields[1], grid);

  for (long long step = 1; step <= nsteps; ++step) {
    const auto k1 = rhs(fields);
    const auto k2 = rhs(axpy(fields, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(fields, 0.5 * dt, k2));
    const auto k4 = rhs(axpy(fields, dt, k3));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      fields[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      fields[i].prune(0.0);
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      for (const auto& c : fields[i].modes()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
          throw BlowUp("non-finite amplitude at t = " + std::to_string(step * dt));
        }
      }
      const double frac = tail_energy_fraction(fields[i], K);
      if (frac > opt.blowup_fraction) {
        throw BlowUp("field " + h.field_names()[i] + " has " + std::to_string(100.0 * frac) +
                     "% of its energy in the top third of the modes at t = " +
                     std::to_string(step * dt));
      }
    }
    track_u1();
    const FieldSnapshot s = snapshot(step * dt);
    for (std::size_t k = 0; k < s.traces.size(); ++k) {
      tr.max_trace_drift = std::max(tr.max_trace_drift, std::abs(s.traces[k] - first.traces[k]));
    }
    for (std::size_t k = 0; k < s.casimirs.size(); ++k) {
      tr.max_casimir_drift =
          std::max(tr.max_casimir_drift, std::abs(s.casimirs[k] - first.casimirs[k]));
    }
    if (step == nsteps || (opt.sample_every > 0 && step % opt.sample_every == 0)) {
      tr.samples.push_back(s);
    }
  }
  tr.steps = static_cast<int>(nsteps);
  return tr;
}

std::vector<FourierField> parse_initial_data(const HierarchySpec& h, std::string_view spec) {
  const auto names = h.field_names();
  std::vector<FourierField> fields(names.size());
  if (h.name == HierarchyName::dtoda) fields[1] = FourierField::constant(1.0);

  auto fail = [&](const std::string& why) {
    throw ConfigError("initial data '" + std::string(spec) + "': " + why);
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };

  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(';', pos);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = trim(spec.substr(pos, end - pos));
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) fail("missing '='");
    const std::string name(trim(item.substr(0, eq)));
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail("unknown field '" + name + "'");
    std::string_view expr = trim(item.substr(eq + 1));
    if (expr.empty()) fail("empty expression for " + name);

    FourierField f;
    std::size_t i = 0;
    while (i < expr.size()) {
      double sign = 1.0;
      while (i < expr.size() && (expr[i] == '+' || expr[i] == '-' || expr[i] == ' ')) {
        if (expr[i] == '-') sign = -sign;
        ++i;
      }
      if (i >= expr.size()) fail("dangling sign");
      double coef = 1.0;
      bool have_number = false;
      if (std::isdigit(static_cast<unsigned char>(expr[i])) || expr[i] == '.') {
        const std::string tmp(expr.substr(i));
        char* e = nullptr;
        coef = std::strtod(tmp.c_str(), &e);
        const std::size_t used = static_cast<std::size_t>(e - tmp.c_str());
        if (used == 0) fail("bad number near '" + tmp.substr(0, 1) + "'");
        i += used;
        have_number = true;
        while (i < expr.size() && expr[i] == ' ') ++i;
        if (i < expr.size() && expr[i] == '*') {
          ++i;
          while (i < expr.size() && expr[i] == ' ') ++i;
        } else {
          f += FourierField::constant(sign * coef);
          continue;
        }
      }
      const std::string_view rest = expr.substr(i);
      const bool is_sin = rest.substr(0, 3) == "sin";
      const bool is_cos = rest.substr(0, 3) == "cos";
      if (!is_sin && !is_cos) fail(have_number ? "expected sin or cos after '*'" : "expected a term");
      i += 3;
      int k = 1;
      if (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) {
        const auto r = std::from_chars(expr.data() + i, expr.data() + expr.size(), k);
        i = static_cast<std::size_t>(r.ptr - expr.data());
      }
      if (k < 1) fail("wavenumber must be positive");
      f += FourierField::harmonic(k, is_cos ? sign * coef : 0.0, is_sin ? sign * coef : 0.0);
      while (i < expr.size() && expr[i] == ' ') ++i;
      if (i < expr.size() && expr[i] != '+' && expr[i] != '-') fail("unexpected character");
    }
    fields[static_cast<std::size_t>(it - names.begin())] = f;
  }
  return fields;
}

}  // namespace laxtower
