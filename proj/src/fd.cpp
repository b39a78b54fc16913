#include "laxtower/fd.hpp"

#include <vector>

#include "laxtower/errors.hpp"

namespace laxtower {

double directional_derivative(const ScalarMap& f, const LaurentElement& L,
                              const LaurentElement& W, double h) {
  const double norm = W.l2_norm();
  if (norm == 0.0) return 0.0;
  const LaurentElement e = (1.0 / norm) * W;
  auto central = [&](double s) { return (f(L + s * e) - f(L - s * e)) / (2.0 * s); };
  return norm * (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

LaurentElement directional_derivative(const FieldMap& f, const LaurentElement& L,
                                      const LaurentElement& W, double h) {
  const double norm = W.l2_norm();
  if (norm == 0.0) return {};
  const LaurentElement e = (1.0 / norm) * W;
  auto central = [&](double s) { return (1.0 / (2.0 * s)) * (f(L + s * e) - f(L - s * e)); };
  return (norm / 3.0) * (4.0 * central(0.5 * h) - central(h));
}

LaurentElement directional_derivative(const FieldMap& f, const LaurentElement& L,
                                      const LaurentElement& W, double h, int levels) {
  if (levels < 1) throw ConfigError("Richardson levels must be positive");
  const double norm = W.l2_norm();
  if (norm == 0.0) return {};
  const LaurentElement e = (1.0 / norm) * W;
  std::vector<LaurentElement> d;
  for (int i = 0; i < levels; ++i) {
    const double s = h / (1 << i);
    d.push_back((1.0 / (2.0 * s)) * (f(L + s * e) - f(L - s * e)));
  }
  // the error of a centered difference is even in s
  double c = 1.0;
  for (int j = 1; j < levels; ++j) {
    c *= 4.0;
    for (int i = levels - 1; i >= j; --i) d[i] = (1.0 / (c - 1.0)) * (c * d[i] - d[i - 1]);
  }
  return norm * d.back();
}

}  // namespace laxtower
