#include "laxtower/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "laxtower/kernels.hpp"

namespace laxtower {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Complex> embed(std::span<const Complex> src, int band) {
  const int src_band = static_cast<int>(src.size() / 2);
  std::vector<Complex> out(2 * band + 1);
  if (src.empty()) return out;
  for (int k = -src_band; k <= src_band; ++k) out[k + band] = src[k + src_band];
  return out;
}

}  // namespace

FourierField FourierField::constant(double value) {
  if (value == 0.0) return {};
  return FourierField(std::vector<Complex>{Complex(value, 0.0)});
}

FourierField FourierField::harmonic(int k, double cos_amp, double sin_amp) {
  k = std::abs(k);
  if (k == 0) return constant(cos_amp);
  std::vector<Complex> m(2 * k + 1);
  m[2 * k] = Complex(0.5 * cos_amp, -0.5 * sin_amp);
  m[0] = std::conj(m[2 * k]);
  return FourierField(std::move(m));
}

FourierField FourierField::from_nonnegative_modes(std::span<const Complex> modes) {
  if (modes.empty()) return {};
  const int band = static_cast<int>(modes.size()) - 1;
  std::vector<Complex> m(2 * band + 1);
  for (int k = 0; k <= band; ++k) m[k + band] = modes[k];
  FourierField f(std::move(m));
  f.enforce_hermitian();
  return f;
}

FourierField FourierField::from_modes(std::vector<Complex> modes) {
  if (modes.empty()) return {};
  FourierField f(std::move(modes));
  f.enforce_hermitian();
  return f;
}

FourierField FourierField::from_grid(std::span<const double> values, int band) {
  if (values.empty() || band < 0) return {};
  return from_modes(kernels::analyze(values, band));
}

Complex FourierField::mode(int k) const {
  const int b = band();
  if (std::abs(k) > b) return {};
  return modes_[k + b];
}

double FourierField::operator()(double x) const {
  const int b = band();
  if (b < 0) return 0.0;
  double v = modes_[b].real();
  for (int k = 1; k <= b; ++k) {
    const Complex e = std::polar(1.0, kTwoPi * k * x);
    v += 2.0 * (modes_[k + b] * e).real();
  }
  return v;
}

std::vector<double> FourierField::sample(int n) const {
  if (modes_.empty()) return std::vector<double>(n, 0.0);
  return kernels::synthesize(modes_, n);
}

FourierField FourierField::derivative() const {
  const int b = band();
  if (b <= 0) return {};
  std::vector<Complex> m(modes_);
  for (int k = -b; k <= b; ++k) m[k + b] *= Complex(0.0, kTwoPi * k);
  return FourierField(std::move(m));
}

FourierField FourierField::antiderivative() const {
  const int b = band();
  if (b <= 0) return {};
  std::vector<Complex> m(modes_);
  m[b] = 0.0;
  for (int k = -b; k <= b; ++k) {
    if (k != 0) m[k + b] /= Complex(0.0, kTwoPi * k);
  }
  return FourierField(std::move(m));
}

FourierField& FourierField::operator+=(const FourierField& o) {
  if (o.modes_.empty()) return *this;
  const int b = std::max(band(), o.band());
  if (b != band()) modes_ = embed(modes_, b);
  const int ob = o.band();
  for (int k = -ob; k <= ob; ++k) modes_[k + b] += o.modes_[k + ob];
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
  if (o.modes_.empty()) return *this;
  const int b = std::max(band(), o.band());
  if (b != band()) modes_ = embed(modes_, b);
  const int ob = o.band();
  for (int k = -ob; k <= ob; ++k) modes_[k + b] -= o.modes_[k + ob];
  return *this;
}

FourierField& FourierField::operator*=(double s) {
  if (s == 0.0) {
    modes_.clear();
    return *this;
  }
  for (auto& c : modes_) c *= s;
  return *this;
}

FourierField operator*(const FourierField& a, const FourierField& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return FourierField(kernels::convolve(a.modes_, b.modes_));
}

FourierField& FourierField::prune(double tol) {
  const int old = band();
  int b = old;
  while (b >= 0 && std::abs(modes_[old + b]) <= tol) --b;
  if (b < 0) {
    modes_.clear();
  } else if (b < old) {
    modes_ = std::vector<Complex>(modes_.begin() + (old - b), modes_.end() - (old - b));
  }
  return *this;
}

FourierField FourierField::truncated(int b) const {
  if (b < 0) return {};
  if (b >= band()) return *this;
  const int old = band();
  return FourierField(std::vector<Complex>(modes_.begin() + (old - b), modes_.end() - (old - b)));
}

double FourierField::max_abs_mode() const {
  double m = 0.0;
  for (const auto& c : modes_) m = std::max(m, std::abs(c));
  return m;
}

double FourierField::l2_norm() const {
  double s = 0.0;
  for (const auto& c : modes_) s += std::norm(c);
  return std::sqrt(s);
}

void FourierField::enforce_hermitian() {
  const int b = band();
  if (b < 0) return;
  modes_[b] = Complex(modes_[b].real(), 0.0);
  for (int k = 1; k <= b; ++k) modes_[b - k] = std::conj(modes_[b + k]);
}

double max_mode_difference(const FourierField& a, const FourierField& b) {
  return (a - b).max_abs_mode();
}

}  // namespace laxtower
