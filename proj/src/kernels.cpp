#include "laxtower/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace laxtower::kernels {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Below this many output entries the OpenMP versions stay serial; thread
// start-up would dominate.
constexpr int kParallelThreshold = 64;

int half_band(std::span<const Complex> a) { return static_cast<int>(a.size() / 2); }

// Output mode k ≥ 0 of the convolution; summation order is fixed.
Complex convolve_entry(std::span<const Complex> a, std::span<const Complex> b, int k) {
  const int ba = half_band(a);
  const int bb = half_band(b);
  const int lo = std::max(-ba, k - bb);
  const int hi = std::min(ba, k + bb);
  Complex s{};
  for (int i = lo; i <= hi; ++i) s += a[i + ba] * b[k - i + bb];
  return s;
}

void mirror(std::vector<Complex>& out) {
  const int b = half_band(out);
  out[b] = Complex(out[b].real(), 0.0);
  for (int k = 1; k <= b; ++k) out[b - k] = std::conj(out[b + k]);
}

double synthesize_entry(std::span<const Complex> modes, int n, int j) {
  const int b = half_band(modes);
  double v = modes[b].real();
  for (int k = 1; k <= b; ++k) {
    // Reduce k·j modulo n before forming the angle to keep it accurate.
    const long long r = (static_cast<long long>(k) * j) % n;
    const Complex e = std::polar(1.0, kTwoPi * static_cast<double>(r) / n);
    v += 2.0 * (modes[k + b] * e).real();
  }
  return v;
}

Complex analyze_entry(std::span<const double> values, int k) {
  const int n = static_cast<int>(values.size());
  Complex s{};
  for (int j = 0; j < n; ++j) {
    const long long r = (static_cast<long long>(k) * j) % n;
    s += values[j] * std::polar(1.0, -kTwoPi * static_cast<double>(r) / n);
  }
  return s / static_cast<double>(n);
}

FourierField product_entry(std::span<const FourierField> a, std::span<const FourierField> b,
                           int s) {
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  FourierField acc;
  for (int i = std::max(0, s - nb + 1); i <= std::min(na - 1, s); ++i) {
    const FourierField& x = a[i];
    const FourierField& y = b[s - i];
    if (x.is_zero() || y.is_zero()) continue;
    acc += FourierField::from_modes(serial::convolve(x.modes(), y.modes()));
  }
  return acc;
}

}  // namespace

namespace serial {

std::vector<Complex> convolve(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) return {};
  const int band = half_band(a) + half_band(b);
  std::vector<Complex> out(2 * band + 1);
  for (int k = 0; k <= band; ++k) out[k + band] = convolve_entry(a, b, k);
  mirror(out);
  return out;
}

std::vector<double> synthesize(std::span<const Complex> modes, int n) {
  std::vector<double> out(n, 0.0);
  if (modes.empty()) return out;
  for (int j = 0; j < n; ++j) out[j] = synthesize_entry(modes, n, j);
  return out;
}

std::vector<Complex> analyze(std::span<const double> values, int band) {
  std::vector<Complex> out(2 * band + 1);
  for (int k = 0; k <= band; ++k) out[k + band] = analyze_entry(values, k);
  mirror(out);
  return out;
}

std::vector<FourierField> laurent_product(std::span<const FourierField> a,
                                          std::span<const FourierField> b) {
  if (a.empty() || b.empty()) return {};
  const int n = static_cast<int>(a.size() + b.size()) - 1;
  std::vector<FourierField> out(n);
  for (int s = 0; s < n; ++s) out[s] = product_entry(a, b, s);
  return out;
}

}  // namespace serial

namespace omp {

std::vector<Complex> convolve(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) return {};
  const int band = half_band(a) + half_band(b);
  std::vector<Complex> out(2 * band + 1);
  const long long work = static_cast<long long>(a.size()) * static_cast<long long>(b.size());
#pragma omp parallel for schedule(static) if (work > 64 * 64)
  for (int k = 0; k <= band; ++k) out[k + band] = convolve_entry(a, b, k);
  mirror(out);
  return out;
}

std::vector<double> synthesize(std::span<const Complex> modes, int n) {
  std::vector<double> out(n, 0.0);
  if (modes.empty()) return out;
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (int j = 0; j < n; ++j) out[j] = synthesize_entry(modes, n, j);
  return out;
}

std::vector<Complex> analyze(std::span<const double> values, int band) {
  std::vector<Complex> out(2 * band + 1);
#pragma omp parallel for schedule(static) if (band > kParallelThreshold / 2)
  for (int k = 0; k <= band; ++k) out[k + band] = analyze_entry(values, k);
  mirror(out);
  return out;
}

std::vector<FourierField> laurent_product(std::span<const FourierField> a,
                                          std::span<const FourierField> b) {
  if (a.empty() || b.empty()) return {};
  const int n = static_cast<int>(a.size() + b.size()) - 1;
  std::vector<FourierField> out(n);
#pragma omp parallel for schedule(dynamic) if (a.size() * b.size() > 16)
  for (int s = 0; s < n; ++s) out[s] = product_entry(a, b, s);
  return out;
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace laxtower::kernels
