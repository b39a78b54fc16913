#pragma once

// Data-parallel inner loops of the library. Each kernel exists twice: a plain
// serial reference, kept for testing, and an OpenMP version used by default.
// Both produce bit-identical results (every output entry is summed in the
// same order by exactly one thread).

#include <span>
#include <vector>

#include "laxtower/fourier.hpp"

namespace laxtower::kernels {

namespace serial {

/// Hermitian convolution of two mode arrays ordered -band..band.
std::vector<Complex> convolve(std::span<const Complex> a, std::span<const Complex> b);

/// Values of Σ c_k e^{2πikx} at x_j = j/n.
std::vector<double> synthesize(std::span<const Complex> modes, int n);

/// Modes |k| ≤ band of equispaced samples (discrete Fourier transform).
std::vector<Complex> analyze(std::span<const double> values, int band);

/// Product of two Laurent polynomials stored densely in degree: entry i of
/// the result holds the coefficient of degree (lo_a + lo_b + i).
std::vector<FourierField> laurent_product(std::span<const FourierField> a,
                                          std::span<const FourierField> b);

}  // namespace serial

namespace omp {

std::vector<Complex> convolve(std::span<const Complex> a, std::span<const Complex> b);
std::vector<double> synthesize(std::span<const Complex> modes, int n);
std::vector<Complex> analyze(std::span<const double> values, int band);
std::vector<FourierField> laurent_product(std::span<const FourierField> a,
                                          std::span<const FourierField> b);

}  // namespace omp

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

// Dispatch used by the rest of the library.
inline std::vector<Complex> convolve(std::span<const Complex> a, std::span<const Complex> b) {
  return omp::convolve(a, b);
}
inline std::vector<double> synthesize(std::span<const Complex> modes, int n) {
  return omp::synthesize(modes, n);
}
inline std::vector<Complex> analyze(std::span<const double> values, int band) {
  return omp::analyze(values, band);
}
inline std::vector<FourierField> laurent_product(std::span<const FourierField> a,
                                                 std::span<const FourierField> b) {
  return omp::laurent_product(a, b);
}

}  // namespace laxtower::kernels
