#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace laxtower {

using Complex = std::complex<double>;

/// Real-valued smooth function on the unit circle ℝ/ℤ, stored as its
/// truncated Fourier series f(x) = Σ_k c_k e^{2πikx}, |k| ≤ band.
///
/// Amplitudes satisfy c_{-k} = conj(c_k); every constructor and arithmetic
/// operation restores this exactly. A default-constructed field is zero.
/// The band grows exactly under products; callers that need a hard cap
/// check it through `Algebra`.
class FourierField {
 public:
  FourierField() = default;

  /// Constant function.
  static FourierField constant(double value);
  /// a·cos(2πkx) + b·sin(2πkx).
  static FourierField harmonic(int k, double cos_amp, double sin_amp);
  /// Takes the amplitudes for k = 0..band; negative modes are implied.
  static FourierField from_nonnegative_modes(std::span<const Complex> modes);
  /// Takes a full mode array of length 2·band+1 ordered from -band to band.
  /// Negative modes are overwritten by conjugates of positive ones.
  static FourierField from_modes(std::vector<Complex> modes);
  /// Samples on N equispaced points x_j = j/N, keeping modes |k| ≤ band.
  static FourierField from_grid(std::span<const double> values, int band);

  /// -1 for the zero field.
  int band() const { return static_cast<int>(modes_.size() / 2) - (modes_.empty() ? 1 : 0); }
  bool is_zero() const { return modes_.empty(); }
  Complex mode(int k) const;
  double mean() const { return mode(0).real(); }
  /// Full array ordered -band..band (empty for zero).
  std::span<const Complex> modes() const { return modes_; }

  double operator()(double x) const;
  std::vector<double> sample(int n) const;

  FourierField derivative() const;
  /// Antiderivative with zero mean; the input's zero mode is ignored.
  FourierField antiderivative() const;

  FourierField& operator+=(const FourierField& o);
  FourierField& operator-=(const FourierField& o);
  FourierField& operator*=(double s);
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(FourierField a, double s) { return a *= s; }
  friend FourierField operator*(double s, FourierField a) { return a *= s; }
  friend FourierField operator-(FourierField a) { return a *= -1.0; }
  /// Exact product (band adds).
  friend FourierField operator*(const FourierField& a, const FourierField& b);

  /// Drops trailing modes with |c_k| ≤ tol; zero if nothing is left.
  FourierField& prune(double tol);
  /// Keeps modes |k| ≤ band (Galerkin projection).
  FourierField truncated(int band) const;

  double max_abs_mode() const;
  /// sqrt(Σ_k |c_k|²) = L² norm on the unit circle.
  double l2_norm() const;

 private:
  explicit FourierField(std::vector<Complex> modes) : modes_(std::move(modes)) {}
  void enforce_hermitian();

  std::vector<Complex> modes_;

  friend class FieldAccess;
};

/// Sup-norm of the difference of the Fourier amplitudes.
double max_mode_difference(const FourierField& a, const FourierField& b);

}  // namespace laxtower
