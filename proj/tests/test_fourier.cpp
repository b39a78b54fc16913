#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "laxtower/fourier.hpp"
#include "laxtower/kernels.hpp"
#include "laxtower/random.hpp"

using namespace laxtower;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("harmonic evaluates to cos/sin combination") {
  const FourierField f = FourierField::harmonic(3, 0.7, -1.3);
  for (double x : {0.0, 0.1, 0.37, 0.9}) {
    CHECK(f(x) == doctest::Approx(0.7 * std::cos(6 * kPi * x) - 1.3 * std::sin(6 * kPi * x)));
  }
  CHECK(f.mean() == 0.0);
  CHECK(FourierField::constant(2.5).mean() == 2.5);
  CHECK(FourierField::constant(0.0).is_zero());
}

TEST_CASE("modes stay hermitian") {
  std::vector<Complex> m = {Complex(9, 9), Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8)};
  const FourierField f = FourierField::from_modes(m);
  CHECK(f.band() == 2);
  CHECK(f.mode(0).imag() == 0.0);
  CHECK(f.mode(-1) == std::conj(f.mode(1)));
  CHECK(f.mode(-2) == std::conj(f.mode(2)));
}

TEST_CASE("product matches pointwise grid product") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const FourierField a = rng.field(5);
    const FourierField b = rng.field(4);
    const FourierField p = a * b;
    CHECK(p.band() == 9);
    const int n = 4 * 9 + 1;
    const auto va = a.sample(n);
    const auto vb = b.sample(n);
    std::vector<double> vp(n);
    for (int j = 0; j < n; ++j) vp[j] = va[j] * vb[j];
    const FourierField oracle = FourierField::from_grid(vp, 9);
    CHECK(max_mode_difference(p, oracle) < 1e-13);
  }
}

TEST_CASE("derivative matches finite differences; antiderivative inverts it") {
  Rng rng(5);
  const FourierField f = rng.field(3);
  const FourierField df = f.derivative();
  const double h = 1e-3;
  for (double x : {0.05, 0.33, 0.71}) {
    auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
    const double richardson = (4 * central(h / 2) - central(h)) / 3;
    CHECK(std::abs(df(x) - richardson) < 1e-8);
  }
  FourierField g = f;
  g -= FourierField::constant(f.mean());
  CHECK(max_mode_difference(df.antiderivative(), g) < 1e-14);
  CHECK(FourierField::constant(3.0).derivative().is_zero());
}

TEST_CASE("grid round trip and sampling") {
  Rng rng(8);
  const FourierField f = rng.field(6);
  const auto v = f.sample(4 * 6 + 1);
  CHECK(max_mode_difference(FourierField::from_grid(v, 6), f) < 1e-14);
  CHECK(v[3] == doctest::Approx(f(3.0 / 25.0)).epsilon(1e-13));
}

TEST_CASE("prune and truncation") {
  std::vector<Complex> m = {0, 0, 1e-16, 1, 2, 1e-16, 0};
  FourierField f = FourierField::from_nonnegative_modes(m);
  CHECK(f.band() == 6);
  f.prune(1e-14);
  CHECK(f.band() == 4);
  CHECK(f.truncated(1).band() == 1);
  FourierField z = FourierField::constant(1e-20);
  CHECK(z.prune(1e-14).is_zero());
}

TEST_CASE("serial and OpenMP kernels agree exactly") {
  Rng rng(21);
  const FourierField a = rng.field(40);
  const FourierField b = rng.field(33);
  CHECK(kernels::serial::convolve(a.modes(), b.modes()) == kernels::omp::convolve(a.modes(), b.modes()));
  CHECK(kernels::serial::synthesize(a.modes(), 301) == kernels::omp::synthesize(a.modes(), 301));
  const auto v = a.sample(301);
  CHECK(kernels::serial::analyze(v, 70) == kernels::omp::analyze(v, 70));

  std::vector<FourierField> u, w;
  for (int i = 0; i < 9; ++i) u.push_back(rng.field(6));
  for (int i = 0; i < 7; ++i) w.push_back(rng.field(5));
  const auto ps = kernels::serial::laurent_product(u, w);
  const auto po = kernels::omp::laurent_product(u, w);
  REQUIRE(ps.size() == po.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(std::vector<Complex>(ps[i].modes().begin(), ps[i].modes().end()) ==
          std::vector<Complex>(po[i].modes().begin(), po[i].modes().end()));
  }
}
