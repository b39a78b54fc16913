#include "laxtower/random.hpp"

#include <vector>

namespace laxtower {

FourierField Rng::field(int band, double amp, bool zero_mean) {
  std::vector<Complex> m(band + 1);
  m[0] = zero_mean ? 0.0 : uniform(-amp, amp);
  for (int k = 1; k <= band; ++k) {
    const double s = amp / (1.0 + k);
    m[k] = Complex(uniform(-s, s), uniform(-s, s));
  }
  return FourierField::from_nonnegative_modes(m);
}

LaurentElement Rng::element(int lo, int hi, int band, double amp) {
  LaurentElement u;
  for (int d = lo; d <= hi; ++d) u.set(d, field(band, amp));
  return u;
}

}  // namespace laxtower
