#pragma once

#include <functional>

#include "laxtower/laurent.hpp"

namespace laxtower {

using ScalarMap = std::function<double(const LaurentElement&)>;
using FieldMap = std::function<LaurentElement(const LaurentElement&)>;

/// d/dt f(L + tW) at t = 0: centered differences along the unit direction
/// W/‖W‖ with steps h and h/2, combined by one Richardson extrapolation.
double directional_derivative(const ScalarMap& f, const LaurentElement& L,
                              const LaurentElement& W, double h);
LaurentElement directional_derivative(const FieldMap& f, const LaurentElement& L,
                                      const LaurentElement& W, double h);
/// Same with `levels` steps h, h/2, … and repeated Richardson extrapolation;
/// exact up to round-off when f is polynomial of degree < 2·levels along the
/// line, so h can be of order one.
LaurentElement directional_derivative(const FieldMap& f, const LaurentElement& L,
                                      const LaurentElement& W, double h, int levels);

}  // namespace laxtower
