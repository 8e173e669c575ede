#pragma once

#include <string>

namespace adequacy {

/// Value with its standard error in parentheses, the error rounded to two
/// significant digits (one if the second is zero) and the value to the same
/// decimal place: (0.00171, 0.00013) -> "1.71(13)×10⁻³", (0.238, 0.024) ->
/// "0.238(24)". Exponents between -2 and 2 are written out in full. A zero
/// error prints "<value> (exact)".
std::string estimate_format(double value, double std_error);

/// Unicode superscript digits and minus sign, e.g. -3 -> "⁻³".
std::string superscript(int exponent);

}  // namespace adequacy
