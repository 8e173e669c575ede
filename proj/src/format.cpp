#include "adequacy/format.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace adequacy {

std::string superscript(int exponent) {
  static const char* const digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string out = exponent < 0 ? "⁻" : "";
  const std::string s = std::to_string(std::abs(exponent));
  for (char c : s) out += digits[c - '0'];
  return out;
}

std::string estimate_format(double value, double se) {
  if (!(se >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("estimate_format: invalid input");
  if (se == 0.0) {
    std::string v = fmt::format("{}", value);
    if (v.find_first_of(".e") == std::string::npos) v += ".0";
    return v + " (exact)";
  }

  int e = static_cast<int>(std::floor(std::log10(std::max(std::abs(value), se))));
  int decimals = 0;          // decimal places of the mantissa
  std::int64_t se_digits = 0;
  double mantissa = 0.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const double scale = std::pow(10.0, e);
    mantissa = value / scale;
    const double s = se / scale;
    decimals = 1 - static_cast<int>(std::floor(std::log10(s)));
    se_digits = std::llround(s * std::pow(10.0, decimals));
    if (se_digits >= 100) {
      se_digits /= 10;
      --decimals;
    }
    if (se_digits % 10 == 0 && decimals > 0) {
      se_digits /= 10;
      --decimals;
    }
    const double rounded = std::round(std::abs(mantissa) * std::pow(10.0, decimals)) / std::pow(10.0, decimals);
    if (rounded < 10.0) break;
    ++e;  // mantissa rounded up to 10: redo one decade higher
  }

  if (e >= -2 && e <= 2) {
    const int places = decimals - e;
    if (places >= 0) return fmt::format("{:.{}f}({})", value, places, se_digits);
    // error wider than the units digit: print integers, error in value units
    const double unit = std::pow(10.0, -places);
    const double v = std::round(value / unit) * unit;
    return fmt::format("{:.0f}({})", v, se_digits * static_cast<std::int64_t>(std::llround(unit)));
  }
  return fmt::format("{:.{}f}({})×10{}", mantissa, decimals, se_digits, superscript(e));
}

}  // namespace adequacy
