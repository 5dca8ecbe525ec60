#include "mkews/ews.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mkews {

namespace {

Index round_half_up(double v) { return static_cast<Index>(std::floor(v + 0.5)); }

}  // namespace

Index Stride::resolve(Index series_length) const {
  if (kind == Kind::points) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw RangeError("stride: point stride must be a positive integer");
    }
    return static_cast<Index>(value);
  }
  if (!(value > 0.0 && value <= 1.0)) throw RangeError("stride: fraction must lie in (0, 1]");
  return std::max<Index>(1, round_half_up(value * static_cast<double>(series_length)));
}

Stride Stride::parse(std::string_view text) {
  const std::string s(text);
  try {
    std::size_t used = 0;
    if (!s.empty() && s.back() == '%') {
      const double pct = std::stod(s.substr(0, s.size() - 1), &used);
      if (used != s.size() - 1 || !(pct > 0.0 && pct <= 100.0)) throw std::invalid_argument("");
      return fraction(pct / 100.0);
    }
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    if (v >= 1.0 && v == std::floor(v) && s.find('.') == std::string::npos) {
      return points(static_cast<Index>(v));
    }
    if (v > 0.0 && v < 1.0) return fraction(v);
  } catch (const std::logic_error&) {
  }
  throw ConfigError("bad stride '" + s + "' (use an integer point count, a fraction in (0,1), or a percentage)");
}

std::string Stride::to_string() const {
  char buf[32];
  if (kind == Kind::points) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(value));
  } else {
    std::snprintf(buf, sizeof buf, "%g%%", value * 100.0);
  }
  return buf;
}

Index WindowConfig::window_size(Index series_length) const {
  return round_half_up(alpha * static_cast<double>(series_length));
}

std::string_view to_string(Indicator i) {
  return i == Indicator::variance ? "variance" : "lag1_ac";
}

Indicator parse_indicator(std::string_view name) {
  if (name == "variance") return Indicator::variance;
  if (name == "lag1_ac") return Indicator::lag1_ac;
  throw ConfigError("unknown indicator '" + std::string(name) + "'");
}

std::string Detrend::to_string() const {
  if (kind == Kind::none) return "none";
  char buf[48];
  std::snprintf(buf, sizeof buf, "gaussian(%g)", bandwidth);
  return buf;
}

}  // namespace mkews
