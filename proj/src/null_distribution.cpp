#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "mkews/mann_kendall.hpp"

namespace mkews {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::original: return "original";
    case Method::yue_wang: return "yue_wang";
    case Method::hamed_rao: return "hamed_rao";
  }
  return "unknown";
}

std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    case Trend::no_trend: return "no_trend";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "original") return Method::original;
  if (name == "yue_wang") return Method::yue_wang;
  if (name == "hamed_rao") return Method::hamed_rao;
  throw ConfigError("unknown test method '" + std::string(name) + "'");
}

std::string LagPolicy::to_string() const {
  if (mode == Mode::fixed) return std::to_string(max_lag);
  char buf[32];
  std::snprintf(buf, sizeof buf, "significant:%g", level);
  return buf;
}

LagPolicy LagPolicy::parse(std::string_view text) {
  constexpr std::string_view tag = "significant";
  if (text.substr(0, tag.size()) == tag) {
    if (text.size() == tag.size()) return significant(0.05);
    if (text[tag.size()] != ':') throw ConfigError("bad lag policy '" + std::string(text) + "'");
    const std::string level(text.substr(tag.size() + 1));
    try {
      std::size_t used = 0;
      const double value = std::stod(level, &used);
      if (used != level.size() || !(value > 0.0 && value < 1.0)) throw std::invalid_argument("");
      return significant(value);
    } catch (const std::logic_error&) {
      throw ConfigError("bad significance level in lag policy '" + std::string(text) + "'");
    }
  }
  Index lag = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), lag);
  if (ec != std::errc() || ptr != text.data() + text.size() || lag < 1) {
    throw ConfigError("bad lag policy '" + std::string(text) + "'");
  }
  return fixed(lag);
}

double NullDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    m += probabilities[k] * static_cast<double>(support[k]);
  }
  return m;
}

double NullDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double d = static_cast<double>(support[k]) - m;
    v += probabilities[k] * d * d;
  }
  return v;
}

std::vector<std::uint64_t> inversion_counts(Index n) {
  if (n < 1 || n > 20) throw RangeError("inversion_counts: n must lie in [1, 20]");
  // Inserting element m into a permutation of m-1 elements adds 0..m-1 inversions.
  std::vector<std::uint64_t> counts{1};
  for (Index m = 2; m <= n; ++m) {
    std::vector<std::uint64_t> next(counts.size() + static_cast<std::size_t>(m - 1), 0);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      for (Index add = 0; add < m; ++add) next[k + static_cast<std::size_t>(add)] += counts[k];
    }
    counts = std::move(next);
  }
  return counts;
}

NullDistribution exact_null_distribution(Index n) {
  if (n < 2 || n > 60) throw RangeError("exact_null_distribution: n must lie in [2, 60]");
  const auto max_inv = static_cast<std::int64_t>(n * (n - 1) / 2);

  // probability of k inversions, index k
  std::vector<double> by_inversions;
  if (n <= 20) {
    const auto counts = inversion_counts(n);
    double factorial = 1.0;
    for (Index m = 2; m <= n; ++m) factorial *= static_cast<double>(m);
    for (auto c : counts) by_inversions.push_back(static_cast<double>(c) / factorial);
  } else {
    // Same recursion in probability space.
    by_inversions = {1.0};
    for (Index m = 2; m <= n; ++m) {
      const auto width = static_cast<std::size_t>(m);
      std::vector<double> next(by_inversions.size() + width - 1, 0.0);
      for (std::size_t k = 0; k < by_inversions.size(); ++k) {
        const double share = by_inversions[k] / static_cast<double>(m);
        for (std::size_t add = 0; add < width; ++add) next[k + add] += share;
      }
      by_inversions = std::move(next);
    }
  }

  // S = C(n,2) - 2k; emit ascending in S.
  NullDistribution dist;
  dist.n = n;
  for (std::int64_t k = max_inv; k >= 0; --k) {
    dist.support.push_back(max_inv - 2 * k);
    dist.probabilities.push_back(by_inversions[static_cast<std::size_t>(k)]);
  }
  return dist;
}

}  // namespace mkews
