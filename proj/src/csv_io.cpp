#include "mkews/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace mkews {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, std::size_t line_no) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw RangeError("series csv line " + std::to_string(line_no) + ": cannot parse '" + t + "'");
  }
  return v;
}

void write_comments(std::ostream& out, const std::map<std::string, std::string>& comments) {
  for (const auto& [key, value] : comments) out << "# " << key << " = " << value << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Series read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t value_col = 1;
  std::size_t width = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t);
    if (width == 0) {
      // header: the value column is found by name, otherwise the second column
      width = cells.size();
      if (width < 2) throw RangeError("series csv: header needs at least two columns");
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == "value") value_col = c;
      }
      continue;
    }
    if (cells.size() != width) {
      throw RangeError("series csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " columns");
    }
    const double v = parse_number(cells[value_col], line_no);
    if (!std::isfinite(v)) {
      throw RangeError("series csv line " + std::to_string(line_no) + ": non-finite value");
    }
    values.push_back(v);
  }
  if (width == 0) throw RangeError("series csv: missing header");
  Series s;
  s.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  return s;
}

Series read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open series file '" + path + "'");
  Series s = read_series_csv(in);
  s.label = path;
  return s;
}

void write_series_csv(std::ostream& out, const Series& series,
                      const std::map<std::string, std::string>& comments) {
  write_comments(out, comments);
  out << "index,value,schema_version\n";
  for (Index i = 0; i < series.size(); ++i) {
    out << (i + 1) << ',' << format_double(series.values(i)) << ',' << kSchemaVersion << '\n';
  }
}

std::map<std::string, std::string> describe(const SimConfig& c) {
  std::map<std::string, std::string> m;
  m["form"] = std::string(to_string(c.form.kind));
  m["mu"] = format_double(c.form.mu);
  m["noise"] = std::string(to_string(c.noise.mode));
  m["sigma"] = format_double(c.noise.sigma);
  m["r"] = format_double(c.r);
  m["x0"] = c.x0 ? format_double(*c.x0) : "equilibrium";
  m["h"] = format_double(c.h);
  m["burn_in"] = format_double(c.burn_in);
  m["sample_dt"] = format_double(c.sample_dt);
  m["n_samples"] = std::to_string(c.n_samples);
  m["escape_radius"] = c.escape_radius ? format_double(*c.escape_radius) : "auto";
  m["seed"] = std::to_string(c.seed);
  return m;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t, const SimConfig& config) {
  auto comments = describe(config);
  comments["escapes_discarded"] = std::to_string(t.escapes_discarded);
  comments["seed_used"] = std::to_string(t.seed_used);
  write_series_csv(out, t.series, comments);
}

void write_indicator_csv(std::ostream& out, const IndicatorSeries<double>& s,
                         const std::map<std::string, std::string>& comments) {
  auto all = comments;
  all["indicator"] = std::string(to_string(s.indicator));
  all["alpha"] = format_double(s.config.alpha);
  all["stride"] = s.config.stride.to_string();
  all["window_size"] = std::to_string(s.window_size);
  all["stride_points"] = std::to_string(s.stride_points);
  write_comments(out, all);
  out << "window_start_index,value,schema_version\n";
  for (Index w = 0; w < s.size(); ++w) {
    out << s.starts(w) << ',' << format_double(s.values(w)) << ',' << kSchemaVersion << '\n';
  }
}

void write_null_distribution_csv(std::ostream& out, const NullDistribution& dist) {
  out << "# n = " << dist.n << '\n';
  out << "s,probability,schema_version\n";
  for (std::size_t k = 0; k < dist.support.size(); ++k) {
    out << dist.support[k] << ',' << format_double(dist.probabilities[k]) << ',' << kSchemaVersion << '\n';
  }
}

void write_outcome_csv(std::ostream& out, const MKOutcome& o) {
  out << "schema_version,n,s,tau,var_s,ess_ratio,z,p,trend,method,ess_clamped\n";
  out << kSchemaVersion << ',' << o.n << ',' << o.s << ',' << format_double(o.tau) << ','
      << format_double(o.var_s) << ',' << format_double(o.ess_ratio) << ','
      << format_double(o.z) << ',' << format_double(o.p) << ',' << to_string(o.trend) << ','
      << to_string(o.method) << ',' << (o.ess_clamped ? "true" : "false") << '\n';
}

void write_surrogate_csv(std::ostream& out, const SurrogateResult& r) {
  out << "schema_version,observed_tau,p,n_surrogates\n";
  out << kSchemaVersion << ',' << format_double(r.observed_tau) << ',' << format_double(r.p)
      << ',' << r.n_surrogates << '\n';
}

void write_surrogate_taus_csv(std::ostream& out, const SurrogateResult& r) {
  out << "surrogate_index,tau,schema_version\n";
  for (std::size_t k = 0; k < r.surrogate_taus.size(); ++k) {
    out << k << ',' << format_double(r.surrogate_taus[k]) << ',' << kSchemaVersion << '\n';
  }
}

}  // namespace mkews
