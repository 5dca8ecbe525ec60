#include "mkews/experiment.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "mkews/csv_io.hpp"
#include "mkews/parallel.hpp"
#include "mkews/seed.hpp"
#include "mkews/surrogate.hpp"

namespace mkews {

std::string_view to_string(TestMethod m) {
  switch (m) {
    case TestMethod::original: return "original";
    case TestMethod::yue_wang: return "yue_wang";
    case TestMethod::hamed_rao: return "hamed_rao";
    case TestMethod::surrogate: return "surrogate";
  }
  return "unknown";
}

TestMethod parse_test_method(std::string_view name) {
  if (name == "surrogate") return TestMethod::surrogate;
  switch (parse_method(name)) {
    case Method::original: return TestMethod::original;
    case Method::yue_wang: return TestMethod::yue_wang;
    case Method::hamed_rao: return TestMethod::hamed_rao;
  }
  return TestMethod::original;
}

std::string_view to_string(SweepDimension d) {
  switch (d) {
    case SweepDimension::noise_mode: return "noise";
    case SweepDimension::sigma: return "sigma";
    case SweepDimension::length: return "n";
    case SweepDimension::distance: return "r";
  }
  return "unknown";
}

SweepDimension parse_sweep_dimension(std::string_view name) {
  if (name == "noise") return SweepDimension::noise_mode;
  if (name == "sigma") return SweepDimension::sigma;
  if (name == "n") return SweepDimension::length;
  if (name == "r") return SweepDimension::distance;
  throw ConfigError("unknown sweep dimension '" + std::string(name) + "' (noise, sigma, n, r)");
}

namespace {

// Stream tags below the replicate seed.
constexpr std::uint64_t kIidStream = 0x11dULL;
constexpr std::uint64_t kSurrogateStream = 0x5a22ULL;

// Smallest indicator length every MK variant accepts.
constexpr Index kMinIndicatorLength = 4;

Method as_mk_method(TestMethod m) {
  switch (m) {
    case TestMethod::yue_wang: return Method::yue_wang;
    case TestMethod::hamed_rao: return Method::hamed_rao;
    default: return Method::original;
  }
}

struct Cell {
  double alpha;
  Stride stride;
};

std::vector<Cell> cells_of(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (double a : spec.alpha_grid) {
    for (const auto& s : spec.stride_grid) cells.push_back({a, s});
  }
  return cells;
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

double binomial_se(double rate, Index n) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

}  // namespace

void ExperimentSpec::validate() const {
  sim_config(seed).validate();
  if (length < 4) throw ConfigError("series length N must be at least 4");
  if (alpha_grid.empty()) throw ConfigError("alpha grid must not be empty");
  if (stride_grid.empty()) throw ConfigError("stride grid must not be empty");
  if (methods.empty()) throw ConfigError("at least one test method is required");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (detrend.kind == Detrend::Kind::gaussian && !(detrend.bandwidth > 0.0 && detrend.bandwidth < 1.0)) {
    throw ConfigError("gaussian detrending bandwidth must lie in (0, 1)");
  }
  if (bins < 1 || !(hist_max > hist_min)) throw ConfigError("histogram range or bin count invalid");
  for (const auto& cell : cells_of(*this)) {
    if (!(cell.alpha > 0.0 && cell.alpha <= 1.0)) throw ConfigError("alpha values must lie in (0, 1]");
    WindowConfig wc{cell.alpha, cell.stride};
    Index q = 0, stride = 0, count = 0;
    try {
      q = wc.window_size(length);
      stride = cell.stride.resolve(length);
      count = q >= 1 && q <= length ? window_count(length, q, stride) : 0;
    } catch (const RangeError& e) {
      throw ConfigError(e.what());
    }
    if (q < 3 || q > length) {
      throw ConfigError("alpha = " + format_double(cell.alpha) + " gives window size " +
                        std::to_string(q) + " outside [3, N]");
    }
    if (count < kMinIndicatorLength) {
      throw ConfigError("alpha = " + format_double(cell.alpha) + ", stride " + cell.stride.to_string() +
                        " leave " + std::to_string(count) + " windows; the tests need at least " +
                        std::to_string(kMinIndicatorLength));
    }
    for (auto m : methods) {
      const LagPolicy* policy = m == TestMethod::yue_wang    ? &yue_wang_lags
                                : m == TestMethod::hamed_rao ? &hamed_rao_lags
                                                             : nullptr;
      if (policy && policy->mode == LagPolicy::Mode::fixed && policy->max_lag >= count) {
        throw ConfigError("lag cap " + std::to_string(policy->max_lag) + " for " +
                          std::string(to_string(m)) + " needs more than " + std::to_string(count) +
                          " windows");
      }
    }
  }
  for (auto m : methods) {
    if (m == TestMethod::surrogate && surrogate_count < kMinSurrogates) {
      throw ConfigError("surrogate count must be at least " + std::to_string(kMinSurrogates));
    }
  }
}

SimConfig ExperimentSpec::sim_config(std::uint64_t replicate_seed) const {
  SimConfig c;
  c.form = form;
  c.noise = noise;
  c.r = r;
  c.h = h;
  c.burn_in = burn_in;
  c.sample_dt = sample_dt;
  c.n_samples = length;
  c.escape_radius = escape_radius;
  c.seed = replicate_seed;
  return c;
}

EwsPipeline ExperimentSpec::pipeline(double alpha, const Stride& stride) const {
  return EwsPipeline{detrend, indicator, WindowConfig{alpha, stride}};
}

std::optional<double> ResultTable::value(std::optional<double> alpha, std::string_view stride,
                                         std::string_view method,
                                         std::string_view statistic) const {
  for (const auto& row : rows) {
    if (row.alpha.has_value() != alpha.has_value()) continue;
    if (alpha && std::abs(*row.alpha - *alpha) > 1e-12) continue;
    if (row.stride == stride && row.method == method && row.statistic == statistic) return row.value;
  }
  return std::nullopt;
}

void ResultTable::write_csv(std::ostream& out) const {
  out << "schema_version,alpha,stride,method,statistic,value,replicates,seed\n";
  for (const auto& row : rows) {
    out << schema_version << ',' << optional_number(row.alpha) << ',' << row.stride << ','
        << row.method << ',' << row.statistic << ',' << format_double(row.value) << ','
        << row.replicates << ',' << row.seed << '\n';
  }
}

double Histogram::density(std::size_t bin) const {
  if (total == 0) return 0.0;
  return static_cast<double>(counts[bin]) / (static_cast<double>(total) * bin_width());
}

Index Histogram::bin_of(double v) const {
  const auto nbins = static_cast<Index>(counts.size());
  const double bin = std::floor((v - lo) / bin_width());
  return static_cast<Index>(std::clamp(bin, 0.0, static_cast<double>(nbins - 1)));
}

const Histogram* NullDistributionTables::find(double alpha, std::string_view statistic) const {
  for (const auto& h : histograms) {
    if (h.alpha && std::abs(*h.alpha - alpha) < 1e-12 && h.statistic == statistic) return &h;
  }
  return nullptr;
}

void NullDistributionTables::write_csv(std::ostream& out) const {
  out << "schema_version,alpha,stride,statistic,bin_lo,bin_hi,count,density,clamped,replicates,seed\n";
  for (const auto& h : histograms) {
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double lo = h.lo + h.bin_width() * static_cast<double>(b);
      const double hi = b + 1 == h.counts.size() ? h.hi : lo + h.bin_width();
      out << schema_version << ',' << optional_number(h.alpha) << ',' << h.stride << ','
          << h.statistic << ',' << format_double(lo) << ',' << format_double(hi) << ','
          << h.counts[b] << ',' << format_double(h.density(b)) << ',' << h.clamped << ','
          << replicates << ',' << seed << '\n';
    }
  }
}

NullDistributionTables run_null_distribution(const ExperimentSpec& spec) {
  spec.validate();
  const auto cells = cells_of(spec);
  std::vector<TestMethod> z_methods;
  for (auto m : spec.methods) {
    if (m != TestMethod::surrogate) z_methods.push_back(m);
  }
  const std::size_t stats_per_cell = 1 + z_methods.size();
  const std::size_t width = cells.size() * stats_per_cell;
  std::vector<double> samples(static_cast<std::size_t>(spec.replicates) * width);

  parallel_for(spec.replicates, spec.workers, [&](Index rep) {
    const auto rep_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(rep));
    const Trajectory traj = simulate(spec.sim_config(rep_seed));
    double* slot = samples.data() + static_cast<std::size_t>(rep) * width;
    for (const auto& cell : cells) {
      const auto ews = compute_ews(traj.series.values, spec.pipeline(cell.alpha, cell.stride));
      *slot++ = normalized_tau(ews.values);
      for (auto m : z_methods) {
        const LagPolicy policy = m == TestMethod::hamed_rao ? spec.hamed_rao_lags : spec.yue_wang_lags;
        *slot++ = mk_test(ews.values, as_mk_method(m), policy, spec.level).z;
      }
    }
  });

  NullDistributionTables out;
  out.replicates = spec.replicates;
  out.seed = spec.seed;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < stats_per_cell; ++k) {
      Histogram h;
      h.alpha = cells[c].alpha;
      h.stride = cells[c].stride.to_string();
      h.statistic = k == 0 ? "normalized_tau" : "z_" + std::string(to_string(z_methods[k - 1]));
      h.lo = spec.hist_min;
      h.hi = spec.hist_max;
      h.counts.assign(static_cast<std::size_t>(spec.bins), 0);
      for (Index rep = 0; rep < spec.replicates; ++rep) {
        const double v = samples[static_cast<std::size_t>(rep) * width + c * stats_per_cell + k];
        if (v < h.lo || v > h.hi) ++h.clamped;
        ++h.counts[static_cast<std::size_t>(h.bin_of(v))];
        ++h.total;
      }
      out.histograms.push_back(std::move(h));
    }
  }
  return out;
}

ResultTable run_type1(const ExperimentSpec& spec) {
  spec.validate();
  const auto cells = cells_of(spec);
  const std::size_t width = cells.size() * spec.methods.size();
  // per replicate: one reject flag per (cell, method), then the i.i.d. control flag
  std::vector<unsigned char> rejects(static_cast<std::size_t>(spec.replicates) * (width + 1), 0);
  std::vector<Index> escapes(static_cast<std::size_t>(spec.replicates), 0);

  parallel_for(spec.replicates, spec.workers, [&](Index rep) {
    const auto rep_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(rep));
    const Trajectory traj = simulate(spec.sim_config(rep_seed));
    escapes[static_cast<std::size_t>(rep)] = traj.escapes_discarded;
    unsigned char* slot = rejects.data() + static_cast<std::size_t>(rep) * (width + 1);

    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto pipeline = spec.pipeline(cells[c].alpha, cells[c].stride);
      const auto ews = compute_ews(traj.series.values, pipeline);
      for (std::size_t k = 0; k < spec.methods.size(); ++k) {
        const TestMethod m = spec.methods[k];
        double p = 1.0;
        if (m == TestMethod::surrogate) {
          const auto stream = mix_seed(rep_seed, kSurrogateStream + c);
          p = surrogate_test(traj.series.values, pipeline, spec.surrogate_count, stream).p;
        } else {
          const LagPolicy policy = m == TestMethod::hamed_rao ? spec.hamed_rao_lags : spec.yue_wang_lags;
          p = mk_test(ews.values, as_mk_method(m), policy, spec.level).p;
        }
        *slot++ = p < spec.level;
      }
    }

    std::mt19937_64 engine(mix_seed(rep_seed, kIidStream));
    std::normal_distribution<double> normal;
    Eigen::VectorXd white(spec.length);
    for (Index i = 0; i < spec.length; ++i) white(i) = normal(engine);
    *slot = mk_test(white, Method::original, LagPolicy::fixed(1), spec.level).p < spec.level;
  });

  ResultTable table;
  auto emit = [&](std::optional<double> alpha, std::string stride, std::string method, Index hits) {
    const double rate = static_cast<double>(hits) / static_cast<double>(spec.replicates);
    for (auto [name, v] : {std::pair<const char*, double>{"rejection_rate", rate},
                           {"binomial_se", binomial_se(rate, spec.replicates)},
                           {"rejections", static_cast<double>(hits)}}) {
      table.rows.push_back({alpha, stride, method, name, v, spec.replicates, spec.seed});
    }
  };

  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < spec.methods.size(); ++k) {
      Index hits = 0;
      for (Index rep = 0; rep < spec.replicates; ++rep) {
        hits += rejects[static_cast<std::size_t>(rep) * (width + 1) + c * spec.methods.size() + k];
      }
      emit(cells[c].alpha, cells[c].stride.to_string(), std::string(to_string(spec.methods[k])), hits);
    }
  }
  Index iid_hits = 0;
  Index escape_total = 0;
  for (Index rep = 0; rep < spec.replicates; ++rep) {
    iid_hits += rejects[static_cast<std::size_t>(rep) * (width + 1) + width];
    escape_total += escapes[static_cast<std::size_t>(rep)];
  }
  emit(std::nullopt, "NA", "iid_control_original", iid_hits);
  table.rows.push_back({std::nullopt, "NA", "simulation", "escapes_discarded",
                        static_cast<double>(escape_total), spec.replicates, spec.seed});
  return table;
}

ResultTable run_stride_sweep(const ExperimentSpec& spec) {
  if (spec.stride_grid.empty()) throw ConfigError("stride sweep needs a non-empty stride grid");
  return run_type1(spec);
}

ExperimentSpec apply_sweep_value(const ExperimentSpec& base, SweepDimension dimension,
                                 const std::string& value) {
  ExperimentSpec spec = base;
  auto number = [&]() {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("bad sweep value '" + value + "'");
    }
  };
  switch (dimension) {
    case SweepDimension::noise_mode: spec.noise.mode = parse_noise_mode(value); break;
    case SweepDimension::sigma: spec.noise.sigma = number(); break;
    case SweepDimension::length: {
      const double n = number();
      if (n != std::floor(n) || n < 4) throw ConfigError("swept N must be an integer >= 4");
      spec.length = static_cast<Index>(n);
      break;
    }
    case SweepDimension::distance: spec.r = -std::abs(number()); break;
  }
  return spec;
}

std::vector<SensitivityRun> run_sensitivity(const ExperimentSpec& base, SweepDimension dimension,
                                            const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("sensitivity sweep needs at least one value");
  std::vector<SensitivityRun> runs;
  for (const auto& v : values) runs.push_back({dimension, v, apply_sweep_value(base, dimension, v), {}});
  for (auto& run : runs) run.spec.validate();
  for (auto& run : runs) run.table = run_type1(run.spec);
  return runs;
}

}  // namespace mkews
