#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mkews/config.hpp"
#include "mkews/errors.hpp"
#include "mkews/experiment.hpp"
#include "mkews/parallel.hpp"

using namespace mkews;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.alpha_grid = {0.1, 0.5};
  spec.replicates = 40;
  spec.seed = 9;
  return spec;
}

std::string csv_of(const ResultTable& t) {
  std::ostringstream out;
  t.write_csv(out);
  return out.str();
}

}  // namespace

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (int workers : {1, 2, 5}) {
    std::vector<int> hits(1000, 0);
    parallel_for(1000, workers, [&](Index i) { ++hits[static_cast<std::size_t>(i)]; });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (int workers : {1, 4}) {
    try {
      parallel_for(200, workers, [](Index i) {
        if (i == 37 || i == 150) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "37");
    }
  }
}

TEST(Histogram, BinningAndClamping) {
  Histogram h;
  h.lo = -1.0;
  h.hi = 1.0;
  h.counts.assign(4, 0);
  EXPECT_EQ(h.bin_of(-1.0), 0);
  EXPECT_EQ(h.bin_of(-0.01), 1);
  EXPECT_EQ(h.bin_of(0.0), 2);
  EXPECT_EQ(h.bin_of(0.99), 3);
  EXPECT_EQ(h.bin_of(1.0), 3);
  EXPECT_EQ(h.bin_of(-1e300), 0);
  EXPECT_EQ(h.bin_of(1e300), 3);
}

TEST(ExperimentSpec, Validation) {
  auto spec = small_spec();
  EXPECT_NO_THROW(spec.validate());

  spec.alpha_grid = {0.05};
  spec.stride_grid = {Stride::points(5)};  // stride = q, no overlap: 20 windows
  EXPECT_NO_THROW(spec.validate());

  spec.alpha_grid = {0.5};
  spec.stride_grid = {Stride::points(50)};  // only 2 windows
  EXPECT_THROW(spec.validate(), ConfigError);

  spec = small_spec();
  spec.alpha_grid = {0.02};  // q = 2
  EXPECT_THROW(spec.validate(), ConfigError);

  spec = small_spec();
  spec.methods = {TestMethod::surrogate};
  spec.surrogate_count = 10;
  EXPECT_THROW(spec.validate(), ConfigError);

  spec = small_spec();
  spec.r = 0.5;
  EXPECT_THROW(run_type1(spec), NoStableBranch);

  spec = small_spec();
  spec.replicates = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(RunType1, TableShapeAndConsistency) {
  const auto spec = small_spec();
  const auto table = run_type1(spec);
  for (double a : spec.alpha_grid) {
    for (const char* m : {"original", "yue_wang", "hamed_rao"}) {
      const auto rate = table.value(a, "1", m, "rejection_rate");
      const auto se = table.value(a, "1", m, "binomial_se");
      const auto k = table.value(a, "1", m, "rejections");
      ASSERT_TRUE(rate && se && k);
      EXPECT_DOUBLE_EQ(*rate, *k / 40.0);
      EXPECT_NEAR(*se, std::sqrt(*rate * (1 - *rate) / 40.0), 1e-15);
    }
  }
  EXPECT_TRUE(table.value(std::nullopt, "NA", "iid_control_original", "rejection_rate"));
  for (const auto& row : table.rows) {
    EXPECT_EQ(row.replicates, 40);
    EXPECT_EQ(row.seed, 9u);
  }
}

TEST(RunType1, IndependentOfWorkerCount) {
  auto spec = small_spec();
  spec.methods = {TestMethod::original, TestMethod::hamed_rao, TestMethod::surrogate};
  spec.surrogate_count = 19;
  spec.replicates = 12;
  const std::string one = csv_of(run_type1(spec));
  spec.workers = 3;
  EXPECT_EQ(csv_of(run_type1(spec)), one);
  spec.seed = 10;
  EXPECT_NE(csv_of(run_type1(spec)), one);
}

TEST(RunType1, IidControlCalibrated) {
  auto spec = small_spec();
  spec.alpha_grid = {0.5};
  spec.methods = {TestMethod::original};
  spec.replicates = 3000;
  const double rate = *run_type1(spec).value(std::nullopt, "NA", "iid_control_original", "rejection_rate");
  EXPECT_NEAR(rate, 0.05, 3.0 * std::sqrt(0.05 * 0.95 / 3000));
}

TEST(ResultTable, CsvLayout) {
  ResultTable t;
  t.rows.push_back({0.5, "1", "hamed_rao", "rejection_rate", 0.25, 40, 9});
  t.rows.push_back({std::nullopt, "NA", "iid_control_original", "rejection_rate", 0.05, 40, 9});
  EXPECT_EQ(csv_of(t),
            "schema_version,alpha,stride,method,statistic,value,replicates,seed\n"
            "1,0.5,1,hamed_rao,rejection_rate,0.25,40,9\n"
            "1,NA,NA,iid_control_original,rejection_rate,0.05,40,9\n");
}

TEST(RunNullDistribution, SingleReplicateIsValid) {
  auto spec = small_spec();
  spec.replicates = 1;
  const auto tables = run_null_distribution(spec);
  for (const auto& h : tables.histograms) {
    EXPECT_EQ(h.total, 1);
    Index sum = 0;
    double mass = 0.0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      sum += h.counts[b];
      mass += h.density(b) * h.bin_width();
    }
    EXPECT_EQ(sum, 1);
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
  ASSERT_NE(tables.find(0.5, "normalized_tau"), nullptr);
  ASSERT_NE(tables.find(0.1, "z_hamed_rao"), nullptr);
  EXPECT_EQ(tables.find(0.3, "normalized_tau"), nullptr);
}

TEST(RunNullDistribution, DensitiesIntegrateToOne) {
  auto spec = small_spec();
  spec.replicates = 300;
  spec.workers = 2;
  const auto tables = run_null_distribution(spec);
  for (const auto& h : tables.histograms) {
    double mass = 0.0;
    Index sum = 0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      mass += h.density(b) * h.bin_width();
      sum += h.counts[b];
    }
    EXPECT_EQ(sum, 300);
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
}

TEST(StrideSweep, RowsPerStride) {
  auto spec = small_spec();
  spec.alpha_grid = {0.5};
  spec.stride_grid = {Stride::points(1), Stride::fraction(0.02), Stride::fraction(0.05)};
  spec.methods = {TestMethod::hamed_rao};
  const auto table = run_stride_sweep(spec);
  for (const char* s : {"1", "2%", "5%"}) EXPECT_TRUE(table.value(0.5, s, "hamed_rao", "rejection_rate")) << s;
  spec.stride_grid.clear();
  EXPECT_THROW(run_stride_sweep(spec), ConfigError);
}

TEST(Sensitivity, SweepValuesApply) {
  const auto base = small_spec();
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::noise_mode, "multiplicative").noise.mode,
            NoiseMode::multiplicative);
  EXPECT_DOUBLE_EQ(apply_sweep_value(base, SweepDimension::sigma, "0.2").noise.sigma, 0.2);
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::length, "500").length, 500);
  EXPECT_DOUBLE_EQ(apply_sweep_value(base, SweepDimension::distance, "4").r, -4.0);
  EXPECT_THROW(apply_sweep_value(base, SweepDimension::length, "12.5"), ConfigError);
  EXPECT_THROW(apply_sweep_value(base, SweepDimension::sigma, "abc"), ConfigError);
  EXPECT_EQ(parse_sweep_dimension("r"), SweepDimension::distance);
  EXPECT_THROW(parse_sweep_dimension("mu"), ConfigError);

  auto spec = base;
  spec.replicates = 10;
  const auto runs = run_sensitivity(spec, SweepDimension::sigma, {"0.05", "0.2"});
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[1].value, "0.2");
  EXPECT_DOUBLE_EQ(runs[1].spec.noise.sigma, 0.2);
}

TEST(Config, ParseResolveRoundTrip) {
  std::istringstream in(
      "# comment\n"
      "seed = 7\n"
      "replicates = 100\n"
      "; also a comment\n"
      "[type1]\n"
      "replicates = 5000\n"
      "alphas = 0.1, 0.5\n");
  const ConfigFile f = ConfigFile::parse(in);
  const Settings t = f.resolve("type1");
  EXPECT_EQ(t.at("seed"), "7");
  EXPECT_EQ(t.at("replicates"), "5000");
  EXPECT_EQ(t.at("alphas"), "0.1, 0.5");
  EXPECT_EQ(f.resolve("simulate").at("replicates"), "100");

  std::ostringstream out;
  write_config(out, "type1", t);
  std::istringstream back(out.str());
  EXPECT_EQ(ConfigFile::parse(back).resolve("type1"), t);

  std::istringstream bad("[type1\n");
  EXPECT_THROW(ConfigFile::parse(bad), ConfigError);
  std::istringstream no_equals("replicates 5\n");
  EXPECT_THROW(ConfigFile::parse(no_equals), ConfigError);
}
