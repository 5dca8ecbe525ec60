#pragma once

// CSV readers and writers. All output is comma-separated with a header row and
// LF line endings; lines starting with '#' are comments.

#include <iosfwd>
#include <map>
#include <string>

#include "mkews/ews.hpp"
#include "mkews/mann_kendall.hpp"
#include "mkews/sde.hpp"
#include "mkews/series.hpp"
#include "mkews/surrogate.hpp"

namespace mkews {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Reads an (index, value[, ...]) table. Comment lines are skipped, the first
/// remaining line is the header, and the value column is found by its name.
Series read_series_csv(std::istream& in);
Series read_series_csv(const std::string& path);

/// Writes "# key = value" comment lines (if any), then the (index, value) table.
void write_series_csv(std::ostream& out, const Series& series,
                      const std::map<std::string, std::string>& comments = {});

/// SimConfig rendered as comment metadata for trajectory exports.
std::map<std::string, std::string> describe(const SimConfig& config);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const SimConfig& config);

void write_indicator_csv(std::ostream& out, const IndicatorSeries<double>& indicator,
                         const std::map<std::string, std::string>& comments = {});

void write_null_distribution_csv(std::ostream& out, const NullDistribution& dist);

void write_outcome_csv(std::ostream& out, const MKOutcome& outcome);

void write_surrogate_csv(std::ostream& out, const SurrogateResult& result);
void write_surrogate_taus_csv(std::ostream& out, const SurrogateResult& result);

}  // namespace mkews
