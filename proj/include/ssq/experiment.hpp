#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ssq/config.hpp"

namespace ssq {

struct SweepRow {
  double length_soliton_periods;
  double s;
  double db;
  std::optional<double> cross_check_s;
};

struct SweepResult {
  std::size_t stage_index = 0;
  std::string config_hash;
  std::vector<std::string> notes;  // calibrated bandwidths, extracted r, warnings
  std::vector<SweepRow> rows;
};

/// Runs the sweep point by point on `jobs` workers. Solution operators are built
/// up front in a fixed order, so the output does not depend on `jobs`.
SweepResult run_sweep(const ExperimentConfig& config, unsigned jobs = 1);

std::string format_csv(const SweepResult& result);
std::string format_json(const SweepResult& result);
std::string format_sweep(const SweepResult& result, OutputFormat format);

struct CheckResult {
  std::string name;
  bool passed;
  double value;
  double threshold;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string format() const;
};

/// Cross-module invariant suite on the configured grid, stages and propagator.
ValidationReport run_validate(const ExperimentConfig& config);

/// CSV of tau and the real/imaginary parts of the four discrete modes and their adjoints.
std::string dump_modes(const ExperimentConfig& config);

/// Writes `content` to `path`, throwing IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ssq
