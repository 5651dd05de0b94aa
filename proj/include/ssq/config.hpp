#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssq/cascade.hpp"
#include "ssq/propagator.hpp"

namespace ssq {

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  friend bool operator==(const SweepRange&, const SweepRange&) = default;
};

/// Lengths (soliton periods) substituted into stages[stage_index]. Either an
/// explicit list or an inclusive range.
struct SweepSpec {
  std::size_t stage_index = 0;
  std::vector<double> lengths;
  std::optional<SweepRange> range;

  std::vector<double> points() const;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

enum class OutputFormat { csv, json };

std::string_view to_string(OutputFormat format);
OutputFormat output_format_from_string(std::string_view name);

struct OutputSpec {
  std::string path;
  OutputFormat format = OutputFormat::csv;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ValidateSpec {
  double backend_periods = 3.0;  // length at which the two propagator backends are compared

  friend bool operator==(const ValidateSpec&, const ValidateSpec&) = default;
};

struct ExperimentConfig {
  StageChain chain;
  PropagatorOptions propagator;
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  ValidateSpec validate;
  bool cross_check = false;

  SampledGrid grid() const { return make_grid(chain.n_points, chain.window); }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses TOML. Relative filter-table paths resolve against base_dir; tables are
/// loaded here, so a table with |H| > 1 fails at load with InvariantError.
ExperimentConfig parse_config(std::string_view text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// TOML text that parses back to an equal config (given the same base_dir).
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a of the serialized config without its [output] section, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace ssq
