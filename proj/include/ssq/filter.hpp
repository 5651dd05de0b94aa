#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssq/grid.hpp"
#include "ssq/propagator.hpp"
#include "ssq/soliton.hpp"

namespace ssq {

struct TablePoint {
  double omega;
  Complex transfer;

  friend bool operator==(const TablePoint&, const TablePoint&) = default;
};

struct IdentityFilter {
  friend bool operator==(const IdentityFilter&, const IdentityFilter&) = default;
};
struct ParabolicFilter {
  double eta;
  friend bool operator==(const ParabolicFilter&, const ParabolicFilter&) = default;
};
struct CustomFilter {
  std::vector<TablePoint> table;
  friend bool operator==(const CustomFilter&, const CustomFilter&) = default;
};

using FilterDescriptor = std::variant<IdentityFilter, ParabolicFilter, CustomFilter>;

/// Sampled transfer function H(w) on the grid's frequency axis (FFT order).
/// Construction enforces realizability 0 <= |H| <= 1.
class SpectralFilter {
 public:
  SpectralFilter(SampledGrid grid, ComplexVector transfer, FilterDescriptor descriptor);

  const SampledGrid& grid() const noexcept { return grid_; }
  const ComplexVector& transfer() const noexcept { return transfer_; }
  const FilterDescriptor& descriptor() const noexcept { return descriptor_; }

  RealVector magnitude() const { return transfer_.cwiseAbs(); }
  /// h(w) = H(w) - 1
  ComplexVector deviation() const;
  /// Samples where H(w) != 0.
  std::vector<bool> passband() const;

 private:
  SampledGrid grid_;
  ComplexVector transfer_;
  FilterDescriptor descriptor_;
};

SpectralFilter identity_filter(const SampledGrid& grid);

/// H(w) = 1 - w^2/eta^2 for |w| <= eta, 0 outside.
SpectralFilter parabolic_filter(const SampledGrid& grid, double eta);

/// Linear interpolation of a (w, H) table onto the grid; zero outside the table range.
SpectralFilter custom_filter(const SampledGrid& grid, std::vector<TablePoint> table);

/// Product H_a(w) H_b(w).
SpectralFilter compose(const SpectralFilter& a, const SpectralFilter& b);

/// Reads a CSV of (omega, Re H, Im H) rows; '#' lines and a non-numeric header are skipped.
std::vector<TablePoint> read_filter_table(const std::string& path);

/// Mean-field energy loss 1 - int |H|^2 |f0|^2 / int |f0|^2 of the unperturbed soliton.
double filter_energy_loss(const SpectralFilter& filter, const MeanField& mean_field);

/// Bisection for the parabolic bandwidth giving `target_loss`; throws when no
/// eta below the Nyquist frequency brackets the target.
double calibrate_bandwidth(const SampledGrid& grid, double target_loss);

/// (1/2pi) int |H|^2 |f0(w) + mean(w)|^2 dw: photons of the classical field after the filter.
double output_photon_number(const SpectralFilter& filter, const MeanField& mean_field, const ComplexField& mean);

struct FilterOutput {
  FluctuationState state;
  double output_photon_number;
};

/// Passes the fluctuation state through the filter. The mean is multiplied by H,
/// the normally ordered moments are congruence-transformed by |H| on each index,
/// and the vacuum admixed by the loss contributes nothing to them.
FilterOutput apply_filter(const SpectralFilter& filter, const FluctuationState& state, const MeanField& mean_field);

/// Configuration-level description of a filter, resolved against a grid by realize().
struct FilterSpec {
  enum class Kind { identity, parabolic, custom };

  Kind kind = Kind::identity;
  std::optional<double> loss;   // parabolic: calibrate to this mean-field loss
  std::optional<double> eta;    // parabolic: explicit bandwidth
  std::string table_path;       // custom: CSV path as written in the config
  std::vector<TablePoint> table;

  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

SpectralFilter realize(const FilterSpec& spec, const SampledGrid& grid);

}  // namespace ssq
