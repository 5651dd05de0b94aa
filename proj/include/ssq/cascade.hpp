#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ssq/filter.hpp"
#include "ssq/measurement.hpp"
#include "ssq/propagator.hpp"
#include "ssq/soliton.hpp"

namespace ssq {

/// One fiber-and-filter stage.
struct StageSpec {
  double length_soliton_periods = 0.0;
  FilterSpec filter;

  friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

/// Ordered stages sharing one grid.
struct StageChain {
  std::size_t n_points = 512;
  double window = 20.0;
  std::vector<StageSpec> stages;

  friend bool operator==(const StageChain&, const StageChain&) = default;
};

/// Input of a later stage: white squeezing with parameter r and the mean
/// perturbation delta_a0 (frequency domain) left behind by the earlier filters.
struct SqueezedInputModel {
  double r;
  ComplexField delta_a0;

  static SqueezedInputModel coherent(const SampledGrid& grid);
};

/// r = -ln(S)/2 for 0 < S <= 1.
double extract_r(double s);

inline constexpr double kWeaknessLimit = 0.5;
inline constexpr double kWeaknessWarning = 0.2;

/// Spectrally weighted RMS of h = H - 1 over the passband,
/// sqrt(int_band |h|^2 |f0|^2 / int_band |f0|^2).
double filter_weakness(const SpectralFilter& filter, const MeanField& mean_field);

/// delta_a0(w) = h(w) f0(w) on the passband and zero outside it. Throws
/// InvariantError when filter_weakness exceeds kWeaknessLimit.
ComplexField first_stage_mean_perturbation(const SpectralFilter& filter, const MeanField& mean_field);

/// C_DSS = e^{-2r} G_SSS - 4 Re(delta_a0) Re(delta_a0)^T in the time domain, returned
/// normally ordered in the domain of `g_sss`. `g_sss` may be given with or without
/// its vacuum term; the rank-one term uses the time-domain delta_a0.
CovarianceKernel dss_covariance(const CovarianceKernel& g_sss, double r, const ComplexField& delta_a0);

struct SssResult {
  double s;
  double output_photons;
  FluctuationState filtered_state;
};

struct DssPoint {
  double s;
  double output_photons;
  std::optional<double> cross_check_s;  // explicit squeezed state propagated through the stage
};

struct StageOutcome {
  double length_soliton_periods;
  double s;
  double output_photons;
  double r_in = 0.0;
  double weakness_in = 0.0;
  std::optional<double> cross_check_s;
};

/// Stage-by-stage evaluation state. The input model of the next stage is derived
/// from the last outcome and the product of all filters so far.
struct ChainProgress {
  std::vector<StageOutcome> outcomes;
  std::optional<SpectralFilter> cumulative_filter;
};

/// Evaluates SSS and DSS configurations on one grid, sharing solution operators
/// across calls. Methods may be called concurrently.
class Cascade {
 public:
  explicit Cascade(SampledGrid grid, PropagatorOptions options = {});

  const SampledGrid& grid() const noexcept { return grid_; }
  const MeanField& mean_field() const noexcept { return mean_field_; }
  MapCache& maps() noexcept { return maps_; }

  /// Normally ordered C_N (frequency domain) of vacuum noise after `length` periods.
  CovarianceKernel vacuum_kernel(double length_soliton_periods);

  double sss_squeezing(double length_soliton_periods, const SpectralFilter& filter);
  SssResult run_sss(const StageSpec& stage);

  /// r and delta_a0 of a first stage.
  SqueezedInputModel characterize(const StageSpec& first_stage);

  /// Second stage fed by `input`, via the transformed kernel. With cross_check the
  /// explicit squeezed state is also propagated and measured.
  DssPoint run_dss_point(const SqueezedInputModel& input, double length_soliton_periods,
                         const SpectralFilter& filter, bool cross_check = false);
  double explicit_state_squeezing(const SqueezedInputModel& input, double length_soliton_periods,
                                  const SpectralFilter& filter);

  /// Appends one stage. Chains longer than two stages iterate the two-stage
  /// reduction and are experimental.
  void advance(ChainProgress& progress, const StageSpec& stage, bool cross_check = false);
  ChainProgress run_chain(const std::vector<StageSpec>& stages, bool cross_check = false);

  /// Input model for the stage after `progress`.
  SqueezedInputModel next_input(const ChainProgress& progress) const;

 private:
  SampledGrid grid_;
  MeanField mean_field_;
  MapCache maps_;
};

}  // namespace ssq
