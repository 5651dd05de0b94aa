#include "ssq/cascade.hpp"

#include <cmath>
#include <sstream>

#include "ssq/error.hpp"

namespace ssq {

SqueezedInputModel SqueezedInputModel::coherent(const SampledGrid& grid) {
  return {0.0, ComplexField(grid, Domain::frequency)};
}

double extract_r(double s) {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream msg;
    msg << "squeezing ratio " << s << " outside (0, 1]; no squeezing parameter";
    throw InvariantError(msg.str());
  }
  return -0.5 * std::log(s);
}

double filter_weakness(const SpectralFilter& filter, const MeanField& mean_field) {
  require_same_grid(filter.grid(), mean_field.grid, "filter_weakness");
  const ComplexVector f0 = mean_field.spectrum().samples;
  const ComplexVector& h = filter.transfer();
  double num = 0.0, den = 0.0;
  for (Eigen::Index k = 0; k < h.size(); ++k) {
    if (h[k] == Complex(0.0, 0.0)) continue;
    const double p = std::norm(f0[k]);
    num += std::norm(h[k] - 1.0) * p;
    den += p;
  }
  return den > 0.0 ? std::sqrt(num / den) : 1.0;
}

ComplexField first_stage_mean_perturbation(const SpectralFilter& filter, const MeanField& mean_field) {
  const double weakness = filter_weakness(filter, mean_field);
  if (weakness > kWeaknessLimit) {
    std::ostringstream msg;
    msg << "first-stage filter too strong for the weak-filter expansion (weighted |h| = " << weakness << " > "
        << kWeaknessLimit << ")";
    throw InvariantError(msg.str());
  }
  const ComplexVector f0 = mean_field.spectrum().samples;
  const ComplexVector& h = filter.transfer();
  ComplexVector da(h.size());
  for (Eigen::Index k = 0; k < h.size(); ++k) da[k] = h[k] == Complex(0.0, 0.0) ? Complex(0.0, 0.0) : (h[k] - 1.0) * f0[k];
  return {filter.grid(), std::move(da), Domain::frequency};
}

CovarianceKernel dss_covariance(const CovarianceKernel& g_sss, double r, const ComplexField& delta_a0) {
  require_same_grid(g_sss.grid, delta_a0.grid, "dss_covariance");
  if (!(r >= 0.0)) throw ArgumentError("squeezing parameter must be non-negative");
  const auto n = static_cast<Eigen::Index>(g_sss.grid.size());
  if (g_sss.values.rows() != n || g_sss.values.cols() != n) throw ArgumentError("kernel dimension does not match grid");

  CovarianceKernel g = g_sss.with_vacuum_term().to_time();
  const RealVector mean = (delta_a0.domain == Domain::time ? delta_a0 : inverse_transform(delta_a0)).samples.real();
  g.values *= std::exp(-2.0 * r);
  g.values.noalias() -= (4.0 * mean * mean.transpose()).cast<Complex>();
  CovarianceKernel out = g.normally_ordered_part();
  return g_sss.domain == Domain::frequency ? out.to_frequency() : out;
}

Cascade::Cascade(SampledGrid grid, PropagatorOptions options)
    : grid_(grid), mean_field_(ssq::mean_field(grid)), maps_(grid, options) {}

CovarianceKernel Cascade::vacuum_kernel(double length_soliton_periods) {
  if (!(length_soliton_periods >= 0.0)) throw ArgumentError("stage length must be non-negative");
  const auto map = maps_.at(xi_from_soliton_periods(length_soliton_periods));
  return assemble_covariance(apply_map(*map, FluctuationState::vacuum(grid_)));
}

double Cascade::sss_squeezing(double length_soliton_periods, const SpectralFilter& filter) {
  const double n_out = output_photon_number(filter, mean_field_, ComplexField(grid_));
  return squeezing(vacuum_kernel(length_soliton_periods), filter, mean_field_, n_out);
}

SssResult Cascade::run_sss(const StageSpec& stage) {
  if (!(stage.length_soliton_periods >= 0.0)) throw ArgumentError("stage length must be non-negative");
  const SpectralFilter filter = realize(stage.filter, grid_);
  const auto map = maps_.at(xi_from_soliton_periods(stage.length_soliton_periods));
  const FluctuationState state = apply_map(*map, FluctuationState::vacuum(grid_));
  const double s = squeezing(state, filter, mean_field_);
  FilterOutput out = apply_filter(filter, state, mean_field_);
  return {s, out.output_photon_number, std::move(out.state)};
}

SqueezedInputModel Cascade::characterize(const StageSpec& first_stage) {
  const SpectralFilter filter = realize(first_stage.filter, grid_);
  const double s = sss_squeezing(first_stage.length_soliton_periods, filter);
  return {extract_r(s), first_stage_mean_perturbation(filter, mean_field_)};
}

DssPoint Cascade::run_dss_point(const SqueezedInputModel& input, double length_soliton_periods,
                                const SpectralFilter& filter, bool cross_check) {
  const CovarianceKernel c = dss_covariance(vacuum_kernel(length_soliton_periods), input.r, input.delta_a0);
  // the mean perturbation is taken to reach the detector unchanged
  const double n_out = output_photon_number(filter, mean_field_, input.delta_a0);
  DssPoint point{squeezing(c, filter, mean_field_, n_out), n_out, std::nullopt};
  if (cross_check) point.cross_check_s = explicit_state_squeezing(input, length_soliton_periods, filter);
  return point;
}

double Cascade::explicit_state_squeezing(const SqueezedInputModel& input, double length_soliton_periods,
                                         const SpectralFilter& filter) {
  FluctuationState state = FluctuationState::amplitude_squeezed(grid_, input.r);
  state.mean = input.delta_a0.domain == Domain::time ? input.delta_a0 : inverse_transform(input.delta_a0);
  const auto map = maps_.at(xi_from_soliton_periods(length_soliton_periods));
  return squeezing(apply_map(*map, state), filter, mean_field_);
}

SqueezedInputModel Cascade::next_input(const ChainProgress& progress) const {
  if (progress.outcomes.empty() || !progress.cumulative_filter) return SqueezedInputModel::coherent(grid_);
  return {extract_r(progress.outcomes.back().s), first_stage_mean_perturbation(*progress.cumulative_filter, mean_field_)};
}

void Cascade::advance(ChainProgress& progress, const StageSpec& stage, bool cross_check) {
  if (!(stage.length_soliton_periods >= 0.0)) throw ArgumentError("stage length must be non-negative");
  const SpectralFilter filter = realize(stage.filter, grid_);
  StageOutcome outcome{stage.length_soliton_periods, 0.0, 0.0, 0.0, 0.0, std::nullopt};
  if (progress.outcomes.empty()) {
    outcome.s = sss_squeezing(stage.length_soliton_periods, filter);
    outcome.output_photons = output_photon_number(filter, mean_field_, ComplexField(grid_));
  } else {
    const SqueezedInputModel input = next_input(progress);
    outcome.r_in = input.r;
    outcome.weakness_in = filter_weakness(*progress.cumulative_filter, mean_field_);
    const DssPoint point = run_dss_point(input, stage.length_soliton_periods, filter, cross_check);
    outcome.s = point.s;
    outcome.output_photons = point.output_photons;
    outcome.cross_check_s = point.cross_check_s;
  }
  progress.cumulative_filter = progress.cumulative_filter ? compose(*progress.cumulative_filter, filter) : filter;
  progress.outcomes.push_back(outcome);
}

ChainProgress Cascade::run_chain(const std::vector<StageSpec>& stages, bool cross_check) {
  if (stages.empty()) throw ConfigError("stage chain is empty");
  ChainProgress progress;
  for (const StageSpec& stage : stages) advance(progress, stage, cross_check);
  return progress;
}

}  // namespace ssq
