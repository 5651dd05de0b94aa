#include "ssq/measurement.hpp"

#include <cmath>
#include <sstream>

#include "ssq/error.hpp"

namespace ssq {

namespace {

// T C T^H for a column transform T.
template <class Transform>
ComplexMatrix two_sided(const ComplexMatrix& c, Transform&& transform) {
  const ComplexMatrix left = transform(c);
  return transform(ComplexMatrix(left.adjoint())).adjoint();
}

double vacuum_diagonal(const SampledGrid& grid, Domain domain) {
  return domain == Domain::time ? 1.0 / grid.dt() : 2.0 * kPi / grid.dw();
}

}  // namespace

CovarianceKernel CovarianceKernel::to_frequency() const {
  if (domain == Domain::frequency) return *this;
  ComplexMatrix v = two_sided(values, [&](const ComplexMatrix& m) { return forward_transform_columns(grid, m); });
  return {grid, Domain::frequency, std::move(v), normally_ordered};
}

CovarianceKernel CovarianceKernel::to_time() const {
  if (domain == Domain::time) return *this;
  ComplexMatrix v = two_sided(values, [&](const ComplexMatrix& m) { return inverse_transform_columns(grid, m); });
  return {grid, Domain::time, std::move(v), normally_ordered};
}

CovarianceKernel CovarianceKernel::with_vacuum_term() const {
  if (!normally_ordered) return *this;
  CovarianceKernel out = *this;
  out.values.diagonal().array() += vacuum_diagonal(grid, domain);
  out.normally_ordered = false;
  return out;
}

CovarianceKernel CovarianceKernel::normally_ordered_part() const {
  if (normally_ordered) return *this;
  CovarianceKernel out = *this;
  out.values.diagonal().array() -= vacuum_diagonal(grid, domain);
  out.normally_ordered = true;
  return out;
}

double CovarianceKernel::hermiticity_residual() const {
  return values.size() == 0 ? 0.0 : (values - values.adjoint()).cwiseAbs().maxCoeff();
}

CovarianceKernel assemble_covariance(const FluctuationState& state) {
  const SampledGrid& grid = state.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (state.moment_nn.rows() != n || state.moment_nn.cols() != n || state.moment_aa.rows() != n ||
      state.moment_aa.cols() != n)
    throw ArgumentError("moment matrices do not match the grid");
  if (!state.moment_nn.allFinite() || !state.moment_aa.allFinite())
    throw InvariantError("fluctuation moments contain non-finite values");

  const double scale = std::max(1.0, state.moment_nn.cwiseAbs().maxCoeff() + state.moment_aa.cwiseAbs().maxCoeff());
  const double residual = state.hermiticity_residual();
  if (residual > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "fluctuation moments lose Hermitian/symmetric structure (residual " << residual << ")";
    throw InvariantError(msg.str());
  }
  const double min_occupation = state.moment_nn.diagonal().real().minCoeff();
  if (min_occupation < -1e-10 * scale) {
    std::ostringstream msg;
    msg << "negative photon occupation " << min_occupation << " in fluctuation state";
    throw InvariantError(msg.str());
  }

  if (state.moments_vanish()) return {grid, Domain::frequency, ComplexMatrix::Zero(n, n), true};

  ComplexMatrix c = state.moment_aa + state.moment_aa.conjugate() + state.moment_nn + state.moment_nn.transpose();
  c = 0.5 * (c + c.adjoint()).eval();
  return CovarianceKernel{grid, Domain::time, std::move(c), true}.to_frequency();
}

double squeezing(const CovarianceKernel& kernel, const SpectralFilter& filter, const MeanField& mean_field,
                 double output_photons) {
  require_same_grid(kernel.grid, filter.grid(), "squeezing");
  require_same_grid(kernel.grid, mean_field.grid, "squeezing");
  if (!(output_photons > 0.0)) throw InvariantError("filter leaves no output photons; squeezing is undefined");

  const CovarianceKernel c = kernel.normally_ordered_part().to_frequency();
  const ComplexVector weight = mean_field.spectrum().samples.cwiseProduct(filter.transfer().cwiseAbs2());
  const double q = (weight.adjoint() * c.values * weight)(0, 0).real();
  const double scale = kernel.grid.dw() / (2.0 * kPi);
  return 1.0 + scale * scale * q / output_photons;
}

double squeezing(const FluctuationState& state, const SpectralFilter& filter, const MeanField& mean_field) {
  return squeezing(assemble_covariance(state), filter, mean_field, output_photon_number(filter, mean_field, state.mean));
}

double squeezing_db(double s) {
  if (!(s > 0.0)) throw ArgumentError("squeezing ratio must be positive");
  return -10.0 * std::log10(s) + 0.0;  // no negative zero
}

}  // namespace ssq
