#pragma once

#include "ssq/filter.hpp"
#include "ssq/grid.hpp"
#include "ssq/propagator.hpp"
#include "ssq/soliton.hpp"

namespace ssq {

/// Cosine-quadrature correlation kernel of the fluctuation field.
///
/// In the time domain `values` holds C(tau, tau') on grid indices; in the frequency
/// domain it holds C(w, w') = int int C(tau, tau') e^{i w tau - i w' tau'} in FFT
/// order. When normally_ordered is false the commutator term is included, which is
/// delta(tau - tau') -> I/dt in time and 2pi delta(w - w') -> (2pi/dw) I in frequency.
struct CovarianceKernel {
  SampledGrid grid;
  Domain domain;
  ComplexMatrix values;
  bool normally_ordered;

  CovarianceKernel to_frequency() const;
  CovarianceKernel to_time() const;
  CovarianceKernel with_vacuum_term() const;
  CovarianceKernel normally_ordered_part() const;

  /// max |C - C^H|
  double hermiticity_residual() const;
};

/// Normally ordered C_N in the frequency domain, from the central moments
/// m + conj(m) + n + n^T. Checks Hermiticity and finiteness of the moments but not
/// full physicality (see FluctuationState::physicality_margin).
CovarianceKernel assemble_covariance(const FluctuationState& state);

/// S = 1 + (1/4pi^2 N_out) int int f0 |H|^2 C_N |H'|^2 f0' dw dw'.
double squeezing(const CovarianceKernel& kernel, const SpectralFilter& filter, const MeanField& mean_field,
                 double output_photons);

/// Same, with N_out taken from the filtered classical field f0 + <da>.
double squeezing(const FluctuationState& state, const SpectralFilter& filter, const MeanField& mean_field);

/// -10 log10 S
double squeezing_db(double s);

}  // namespace ssq
