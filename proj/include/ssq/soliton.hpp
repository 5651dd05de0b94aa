#pragma once

#include <array>
#include <string_view>

#include "ssq/grid.hpp"

namespace ssq {

class BogoliubovMap;

/// Fundamental soliton f0(tau) = sech(tau) in the co-rotating frame (two photons).
struct MeanField {
  SampledGrid grid;
  ComplexField envelope;
  double photon_number;

  /// f0(w), equal to pi sech(pi w / 2) up to discretization.
  ComplexField spectrum() const { return forward_transform(envelope); }
};

MeanField mean_field(const SampledGrid& grid);

/// Discrete perturbation modes: photon number, momentum, timing, phase.
enum class Mode : int { photon_number = 0, momentum = 1, timing = 2, phase = 3 };

inline constexpr std::array<Mode, 4> kDiscreteModes = {Mode::photon_number, Mode::momentum, Mode::timing, Mode::phase};

std::string_view to_string(Mode mode);

struct ContinuumPair {
  ComplexField symmetric;      // even in tau
  ComplexField antisymmetric;  // odd in tau
};

class ModeSet {
 public:
  ModeSet(SampledGrid grid, std::array<ComplexField, 4> modes, std::array<ComplexField, 4> adjoints);

  const SampledGrid& grid() const noexcept { return grid_; }
  const ComplexField& mode(Mode m) const { return modes_[static_cast<int>(m)]; }
  const ComplexField& adjoint(Mode m) const { return adjoints_[static_cast<int>(m)]; }

  /// Gram matrix G_ij = <f_i, adjoint_j>.
  Eigen::Matrix4d gram() const;

  /// Continuum perturbation at frequency omega (xi = 0 snapshot), built from the
  /// squared-eigenfunction pair u = e^{i w tau}(w + i tanh)^2, v = e^{i w tau} sech^2,
  /// as u + conj(v), symmetrized over +-omega and scaled by 1/(1 + w^2).
  ContinuumPair continuum(double omega) const;

 private:
  SampledGrid grid_;
  std::array<ComplexField, 4> modes_;
  std::array<ComplexField, 4> adjoints_;
};

/// Builds the mode set and verifies the Gram matrix against the identity to 1e-6;
/// throws InvariantError otherwise.
ModeSet discrete_modes(const SampledGrid& grid);

struct Projection {
  std::array<double, 4> coefficients{};
  ComplexField residual;

  double operator[](Mode m) const { return coefficients[static_cast<int>(m)]; }
};

Projection project(const ComplexField& field, const ModeSet& modes);

struct ModeEvolutionReport {
  double xi = 0.0;
  // projections(i, j) = <map(f_i), adjoint_j>
  Eigen::Matrix4d projections = Eigen::Matrix4d::Zero();
  // max deviation of the photon-number and momentum projections from their inputs
  double conservation_residual = 0.0;
  // secular growth dV_phase/dxi per unit V_n, and dV_timing/dxi per unit V_p
  double phase_drift_rate = 0.0;
  double timing_drift_rate = 0.0;
  bool conserved = false;
};

ModeEvolutionReport mode_evolution_check(const ModeSet& modes, const BogoliubovMap& map, double tolerance = 1e-4);

}  // namespace ssq
