#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ssq/grid.hpp"

namespace ssq {

/// One soliton period is xi = pi/2. This is the only place lengths change units.
double xi_from_soliton_periods(double periods);

enum class Backend { matrix_exponential, stepped_rk4 };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view name);

struct PropagatorOptions {
  Backend backend = Backend::matrix_exponential;
  double rk4_step = 1e-4;  // fixed step of the RK4 oracle, in xi

  friend bool operator==(const PropagatorOptions&, const PropagatorOptions&) = default;
};

/// Generator of the linearized equation for the co-rotating fluctuation field,
///
///   d(da)/dxi = (i/2) d^2(da)/dtau^2 - (i/2) da + 2i sech^2 da + i sech^2 conj(da),
///
/// stored as a real 2N x 2N matrix acting on (Re da, Im da).
class LinearGenerator {
 public:
  explicit LinearGenerator(SampledGrid grid, bool include_soliton = true);

  const SampledGrid& grid() const noexcept { return grid_; }
  const RealMatrix& real_form() const noexcept { return real_form_; }

  /// Equivalent complex generator acting on the stacked pair (da, conj(da)).
  ComplexMatrix doubled() const;

  ComplexField apply(const ComplexField& field) const;

 private:
  SampledGrid grid_;
  RealMatrix real_form_;
};

LinearGenerator build_generator(const SampledGrid& grid);

/// Linear map da -> A da + B conj(da) on grid samples; the solution operator of a
/// fiber segment of length length_xi.
class BogoliubovMap {
 public:
  BogoliubovMap(SampledGrid grid, ComplexMatrix block_a, ComplexMatrix block_b, double length_xi);

  static BogoliubovMap identity(const SampledGrid& grid);
  static BogoliubovMap from_real_form(const SampledGrid& grid, const RealMatrix& real_form, double length_xi);

  const SampledGrid& grid() const noexcept { return grid_; }
  const ComplexMatrix& block_a() const noexcept { return a_; }
  const ComplexMatrix& block_b() const noexcept { return b_; }
  double length_xi() const noexcept { return length_xi_; }

  RealMatrix real_form() const;
  ComplexField apply(const ComplexField& field) const;

  /// next o this: first this map, then `next`.
  BogoliubovMap then(const BogoliubovMap& next) const;

  /// max(|A A^H - B B^H - I|, |A B^T - B A^T|), elementwise.
  double symplectic_residual() const;

 private:
  SampledGrid grid_;
  ComplexMatrix a_;
  ComplexMatrix b_;
  double length_xi_;
};

BogoliubovMap propagate_map(const SampledGrid& grid, double xi, const PropagatorOptions& options = {});

double max_elementwise_difference(const BogoliubovMap& lhs, const BogoliubovMap& rhs);

/// Fraction of the energy of a localized probe (1+i) sech^2(tau)/sqrt2 found in
/// |tau| >= 0.9 T after the map. Large values flag radiation wrapping around.
double boundary_energy_fraction(const BogoliubovMap& map);

/// Gaussian state of the fluctuation field: mean plus normally ordered central
/// moments <da^dag(tau) da(tau')> and <da(tau) da(tau')> in continuum
/// normalization (the commutator is delta(tau - tau') = I/dt on the grid).
struct FluctuationState {
  FluctuationState(SampledGrid grid, ComplexField mean, ComplexMatrix moment_nn, ComplexMatrix moment_aa);

  static FluctuationState vacuum(const SampledGrid& grid);
  /// White squeezed vacuum with the cosine quadrature variance scaled by e^{-2r}.
  static FluctuationState amplitude_squeezed(const SampledGrid& grid, double r);

  SampledGrid grid;
  ComplexField mean;
  ComplexMatrix moment_nn;
  ComplexMatrix moment_aa;

  bool moments_vanish() const;

  /// max(|n - n^H|, |m - m^T|)
  double hermiticity_residual() const;

  /// Smallest eigenvalue of <psi psi^H> with psi = (a, a^dag) on discrete modes
  /// a_j = sqrt(dt) da_j; non-negative for physical states.
  double physicality_margin() const;
};

FluctuationState apply_map(const BogoliubovMap& map, const FluctuationState& state);

/// Caches solution operators by length. Sequences of lengths are built by
/// composing increments along sorted order, which keeps uniformly spaced
/// sweeps at one exponential per distinct increment. Thread-safe.
class MapCache {
 public:
  MapCache(SampledGrid grid, PropagatorOptions options);

  const SampledGrid& grid() const noexcept { return grid_; }
  const PropagatorOptions& options() const noexcept { return options_; }

  std::shared_ptr<const BogoliubovMap> at(double xi);
  void prepare(std::vector<double> xis);

 private:
  std::shared_ptr<const BogoliubovMap> increment(double delta);

  SampledGrid grid_;
  PropagatorOptions options_;
  std::mutex mutex_;
  std::map<double, std::shared_ptr<const BogoliubovMap>> maps_;
  std::map<double, std::shared_ptr<const BogoliubovMap>> increments_;
};

}  // namespace ssq
