#pragma once

#include <map>
#include <memory>

#include "ssq/cascade.hpp"
#include "ssq/propagator.hpp"

namespace ssq::testing {

inline const SampledGrid& default_grid() {
  static const SampledGrid grid = make_grid(512, 20.0);
  return grid;
}

// One engine per test binary so solution operators are built once.
inline Cascade& default_engine() {
  static Cascade engine(default_grid());
  return engine;
}

inline const BogoliubovMap& default_map(double periods) {
  return *default_engine().maps().at(xi_from_soliton_periods(periods));
}

// Frozen values from an independent numpy/scipy implementation (dense expm of the
// real 2N x 2N generator, brentq calibration) on the 512-point, window-20 grid.
inline constexpr double kEta10PercentLoss = 2.4259425590595103;
inline constexpr double kSssAtThreePeriods = 0.5263394280922961;
inline constexpr double kSssDbAtThreePeriods = 2.787340957597641;
inline constexpr double kRAtThreePeriods = 0.3209044869028039;
inline constexpr double kDssAtThreeThree = 0.24383452028354013;
inline constexpr double kDssDbAtThreeThree = 6.129048101721929;

}  // namespace ssq::testing
