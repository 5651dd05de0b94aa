#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ssq/error.hpp"
#include "ssq/propagator.hpp"
#include "ssq/soliton.hpp"

using namespace ssq;
using ssq::testing::default_grid;
using ssq::testing::default_map;

namespace {

const SampledGrid& small_grid() {
  static const SampledGrid grid = make_grid(128, 16.0);
  return grid;
}

double max_abs(const ComplexVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(Units, SolitonPeriod) {
  EXPECT_DOUBLE_EQ(xi_from_soliton_periods(1.0), kPi / 2.0);
  EXPECT_DOUBLE_EQ(xi_from_soliton_periods(3.0), 1.5 * kPi);
  EXPECT_EQ(xi_from_soliton_periods(0.0), 0.0);
}

TEST(Backend, NamesRoundTrip) {
  for (Backend b : {Backend::matrix_exponential, Backend::stepped_rk4}) EXPECT_EQ(backend_from_string(to_string(b)), b);
  EXPECT_THROW(backend_from_string("euler"), ConfigError);
}

TEST(Generator, ZeroMapsToZero) {
  const LinearGenerator g(small_grid());
  EXPECT_EQ(max_abs(g.apply(ComplexField(small_grid())).samples), 0.0);
}

TEST(Generator, FreePlaneWaveEigenvalue) {
  const SampledGrid& grid = small_grid();
  const LinearGenerator free(grid, false);
  for (std::size_t k : {std::size_t{0}, std::size_t{3}, std::size_t{10}}) {
    const double omega = grid.frequency(k);
    const ComplexField wave = ComplexField::from_function(grid, [omega](double t) { return std::polar(1.0, omega * t); });
    const ComplexVector expected = Complex(0.0, -0.5 * (omega * omega + 1.0)) * wave.samples;
    EXPECT_LE(max_abs(free.apply(wave).samples - expected), 1e-9) << omega;
  }
}

TEST(Generator, DiscreteModeRelations) {
  // tau sech(tau) jumps by ~2T sech(T) across the periodic wrap; a wide window keeps that below 1e-8.
  const SampledGrid grid = make_grid(1024, 30.0);
  const LinearGenerator g(grid);
  const ModeSet modes = discrete_modes(grid);
  const ComplexVector ln = g.apply(modes.mode(Mode::photon_number)).samples;
  const ComplexVector lp = g.apply(modes.mode(Mode::momentum)).samples;
  const ComplexVector lt = g.apply(modes.mode(Mode::timing)).samples;
  const ComplexVector lth = g.apply(modes.mode(Mode::phase)).samples;
  EXPECT_LE(max_abs(ln - 0.5 * modes.mode(Mode::phase).samples), 1e-8);
  EXPECT_LE(max_abs(lp - modes.mode(Mode::timing).samples), 1e-8);
  EXPECT_LE(max_abs(lt), 1e-8);
  EXPECT_LE(max_abs(lth), 1e-8);
}

TEST(Generator, DoubledMatchesRealForm) {
  const SampledGrid& grid = small_grid();
  const LinearGenerator g(grid);
  const ComplexMatrix d = g.doubled();
  const auto n = static_cast<Eigen::Index>(grid.size());
  ASSERT_EQ(d.rows(), 2 * n);
  const ComplexField f = ComplexField::from_function(grid, [](double t) { return Complex(std::exp(-t * t), 0.4 * t * std::exp(-t * t)); });
  ComplexVector stacked(2 * n);
  stacked << f.samples, f.samples.conjugate();
  const ComplexVector out = d * stacked;
  const ComplexVector direct = g.apply(f).samples;
  EXPECT_LE(max_abs(out.head(n) - direct), 1e-10);
  EXPECT_LE(max_abs(out.tail(n) - direct.conjugate()), 1e-10);
}

TEST(Map, ZeroLengthIsIdentity) {
  const BogoliubovMap m = propagate_map(small_grid(), 0.0);
  EXPECT_EQ(max_elementwise_difference(m, BogoliubovMap::identity(small_grid())), 0.0);
  EXPECT_EQ(m.symplectic_residual(), 0.0);
}

TEST(Map, NegativeOrNonFiniteLengthThrows) {
  EXPECT_THROW(propagate_map(small_grid(), -0.1), ArgumentError);
  EXPECT_THROW(propagate_map(small_grid(), std::nan("")), ArgumentError);
  PropagatorOptions bad{Backend::stepped_rk4, 0.0};
  EXPECT_THROW(propagate_map(small_grid(), 0.1, bad), ArgumentError);
}

TEST(Map, SymplecticAtThreePeriods) {
  const BogoliubovMap& m = default_map(3.0);
  EXPECT_DOUBLE_EQ(m.length_xi(), 1.5 * kPi);
  EXPECT_LE(m.symplectic_residual(), 1e-8);
}

TEST(Map, BackendsAgree) {
  const double xi = kPi / 2.0;
  const BogoliubovMap expm = propagate_map(small_grid(), xi);
  const BogoliubovMap rk4 = propagate_map(small_grid(), xi, {Backend::stepped_rk4, 1e-3});
  EXPECT_LE(max_elementwise_difference(expm, rk4), 1e-6);
  EXPECT_LE(rk4.symplectic_residual(), 1e-6);
}

TEST(Map, Semigroup) {
  const BogoliubovMap half = propagate_map(small_grid(), 0.6);
  const BogoliubovMap whole = propagate_map(small_grid(), 1.2);
  const BogoliubovMap twice = half.then(half);
  EXPECT_DOUBLE_EQ(twice.length_xi(), 1.2);
  EXPECT_LE(max_elementwise_difference(twice, whole), 1e-10);
}

TEST(Map, RealFormRoundTrip) {
  const BogoliubovMap m = propagate_map(small_grid(), 0.7);
  const BogoliubovMap back = BogoliubovMap::from_real_form(small_grid(), m.real_form(), m.length_xi());
  EXPECT_LE(max_elementwise_difference(m, back), 1e-14);
}

TEST(Map, ApplyMatchesRealForm) {
  const SampledGrid& grid = small_grid();
  const BogoliubovMap m = propagate_map(grid, 0.9);
  const ComplexField f = ComplexField::from_function(grid, [](double t) { return Complex(1.0 / std::cosh(t), std::tanh(t) / std::cosh(t)); });
  const auto n = static_cast<Eigen::Index>(grid.size());
  RealVector xp(2 * n);
  xp << f.samples.real(), f.samples.imag();
  const RealVector out = m.real_form() * xp;
  const ComplexVector direct = m.apply(f).samples;
  EXPECT_LE((out.head(n) - direct.real()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((out.tail(n) - direct.imag()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Map, WrongBlockShapeThrows) {
  EXPECT_THROW(BogoliubovMap(small_grid(), ComplexMatrix::Identity(3, 3), ComplexMatrix::Zero(3, 3), 0.0), ArgumentError);
  EXPECT_THROW(BogoliubovMap::from_real_form(small_grid(), RealMatrix::Identity(4, 4), 0.0), ArgumentError);
}

TEST(States, VacuumShortcutMatchesGeneralFormula) {
  const SampledGrid& grid = small_grid();
  const BogoliubovMap first = propagate_map(grid, 0.8);
  const BogoliubovMap second = propagate_map(grid, 1.1);
  const FluctuationState stepwise = apply_map(second, apply_map(first, FluctuationState::vacuum(grid)));
  const FluctuationState direct = apply_map(first.then(second), FluctuationState::vacuum(grid));
  const double scale = direct.moment_aa.cwiseAbs().maxCoeff();
  EXPECT_LE((stepwise.moment_nn - direct.moment_nn).cwiseAbs().maxCoeff(), 1e-9 * scale);
  EXPECT_LE((stepwise.moment_aa - direct.moment_aa).cwiseAbs().maxCoeff(), 1e-9 * scale);
}

TEST(States, IdentityPreservesState) {
  const SampledGrid& grid = small_grid();
  const FluctuationState s = FluctuationState::amplitude_squeezed(grid, 0.3);
  const FluctuationState out = apply_map(BogoliubovMap::identity(grid), s);
  EXPECT_LE((out.moment_nn - s.moment_nn).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((out.moment_aa - s.moment_aa).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(States, StayPhysicalAfterPropagation) {
  const SampledGrid& grid = small_grid();
  // Pure states saturate the bound.
  EXPECT_NEAR(FluctuationState::vacuum(grid).physicality_margin(), 0.0, 1e-12);
  EXPECT_NEAR(FluctuationState::amplitude_squeezed(grid, 0.4).physicality_margin(), 0.0, 1e-10);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const FluctuationState unphysical(grid, ComplexField(grid), ComplexMatrix::Zero(n, n),
                                    (0.5 / grid.dt()) * ComplexMatrix::Identity(n, n));
  EXPECT_LT(unphysical.physicality_margin(), -0.1);
  const BogoliubovMap m = propagate_map(grid, 1.5 * kPi);
  const FluctuationState vac = apply_map(m, FluctuationState::vacuum(grid));
  EXPECT_GE(vac.physicality_margin(), -1e-8);
  EXPECT_LE(vac.hermiticity_residual(), 1e-10 * vac.moment_aa.cwiseAbs().maxCoeff());
  const FluctuationState sq = apply_map(m, FluctuationState::amplitude_squeezed(grid, 0.3));
  EXPECT_GE(sq.physicality_margin(), -1e-8);
}

TEST(States, NegativeSqueezingThrows) {
  EXPECT_THROW(FluctuationState::amplitude_squeezed(small_grid(), -0.1), ArgumentError);
}

TEST(Cache, MatchesDirectPropagation) {
  MapCache cache(small_grid(), {});
  cache.prepare({0.5, 1.0, 1.5, 0.25});
  EXPECT_EQ(cache.at(0.0)->length_xi(), 0.0);
  for (double xi : {0.25, 1.0, 1.5}) {
    const auto m = cache.at(xi);
    EXPECT_EQ(m, cache.at(xi));
    EXPECT_LE(max_elementwise_difference(*m, propagate_map(small_grid(), xi)), 1e-10) << xi;
  }
  EXPECT_THROW(cache.at(-1.0), ArgumentError);
}

TEST(Boundary, RadiationStaysAwayFromEdges) {
  EXPECT_LE(boundary_energy_fraction(BogoliubovMap::identity(default_grid())), 1e-12);
  EXPECT_LE(boundary_energy_fraction(default_map(3.0)), 1e-3);
}
