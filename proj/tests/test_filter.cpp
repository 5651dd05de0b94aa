#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fixtures.hpp"
#include "ssq/error.hpp"
#include "ssq/filter.hpp"

using namespace ssq;
using ssq::testing::default_grid;
using ssq::testing::kEta10PercentLoss;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Parabolic, ValuesOnGrid) {
  const SampledGrid& g = default_grid();
  const double eta = std::sqrt(2.0) * 10.0 * g.dw();
  const SpectralFilter f = parabolic_filter(g, eta);
  EXPECT_DOUBLE_EQ(f.transfer()[0].real(), 1.0);
  for (std::size_t k : {std::size_t{1}, std::size_t{10}, std::size_t{14}}) {
    const double w = g.frequency(k);
    EXPECT_NEAR(f.transfer()[k].real(), 1.0 - w * w / (eta * eta), 1e-15);
    EXPECT_EQ(f.transfer()[g.size() - k], f.transfer()[k]);  // even in omega
  }
  EXPECT_NEAR(f.transfer()[10].real(), 0.5, 1e-12);
  EXPECT_EQ(f.transfer()[15], Complex(0.0, 0.0));
  EXPECT_EQ(f.transfer()[g.size() / 2], Complex(0.0, 0.0));
  EXPECT_EQ(f.transfer().imag().cwiseAbs().maxCoeff(), 0.0);

  const auto band = f.passband();
  EXPECT_TRUE(band[0]);
  EXPECT_TRUE(band[14]);
  EXPECT_FALSE(band[15]);
}

TEST(Parabolic, RejectsBadBandwidth) {
  EXPECT_THROW(parabolic_filter(default_grid(), 0.0), ArgumentError);
  EXPECT_THROW(parabolic_filter(default_grid(), -1.0), ArgumentError);
  EXPECT_THROW(parabolic_filter(default_grid(), 2.0 * default_grid().nyquist()), ArgumentError);
}

TEST(Calibration, TenPercentLoss) {
  const SampledGrid& g = default_grid();
  const double eta = calibrate_bandwidth(g, 0.1);
  EXPECT_NEAR(eta, kEta10PercentLoss, 1e-8);
  EXPECT_NEAR(filter_energy_loss(parabolic_filter(g, eta), mean_field(g)), 0.1, 1e-10);
}

TEST(Calibration, RoundTripAndMonotonicity) {
  const SampledGrid& g = default_grid();
  const MeanField mf = mean_field(g);
  double previous = 0.0;
  for (double loss : {0.01, 0.05, 0.1, 0.3, 0.6}) {
    const double eta = calibrate_bandwidth(g, loss);
    EXPECT_NEAR(filter_energy_loss(parabolic_filter(g, eta), mf), loss, 1e-6) << loss;
    if (previous > 0.0) EXPECT_LT(eta, previous);
    previous = eta;
  }
}

TEST(Calibration, NoBracketThrows) {
  EXPECT_THROW(calibrate_bandwidth(default_grid(), 1e-5), ArgumentError);
  EXPECT_THROW(calibrate_bandwidth(default_grid(), 0.0), ArgumentError);
  EXPECT_THROW(calibrate_bandwidth(default_grid(), 1.0), ArgumentError);
}

TEST(Identity, LosesNothing) {
  const SampledGrid& g = default_grid();
  const SpectralFilter id = identity_filter(g);
  EXPECT_NEAR(filter_energy_loss(id, mean_field(g)), 0.0, 1e-15);
  EXPECT_EQ(id.deviation().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(std::holds_alternative<IdentityFilter>(id.descriptor()));
}

TEST(Realizability, GainIsRejected) {
  const SampledGrid& g = default_grid();
  ComplexVector h = ComplexVector::Ones(static_cast<Eigen::Index>(g.size()));
  h[3] = Complex(0.9, 0.5);
  EXPECT_THROW(SpectralFilter(g, h, CustomFilter{}), InvariantError);
  EXPECT_THROW(custom_filter(g, {{-1.0, 1.0}, {1.0, 1.2}}), InvariantError);
  EXPECT_THROW(SpectralFilter(g, ComplexVector::Ones(4), IdentityFilter{}), ArgumentError);
}

TEST(Compose, IdentityIsNeutral) {
  const SampledGrid& g = default_grid();
  const SpectralFilter p = parabolic_filter(g, 2.0);
  const SpectralFilter a = compose(identity_filter(g), p);
  const SpectralFilter b = compose(p, identity_filter(g));
  EXPECT_EQ(a.transfer(), p.transfer());
  EXPECT_EQ(b.transfer(), p.transfer());
  EXPECT_EQ(a.descriptor(), p.descriptor());
}

TEST(Compose, ProductOfTransfers) {
  const SampledGrid& g = default_grid();
  const SpectralFilter p = parabolic_filter(g, 2.0);
  const SpectralFilter q = parabolic_filter(g, 3.0);
  const SpectralFilter pq = compose(p, q);
  EXPECT_LE((pq.transfer() - p.transfer().cwiseProduct(q.transfer())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(std::holds_alternative<CustomFilter>(pq.descriptor()));
  EXPECT_THROW(compose(p, parabolic_filter(make_grid(128, 16.0), 2.0)), ArgumentError);
}

TEST(Custom, InterpolatesLinearly) {
  const SampledGrid& g = default_grid();
  const SpectralFilter f = custom_filter(g, {{-2.0, {0.0, 0.0}}, {0.0, {1.0, 0.0}}, {2.0, {0.0, 1.0}}});
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = g.frequency(k);
    Complex expected(0.0, 0.0);
    if (w >= -2.0 && w <= 0.0) expected = Complex(1.0 + w / 2.0, 0.0);
    if (w > 0.0 && w <= 2.0) expected = Complex(1.0 - w / 2.0, w / 2.0);
    EXPECT_NEAR(std::abs(f.transfer()[k] - expected), 0.0, 1e-14) << w;
  }
}

TEST(Custom, TableShapeErrors) {
  const SampledGrid& g = default_grid();
  EXPECT_THROW(custom_filter(g, {{0.0, 1.0}}), ConfigError);
  EXPECT_THROW(custom_filter(g, {{0.0, 1.0}, {0.0, 0.5}}), ConfigError);
  EXPECT_THROW(custom_filter(g, {{1.0, 1.0}, {0.0, 0.5}}), ConfigError);
}

TEST(Table, ReadsCsvWithHeader) {
  const auto table = read_filter_table(std::string(SSQ_TEST_DATA) + "/bandpass.csv");
  ASSERT_EQ(table.size(), 5u);
  EXPECT_EQ(table[0].omega, -3.0);
  EXPECT_EQ(table[1].transfer, Complex(0.75, 0.0));
  EXPECT_EQ(table[4].omega, 3.0);
}

TEST(Table, Errors) {
  EXPECT_THROW(read_filter_table("/nonexistent/table.csv"), IoError);
  EXPECT_THROW(read_filter_table(write_temp("ssq_bad_row.csv", "0,1,0\n1,abc,0\n")), ConfigError);
  EXPECT_THROW(read_filter_table(write_temp("ssq_short_row.csv", "0,1,0\n1,0.5\n")), ConfigError);
  EXPECT_THROW(read_filter_table(write_temp("ssq_empty.csv", "# nothing\n")), ConfigError);
  const auto ok = read_filter_table(write_temp("ssq_ok.csv", "# c\n-1,0.5,0\n1,0.5,0.25\n"));
  ASSERT_EQ(ok.size(), 2u);
  EXPECT_EQ(ok[1].transfer, Complex(0.5, 0.25));
}

TEST(Realize, Specs) {
  const SampledGrid& g = default_grid();
  FilterSpec spec;
  EXPECT_TRUE(std::holds_alternative<IdentityFilter>(realize(spec, g).descriptor()));
  spec.kind = FilterSpec::Kind::parabolic;
  EXPECT_THROW(realize(spec, g), ConfigError);
  spec.loss = 0.1;
  const SpectralFilter calibrated = realize(spec, g);
  EXPECT_NEAR(std::get<ParabolicFilter>(calibrated.descriptor()).eta, kEta10PercentLoss, 1e-8);
  spec.eta = 1.5;
  EXPECT_EQ(std::get<ParabolicFilter>(realize(spec, g).descriptor()).eta, 1.5);
}

TEST(Apply, PhotonNumbers) {
  const SampledGrid& g = default_grid();
  const MeanField mf = mean_field(g);
  const FluctuationState vac = FluctuationState::vacuum(g);
  EXPECT_NEAR(apply_filter(identity_filter(g), vac, mf).output_photon_number, 2.0, 1e-8);
  const FilterOutput out = apply_filter(parabolic_filter(g, kEta10PercentLoss), vac, mf);
  EXPECT_NEAR(out.output_photon_number, 1.8, 1e-4);
  EXPECT_TRUE(out.state.moments_vanish());
}

TEST(Apply, IdentityKeepsMoments) {
  const SampledGrid g = make_grid(128, 16.0);
  const FluctuationState s = FluctuationState::amplitude_squeezed(g, 0.2);
  const FilterOutput out = apply_filter(identity_filter(g), s, mean_field(g));
  EXPECT_LE((out.state.moment_nn - s.moment_nn).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((out.state.moment_aa - s.moment_aa).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Apply, LossyFilterKeepsStatePhysical) {
  const SampledGrid g = make_grid(128, 16.0);
  const FluctuationState s = FluctuationState::amplitude_squeezed(g, 0.5);
  const FilterOutput out = apply_filter(parabolic_filter(g, 1.5), s, mean_field(g));
  EXPECT_GE(out.state.physicality_margin(), -1e-10);
  EXPECT_LE(out.state.hermiticity_residual(), 1e-10);
}
