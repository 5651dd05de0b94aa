#include "ssq/soliton.hpp"

#include <cmath>
#include <sstream>

#include "ssq/error.hpp"
#include "ssq/propagator.hpp"

namespace ssq {

namespace {

constexpr double kGramTolerance = 1e-6;

double sech(double t) { return 1.0 / std::cosh(t); }

}  // namespace

MeanField mean_field(const SampledGrid& grid) {
  ComplexField envelope = ComplexField::from_function(grid, [](double t) { return Complex(sech(t), 0.0); });
  const double photons = energy(envelope);
  return {grid, std::move(envelope), photons};
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::photon_number:
      return "n";
    case Mode::momentum:
      return "p";
    case Mode::timing:
      return "tau";
    case Mode::phase:
      return "theta";
  }
  return "?";
}

ModeSet::ModeSet(SampledGrid grid, std::array<ComplexField, 4> modes, std::array<ComplexField, 4> adjoints)
    : grid_(std::move(grid)), modes_(std::move(modes)), adjoints_(std::move(adjoints)) {
  for (int i = 0; i < 4; ++i) {
    require_same_grid(grid_, modes_[i].grid, "ModeSet");
    require_same_grid(grid_, adjoints_[i].grid, "ModeSet");
  }
}

Eigen::Matrix4d ModeSet::gram() const {
  Eigen::Matrix4d g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = inner_product_re(modes_[i], adjoints_[j]);
  return g;
}

ContinuumPair ModeSet::continuum(double omega) const {
  const Complex i(0.0, 1.0);
  auto branch = [&](double w) {
    return ComplexField::from_function(grid_, [w, i](double t) {
      const double th = std::tanh(t);
      const double s2 = sech(t) * sech(t);
      const Complex u = std::exp(i * w * t) * (w + i * th) * (w + i * th);
      const Complex v_conj = std::exp(-i * w * t) * s2;
      return u + v_conj;
    });
  };
  const ComplexField plus = branch(omega);
  const ComplexField minus = branch(-omega);
  const double scale = 0.5 / (1.0 + omega * omega);
  return {ComplexField(grid_, scale * (plus.samples + minus.samples)),
          ComplexField(grid_, scale * (plus.samples - minus.samples))};
}

ModeSet discrete_modes(const SampledGrid& grid) {
  const Complex i(0.0, 1.0);
  auto field = [&](auto f) { return ComplexField::from_function(grid, f); };

  std::array<ComplexField, 4> modes = {
      field([](double t) { return Complex(0.5 * (1.0 - t * std::tanh(t)) * sech(t), 0.0); }),
      field([i](double t) { return i * t * sech(t); }),
      field([](double t) { return Complex(std::tanh(t) * sech(t), 0.0); }),
      field([i](double t) { return i * sech(t); }),
  };
  std::array<ComplexField, 4> adjoints = {
      field([](double t) { return Complex(2.0 * sech(t), 0.0); }),
      field([i](double t) { return i * std::tanh(t) * sech(t); }),
      field([](double t) { return Complex(t * sech(t), 0.0); }),
      field([i](double t) { return i * (1.0 - t * std::tanh(t)) * sech(t); }),
  };

  ModeSet set(grid, std::move(modes), std::move(adjoints));
  const double deviation = (set.gram() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff();
  if (!(deviation <= kGramTolerance)) {
    std::ostringstream msg;
    msg << "discrete mode Gram matrix deviates from identity by " << deviation << " (window too small?)";
    throw InvariantError(msg.str());
  }
  return set;
}

Projection project(const ComplexField& field, const ModeSet& modes) {
  require_same_grid(field.grid, modes.grid(), "project");
  if (field.domain != Domain::time) throw ArgumentError("project expects a time-domain field");
  Projection out{{}, field};
  for (Mode m : kDiscreteModes) {
    const double v = inner_product_re(field, modes.adjoint(m));
    out.coefficients[static_cast<int>(m)] = v;
    out.residual.samples -= v * modes.mode(m).samples;
  }
  return out;
}

ModeEvolutionReport mode_evolution_check(const ModeSet& modes, const BogoliubovMap& map, double tolerance) {
  require_same_grid(modes.grid(), map.grid(), "mode_evolution_check");
  ModeEvolutionReport report;
  report.xi = map.length_xi();
  for (Mode in : kDiscreteModes) {
    const ComplexField out = map.apply(modes.mode(in));
    for (Mode m : kDiscreteModes) report.projections(static_cast<int>(in), static_cast<int>(m)) = inner_product_re(out, modes.adjoint(m));
  }
  const Eigen::Matrix4d deviation = report.projections - Eigen::Matrix4d::Identity();
  report.conservation_residual = std::max(deviation.col(static_cast<int>(Mode::photon_number)).cwiseAbs().maxCoeff(),
                                          deviation.col(static_cast<int>(Mode::momentum)).cwiseAbs().maxCoeff());
  if (report.xi > 0.0) {
    report.phase_drift_rate = report.projections(static_cast<int>(Mode::photon_number), static_cast<int>(Mode::phase)) / report.xi;
    report.timing_drift_rate = report.projections(static_cast<int>(Mode::momentum), static_cast<int>(Mode::timing)) / report.xi;
  }
  report.conserved = report.conservation_residual <= tolerance;
  return report;
}

}  // namespace ssq
