#include "ssq/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "ssq/error.hpp"

namespace ssq {

double xi_from_soliton_periods(double periods) { return 0.5 * kPi * periods; }

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::matrix_exponential:
      return "matrix_exponential";
    case Backend::stepped_rk4:
      return "stepped_rk4";
  }
  return "unknown";
}

Backend backend_from_string(std::string_view name) {
  if (name == "matrix_exponential") return Backend::matrix_exponential;
  if (name == "stepped_rk4") return Backend::stepped_rk4;
  throw ConfigError("unknown propagator backend '" + std::string(name) + "'");
}

namespace {

RealVector sech_squared(const SampledGrid& grid) {
  return grid.times().array().cosh().square().inverse();
}

// da -> A da + B conj(da) on a batch of columns.
ComplexMatrix map_columns(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& columns) {
  return a * columns + b * columns.conjugate();
}

// One interaction-picture RK4 step on a batch of columns: dispersion and the frame
// term are integrated exactly in Fourier space, the pointwise soliton coupling
// 2i S u + i S conj(u) by RK4.
ComplexMatrix rk4_interaction_picture_step(const SampledGrid& grid, const ComplexMatrix& u, double h) {
  const RealVector& w = grid.frequencies();
  ComplexVector half_step(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) half_step[k] = std::polar(1.0, -0.25 * h * (w[k] * w[k] + 1.0));

  const ComplexVector coupling_weight = Complex(0.0, h) * sech_squared(grid).cast<Complex>();
  auto coupling = [&](const ComplexMatrix& v) -> ComplexMatrix {
    ComplexMatrix out = 2.0 * v + v.conjugate();
    out.array().colwise() *= coupling_weight.array();
    return out;
  };

  ComplexMatrix u_ip = u;
  apply_fourier_multiplier(grid, half_step, u_ip);
  ComplexMatrix k1 = coupling(u);
  apply_fourier_multiplier(grid, half_step, k1);
  const ComplexMatrix k2 = coupling(u_ip + 0.5 * k1);
  const ComplexMatrix k3 = coupling(u_ip + 0.5 * k2);
  ComplexMatrix k4 = u_ip + k3;
  apply_fourier_multiplier(grid, half_step, k4);
  k4 = coupling(k4);
  ComplexMatrix out = u_ip + k1 / 6.0 + k2 / 3.0 + k3 / 3.0;
  apply_fourier_multiplier(grid, half_step, out);
  out += k4 / 6.0;
  return out;
}

// The step is a fixed real-linear map, so `steps` applications equal its power.
RealMatrix matrix_power(RealMatrix base, long exponent) {
  RealMatrix result = RealMatrix::Identity(base.rows(), base.cols());
  bool first = true;
  while (exponent > 0) {
    if (exponent & 1) {
      result = first ? base : RealMatrix(base * result);
      first = false;
    }
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace

LinearGenerator::LinearGenerator(SampledGrid grid, bool include_soliton) : grid_(std::move(grid)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  const RealVector s = include_soliton ? sech_squared(grid_) : RealVector::Zero(n);
  // K = (1/2) d^2 - 1/2 + 2 S ;  x' = -(K - S) p ,  p' = (K + S) x
  RealMatrix k = 0.5 * spectral_second_derivative(grid_);
  k.diagonal().array() += -0.5 + 2.0 * s.array();
  real_form_ = RealMatrix::Zero(2 * n, 2 * n);
  real_form_.topRightCorner(n, n) = -k;
  real_form_.topRightCorner(n, n).diagonal() += s;
  real_form_.bottomLeftCorner(n, n) = k;
  real_form_.bottomLeftCorner(n, n).diagonal() += s;
}

ComplexMatrix LinearGenerator::doubled() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  // Recover K and S from the real form: top-right = -(K - S), bottom-left = K + S.
  const RealMatrix k = 0.5 * (real_form_.bottomLeftCorner(n, n) - real_form_.topRightCorner(n, n));
  const RealMatrix s = 0.5 * (real_form_.bottomLeftCorner(n, n) + real_form_.topRightCorner(n, n));
  const Complex i(0.0, 1.0);
  ComplexMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = i * k.cast<Complex>();
  out.topRightCorner(n, n) = i * s.cast<Complex>();
  out.bottomLeftCorner(n, n) = -i * s.cast<Complex>();
  out.bottomRightCorner(n, n) = -i * k.cast<Complex>();
  return out;
}

ComplexField LinearGenerator::apply(const ComplexField& field) const {
  require_same_grid(grid_, field.grid, "LinearGenerator::apply");
  const auto n = static_cast<Eigen::Index>(grid_.size());
  RealVector xp(2 * n);
  xp << field.samples.real(), field.samples.imag();
  const RealVector out = real_form_ * xp;
  ComplexVector samples(n);
  samples.real() = out.head(n);
  samples.imag() = out.tail(n);
  return {grid_, samples, Domain::time};
}

LinearGenerator build_generator(const SampledGrid& grid) { return LinearGenerator(grid); }

BogoliubovMap::BogoliubovMap(SampledGrid grid, ComplexMatrix block_a, ComplexMatrix block_b, double length_xi)
    : grid_(std::move(grid)), a_(std::move(block_a)), b_(std::move(block_b)), length_xi_(length_xi) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (a_.rows() != n || a_.cols() != n || b_.rows() != n || b_.cols() != n)
    throw ArgumentError("Bogoliubov blocks must be N x N");
}

BogoliubovMap BogoliubovMap::identity(const SampledGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return {grid, ComplexMatrix::Identity(n, n), ComplexMatrix::Zero(n, n), 0.0};
}

BogoliubovMap BogoliubovMap::from_real_form(const SampledGrid& grid, const RealMatrix& m, double length_xi) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (m.rows() != 2 * n || m.cols() != 2 * n) throw ArgumentError("real form must be 2N x 2N");
  const Complex i(0.0, 1.0);
  // da' = (M11 + i M21) x + (M12 + i M22) p with x = (da + da*)/2, p = (da - da*)/(2i)
  const ComplexMatrix xa = m.topLeftCorner(n, n).cast<Complex>() + i * m.bottomLeftCorner(n, n).cast<Complex>();
  const ComplexMatrix pa = m.topRightCorner(n, n).cast<Complex>() + i * m.bottomRightCorner(n, n).cast<Complex>();
  return {grid, 0.5 * (xa - i * pa), 0.5 * (xa + i * pa), length_xi};
}

RealMatrix BogoliubovMap::real_form() const {
  const auto n = a_.rows();
  const ComplexMatrix sum = a_ + b_;
  const ComplexMatrix diff = a_ - b_;
  RealMatrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = sum.real();
  m.topRightCorner(n, n) = -diff.imag();
  m.bottomLeftCorner(n, n) = sum.imag();
  m.bottomRightCorner(n, n) = diff.real();
  return m;
}

ComplexField BogoliubovMap::apply(const ComplexField& field) const {
  require_same_grid(grid_, field.grid, "BogoliubovMap::apply");
  return {grid_, a_ * field.samples + b_ * field.samples.conjugate(), Domain::time};
}

BogoliubovMap BogoliubovMap::then(const BogoliubovMap& next) const {
  require_same_grid(grid_, next.grid_, "BogoliubovMap::then");
  ComplexMatrix a = next.a_ * a_;
  a.noalias() += next.b_ * b_.conjugate();
  ComplexMatrix b = next.a_ * b_;
  b.noalias() += next.b_ * a_.conjugate();
  return {grid_, std::move(a), std::move(b), length_xi_ + next.length_xi_};
}

double BogoliubovMap::symplectic_residual() const {
  const auto n = a_.rows();
  ComplexMatrix commutator = a_ * a_.adjoint();
  commutator.noalias() -= b_ * b_.adjoint();
  commutator -= ComplexMatrix::Identity(n, n);
  const ComplexMatrix ab = a_ * b_.transpose();
  const double symmetric = (ab - ab.transpose()).cwiseAbs().maxCoeff();
  return std::max(commutator.cwiseAbs().maxCoeff(), symmetric);
}

BogoliubovMap propagate_map(const SampledGrid& grid, double xi, const PropagatorOptions& options) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ArgumentError("propagation length must be non-negative");
  if (xi == 0.0) return BogoliubovMap::identity(grid);

  if (options.backend == Backend::matrix_exponential) {
    const LinearGenerator generator(grid);
    const RealMatrix scaled = generator.real_form() * xi;
    const RealMatrix solution = scaled.exp();
    return BogoliubovMap::from_real_form(grid, solution, xi);
  }

  if (!(options.rk4_step > 0.0)) throw ArgumentError("rk4 step must be positive");
  const auto steps = static_cast<long>(std::ceil(xi / options.rk4_step - 1e-9));
  const double h = xi / static_cast<double>(steps);

  // Columns: unit real kick at each sample, then unit imaginary kick.
  const auto n = static_cast<Eigen::Index>(grid.size());
  ComplexMatrix u(n, 2 * n);
  u.leftCols(n) = ComplexMatrix::Identity(n, n);
  u.rightCols(n) = Complex(0.0, 1.0) * ComplexMatrix::Identity(n, n);
  u = rk4_interaction_picture_step(grid, u, h);
  // real kick -> A + B ; imaginary kick -> i (A - B)
  const Complex i(0.0, 1.0);
  const BogoliubovMap step(grid, 0.5 * (u.leftCols(n) - i * u.rightCols(n)), 0.5 * (u.leftCols(n) + i * u.rightCols(n)), h);
  return BogoliubovMap::from_real_form(grid, matrix_power(step.real_form(), steps), xi);
}

double max_elementwise_difference(const BogoliubovMap& lhs, const BogoliubovMap& rhs) {
  require_same_grid(lhs.grid(), rhs.grid(), "max_elementwise_difference");
  return std::max((lhs.block_a() - rhs.block_a()).cwiseAbs().maxCoeff(),
                  (lhs.block_b() - rhs.block_b()).cwiseAbs().maxCoeff());
}

double boundary_energy_fraction(const BogoliubovMap& map) {
  const SampledGrid& grid = map.grid();
  const Complex amplitude = Complex(1.0, 1.0) / std::sqrt(2.0);
  const ComplexField probe(grid, amplitude * sech_squared(grid).cast<Complex>(), Domain::time);
  const ComplexField out = map.apply(probe);
  double edge = 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < out.samples.size(); ++j) {
    const double density = std::norm(out.samples[j]);
    total += density;
    if (std::abs(grid.time(static_cast<std::size_t>(j))) >= 0.9 * grid.window()) edge += density;
  }
  return total > 0.0 ? edge / total : 0.0;
}

FluctuationState::FluctuationState(SampledGrid g, ComplexField m, ComplexMatrix nn, ComplexMatrix aa)
    : grid(std::move(g)), mean(std::move(m)), moment_nn(std::move(nn)), moment_aa(std::move(aa)) {
  require_same_grid(grid, mean.grid, "FluctuationState");
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (moment_nn.rows() != n || moment_nn.cols() != n || moment_aa.rows() != n || moment_aa.cols() != n)
    throw ArgumentError("moment matrices must be N x N");
  if (mean.domain != Domain::time) throw ArgumentError("state mean must be a time-domain field");
}

FluctuationState FluctuationState::vacuum(const SampledGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return {grid, ComplexField(grid), ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
}

FluctuationState FluctuationState::amplitude_squeezed(const SampledGrid& grid, double r) {
  if (!(r >= 0.0)) throw ArgumentError("squeezing parameter must be non-negative");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double inv_dt = 1.0 / grid.dt();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  return {grid, ComplexField(grid), std::sinh(r) * std::sinh(r) * inv_dt * id,
          -std::sinh(r) * std::cosh(r) * inv_dt * id};
}

bool FluctuationState::moments_vanish() const { return moment_nn.isZero(0.0) && moment_aa.isZero(0.0); }

double FluctuationState::hermiticity_residual() const {
  return std::max((moment_nn - moment_nn.adjoint()).cwiseAbs().maxCoeff(),
                  (moment_aa - moment_aa.transpose()).cwiseAbs().maxCoeff());
}

double FluctuationState::physicality_margin() const {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double dt = grid.dt();
  ComplexMatrix gram(2 * n, 2 * n);
  gram.topLeftCorner(n, n) = ComplexMatrix::Identity(n, n) + dt * moment_nn.transpose();
  gram.topRightCorner(n, n) = dt * moment_aa;
  gram.bottomLeftCorner(n, n) = dt * moment_aa.conjugate();
  gram.bottomRightCorner(n, n) = dt * moment_nn;
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

FluctuationState apply_map(const BogoliubovMap& map, const FluctuationState& state) {
  require_same_grid(map.grid(), state.grid, "apply_map");
  const ComplexMatrix& a = map.block_a();
  const ComplexMatrix& b = map.block_b();
  const double inv_dt = 1.0 / state.grid.dt();

  ComplexField mean(state.grid, map_columns(a, b, state.mean.samples), Domain::time);

  ComplexMatrix nn, aa;
  if (state.moments_vanish()) {
    nn = inv_dt * (b.conjugate() * b.transpose());
    aa = inv_dt * (a * b.transpose());
  } else {
    // <a_k a_l^dag> = delta/dt + n_lk
    ComplexMatrix anti = state.moment_nn.transpose();
    anti.diagonal().array() += inv_dt;
    const ComplexMatrix& m = state.moment_aa;
    const ComplexMatrix a_t = a.transpose();
    const ComplexMatrix b_t = b.transpose();
    const ComplexMatrix a_c = a.conjugate();
    const ComplexMatrix b_c = b.conjugate();
    nn = a_c * state.moment_nn * a_t + a_c * m.conjugate() * b_t + b_c * m * a_t + b_c * anti * b_t;
    aa = a * m * a_t + a * anti * b_t + b * state.moment_nn * a_t + b * m.conjugate() * b_t;
  }
  nn = 0.5 * (nn + nn.adjoint()).eval();
  aa = 0.5 * (aa + aa.transpose()).eval();
  return {state.grid, std::move(mean), std::move(nn), std::move(aa)};
}

MapCache::MapCache(SampledGrid grid, PropagatorOptions options) : grid_(std::move(grid)), options_(options) {
  maps_.emplace(0.0, std::make_shared<const BogoliubovMap>(BogoliubovMap::identity(grid_)));
}

std::shared_ptr<const BogoliubovMap> MapCache::increment(double delta) {
  // Keyed on a rounded length so that uniformly spaced sweeps share one exponential.
  const double key = std::round(delta * 1e12) / 1e12;
  if (auto it = increments_.find(key); it != increments_.end()) return it->second;
  auto map = std::make_shared<const BogoliubovMap>(propagate_map(grid_, delta, options_));
  increments_.emplace(key, map);
  return map;
}

std::shared_ptr<const BogoliubovMap> MapCache::at(double xi) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ArgumentError("propagation length must be non-negative");
  std::lock_guard lock(mutex_);
  if (auto it = maps_.find(xi); it != maps_.end()) return it->second;
  auto below = std::prev(maps_.upper_bound(xi));
  const auto step = increment(xi - below->first);
  const BogoliubovMap composed = below->second->then(*step);
  auto map = std::make_shared<const BogoliubovMap>(grid_, composed.block_a(), composed.block_b(), xi);
  maps_.emplace(xi, map);
  return map;
}

void MapCache::prepare(std::vector<double> xis) {
  std::sort(xis.begin(), xis.end());
  for (double xi : xis) at(xi);
}

}  // namespace ssq
