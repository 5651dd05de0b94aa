#include "ssq/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include <fftw3.h>

#include "ssq/error.hpp"

namespace ssq {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe; execution through fftw_execute_dft is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int howmany, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n, howmany, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* buffer = fftw_alloc_complex(static_cast<std::size_t>(n) * howmany);
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, buffer, nullptr, 1, n, buffer, nullptr, 1, n, sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buffer);
    if (plan == nullptr) throw InvariantError("FFTW failed to create a plan of size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute_in_place(Complex* data, int n, int howmany, int sign) {
  fftw_plan plan = plan_cache().get(n, howmany, sign);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, raw, raw);
}

// e^{-i w_k T}: phase from the grid starting at tau = -T.
ComplexVector origin_phase(const SampledGrid& grid, double sign) {
  ComplexVector phase(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) phase[k] = std::polar(1.0, sign * grid.frequency(k) * grid.window());
  return phase;
}

}  // namespace

SampledGrid::SampledGrid(std::size_t n_points, double window) {
  if (!is_power_of_two(n_points) || n_points < 8)
    throw ArgumentError("grid n_points must be a power of two >= 8, got " + std::to_string(n_points));
  if (!(window > 0.0) || !std::isfinite(window))
    throw ArgumentError("grid window must be positive, got " + std::to_string(window));

  Data d;
  d.n = n_points;
  d.window = window;
  d.dt = 2.0 * window / static_cast<double>(n_points);
  d.dw = kPi / window;
  d.times.resize(static_cast<Eigen::Index>(n_points));
  d.frequencies.resize(static_cast<Eigen::Index>(n_points));
  const auto half = static_cast<long>(n_points / 2);
  for (std::size_t j = 0; j < n_points; ++j) {
    d.times[j] = -window + d.dt * static_cast<double>(j);
    const long k = static_cast<long>(j) < half ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_points);
    d.frequencies[j] = d.dw * static_cast<double>(k);
  }
  data_ = std::make_shared<const Data>(std::move(d));
}

SampledGrid make_grid(std::size_t n_points, double window) { return SampledGrid(n_points, window); }

ComplexField::ComplexField(SampledGrid g, ComplexVector s, Domain d) : grid(std::move(g)), samples(std::move(s)), domain(d) {
  if (static_cast<std::size_t>(samples.size()) != grid.size())
    throw ArgumentError("field has " + std::to_string(samples.size()) + " samples on a grid of " +
                        std::to_string(grid.size()));
}

ComplexField::ComplexField(SampledGrid g, Domain d)
    : grid(std::move(g)), samples(ComplexVector::Zero(static_cast<Eigen::Index>(grid.size()))), domain(d) {}

ComplexField ComplexField::from_function(const SampledGrid& grid, const std::function<Complex(double)>& f, Domain domain) {
  ComplexField field(grid, domain);
  const RealVector& axis = domain == Domain::time ? grid.times() : grid.frequencies();
  for (Eigen::Index j = 0; j < field.samples.size(); ++j) field.samples[j] = f(axis[j]);
  return field;
}

bool ComplexField::all_finite() const { return samples.allFinite(); }

ComplexMatrix forward_transform_columns(const SampledGrid& grid, const ComplexMatrix& columns) {
  if (static_cast<std::size_t>(columns.rows()) != grid.size()) throw ArgumentError("row count does not match grid");
  ComplexMatrix out = columns;
  const int n = static_cast<int>(grid.size());
  execute_in_place(out.data(), n, static_cast<int>(out.cols()), FFTW_BACKWARD);
  const ComplexVector scale = grid.dt() * origin_phase(grid, -1.0);
  out.array().colwise() *= scale.array();
  return out;
}

ComplexMatrix inverse_transform_columns(const SampledGrid& grid, const ComplexMatrix& columns) {
  if (static_cast<std::size_t>(columns.rows()) != grid.size()) throw ArgumentError("row count does not match grid");
  ComplexMatrix out = columns;
  const ComplexVector scale = (grid.dw() / (2.0 * kPi)) * origin_phase(grid, 1.0);
  out.array().colwise() *= scale.array();
  execute_in_place(out.data(), static_cast<int>(grid.size()), static_cast<int>(out.cols()), FFTW_FORWARD);
  return out;
}

ComplexField forward_transform(const ComplexField& field) {
  if (field.domain != Domain::time) throw ArgumentError("forward_transform expects a time-domain field");
  return {field.grid, forward_transform_columns(field.grid, field.samples), Domain::frequency};
}

ComplexField inverse_transform(const ComplexField& field) {
  if (field.domain != Domain::frequency) throw ArgumentError("inverse_transform expects a frequency-domain field");
  return {field.grid, inverse_transform_columns(field.grid, field.samples), Domain::time};
}

void require_same_grid(const SampledGrid& a, const SampledGrid& b, const char* what) {
  if (!(a == b)) throw ArgumentError(std::string(what) + ": grid mismatch");
}

double inner_product_re(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f.grid, g.grid, "inner_product_re");
  if (f.domain != g.domain) throw ArgumentError("inner_product_re: domain mismatch");
  const double weight = f.domain == Domain::time ? f.grid.dt() : f.grid.dw() / (2.0 * kPi);
  // sum f * conj(g) == g.dot(f) in Eigen's convention
  return weight * g.samples.dot(f.samples).real();
}

double energy(const ComplexField& f) { return inner_product_re(f, f); }

ComplexMatrix fourier_multiplier_matrix(const SampledGrid& grid, const ComplexVector& multiplier) {
  if (static_cast<std::size_t>(multiplier.size()) != grid.size()) throw ArgumentError("multiplier size mismatch");
  const auto n = static_cast<Eigen::Index>(grid.size());
  ComplexMatrix spectrum = forward_transform_columns(grid, ComplexMatrix::Identity(n, n));
  spectrum.array().colwise() *= multiplier.array();
  return inverse_transform_columns(grid, spectrum);
}

void apply_fourier_multiplier(const SampledGrid& grid, const ComplexVector& multiplier, ComplexMatrix& columns) {
  if (static_cast<std::size_t>(columns.rows()) != grid.size() || multiplier.size() != columns.rows())
    throw ArgumentError("apply_fourier_multiplier: size mismatch");
  // The origin phase and the dt, dw/2pi weights cancel between the two transforms.
  const int n = static_cast<int>(grid.size());
  const int howmany = static_cast<int>(columns.cols());
  execute_in_place(columns.data(), n, howmany, FFTW_BACKWARD);
  columns.array().colwise() *= (multiplier / static_cast<double>(n)).array();
  execute_in_place(columns.data(), n, howmany, FFTW_FORWARD);
}

RealMatrix spectral_second_derivative(const SampledGrid& grid) {
  const ComplexVector symbol = -grid.frequencies().array().square().cast<Complex>();
  RealMatrix d2 = fourier_multiplier_matrix(grid, symbol).real();
  // Exact symmetry of the circulant; removes round-off asymmetry.
  return 0.5 * (d2 + d2.transpose());
}

}  // namespace ssq
