#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace ssq {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Uniform time grid tau_j = -T + j*dt on [-T, T) and its FFT-dual frequency axis.
///
/// Frequencies are stored in FFT order: 0, dw, ..., (N/2-1)dw, -N/2 dw, ..., -dw,
/// so they cover [-pi/dt, pi/dt) exactly once. Copies share the sample tables.
class SampledGrid {
 public:
  SampledGrid(std::size_t n_points, double window);

  std::size_t size() const noexcept { return data_->n; }
  double window() const noexcept { return data_->window; }
  double dt() const noexcept { return data_->dt; }
  double dw() const noexcept { return data_->dw; }
  double nyquist() const noexcept { return kPi / data_->dt; }

  double time(std::size_t j) const { return data_->times[j]; }
  double frequency(std::size_t k) const { return data_->frequencies[k]; }
  const RealVector& times() const noexcept { return data_->times; }
  const RealVector& frequencies() const noexcept { return data_->frequencies; }

  friend bool operator==(const SampledGrid& a, const SampledGrid& b) noexcept {
    return a.size() == b.size() && a.window() == b.window();
  }

 private:
  struct Data {
    std::size_t n;
    double window;
    double dt;
    double dw;
    RealVector times;
    RealVector frequencies;
  };
  std::shared_ptr<const Data> data_;
};

SampledGrid make_grid(std::size_t n_points, double window);

enum class Domain { time, frequency };

/// Complex samples on a grid; time-domain fields are indexed like times(),
/// frequency-domain fields like frequencies().
struct ComplexField {
  ComplexField(SampledGrid grid, ComplexVector samples, Domain domain = Domain::time);
  ComplexField(SampledGrid grid, Domain domain = Domain::time);  // zero field

  static ComplexField from_function(const SampledGrid& grid, const std::function<Complex(double)>& f,
                                    Domain domain = Domain::time);

  SampledGrid grid;
  ComplexVector samples;
  Domain domain;

  bool all_finite() const;
};

// Continuous-transform convention F(w) = int f(tau) e^{i w tau} dtau, so that
// sech(tau) maps to pi sech(pi w / 2). The discrete forward transform carries the
// weight dt and the inverse carries dw/2pi.
ComplexField forward_transform(const ComplexField& field);
ComplexField inverse_transform(const ComplexField& field);

// Column-wise transforms of an N x M matrix (each column is a field on the grid).
ComplexMatrix forward_transform_columns(const SampledGrid& grid, const ComplexMatrix& columns);
ComplexMatrix inverse_transform_columns(const SampledGrid& grid, const ComplexMatrix& columns);

/// Re int f g* with weight dt (time) or dw/2pi (frequency); the two agree by Parseval.
double inner_product_re(const ComplexField& f, const ComplexField& g);

/// int |f|^2 with the same weights as inner_product_re.
double energy(const ComplexField& f);

// Real N x N matrix of the spectral second derivative on the periodic grid.
RealMatrix spectral_second_derivative(const SampledGrid& grid);

// Matrix of the operator F^{-1} diag(multiplier) F acting on time-domain samples.
ComplexMatrix fourier_multiplier_matrix(const SampledGrid& grid, const ComplexVector& multiplier);

// Applies F^{-1} diag(multiplier) F to every column in place.
void apply_fourier_multiplier(const SampledGrid& grid, const ComplexVector& multiplier, ComplexMatrix& columns);

void require_same_grid(const SampledGrid& a, const SampledGrid& b, const char* what);

}  // namespace ssq
