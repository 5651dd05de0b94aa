#include "ssq/filter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssq/error.hpp"

namespace ssq {

namespace {

constexpr double kRealizabilitySlack = 1e-12;

void check_realizable(const ComplexVector& transfer) {
  for (Eigen::Index k = 0; k < transfer.size(); ++k) {
    const double mag = std::abs(transfer[k]);
    if (!std::isfinite(mag) || mag > 1.0 + kRealizabilitySlack) {
      std::ostringstream msg;
      msg << "filter violates realizability 0 <= |H| <= 1: |H| = " << mag << " at sample " << k;
      throw InvariantError(msg.str());
    }
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

}  // namespace

SpectralFilter::SpectralFilter(SampledGrid grid, ComplexVector transfer, FilterDescriptor descriptor)
    : grid_(std::move(grid)), transfer_(std::move(transfer)), descriptor_(std::move(descriptor)) {
  if (static_cast<std::size_t>(transfer_.size()) != grid_.size()) throw ArgumentError("transfer size does not match grid");
  check_realizable(transfer_);
}

ComplexVector SpectralFilter::deviation() const { return transfer_.array() - Complex(1.0, 0.0); }

std::vector<bool> SpectralFilter::passband() const {
  std::vector<bool> band(transfer_.size());
  for (Eigen::Index k = 0; k < transfer_.size(); ++k) band[k] = transfer_[k] != Complex(0.0, 0.0);
  return band;
}

SpectralFilter identity_filter(const SampledGrid& grid) {
  return {grid, ComplexVector::Ones(static_cast<Eigen::Index>(grid.size())), IdentityFilter{}};
}

SpectralFilter parabolic_filter(const SampledGrid& grid, double eta) {
  if (!(eta > 0.0)) throw ArgumentError("parabolic filter bandwidth must be positive");
  if (eta > grid.nyquist()) {
    std::ostringstream msg;
    msg << "parabolic filter bandwidth " << eta << " exceeds the grid Nyquist frequency " << grid.nyquist();
    throw ArgumentError(msg.str());
  }
  ComplexVector h(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.frequency(k);
    h[k] = std::abs(w) <= eta ? 1.0 - (w * w) / (eta * eta) : 0.0;
  }
  return {grid, std::move(h), ParabolicFilter{eta}};
}

SpectralFilter custom_filter(const SampledGrid& grid, std::vector<TablePoint> table) {
  if (table.size() < 2) throw ConfigError("custom filter table needs at least two rows");
  for (std::size_t i = 1; i < table.size(); ++i)
    if (!(table[i].omega > table[i - 1].omega)) throw ConfigError("custom filter table frequencies must increase strictly");
  ComplexVector points(static_cast<Eigen::Index>(table.size()));
  for (std::size_t i = 0; i < table.size(); ++i) points[i] = table[i].transfer;
  check_realizable(points);

  ComplexVector h = ComplexVector::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.frequency(k);
    if (w < table.front().omega || w > table.back().omega) continue;
    auto upper = std::lower_bound(table.begin(), table.end(), w, [](const TablePoint& p, double x) { return p.omega < x; });
    if (upper->omega == w) {
      h[k] = upper->transfer;
      continue;
    }
    const auto lower = std::prev(upper);
    const double t = (w - lower->omega) / (upper->omega - lower->omega);
    h[k] = (1.0 - t) * lower->transfer + t * upper->transfer;
  }
  return {grid, std::move(h), CustomFilter{std::move(table)}};
}

SpectralFilter compose(const SpectralFilter& a, const SpectralFilter& b) {
  require_same_grid(a.grid(), b.grid(), "compose");
  if (std::holds_alternative<IdentityFilter>(a.descriptor())) return b;
  if (std::holds_alternative<IdentityFilter>(b.descriptor())) return a;
  const ComplexVector product = a.transfer().cwiseProduct(b.transfer());
  std::vector<TablePoint> table;
  table.reserve(a.grid().size());
  for (std::size_t k = 0; k < a.grid().size(); ++k) table.push_back({a.grid().frequency(k), product[k]});
  std::sort(table.begin(), table.end(), [](const TablePoint& x, const TablePoint& y) { return x.omega < y.omega; });
  return {a.grid(), product, CustomFilter{std::move(table)}};
}

std::vector<TablePoint> read_filter_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open filter table '" + path + "'");
  std::vector<TablePoint> table;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(t);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    double w = 0.0, re = 0.0, im = 0.0;
    const bool numeric = cells.size() == 3 && parse_double(cells[0], w) && parse_double(cells[1], re) && parse_double(cells[2], im);
    if (!numeric) {
      if (!seen_data && table.empty()) {
        seen_data = true;  // header row
        continue;
      }
      throw ConfigError("filter table '" + path + "' line " + std::to_string(line_no) + ": expected omega,ReH,ImH");
    }
    seen_data = true;
    table.push_back({w, Complex(re, im)});
  }
  if (table.empty()) throw ConfigError("filter table '" + path + "' has no rows");
  return table;
}

double filter_energy_loss(const SpectralFilter& filter, const MeanField& mean_field) {
  require_same_grid(filter.grid(), mean_field.grid, "filter_energy_loss");
  const RealVector power = mean_field.spectrum().samples.cwiseAbs2();
  const double kept = filter.transfer().cwiseAbs2().cwiseProduct(power).sum();
  return 1.0 - kept / power.sum();
}

double calibrate_bandwidth(const SampledGrid& grid, double target_loss) {
  if (!(target_loss > 0.0 && target_loss < 1.0)) throw ArgumentError("target loss must lie in (0, 1)");
  const MeanField mf = mean_field(grid);
  const RealVector power = mf.spectrum().samples.cwiseAbs2();
  const double total = power.sum();
  const RealVector& w = grid.frequencies();
  auto loss = [&](double eta) {
    double kept = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      if (std::abs(w[k]) > eta) continue;
      const double h = 1.0 - (w[k] * w[k]) / (eta * eta);
      kept += h * h * power[k];
    }
    return 1.0 - kept / total;
  };

  double lo = 1e-3 * grid.dw();
  double hi = grid.nyquist();
  if (!(loss(lo) > target_loss && loss(hi) < target_loss)) {
    std::ostringstream msg;
    msg << "no parabolic bandwidth below Nyquist gives loss " << target_loss << " (achievable range " << loss(hi) << " .. "
        << loss(lo) << ")";
    throw ArgumentError(msg.str());
  }
  // loss(eta) is continuous and strictly decreasing.
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (loss(mid) > target_loss ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double output_photon_number(const SpectralFilter& filter, const MeanField& mean_field, const ComplexField& mean) {
  require_same_grid(filter.grid(), mean_field.grid, "output_photon_number");
  require_same_grid(filter.grid(), mean.grid, "output_photon_number");
  const ComplexField mean_spectrum = mean.domain == Domain::time ? forward_transform(mean) : mean;
  const ComplexVector field = mean_field.spectrum().samples + mean_spectrum.samples;
  const double dw = filter.grid().dw();
  return dw / (2.0 * kPi) * filter.transfer().cwiseAbs2().cwiseProduct(field.cwiseAbs2()).sum();
}

FilterOutput apply_filter(const SpectralFilter& filter, const FluctuationState& state, const MeanField& mean_field) {
  require_same_grid(filter.grid(), state.grid, "apply_filter");
  const SampledGrid& grid = state.grid;
  const double n_out = output_photon_number(filter, mean_field, state.mean);

  ComplexField spectrum = forward_transform(state.mean);
  spectrum.samples = spectrum.samples.cwiseProduct(filter.transfer());
  ComplexField mean = inverse_transform(spectrum);

  if (state.moments_vanish()) return {FluctuationState(grid, std::move(mean), state.moment_nn, state.moment_aa), n_out};

  const ComplexMatrix k = fourier_multiplier_matrix(grid, filter.magnitude().cast<Complex>());
  const ComplexMatrix k_t = k.transpose();
  ComplexMatrix nn = k.conjugate() * state.moment_nn * k_t;
  ComplexMatrix aa = k * state.moment_aa * k_t;
  nn = 0.5 * (nn + nn.adjoint()).eval();
  aa = 0.5 * (aa + aa.transpose()).eval();
  return {FluctuationState(grid, std::move(mean), std::move(nn), std::move(aa)), n_out};
}

SpectralFilter realize(const FilterSpec& spec, const SampledGrid& grid) {
  switch (spec.kind) {
    case FilterSpec::Kind::identity:
      return identity_filter(grid);
    case FilterSpec::Kind::parabolic:
      if (spec.eta) return parabolic_filter(grid, *spec.eta);
      if (spec.loss) return parabolic_filter(grid, calibrate_bandwidth(grid, *spec.loss));
      throw ConfigError("parabolic filter needs either 'loss' or 'eta'");
    case FilterSpec::Kind::custom:
      return custom_filter(grid, spec.table);
  }
  throw ConfigError("unknown filter kind");
}

}  // namespace ssq
