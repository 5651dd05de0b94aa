#include "ssq/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ssq/error.hpp"
#include "ssq/measurement.hpp"
#include "ssq/soliton.hpp"

namespace ssq {

namespace {

std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string describe_filter(std::size_t index, const FilterSpec& spec, const SpectralFilter& filter,
                            const MeanField& mf) {
  std::ostringstream out;
  out << "stage " << index << " filter: ";
  switch (spec.kind) {
    case FilterSpec::Kind::identity:
      out << "identity";
      break;
    case FilterSpec::Kind::parabolic:
      out << "parabolic eta = " << g9(std::get<ParabolicFilter>(filter.descriptor()).eta);
      break;
    case FilterSpec::Kind::custom:
      out << "custom table '" << spec.table_path << "'";
      break;
  }
  out << ", mean-field loss = " << g9(filter_energy_loss(filter, mf));
  return out.str();
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config, unsigned jobs) {
  if (!config.sweep) throw ConfigError("config has no [sweep] section");
  const std::vector<double> points = config.sweep->points();
  if (points.empty()) throw ConfigError("sweep is empty");
  for (double p : points)
    if (!(std::isfinite(p) && p >= 0.0)) throw ConfigError("sweep lengths must be finite and non-negative");
  const std::vector<StageSpec>& stages = config.chain.stages;
  const std::size_t k = config.sweep->stage_index;
  if (k >= stages.size()) throw ConfigError("sweep.stage_index does not name a stage");

  const SampledGrid grid = config.grid();
  Cascade engine(grid, config.propagator);

  SweepResult result;
  result.stage_index = k;
  result.config_hash = config_hash(config);
  for (std::size_t i = 0; i < stages.size(); ++i)
    result.notes.push_back(describe_filter(i, stages[i].filter, realize(stages[i].filter, grid), engine.mean_field()));
  if (stages.size() > 2) result.notes.push_back("chains longer than two stages are experimental");

  std::vector<double> xis;
  for (double p : points) xis.push_back(xi_from_soliton_periods(p));
  for (std::size_t i = 0; i < stages.size(); ++i)
    if (i != k) xis.push_back(xi_from_soliton_periods(stages[i].length_soliton_periods));
  engine.maps().prepare(xis);

  ChainProgress prefix;
  for (std::size_t i = 0; i < k; ++i) engine.advance(prefix, stages[i]);
  if (k > 0) {
    const SqueezedInputModel input = engine.next_input(prefix);
    const double weakness = filter_weakness(*prefix.cumulative_filter, engine.mean_field());
    result.notes.push_back("swept stage input: S = " + g9(prefix.outcomes.back().s) + ", r = " + g9(input.r) +
                           ", weighted |h| = " + g9(weakness));
    if (weakness > kWeaknessWarning)
      result.notes.push_back("warning: upstream filter weighted |h| " + g9(weakness) + " exceeds " + g9(kWeaknessWarning));
  }

  auto evaluate = [&](double length) {
    ChainProgress progress = prefix;
    StageSpec swept = stages[k];
    swept.length_soliton_periods = length;
    engine.advance(progress, swept, config.cross_check);
    for (std::size_t j = k + 1; j < stages.size(); ++j) engine.advance(progress, stages[j], config.cross_check);
    return progress.outcomes.back();
  };

  std::vector<std::optional<StageOutcome>> outcomes(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        outcomes[i] = evaluate(points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), points.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t i = 0; i < points.size(); ++i) {
    const StageOutcome& o = *outcomes[i];
    if (!(o.s > 0.0)) throw InvariantError("non-positive squeezing ratio at length " + g9(points[i]));
    result.rows.push_back({points[i], o.s, squeezing_db(o.s), o.cross_check_s});
  }
  return result;
}

std::string format_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "# ssq " << SSQ_VERSION_STRING << "\n"
      << "# config_hash " << result.config_hash << "\n"
      << "# swept stage " << result.stage_index << "\n";
  for (const auto& note : result.notes) out << "# " << note << "\n";
  const bool cross = !result.rows.empty() && result.rows.front().cross_check_s.has_value();
  out << "length_soliton_periods,S,dB" << (cross ? ",S_explicit_state" : "") << "\n";
  for (const auto& row : result.rows) {
    out << g9(row.length_soliton_periods) << ',' << g9(row.s) << ',' << g9(row.db);
    if (cross) out << ',' << (row.cross_check_s ? g9(*row.cross_check_s) : std::string("nan"));
    out << "\n";
  }
  return out.str();
}

std::string format_json(const SweepResult& result) {
  nlohmann::ordered_json doc;
  doc["version"] = SSQ_VERSION_STRING;
  doc["config_hash"] = result.config_hash;
  doc["stage_index"] = result.stage_index;
  doc["notes"] = result.notes;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json r;
    r["length_soliton_periods"] = std::stod(g9(row.length_soliton_periods));
    r["S"] = std::stod(g9(row.s));
    r["dB"] = std::stod(g9(row.db));
    if (row.cross_check_s) r["S_explicit_state"] = std::stod(g9(*row.cross_check_s));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string format_sweep(const SweepResult& result, OutputFormat format) {
  return format == OutputFormat::csv ? format_csv(result) : format_json(result);
}

bool ValidationReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string ValidationReport::format() const {
  std::ostringstream out;
  std::size_t ok = 0;
  for (const auto& c : checks) {
    ok += c.passed;
    char line[256];
    std::snprintf(line, sizeof(line), "%s  %-34s value = %-12.4g threshold = %-9.3g", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.threshold);
    std::string text = line;
    if (!c.detail.empty()) text += "  " + c.detail;
    text.erase(text.find_last_not_of(' ') + 1);
    out << text << "\n";
  }
  out << ok << "/" << checks.size() << " checks passed\n";
  return out.str();
}

ValidationReport run_validate(const ExperimentConfig& config) {
  ValidationReport report;
  auto add = [&](std::string name, double value, double threshold, bool passed, std::string detail = {}) {
    report.checks.push_back({std::move(name), passed, value, threshold, std::move(detail)});
  };
  auto at_most = [&](std::string name, double value, double threshold, std::string detail = {}) {
    add(std::move(name), value, threshold, std::isfinite(value) && value <= threshold, std::move(detail));
  };

  const SampledGrid grid = config.grid();
  Cascade engine(grid, config.propagator);
  const MeanField& mf = engine.mean_field();
  const auto n = static_cast<Eigen::Index>(grid.size());

  {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    ComplexVector v(n);
    for (auto& x : v) x = Complex(normal(rng), normal(rng));
    const ComplexField f(grid, v);
    const ComplexField back = inverse_transform(forward_transform(f));
    at_most("transform round trip", (back.samples - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff(), 1e-12);
    const ComplexField spectrum = mf.spectrum();
    at_most("sech transform at zero", std::abs(spectrum.samples[0] - kPi), 1e-6);
    at_most("parseval", std::abs(energy(spectrum) - energy(mf.envelope)) / energy(mf.envelope), 1e-10);
    at_most("soliton photon number", std::abs(mf.photon_number - 2.0), 1e-8);
  }

  std::optional<ModeSet> modes;
  try {
    modes = discrete_modes(grid);
    at_most("mode gram matrix", (modes->gram() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-6);
  } catch (const InvariantError& e) {
    add("mode gram matrix", std::numeric_limits<double>::quiet_NaN(), 1e-6, false, e.what());
  }
  if (modes) {
    double worst = 0.0;
    for (double omega : {0.5, 1.0, 2.0}) {
      const ContinuumPair pair = modes->continuum(omega);
      for (Mode m : kDiscreteModes) {
        worst = std::max(worst, std::abs(inner_product_re(pair.symmetric, modes->adjoint(m))));
        worst = std::max(worst, std::abs(inner_product_re(pair.antisymmetric, modes->adjoint(m))));
      }
    }
    at_most("continuum orthogonality", worst, 1e-4, "omega in {0.5, 1, 2}");
  }

  const double xi_validate = xi_from_soliton_periods(config.validate.backend_periods);
  std::set<double> lengths{config.validate.backend_periods};
  for (const auto& s : config.chain.stages) lengths.insert(s.length_soliton_periods);

  {
    double worst = 0.0;
    for (double L : lengths) worst = std::max(worst, engine.maps().at(xi_from_soliton_periods(L))->symplectic_residual());
    at_most("symplectic residual", worst, 1e-8, "stage and validation lengths");
  }
  {
    PropagatorOptions exact = config.propagator;
    exact.backend = Backend::matrix_exponential;
    const BogoliubovMap whole = propagate_map(grid, xi_validate, exact);
    const BogoliubovMap half = propagate_map(grid, 0.5 * xi_validate, exact);
    at_most("semigroup composition", max_elementwise_difference(whole, half.then(half)), 1e-8);

    PropagatorOptions stepped = config.propagator;
    stepped.backend = Backend::stepped_rk4;
    const BogoliubovMap rk4 = propagate_map(grid, xi_validate, stepped);
    at_most("backend equivalence", max_elementwise_difference(whole, rk4), 1e-6,
            "at " + g9(config.validate.backend_periods) + " periods, step " + g9(config.propagator.rk4_step));
    at_most("rk4 symplectic residual", rk4.symplectic_residual(), 1e-8);
  }

  if (modes) {
    const ModeEvolutionReport evo = mode_evolution_check(*modes, *engine.maps().at(xi_validate));
    at_most("mode conservation", evo.conservation_residual, 1e-4,
            "phase drift " + g9(evo.phase_drift_rate) + ", timing drift " + g9(evo.timing_drift_rate));
  }

  const StageSpec& first = config.chain.stages.front();
  const SpectralFilter first_filter = realize(first.filter, grid);
  {
    const auto map = engine.maps().at(xi_from_soliton_periods(first.length_soliton_periods));
    const FluctuationState state = apply_map(*map, FluctuationState::vacuum(grid));
    add("physicality after fiber", state.physicality_margin(), -1e-8, state.physicality_margin() >= -1e-8,
        "smallest eigenvalue, stage 0");
    const FilterOutput filtered = apply_filter(first_filter, state, mf);
    const double margin = filtered.state.physicality_margin();
    add("physicality after filter", margin, -1e-8, margin >= -1e-8, "smallest eigenvalue, stage 0");
  }
  {
    double worst = 0.0;
    for (const auto& s : config.chain.stages)
      worst = std::max(worst, std::abs(squeezing(FluctuationState::vacuum(grid), realize(s.filter, grid), mf) - 1.0));
    at_most("vacuum squeezing", worst, 1e-12);
    double worst_loss = 0.0;
    for (const auto& s : config.chain.stages)
      if (s.filter.kind == FilterSpec::Kind::parabolic && s.filter.loss)
        worst_loss = std::max(worst_loss, std::abs(filter_energy_loss(realize(s.filter, grid), mf) - *s.filter.loss));
    at_most("filter calibration", worst_loss, 1e-6);
  }
  {
    const SpectralFilter identity = identity_filter(grid);
    double worst = 0.0;
    for (double L : {0.5, 1.0, 2.0, 3.0}) worst = std::max(worst, std::abs(engine.sss_squeezing(L, identity) - 1.0));
    at_most("identity-filter conservation", worst, 1e-4, "lengths 0.5, 1, 2, 3");
  }
  {
    double worst = 0.0;
    const SqueezedInputModel coherent = SqueezedInputModel::coherent(grid);
    for (const auto& s : config.chain.stages) {
      const SpectralFilter f = realize(s.filter, grid);
      worst = std::max(worst, std::abs(engine.run_dss_point(coherent, s.length_soliton_periods, f).s -
                                       engine.sss_squeezing(s.length_soliton_periods, f)));
    }
    at_most("dss degenerate case", worst, 1e-8, "r = 0, zero mean perturbation");
  }
  {
    const double L = std::min(3.0, *lengths.rbegin());
    at_most("boundary energy", boundary_energy_fraction(*engine.maps().at(xi_from_soliton_periods(L))), 1e-6,
            "at " + g9(L) + " periods");
  }
  if (config.chain.stages.size() >= 2) {
    const SqueezedInputModel input = engine.characterize(first);
    const StageSpec& second = config.chain.stages[1];
    const SpectralFilter f2 = realize(second.filter, grid);
    const DssPoint point = engine.run_dss_point(input, second.length_soliton_periods, f2, true);
    const double diff = std::abs(squeezing_db(point.s) - squeezing_db(*point.cross_check_s));
    add("dss explicit-state difference", diff, std::numeric_limits<double>::infinity(), true,
        "reported only; kernel " + g9(squeezing_db(point.s)) + " dB, explicit state " +
            g9(squeezing_db(*point.cross_check_s)) + " dB");
  }
  return report;
}

std::string dump_modes(const ExperimentConfig& config) {
  const SampledGrid grid = config.grid();
  const ModeSet modes = discrete_modes(grid);
  std::ostringstream out;
  out << "# discrete modes f_i and adjoints adj_i on the configured grid, i in {n, p, tau, theta}\n";
  out << "tau";
  for (const char* prefix : {"f", "adj"})
    for (Mode m : kDiscreteModes) out << ',' << prefix << '_' << to_string(m) << "_re," << prefix << '_' << to_string(m) << "_im";
  out << "\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out << g9(grid.time(j));
    for (int which = 0; which < 2; ++which)
      for (Mode m : kDiscreteModes) {
        const Complex v = (which == 0 ? modes.mode(m) : modes.adjoint(m)).samples[static_cast<Eigen::Index>(j)];
        out << ',' << g9(v.real()) << ',' << g9(v.imag());
      }
    out << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace ssq
