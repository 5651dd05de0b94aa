// Acceptance criteria on the shipped configs: one PASS/FAIL line per criterion.
// Usage: acceptance <config-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "ssq/cascade.hpp"
#include "ssq/error.hpp"
#include "ssq/experiment.hpp"

using namespace ssq;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s  criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

const SweepRow& peak(const SweepResult& r) {
  return *std::max_element(r.rows.begin(), r.rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.db < b.db; });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StageSpec stage_at(const StageSpec& s, double length) {
  StageSpec out = s;
  out.length_soliton_periods = length;
  return out;
}

// (SSS dB at 3 periods, DSS dB at 3+3 periods) for a grid.
std::pair<double, double> reference_points(std::size_t n, double window, const ExperimentConfig& dss) {
  Cascade engine(make_grid(n, window), dss.propagator);
  const StageSpec& first = dss.chain.stages.at(0);
  const StageSpec& second = dss.chain.stages.at(1);
  const double sss = engine.sss_squeezing(3.0, realize(first.filter, engine.grid()));
  const SqueezedInputModel in = engine.characterize(stage_at(first, 3.0));
  const double d = engine.run_dss_point(in, 3.0, realize(second.filter, engine.grid())).s;
  return {squeezing_db(sss), squeezing_db(d)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <config-dir>\n");
    return 2;
  }
  const std::string dir = argv[1];
  const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  try {
    const ExperimentConfig sss_cfg = load_config(dir + "/sss.toml");
    const ExperimentConfig dss_cfg = load_config(dir + "/dss.toml");

    // 1. SSS sweep
    auto t0 = std::chrono::steady_clock::now();
    const SweepResult sss = run_sweep(sss_cfg, jobs);
    const double sss_time = seconds_since(t0);
    const SweepRow& sp = peak(sss);
    report(1, std::abs(sp.length_soliton_periods - 3.0) <= 0.5 && std::abs(sp.db - 2.8) <= 0.5,
           fmt("SSS peak %.4g dB at %.4g periods (want 2.8 +- 0.5 dB at 3 +- 0.5); sweep of %.0f points took %.1f s",
               sp.db, sp.length_soliton_periods, static_cast<double>(sss.rows.size()), sss_time));

    // 2. DSS sweep
    Cascade engine(dss_cfg.grid(), dss_cfg.propagator);
    const SqueezedInputModel input = engine.characterize(dss_cfg.chain.stages.at(0));
    t0 = std::chrono::steady_clock::now();
    const SweepResult dss = run_sweep(dss_cfg, jobs);
    const double dss_time = seconds_since(t0);
    const SweepRow& dp = peak(dss);
    report(2,
           std::abs(input.r - 0.32) <= 0.01 && std::abs(dp.length_soliton_periods - 3.0) <= 0.5 &&
               std::abs(dp.db - 6.1) <= 0.8,
           fmt("r = %.4f (want 0.32 +- 0.01); DSS peak %.4g dB at %.4g periods (want 6.1 +- 0.8 at 3 +- 0.5); %.1f s",
               input.r, dp.db, dp.length_soliton_periods, dss_time));

    // 3. Identity filter conserves photon-number noise
    {
      const SpectralFilter id = identity_filter(engine.grid());
      double worst = 0.0;
      for (double L : {0.5, 1.0, 2.0, 3.0}) worst = std::max(worst, std::abs(engine.sss_squeezing(L, id) - 1.0));
      report(3, worst <= 1e-4, fmt("identity filter max |S - 1| = %.3g over L in {0.5, 1, 2, 3} (want <= 1e-4)", worst));
    }

    // 4. Symplectic maps; backend agreement
    {
      std::vector<double> lengths = sss_cfg.sweep->points();
      const std::vector<double> more = dss_cfg.sweep->points();
      lengths.insert(lengths.end(), more.begin(), more.end());
      lengths.push_back(0.5);
      double worst = 0.0;
      for (double L : lengths) worst = std::max(worst, engine.maps().at(xi_from_soliton_periods(L))->symplectic_residual());
      const double xi = 1.5 * kPi;
      const BogoliubovMap& expm = *engine.maps().at(xi);
      const BogoliubovMap rk4 = propagate_map(engine.grid(), xi, {Backend::stepped_rk4, dss_cfg.propagator.rk4_step});
      const double diff = max_elementwise_difference(expm, rk4);
      worst = std::max(worst, rk4.symplectic_residual());
      report(4, worst <= 1e-8 && diff <= 1e-6,
             fmt("max symplectic residual %.3g over the sweep maps and the RK4 map (want <= 1e-8); RK4 vs expm at 3pi/2: "
                 "%.3g (want <= 1e-6)",
                 worst, diff));
    }

    // 5. Discrete modes
    {
      const ModeSet modes = discrete_modes(engine.grid());
      const double gram = (modes.gram() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff();
      double worst = 0.0;
      for (double L : {0.5, 1.0, 3.0, 8.0})
        worst = std::max(worst, mode_evolution_check(modes, *engine.maps().at(xi_from_soliton_periods(L))).conservation_residual);
      report(5, gram <= 1e-6 && worst <= 1e-4,
             fmt("Gram deviation %.3g (want <= 1e-6); V_n, V_p drift %.3g over L in {0.5, 1, 3, 8} (want <= 1e-4)", gram,
                 worst));
    }

    // 6. Degenerate DSS reproduces SSS
    {
      const SpectralFilter filter = realize(dss_cfg.chain.stages.at(1).filter, engine.grid());
      const SqueezedInputModel none = SqueezedInputModel::coherent(engine.grid());
      double worst = 0.0;
      for (double L : dss_cfg.sweep->points())
        worst = std::max(worst, std::abs(engine.run_dss_point(none, L, filter).s - engine.sss_squeezing(L, filter)));
      report(6, worst <= 1e-8, fmt("max |S_DSS(r=0, da0=0) - S_SSS| = %.3g over the sweep (want <= 1e-8)", worst));
    }

    // 7. Grid convergence
    const auto coarse = reference_points(dss_cfg.chain.n_points, dss_cfg.chain.window, dss_cfg);
    {
      t0 = std::chrono::steady_clock::now();
      const auto fine = reference_points(2 * dss_cfg.chain.n_points, 2 * dss_cfg.chain.window, dss_cfg);
      const double d1 = std::abs(fine.first - coarse.first);
      const double d2 = std::abs(fine.second - coarse.second);
      report(7, d1 < 0.05 && d2 < 0.05,
             fmt("dB change from doubled grid: SSS(3) %.3g, DSS(3,3) %.3g (want < 0.05); fine grid took %.1f s", d1, d2,
                 seconds_since(t0)));
    }

    // 8. Dual stage at least doubles the single-stage squeezing
    report(8, coarse.second >= 2.0 * coarse.first - 0.5,
           fmt("DSS(3,3) %.4g dB vs 2 x SSS(3) - 0.5 = %.4g dB", coarse.second, 2.0 * coarse.first - 0.5));
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    return 1;
  }

  std::printf("%s\n", failures ? "acceptance FAILED" : "all acceptance criteria passed");
  return failures ? 1 : 0;
}
