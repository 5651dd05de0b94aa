// Batch driver: simulate / validate / modes over a TOML experiment config.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ssq/ssq.h"

namespace {

int exit_code(ssq_status status) {
  switch (status) {
    case SSQ_OK:
      return 0;
    case SSQ_ERROR_CONFIG:
    case SSQ_ERROR_ARGUMENT:
      return 1;
    case SSQ_ERROR_INVARIANT:
    case SSQ_ERROR_INTERNAL:
      return 2;
    case SSQ_ERROR_IO:
      return 3;
  }
  return 2;
}

int fail(ssq_status status) {
  std::fprintf(stderr, "ssq: %s\n", ssq_last_error());
  return exit_code(status);
}

unsigned default_jobs() {
  if (const char* env = std::getenv("SSQ_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

// Writes to `path`, or to stdout when path is empty.
ssq_status emit(const std::string& path, const char* content) {
  if (path.empty()) {
    std::fputs(content, stdout);
    return std::fflush(stdout) == 0 ? SSQ_OK : SSQ_ERROR_IO;
  }
  return ssq_write_file(path.c_str(), content);
}

struct Options {
  std::string config;
  std::string output;
  std::string format;
  unsigned jobs = 0;
};

int simulate(const Options& opt) {
  ssq_config* cfg = nullptr;
  ssq_status st = ssq_config_load(opt.config.c_str(), &cfg);
  if (st != SSQ_OK) return fail(st);
  st = ssq_config_set_output(cfg, opt.output.empty() ? nullptr : opt.output.c_str(),
                             opt.format.empty() ? nullptr : opt.format.c_str());
  ssq_sweep* sweep = nullptr;
  if (st == SSQ_OK) st = ssq_sweep_run(cfg, opt.jobs ? opt.jobs : default_jobs(), &sweep);
  const char* path = nullptr;
  const char* format = nullptr;
  char* text = nullptr;
  if (st == SSQ_OK) st = ssq_config_output(cfg, &path, &format);
  if (st == SSQ_OK) st = ssq_sweep_format(sweep, format, &text);
  if (st == SSQ_OK) st = emit(path, text);
  const int code = st == SSQ_OK ? 0 : fail(st);
  ssq_string_free(text);
  ssq_sweep_free(sweep);
  ssq_config_free(cfg);
  return code;
}

int validate(const Options& opt) {
  ssq_config* cfg = nullptr;
  ssq_status st = ssq_config_load(opt.config.c_str(), &cfg);
  if (st != SSQ_OK) return fail(st);
  ssq_report* report = nullptr;
  char* text = nullptr;
  st = ssq_validate_run(cfg, &report);
  if (st == SSQ_OK) st = ssq_report_format(report, &text);
  if (st == SSQ_OK) st = emit(opt.output, text);
  int code = st == SSQ_OK ? 0 : fail(st);
  if (code == 0 && !ssq_report_passed(report)) {
    std::fprintf(stderr, "ssq: validation failed\n");
    code = exit_code(SSQ_ERROR_INVARIANT);
  }
  ssq_string_free(text);
  ssq_report_free(report);
  ssq_config_free(cfg);
  return code;
}

int modes(const Options& opt) {
  ssq_config* cfg = nullptr;
  ssq_status st = ssq_config_load(opt.config.c_str(), &cfg);
  if (st != SSQ_OK) return fail(st);
  char* text = nullptr;
  st = ssq_modes_dump(cfg, &text);
  if (st == SSQ_OK) st = emit(opt.output, text);
  const int code = st == SSQ_OK ? 0 : fail(st);
  ssq_string_free(text);
  ssq_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearized soliton noise, spectral filtering and photon-number squeezing"};
  app.set_version_flag("--version", std::string(ssq_version()));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config, "Experiment config (TOML)")->required();
    sub->add_option("-o,--output", opt.output, "Output file (default: config output.path, else stdout)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Run the configured length sweep");
  add_common(sim);
  sim->add_option("-f,--format", opt.format, "csv or json (default: config output.format)")
      ->check(CLI::IsMember({"csv", "json"}));
  sim->add_option("-j,--jobs", opt.jobs, "Worker threads (default: $SSQ_JOBS or 1)")->check(CLI::PositiveNumber);

  CLI::App* val = app.add_subcommand("validate", "Run the invariant suite and print a report");
  add_common(val);

  CLI::App* mod = app.add_subcommand("modes", "Dump discrete mode and adjoint profiles as CSV");
  add_common(mod);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (sim->parsed()) return simulate(opt);
  if (val->parsed()) return validate(opt);
  return modes(opt);
}
