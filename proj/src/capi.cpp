#include "ssq/ssq.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "ssq/cascade.hpp"
#include "ssq/config.hpp"
#include "ssq/error.hpp"
#include "ssq/experiment.hpp"

struct ssq_config {
  ssq::ExperimentConfig value;
};

struct ssq_sweep {
  ssq::SweepResult value;
};

struct ssq_report {
  ssq::ValidationReport value;
};

struct ssq_engine {
  explicit ssq_engine(ssq::SampledGrid grid) : cascade(std::move(grid)) {}
  ssq::Cascade cascade;
};

namespace {

thread_local std::string last_error;

ssq_status status_of(ssq::ErrorKind kind) {
  switch (kind) {
    case ssq::ErrorKind::argument:
      return SSQ_ERROR_ARGUMENT;
    case ssq::ErrorKind::config:
      return SSQ_ERROR_CONFIG;
    case ssq::ErrorKind::invariant:
      return SSQ_ERROR_INVARIANT;
    case ssq::ErrorKind::io:
      return SSQ_ERROR_IO;
  }
  return SSQ_ERROR_INTERNAL;
}

template <class F>
ssq_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SSQ_OK;
  } catch (const ssq::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SSQ_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SSQ_ERROR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SSQ_ERROR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw ssq::ArgumentError(std::string(what) + " must not be NULL");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ssq::SpectralFilter filter_for(const ssq::SampledGrid& grid, double loss) {
  if (loss == 0.0) return ssq::identity_filter(grid);
  return ssq::parabolic_filter(grid, ssq::calibrate_bandwidth(grid, loss));
}

}  // namespace

extern "C" {

const char* ssq_version(void) { return SSQ_VERSION_STRING; }

const char* ssq_last_error(void) { return last_error.c_str(); }

void ssq_string_free(char* s) { std::free(s); }

ssq_status ssq_config_load(const char* path, ssq_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto cfg = std::make_unique<ssq_config>();
    cfg->value = ssq::load_config(path);
    *out = cfg.release();
  });
}

ssq_status ssq_config_parse(const char* text, const char* base_dir, ssq_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    auto cfg = std::make_unique<ssq_config>();
    cfg->value = ssq::parse_config(text, base_dir ? base_dir : ".");
    *out = cfg.release();
  });
}

ssq_status ssq_config_serialize(const ssq_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = duplicate(ssq::serialize_config(config->value));
  });
}

ssq_status ssq_config_set_output(ssq_config* config, const char* path, const char* format) {
  return guarded([&] {
    require(config, "config");
    if (format) config->value.output.format = ssq::output_format_from_string(format);
    if (path) config->value.output.path = path;
  });
}

ssq_status ssq_config_output(const ssq_config* config, const char** path, const char** format) {
  return guarded([&] {
    require(config, "config");
    if (path) *path = config->value.output.path.c_str();
    if (format) *format = config->value.output.format == ssq::OutputFormat::csv ? "csv" : "json";
  });
}

void ssq_config_free(ssq_config* config) { delete config; }

ssq_status ssq_sweep_run(const ssq_config* config, unsigned jobs, ssq_sweep** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    auto sweep = std::make_unique<ssq_sweep>();
    sweep->value = ssq::run_sweep(config->value, jobs);
    *out = sweep.release();
  });
}

size_t ssq_sweep_size(const ssq_sweep* sweep) { return sweep ? sweep->value.rows.size() : 0; }

ssq_status ssq_sweep_row(const ssq_sweep* sweep, size_t index, double* length_soliton_periods, double* s, double* db) {
  return guarded([&] {
    require(sweep, "sweep");
    if (index >= sweep->value.rows.size()) throw ssq::ArgumentError("sweep row index out of range");
    const auto& row = sweep->value.rows[index];
    if (length_soliton_periods) *length_soliton_periods = row.length_soliton_periods;
    if (s) *s = row.s;
    if (db) *db = row.db;
  });
}

ssq_status ssq_sweep_format(const ssq_sweep* sweep, const char* format, char** out) {
  return guarded([&] {
    require(sweep, "sweep");
    require(format, "format");
    require(out, "out");
    *out = duplicate(ssq::format_sweep(sweep->value, ssq::output_format_from_string(format)));
  });
}

void ssq_sweep_free(ssq_sweep* sweep) { delete sweep; }

ssq_status ssq_validate_run(const ssq_config* config, ssq_report** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    auto report = std::make_unique<ssq_report>();
    report->value = ssq::run_validate(config->value);
    *out = report.release();
  });
}

int ssq_report_passed(const ssq_report* report) { return report && report->value.passed() ? 1 : 0; }

size_t ssq_report_size(const ssq_report* report) { return report ? report->value.checks.size() : 0; }

ssq_status ssq_report_check(const ssq_report* report, size_t index, const char** name, int* passed, double* value,
                            double* threshold) {
  return guarded([&] {
    require(report, "report");
    if (index >= report->value.checks.size()) throw ssq::ArgumentError("check index out of range");
    const auto& c = report->value.checks[index];
    if (name) *name = c.name.c_str();
    if (passed) *passed = c.passed ? 1 : 0;
    if (value) *value = c.value;
    if (threshold) *threshold = c.threshold;
  });
}

ssq_status ssq_report_format(const ssq_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = duplicate(report->value.format());
  });
}

void ssq_report_free(ssq_report* report) { delete report; }

ssq_status ssq_modes_dump(const ssq_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = duplicate(ssq::dump_modes(config->value));
  });
}

ssq_status ssq_write_file(const char* path, const char* content) {
  return guarded([&] {
    require(path, "path");
    require(content, "content");
    ssq::write_text_file(path, content);
  });
}

ssq_status ssq_engine_create(size_t n_points, double window, ssq_engine** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ssq_engine(ssq::make_grid(n_points, window));
  });
}

ssq_status ssq_engine_sss(ssq_engine* engine, double length, double loss, double* s) {
  return guarded([&] {
    require(engine, "engine");
    require(s, "s");
    const auto& grid = engine->cascade.grid();
    *s = engine->cascade.sss_squeezing(length, filter_for(grid, loss));
  });
}

ssq_status ssq_engine_dss(ssq_engine* engine, double length1, double length2, double loss, double* s, double* r) {
  return guarded([&] {
    require(engine, "engine");
    require(s, "s");
    const auto& grid = engine->cascade.grid();
    const ssq::SpectralFilter filter = filter_for(grid, loss);
    const ssq::SqueezedInputModel input{
        ssq::extract_r(engine->cascade.sss_squeezing(length1, filter)),
        ssq::first_stage_mean_perturbation(filter, engine->cascade.mean_field())};
    *s = engine->cascade.run_dss_point(input, length2, filter).s;
    if (r) *r = input.r;
  });
}

void ssq_engine_free(ssq_engine* engine) { delete engine; }

ssq_status ssq_squeezing_db(double s, double* db) {
  return guarded([&] {
    require(db, "db");
    *db = ssq::squeezing_db(s);
  });
}

}  // extern "C"
