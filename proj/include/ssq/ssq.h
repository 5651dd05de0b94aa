/* C interface to the soliton squeezing simulator. */
#ifndef SSQ_SSQ_H
#define SSQ_SSQ_H

#include <stddef.h>

#if defined(SSQ_BUILDING_LIBRARY)
#define SSQ_API __attribute__((visibility("default")))
#else
#define SSQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssq_status {
  SSQ_OK = 0,
  SSQ_ERROR_CONFIG = 1,
  SSQ_ERROR_INVARIANT = 2,
  SSQ_ERROR_IO = 3,
  SSQ_ERROR_ARGUMENT = 4,
  SSQ_ERROR_INTERNAL = 5
} ssq_status;

typedef struct ssq_config ssq_config;
typedef struct ssq_sweep ssq_sweep;
typedef struct ssq_report ssq_report;
typedef struct ssq_engine ssq_engine;

SSQ_API const char* ssq_version(void);

/* Message of the last failed call on this thread; empty after a successful call. */
SSQ_API const char* ssq_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
SSQ_API void ssq_string_free(char* s);

/* Configuration */
SSQ_API ssq_status ssq_config_load(const char* path, ssq_config** out);
SSQ_API ssq_status ssq_config_parse(const char* text, const char* base_dir, ssq_config** out);
SSQ_API ssq_status ssq_config_serialize(const ssq_config* config, char** out);
/* Either argument may be NULL to keep the configured value. format is "csv" or "json". */
SSQ_API ssq_status ssq_config_set_output(ssq_config* config, const char* path, const char* format);
/* Borrowed pointers, valid until the config is modified or freed. */
SSQ_API ssq_status ssq_config_output(const ssq_config* config, const char** path, const char** format);
SSQ_API void ssq_config_free(ssq_config* config);

/* Sweeps */
SSQ_API ssq_status ssq_sweep_run(const ssq_config* config, unsigned jobs, ssq_sweep** out);
SSQ_API size_t ssq_sweep_size(const ssq_sweep* sweep);
SSQ_API ssq_status ssq_sweep_row(const ssq_sweep* sweep, size_t index, double* length_soliton_periods, double* s,
                                 double* db);
SSQ_API ssq_status ssq_sweep_format(const ssq_sweep* sweep, const char* format, char** out);
SSQ_API void ssq_sweep_free(ssq_sweep* sweep);

/* Validation suite */
SSQ_API ssq_status ssq_validate_run(const ssq_config* config, ssq_report** out);
SSQ_API int ssq_report_passed(const ssq_report* report);
SSQ_API size_t ssq_report_size(const ssq_report* report);
/* name is borrowed from the report. */
SSQ_API ssq_status ssq_report_check(const ssq_report* report, size_t index, const char** name, int* passed,
                                    double* value, double* threshold);
SSQ_API ssq_status ssq_report_format(const ssq_report* report, char** out);
SSQ_API void ssq_report_free(ssq_report* report);

/* Mode profiles as CSV */
SSQ_API ssq_status ssq_modes_dump(const ssq_config* config, char** out);

SSQ_API ssq_status ssq_write_file(const char* path, const char* content);

/* Direct evaluation on one grid with the matrix-exponential propagator. Lengths
 * are in soliton periods; loss is the mean-field energy loss of a parabolic
 * filter (0 selects the identity filter). */
SSQ_API ssq_status ssq_engine_create(size_t n_points, double window, ssq_engine** out);
SSQ_API ssq_status ssq_engine_sss(ssq_engine* engine, double length, double loss, double* s);
/* Both stages use the same filter; r receives the first stage's squeezing parameter. */
SSQ_API ssq_status ssq_engine_dss(ssq_engine* engine, double length1, double length2, double loss, double* s,
                                  double* r);
SSQ_API void ssq_engine_free(ssq_engine* engine);

SSQ_API ssq_status ssq_squeezing_db(double s, double* db);

#ifdef __cplusplus
}
#endif

#endif
