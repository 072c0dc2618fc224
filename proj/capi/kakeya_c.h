/* C API of the kakeya experiment library: opaque handles plus status codes.
 * Every function returns KK_OK on success; kk_last_error() carries the detail
 * message of the most recent failure on the calling thread. */
#ifndef KAKEYA_C_H
#define KAKEYA_C_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kk_status {
    KK_OK = 0,
    KK_ERR_INVALID_ARGUMENT = 1, /* bad inputs, dimension mismatches */
    KK_ERR_USAGE = 2,            /* malformed config, unknown subcommand */
    KK_ERR_RESOURCE = 3,         /* a configured cap was exceeded */
    KK_ERR_NUMERIC = 4,          /* degenerate numerics */
    KK_ERR_SAMPLING = 5,         /* all Monte Carlo draws discarded */
    KK_ERR_IO = 6,               /* file system failures */
    KK_ERR_INTERNAL = 7
} kk_status;

typedef struct kk_config kk_config;
typedef struct kk_report kk_report;

const char* kk_version(void);
const char* kk_status_name(kk_status status);
/* Message of the last failure on this thread; empty string if none. */
const char* kk_last_error(void);

kk_status kk_config_load_file(const char* path, kk_config** out);
kk_status kk_config_load_json(const char* json_text, kk_config** out);
kk_status kk_config_set_out_dir(kk_config* config, const char* out_dir);
kk_status kk_config_set_seed(kk_config* config, uint64_t seed);
kk_status kk_config_set_workers(kk_config* config, int workers);
void kk_config_free(kk_config* config);

/* Subcommands: "axioms" | "maximal" | "dimension" | "bush" | "arith". */
kk_status kk_run(const kk_config* config, const char* subcommand, kk_report** out);
/* 1 when every checked invariant passed. */
int kk_report_passed(const kk_report* report);
/* Pretty-printed report JSON; owned by the report handle. */
const char* kk_report_json(const kk_report* report);
/* Wall time of the run in milliseconds. */
double kk_report_wall_ms(const kk_report* report);
int kk_report_artifact_count(const kk_report* report);
const char* kk_report_artifact(const kk_report* report, int index);
void kk_report_free(kk_report* report);

/* Scatter plot of y_col against x_col of a CSV artifact; writes an SVG next
 * to it. svg_path_buffer receives the path (truncated to buffer_size). */
kk_status kk_emit_plot(const char* csv_path, const char* x_col, const char* y_col, int log_log,
                       char* svg_path_buffer, int buffer_size);

/* Direct computational entry points. */
kk_status kk_dist_homogeneous(const int* layers, int layer_count, const double* p,
                              const double* q, int n, double* out);
kk_status kk_predicted_bounds(double Q, double S, double T, double theta, double lambda,
                              double alpha, double* bourgain, double* wolff);

#ifdef __cplusplus
}
#endif

#endif /* KAKEYA_C_H */
