#include "kakeya_c.h"

#include <cmath>
#include <cstring>
#include <string>

#include "kakeya/axiomlab.hpp"
#include "kakeya/errors.hpp"
#include "kakeya/geometry.hpp"
#include "kakeya/harness.hpp"
#include "kakeya/svg.hpp"

struct kk_config {
    kakeya::ExperimentConfig impl;
};

struct kk_report {
    kakeya::RunReport impl;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
kk_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return KK_OK;
    } catch (const kakeya::usage_error& e) {
        g_last_error = e.what();
        return KK_ERR_USAGE;
    } catch (const kakeya::input_error& e) {
        g_last_error = e.what();
        return KK_ERR_INVALID_ARGUMENT;
    } catch (const kakeya::resource_error& e) {
        g_last_error = e.what();
        return KK_ERR_RESOURCE;
    } catch (const kakeya::numeric_error& e) {
        g_last_error = e.what();
        return KK_ERR_NUMERIC;
    } catch (const kakeya::sampling_error& e) {
        g_last_error = e.what();
        return KK_ERR_SAMPLING;
    } catch (const kakeya::io_error& e) {
        g_last_error = e.what();
        return KK_ERR_IO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return KK_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return KK_ERR_INTERNAL;
    }
}

} // namespace

extern "C" {

const char* kk_version(void) { return "1.0.0"; }

const char* kk_status_name(kk_status status) {
    switch (status) {
        case KK_OK: return "ok";
        case KK_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case KK_ERR_USAGE: return "usage";
        case KK_ERR_RESOURCE: return "resource";
        case KK_ERR_NUMERIC: return "numeric";
        case KK_ERR_SAMPLING: return "sampling";
        case KK_ERR_IO: return "io";
        case KK_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* kk_last_error(void) { return g_last_error.c_str(); }

kk_status kk_config_load_file(const char* path, kk_config** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new kk_config{kakeya::load_config_file(path)}; });
}

kk_status kk_config_load_json(const char* json_text, kk_config** out) {
    if (!json_text || !out) {
        g_last_error = "null argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new kk_config{kakeya::load_config_json(json_text)}; });
}

kk_status kk_config_set_out_dir(kk_config* config, const char* out_dir) {
    if (!config || !out_dir) {
        g_last_error = "null argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    config->impl.out_dir = out_dir;
    return KK_OK;
}

kk_status kk_config_set_seed(kk_config* config, uint64_t seed) {
    if (!config) {
        g_last_error = "null argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    config->impl.seed = seed;
    return KK_OK;
}

kk_status kk_config_set_workers(kk_config* config, int workers) {
    if (!config || workers < 1 || workers > 256) {
        g_last_error = "workers must be in [1, 256]";
        return KK_ERR_INVALID_ARGUMENT;
    }
    config->impl.workers = workers;
    return KK_OK;
}

void kk_config_free(kk_config* config) { delete config; }

kk_status kk_run(const kk_config* config, const char* subcommand, kk_report** out) {
    if (!config || !subcommand || !out) {
        g_last_error = "null argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new kk_report{kakeya::run(config->impl, subcommand)}; });
}

int kk_report_passed(const kk_report* report) {
    return report && report->impl.pass ? 1 : 0;
}

const char* kk_report_json(const kk_report* report) {
    return report ? report->impl.json_text.c_str() : "";
}

double kk_report_wall_ms(const kk_report* report) {
    return report ? report->impl.wall_ms : 0.0;
}

int kk_report_artifact_count(const kk_report* report) {
    return report ? int(report->impl.artifacts.size()) : 0;
}

const char* kk_report_artifact(const kk_report* report, int index) {
    if (!report || index < 0 || index >= int(report->impl.artifacts.size())) return "";
    return report->impl.artifacts[size_t(index)].c_str();
}

void kk_report_free(kk_report* report) { delete report; }

kk_status kk_emit_plot(const char* csv_path, const char* x_col, const char* y_col, int log_log,
                       char* svg_path_buffer, int buffer_size) {
    if (!csv_path || !x_col || !y_col) {
        g_last_error = "null argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const std::string svg = kakeya::emit_plot(csv_path, x_col, y_col, log_log != 0);
        if (svg_path_buffer && buffer_size > 0) {
            std::strncpy(svg_path_buffer, svg.c_str(), size_t(buffer_size) - 1);
            svg_path_buffer[buffer_size - 1] = '\0';
        }
    });
}

kk_status kk_dist_homogeneous(const int* layers, int layer_count, const double* p,
                              const double* q, int n, double* out) {
    if (!layers || !p || !q || !out || layer_count < 1 || n < 1) {
        g_last_error = "null or empty argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const auto spec =
            kakeya::LayerSpec::create(std::vector<int>(layers, layers + layer_count));
        if (spec.n != n) throw kakeya::input_error("point dimension does not match layers");
        const kakeya::Point pp(p, p + n), qq(q, q + n);
        *out = kakeya::dist_homogeneous(pp, qq, spec);
    });
}

kk_status kk_predicted_bounds(double Q, double S, double T, double theta, double lambda,
                              double alpha, double* bourgain, double* wolff) {
    if (!bourgain || !wolff) {
        g_last_error = "null argument";
        return KK_ERR_INVALID_ARGUMENT;
    }
    *bourgain = (2 * Q - 2 * T + S) / 2 - theta * (S + 2) / 2;
    *wolff = (2 * Q - 2 * T + S - lambda + 2) / 2 - theta * (alpha + 2);
    return KK_OK;
}

} // extern "C"
