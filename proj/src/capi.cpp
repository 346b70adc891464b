// C binding over the pipeline. Exceptions are converted to status codes at
// the boundary; the message of the most recent failure is kept per thread
// for usqt_last_error().
#include "usqt.h"

#include "pipeline.hpp"

#include <cstdio>
#include <cstring>
#include <new>
#include <string>
#include <utility>

struct usqt_config {
    usqt::PipelineConfig impl;
};

struct usqt_result {
    usqt::StageReport impl;
};

namespace {

thread_local std::string g_last_error;

int set_error(int status, const std::string& message) {
    g_last_error = message;
    return status;
}

int ok() {
    g_last_error.clear();
    return USQT_OK;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return ok();
    } catch (const usqt::Error& e) {
        return set_error(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(USQT_ERR_OUT_OF_MEMORY, "out of memory");
    } catch (const std::exception& e) {
        return set_error(USQT_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(USQT_ERR_INTERNAL, "unknown internal failure");
    }
}

} // namespace

extern "C" {

const char* usqt_version(void) { return "1.0.0"; }

const char* usqt_last_error(void) { return g_last_error.c_str(); }

const char* usqt_status_name(int status) {
    switch (status) {
    case USQT_OK: return "ok";
    case USQT_ERR_ARGUMENT: return "argument";
    case USQT_ERR_PARAM_DOMAIN: return "param_domain";
    case USQT_ERR_DEGENERATE_DATA: return "degenerate_data";
    case USQT_ERR_CONVERGENCE: return "convergence";
    case USQT_ERR_FORMAT: return "format";
    case USQT_ERR_IO: return "io";
    case USQT_ERR_CONFIG: return "config";
    case USQT_ERR_INTERNAL: return "internal";
    case USQT_ERR_OUT_OF_MEMORY: return "out_of_memory";
    default: return "unknown";
    }
}

usqt_config* usqt_config_new(void) {
    usqt_config* config = new (std::nothrow) usqt_config();
    if (!config) {
        set_error(USQT_ERR_OUT_OF_MEMORY, "cannot allocate configuration");
        return nullptr;
    }
    ok();
    return config;
}

void usqt_config_free(usqt_config* config) { delete config; }

int usqt_config_load_file(usqt_config* config, const char* path) {
    if (!config || !path)
        return set_error(USQT_ERR_ARGUMENT,
                         "usqt_config_load_file requires a config and a path");
    return guarded([&] {
        usqt::PipelineConfig loaded = usqt::load_config(path);
        config->impl = std::move(loaded);
    });
}

int usqt_config_set(usqt_config* config, const char* key, const char* value) {
    if (!config || !key || !value)
        return set_error(USQT_ERR_ARGUMENT,
                         "usqt_config_set requires a config, key, and value");
    return guarded(
        [&] { usqt::apply_config_key(config->impl, key, value, "usqt_config_set"); });
}

int usqt_config_set_flag(usqt_config* config, const char* flag,
                         const char* value) {
    if (!config || !flag || !value)
        return set_error(USQT_ERR_ARGUMENT,
                         "usqt_config_set_flag requires a config, flag, and value");
    return guarded([&] { usqt::apply_flag(config->impl, flag, value); });
}

int usqt_config_validate(const usqt_config* config) {
    if (!config)
        return set_error(USQT_ERR_ARGUMENT,
                         "usqt_config_validate requires a config");
    return guarded([&] { usqt::validate_config(config->impl); });
}

int usqt_config_hash(const usqt_config* config, char* buffer, size_t capacity) {
    if (!config || !buffer)
        return set_error(USQT_ERR_ARGUMENT,
                         "usqt_config_hash requires a config and a buffer");
    if (capacity < 17)
        return set_error(USQT_ERR_ARGUMENT,
                         "usqt_config_hash requires a buffer of at least 17 bytes");
    return guarded([&] {
        const std::string digest = usqt::config_hash(config->impl);
        std::snprintf(buffer, capacity, "%s", digest.c_str());
    });
}

int usqt_run(const usqt_config* config, const char* command,
             usqt_result** out_result) {
    if (out_result) *out_result = nullptr;
    if (!config || !command || !out_result)
        return set_error(USQT_ERR_ARGUMENT,
                         "usqt_run requires a config, a command, and a result slot");
    return guarded([&] {
        const std::string cmd = command;
        usqt::StageReport report;
        if (cmd == "simulate")
            report = usqt::run_simulate(config->impl);
        else if (cmd == "envelope")
            report = usqt::run_envelope(config->impl);
        else if (cmd == "features")
            report = usqt::run_features(config->impl);
        else if (cmd == "evaluate")
            report = usqt::run_evaluate(config->impl);
        else if (cmd == "all")
            report = usqt::run_all(config->impl);
        else
            usqt::fail(usqt::ErrorCode::argument,
                       "unknown command '" + cmd +
                           "' (expected simulate, envelope, features, "
                           "evaluate, or all)");
        usqt_result* result = new usqt_result{std::move(report)};
        *out_result = result;
    });
}

int usqt_result_processed(const usqt_result* result) {
    return result ? result->impl.processed : 0;
}

int usqt_result_failed(const usqt_result* result) {
    return result ? result->impl.failed : 0;
}

size_t usqt_result_output_count(const usqt_result* result) {
    return result ? result->impl.outputs.size() : 0;
}

const char* usqt_result_output(const usqt_result* result, size_t index) {
    if (!result || index >= result->impl.outputs.size()) return nullptr;
    return result->impl.outputs[index].c_str();
}

size_t usqt_result_failure_count(const usqt_result* result) {
    return result ? result->impl.failures.size() : 0;
}

const char* usqt_result_failure(const usqt_result* result, size_t index) {
    if (!result || index >= result->impl.failures.size()) return nullptr;
    return result->impl.failures[index].c_str();
}

void usqt_result_free(usqt_result* result) { delete result; }

} // extern "C"
