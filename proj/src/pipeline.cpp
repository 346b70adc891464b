#include "pipeline.hpp"

#include "envelope.hpp"
#include "fitting.hpp"
#include "wavelet.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>

namespace usqt {

namespace fs = std::filesystem;

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void bad_key_value(const std::string& origin, const std::string& key,
                                const std::string& value,
                                const std::string& expected) {
    fail(ErrorCode::config, origin + ": key '" + key + "' has invalid value '" +
                                value + "' (expected " + expected + ")");
}

long parse_int_value(const std::string& origin, const std::string& key,
                     const std::string& value, long lo, long hi) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (value.empty() || errno != 0 || end != value.c_str() + value.size())
        bad_key_value(origin, key, value, "an integer");
    if (v < lo || v > hi)
        bad_key_value(origin, key, value,
                      "an integer in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    return v;
}

uint64_t parse_u64_value(const std::string& origin, const std::string& key,
                         const std::string& value) {
    errno = 0;
    char* end = nullptr;
    if (value.empty() || value[0] == '-')
        bad_key_value(origin, key, value, "an unsigned integer");
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (errno != 0 || end != value.c_str() + value.size())
        bad_key_value(origin, key, value, "an unsigned integer");
    return uint64_t(v);
}

double parse_real_value(const std::string& origin, const std::string& key,
                        const std::string& value, double lo, double hi) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || errno != 0 || end != value.c_str() + value.size() ||
        !std::isfinite(v))
        bad_key_value(origin, key, value, "a finite real");
    if (v < lo || v > hi)
        bad_key_value(origin, key, value,
                      "a real in [" + fmt_real(lo) + ", " + fmt_real(hi) + "]");
    return v;
}

std::vector<ModelKind> parse_model_list(const std::string& origin,
                                        const std::string& key,
                                        const std::string& value) {
    std::vector<ModelKind> kinds;
    size_t pos = 0;
    while (pos <= value.size()) {
        size_t comma = value.find(',', pos);
        if (comma == std::string::npos) comma = value.size();
        const std::string token = trim(value.substr(pos, comma - pos));
        pos = comma + 1;
        if (token.empty())
            bad_key_value(origin, key, value,
                          "a comma-separated list of model names");
        ModelKind kind;
        try {
            kind = model_from_name(token);
        } catch (const Error&) {
            fail(ErrorCode::config, origin + ": unknown model '" + token +
                                        "' for key '" + key + "'");
        }
        for (ModelKind seen : kinds)
            if (seen == kind)
                fail(ErrorCode::config, origin + ": duplicate model '" + token +
                                            "' for key '" + key + "'");
        kinds.push_back(kind);
        if (comma == value.size()) break;
    }
    if (kinds.empty())
        bad_key_value(origin, key, value, "a comma-separated list of model names");
    return kinds;
}

void set_periodic_spacing(PhantomSpec& spec, const std::string& origin,
                          const std::string& key, const std::string& value) {
    const double v = parse_real_value(origin, key, value, 0.0, 1e9);
    if (v == 0.0) {
        spec.periodic_spacing.reset();
    } else if (v < 2.0) {
        bad_key_value(origin, key, value, "0 (off) or a spacing of at least 2");
    } else {
        spec.periodic_spacing = v;
    }
}

const char* scheme_token(CvScheme scheme) {
    return scheme == CvScheme::leave_one_group_out ? "logo" : "kfold";
}

const char* scheme_label(CvScheme scheme) {
    return scheme == CvScheme::leave_one_group_out ? "leave-one-group-out"
                                                   : "k-fold";
}

std::string model_list_string(const std::vector<ModelKind>& kinds) {
    std::string out;
    for (size_t i = 0; i < kinds.size(); ++i) {
        if (i) out += ',';
        out += model_name(kinds[i]);
    }
    return out;
}

void dump_phantom_spec(std::vector<std::pair<std::string, std::string>>& d,
                       const std::string& prefix, const PhantomSpec& s) {
    d.emplace_back(prefix + "rows", std::to_string(s.rows));
    d.emplace_back(prefix + "cols", std::to_string(s.cols));
    d.emplace_back(prefix + "density", fmt_real(s.density));
    d.emplace_back(prefix + "coherent_ratio", fmt_real(s.coherent_ratio));
    d.emplace_back(prefix + "periodic_spacing",
                   fmt_real(s.periodic_spacing ? *s.periodic_spacing : 0.0));
    d.emplace_back(prefix + "amplitude_variance", fmt_real(s.amplitude_variance));
    d.emplace_back(prefix + "pulse_length", std::to_string(s.psf.pulse_length));
    d.emplace_back(prefix + "lateral_width", std::to_string(s.psf.lateral_width));
    d.emplace_back(prefix + "center_frequency", fmt_real(s.psf.center_frequency));
}

int resolve_threads(int configured) {
    if (configured > 0) return configured;
    const unsigned hw = std::thread::hardware_concurrency();
    return int(std::min(8u, std::max(1u, hw)));
}

// Runs work(0..count-1) on a bounded pool. Indices are claimed from a shared
// counter, so each index is executed exactly once and all shared writes are
// into per-index slots owned by the claiming worker. Item-level errors must
// be handled inside `work`; an escaping exception aborts the pool and is
// rethrown after the join.
void for_each_indexed(size_t count, int threads,
                      const std::function<void(size_t)>& work) {
    const int workers = int(std::min<size_t>(size_t(std::max(threads, 1)), count));
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> caught(static_cast<size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (size_t i = next.fetch_add(1); i < count;
                     i = next.fetch_add(1))
                    work(i);
            } catch (...) {
                caught[size_t(t)] = std::current_exception();
                next.store(count);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : caught)
        if (e) std::rethrow_exception(e);
}

std::string ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec || !fs::is_directory(path))
        fail(ErrorCode::io, "cannot create output directory '" + path + "'" +
                                (ec ? ": " + ec.message() : ""));
    return path;
}

std::string join_path(const std::string& dir, const std::string& leaf) {
    return (fs::path(dir) / leaf).string();
}

std::vector<std::string> list_files(const std::string& dir,
                                    const std::string& suffix) {
    std::vector<std::string> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() >= suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string base_name(const std::string& path) {
    return fs::path(path).filename().string();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
    out.write(text.data(), std::streamsize(text.size()));
    out.close();
    require(out.good(), ErrorCode::io, "failed writing '" + path + "'");
}

void log_line(const PipelineConfig& config, const std::string& line) {
    if (config.log) *config.log << line << '\n';
}

std::string window_string(const WindowSpec& w) {
    return std::to_string(w.height) + "x" + std::to_string(w.width) + "x" +
           std::to_string(w.stride);
}

std::string basis_string(const Basis& basis) {
    std::string out;
    for (size_t i = 0; i < basis.size(); ++i) {
        if (i) out += ',';
        out += "l" + std::to_string(basis[i].first) + "q" +
               std::to_string(basis[i].second);
    }
    return out;
}

container::Entries run_provenance(const PipelineConfig& config) {
    return {{"config_hash", config_hash(config)},
            {"seed", std::to_string(config.seed)}};
}

} // namespace

void apply_config_key(PipelineConfig& config, const std::string& key,
                      const std::string& value, const std::string& origin) {
    if (key == "pipeline.models") {
        config.kinds = parse_model_list(origin, key, value);
    } else if (key == "pipeline.seed") {
        config.seed = parse_u64_value(origin, key, value);
    } else if (key == "pipeline.threads") {
        config.threads = int(parse_int_value(origin, key, value, 0, 64));
    } else if (key == "map.window_height") {
        config.window.height = int(parse_int_value(origin, key, value, 1, 9999));
    } else if (key == "map.window_width") {
        config.window.width = int(parse_int_value(origin, key, value, 1, 9999));
    } else if (key == "map.stride") {
        config.window.stride = int(parse_int_value(origin, key, value, 1, 9999));
    } else if (key == "wavelet.depth") {
        config.wavelet_depth = int(parse_int_value(origin, key, value, 1, 6));
    } else if (key == "wavelet.basis") {
        if (value == "adaptive")
            config.basis_policy = BasisPolicy::adaptive;
        else if (value == "full")
            config.basis_policy = BasisPolicy::full;
        else
            bad_key_value(origin, key, value, "'adaptive' or 'full'");
    } else if (key == "cv.scheme") {
        if (value == "logo")
            config.cv_scheme = CvScheme::leave_one_group_out;
        else if (value == "kfold")
            config.cv_scheme = CvScheme::k_fold;
        else
            bad_key_value(origin, key, value, "'logo' or 'kfold'");
    } else if (key == "cv.k") {
        config.cv_k = int(parse_int_value(origin, key, value, 2, 1000000));
    } else if (key == "cv.repeats") {
        config.cv_repeats = int(parse_int_value(origin, key, value, 1, 1000000));
    } else if (key == "io.input_dir") {
        config.input_dir = value;
    } else if (key == "io.output_dir") {
        config.output_dir = value;
    } else if (key == "phantom.frames_per_class") {
        config.phantom.frames_per_class =
            int(parse_int_value(origin, key, value, 1, 1000000));
    } else if (key == "phantom.groups_per_class") {
        config.phantom.groups_per_class =
            int(parse_int_value(origin, key, value, 1, 1000000));
    } else if (key == "phantom.rows") {
        const int rows = int(parse_int_value(origin, key, value, 1, 1000000));
        config.phantom.class_a.rows = rows;
        config.phantom.class_b.rows = rows;
    } else if (key == "phantom.cols") {
        const int cols = int(parse_int_value(origin, key, value, 1, 1000000));
        config.phantom.class_a.cols = cols;
        config.phantom.class_b.cols = cols;
    } else if (key == "phantom.density_a") {
        config.phantom.class_a.density =
            parse_real_value(origin, key, value, 1e-9, 1e9);
    } else if (key == "phantom.density_b") {
        config.phantom.class_b.density =
            parse_real_value(origin, key, value, 1e-9, 1e9);
    } else if (key == "phantom.coherent_ratio_a") {
        config.phantom.class_a.coherent_ratio =
            parse_real_value(origin, key, value, 0.0, 1e9);
    } else if (key == "phantom.coherent_ratio_b") {
        config.phantom.class_b.coherent_ratio =
            parse_real_value(origin, key, value, 0.0, 1e9);
    } else if (key == "phantom.periodic_spacing_a") {
        set_periodic_spacing(config.phantom.class_a, origin, key, value);
    } else if (key == "phantom.periodic_spacing_b") {
        set_periodic_spacing(config.phantom.class_b, origin, key, value);
    } else if (key == "phantom.amplitude_variance") {
        const double v = parse_real_value(origin, key, value, 0.0, 1e9);
        config.phantom.class_a.amplitude_variance = v;
        config.phantom.class_b.amplitude_variance = v;
    } else if (key == "phantom.pulse_length") {
        const int v = int(parse_int_value(origin, key, value, 1, 100000));
        config.phantom.class_a.psf.pulse_length = v;
        config.phantom.class_b.psf.pulse_length = v;
    } else if (key == "phantom.lateral_width") {
        const int v = int(parse_int_value(origin, key, value, 1, 100000));
        config.phantom.class_a.psf.lateral_width = v;
        config.phantom.class_b.psf.lateral_width = v;
    } else if (key == "phantom.center_frequency") {
        const double v = parse_real_value(origin, key, value, 1e-9, 0.5);
        if (v >= 0.5) bad_key_value(origin, key, value, "a frequency below 0.5");
        config.phantom.class_a.psf.center_frequency = v;
        config.phantom.class_b.psf.center_frequency = v;
    } else {
        fail(ErrorCode::config,
             origin + ": unknown configuration key '" + key + "'");
    }
}

PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& origin) {
    PipelineConfig config;
    int line_no = 0;
    for (size_t pos = 0; pos < text.size();) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        const std::string raw = text.substr(pos, end - pos);
        pos = end + 1;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(ErrorCode::config,
                 origin + ": line " + std::to_string(line_no) +
                     " is not a key=value pair: '" + line + "'");
        apply_config_key(config, trim(line.substr(0, eq)),
                         trim(line.substr(eq + 1)), origin);
    }
    validate_config(config);
    return config;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io,
            "cannot open configuration file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    require(!in.bad(), ErrorCode::io, "failed reading '" + path + "'");
    return parse_config_text(text, path);
}

void apply_flag(PipelineConfig& config, const std::string& flag,
                const std::string& value) {
    const std::string origin = "flag --" + flag;
    if (flag == "model") {
        apply_config_key(config, "pipeline.models", value, origin);
    } else if (flag == "window") {
        // HEIGHTxWIDTH with an optional xSTRIDE suffix.
        std::vector<std::string> parts;
        size_t pos = 0;
        while (pos <= value.size()) {
            size_t x = value.find('x', pos);
            if (x == std::string::npos) x = value.size();
            parts.push_back(value.substr(pos, x - pos));
            if (x == value.size()) break;
            pos = x + 1;
        }
        if (parts.size() < 2 || parts.size() > 3 ||
            std::any_of(parts.begin(), parts.end(),
                        [](const std::string& p) { return p.empty(); }))
            fail(ErrorCode::config, "flag --window expects HEIGHTxWIDTH[xSTRIDE], "
                                    "got '" + value + "'");
        apply_config_key(config, "map.window_height", parts[0], origin);
        apply_config_key(config, "map.window_width", parts[1], origin);
        apply_config_key(config, "map.stride",
                         parts.size() == 3 ? parts[2] : "1", origin);
    } else if (flag == "depth") {
        apply_config_key(config, "wavelet.depth", value, origin);
    } else if (flag == "cv") {
        apply_config_key(config, "cv.scheme", value, origin);
    } else if (flag == "k") {
        apply_config_key(config, "cv.k", value, origin);
    } else if (flag == "repeats") {
        apply_config_key(config, "cv.repeats", value, origin);
    } else if (flag == "seed") {
        apply_config_key(config, "pipeline.seed", value, origin);
    } else if (flag == "in") {
        apply_config_key(config, "io.input_dir", value, origin);
    } else if (flag == "out") {
        apply_config_key(config, "io.output_dir", value, origin);
    } else if (flag == "threads") {
        apply_config_key(config, "pipeline.threads", value, origin);
    } else {
        fail(ErrorCode::config, "unknown flag '--" + flag + "'");
    }
}

void validate_config(const PipelineConfig& config) {
    require(!config.kinds.empty(), ErrorCode::config,
            "at least one model kind must be configured (pipeline.models)");
    for (size_t i = 0; i < config.kinds.size(); ++i)
        for (size_t j = i + 1; j < config.kinds.size(); ++j)
            if (config.kinds[i] == config.kinds[j])
                fail(ErrorCode::config,
                     std::string("duplicate model '") +
                         model_name(config.kinds[i]) + "' in pipeline.models");
    require(config.wavelet_depth >= 1 && config.wavelet_depth <= 6,
            ErrorCode::config, "wavelet.depth must be in [1, 6]");
    require(config.cv_k >= 2, ErrorCode::config, "cv.k must be at least 2");
    require(config.cv_repeats >= 1, ErrorCode::config,
            "cv.repeats must be at least 1");
    require(config.threads >= 0 && config.threads <= 64, ErrorCode::config,
            "pipeline.threads must be in [0, 64]");
    require(!config.output_dir.empty(), ErrorCode::config,
            "io.output_dir must not be empty");
    if (!config.input_dir.empty()) {
        const fs::path in = fs::path(config.input_dir).lexically_normal();
        const fs::path out = fs::path(config.output_dir).lexically_normal();
        require(in != out, ErrorCode::config,
                "io.input_dir and io.output_dir must be distinct");
    }
    for (ModelKind kind : config.kinds) {
        try {
            validate_window(config.window, kind);
        } catch (const Error& e) {
            fail(ErrorCode::config, std::string("map window: ") + e.what());
        }
    }
    require(config.phantom.frames_per_class >= 1, ErrorCode::config,
            "phantom.frames_per_class must be at least 1");
    require(config.phantom.groups_per_class >= 1 &&
                config.phantom.groups_per_class <=
                    config.phantom.frames_per_class,
            ErrorCode::config,
            "phantom.groups_per_class must be between 1 and frames_per_class");
}

std::vector<std::pair<std::string, std::string>> config_dump(
    const PipelineConfig& config) {
    std::vector<std::pair<std::string, std::string>> d;
    d.emplace_back("pipeline.models", model_list_string(config.kinds));
    d.emplace_back("pipeline.seed", std::to_string(config.seed));
    d.emplace_back("map.window_height", std::to_string(config.window.height));
    d.emplace_back("map.window_width", std::to_string(config.window.width));
    d.emplace_back("map.stride", std::to_string(config.window.stride));
    d.emplace_back("wavelet.depth", std::to_string(config.wavelet_depth));
    d.emplace_back("wavelet.basis",
                   config.basis_policy == BasisPolicy::adaptive ? "adaptive"
                                                                : "full");
    d.emplace_back("cv.scheme", scheme_token(config.cv_scheme));
    d.emplace_back("cv.k", std::to_string(config.cv_k));
    d.emplace_back("cv.repeats", std::to_string(config.cv_repeats));
    d.emplace_back("phantom.frames_per_class",
                   std::to_string(config.phantom.frames_per_class));
    d.emplace_back("phantom.groups_per_class",
                   std::to_string(config.phantom.groups_per_class));
    dump_phantom_spec(d, "phantom.a.", config.phantom.class_a);
    dump_phantom_spec(d, "phantom.b.", config.phantom.class_b);
    return d;
}

std::string config_hash(const PipelineConfig& config) {
    uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& [k, v] : config_dump(config)) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

bool FeatureTable::meta_has(const std::string& key) const {
    return container::find(meta, key) != nullptr;
}

void save_feature_table(const std::string& path, const FeatureTable& table) {
    auto check_token = [](const std::string& s, const char* what) {
        require(s.find('\t') == std::string::npos &&
                    s.find('\n') == std::string::npos,
                ErrorCode::argument,
                std::string(what) + " must not contain tabs or newlines");
    };
    std::string text;
    for (const auto& [k, v] : table.meta) {
        require(!k.empty() && k.find('=') == std::string::npos, ErrorCode::argument,
                "feature table meta key '" + k + "' is not writable");
        check_token(k, "feature table meta key");
        check_token(v, "feature table meta value");
        text += k + "=" + v + "\n";
    }
    text += "frame_id\tgroup_id\tclass_label";
    for (const auto& name : table.names) {
        require(!name.empty(), ErrorCode::argument,
                "feature names must be nonempty");
        check_token(name, "feature name");
        text += "\t" + name;
    }
    text += "\n";
    for (const FeatureVector& row : table.rows) {
        require(row.values.size() == table.names.size(), ErrorCode::argument,
                "feature row '" + row.frame_id +
                    "' length does not match the table's column count");
        check_token(row.frame_id, "frame id");
        check_token(row.group_id, "group id");
        text += row.frame_id + "\t" + row.group_id + "\t" +
                (row.class_label ? class_label_name(*row.class_label)
                                 : "unlabeled");
        for (double v : row.values) {
            text += "\t";
            text += fmt_real(v);
        }
        text += "\n";
    }
    write_text_file(path, text);
}

FeatureTable load_feature_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io, "cannot open feature table '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    require(!in.bad(), ErrorCode::io, "failed reading '" + path + "'");

    auto split_tabs = [](const std::string& line) {
        std::vector<std::string> out;
        size_t pos = 0;
        while (true) {
            const size_t tab = line.find('\t', pos);
            if (tab == std::string::npos) {
                out.push_back(line.substr(pos));
                return out;
            }
            out.push_back(line.substr(pos, tab - pos));
            pos = tab + 1;
        }
    };

    FeatureTable table;
    bool header_seen = false;
    int line_no = 0;
    for (size_t pos = 0; pos < text.size();) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (!header_seen) {
            if (line.rfind("frame_id\t", 0) == 0 || line == "frame_id") {
                const auto cols = split_tabs(line);
                if (cols.size() < 3 || cols[0] != "frame_id" ||
                    cols[1] != "group_id" || cols[2] != "class_label")
                    fail(ErrorCode::format,
                         "column header of '" + path +
                             "' must start with frame_id, group_id, class_label");
                table.names.assign(cols.begin() + 3, cols.end());
                header_seen = true;
                continue;
            }
            const size_t eq = line.find('=');
            if (eq == std::string::npos || eq == 0)
                fail(ErrorCode::format, "line " + std::to_string(line_no) +
                                            " of '" + path +
                                            "' is not a meta key=value pair");
            table.meta.emplace_back(line.substr(0, eq), line.substr(eq + 1));
            continue;
        }

        const auto fields = split_tabs(line);
        if (fields.size() != 3 + table.names.size())
            fail(ErrorCode::format,
                 "row at line " + std::to_string(line_no) + " of '" + path +
                     "' has " + std::to_string(fields.size()) +
                     " fields, expected " +
                     std::to_string(3 + table.names.size()));
        FeatureVector row;
        row.frame_id = fields[0];
        row.group_id = fields[1];
        if (fields[2] == "unlabeled") {
            row.class_label.reset();
        } else {
            try {
                row.class_label = class_label_from_name(fields[2]);
            } catch (const Error&) {
                fail(ErrorCode::format, "row at line " + std::to_string(line_no) +
                                            " of '" + path +
                                            "' has unknown class label '" +
                                            fields[2] + "'");
            }
        }
        row.values.reserve(table.names.size());
        for (size_t i = 3; i < fields.size(); ++i) {
            errno = 0;
            char* endp = nullptr;
            const double v = std::strtod(fields[i].c_str(), &endp);
            if (fields[i].empty() || errno != 0 ||
                endp != fields[i].c_str() + fields[i].size() || !std::isfinite(v))
                fail(ErrorCode::format,
                     "row at line " + std::to_string(line_no) + " of '" + path +
                         "' has a non-numeric value '" + fields[i] + "'");
            row.values.push_back(v);
        }
        row.names = table.names;
        row.degenerate.assign(table.names.size(), 0);
        table.rows.push_back(std::move(row));
    }
    if (!header_seen)
        fail(ErrorCode::format,
             "feature table '" + path + "' is missing its column header row");
    return table;
}

StageReport run_simulate(const PipelineConfig& config) {
    validate_config(config);
    StageReport rep;
    const std::vector<PhantomFrame> frames =
        make_dataset(config.phantom.class_a, config.phantom.class_b,
                     config.phantom.frames_per_class,
                     config.phantom.groups_per_class, config.seed);
    const std::string dir = ensure_dir(join_path(config.output_dir, "frames"));
    const std::string hash = config_hash(config);
    const container::Entries extra = run_provenance(config);
    const std::vector<std::pair<std::string, std::string>> truth_extra = {
        {"config_hash", hash},
        {"dataset_seed", std::to_string(config.seed)}};

    std::string manifest;
    manifest += "kind=manifest\n";
    manifest += "config_hash=" + hash + "\n";
    manifest += "seed=" + std::to_string(config.seed) + "\n";
    manifest += "frames=" + std::to_string(frames.size()) + "\n";
    manifest +=
        "groups=" + std::to_string(2 * config.phantom.groups_per_class) + "\n";
    for (const PhantomFrame& frame : frames) {
        const std::string id = frame.rf.frame_id;
        save_rf(frame.rf, join_path(dir, id + ".rf"), extra);
        save_truth(join_path(dir, id + ".truth"), frame.truth, truth_extra);
        manifest += "frame_id=" + id + " group_id=" + frame.rf.group_id +
                    " class_label=" + class_label_name(*frame.rf.class_label) +
                    " regime=" + regime_name(frame.truth.regime) + " file=" +
                    id + ".rf truth=" + id + ".truth\n";
        log_line(config, "simulate: wrote " + id + ".rf (regime " +
                             regime_name(frame.truth.regime) + ")");
        ++rep.processed;
    }
    const std::string manifest_path = join_path(dir, "manifest.txt");
    write_text_file(manifest_path, manifest);
    rep.outputs.push_back(manifest_path);
    log_line(config, "simulate: " + std::to_string(rep.processed) +
                         " frames -> " + dir);
    return rep;
}

StageReport run_envelope(const PipelineConfig& config) {
    validate_config(config);
    const std::string src = !config.input_dir.empty()
                                ? config.input_dir
                                : join_path(config.output_dir, "frames");
    const std::vector<std::string> rf_files = list_files(src, ".rf");
    require(!rf_files.empty(), ErrorCode::io,
            "no RF frames (*.rf) found in '" + src + "'");
    const std::string dst = ensure_dir(join_path(config.output_dir, "envelopes"));
    const container::Entries extra = run_provenance(config);

    const size_t n = rf_files.size();
    std::vector<std::string> errors(n);
    for_each_indexed(n, resolve_threads(config.threads), [&](size_t i) {
        try {
            const RFFrame frame = load_rf(rf_files[i]);
            const EnvelopeImage image = detect_envelope(frame);
            const std::string stem = fs::path(rf_files[i]).stem().string();
            save_envelope(image, join_path(dst, stem + ".env"), extra);
        } catch (const Error& e) {
            errors[i] = base_name(rf_files[i]) + ": " + e.what();
        }
    });

    StageReport rep;
    for (size_t i = 0; i < n; ++i) {
        if (errors[i].empty()) {
            ++rep.processed;
            log_line(config, "envelope: " + base_name(rf_files[i]));
        } else {
            ++rep.failed;
            rep.failures.push_back(errors[i]);
            log_line(config, "envelope: FAILED " + errors[i]);
        }
    }
    return rep;
}

namespace {

// Mirrors the cropping rule of the feature extractor so the adaptive basis
// is chosen on exactly the data the extractor will see.
Basis reference_basis(const ParametricMap& map, int depth) {
    const int block = 1 << depth;
    const int rows = map.values.rows() / block * block;
    const int cols = map.values.cols() / block * block;
    require(rows >= 8 * block && cols >= 8 * block, ErrorCode::argument,
            "parametric map is too small for the configured depth");
    MatrixF cropped(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) cropped(r, c) = map.values(r, c);
    const WaveletPacketTree tree = wpt_decompose(cropped, depth);
    return select_basis(tree);
}

FeatureVector baseline_features(const ParametricImageSet& maps) {
    FeatureVector fv;
    fv.frame_id = maps.maps.front().frame_id;
    fv.group_id = maps.maps.front().group_id;
    fv.class_label = maps.maps.front().class_label;
    for (const ParametricMap& map : maps.maps) {
        const MapStats stats = map_stats(map);
        const std::string base =
            std::string(model_name(map.kind)) + "." + map.parameter_name;
        fv.names.push_back(base + ".mean");
        fv.values.push_back(stats.mean);
        fv.names.push_back(base + ".variance");
        fv.values.push_back(stats.variance);
        fv.names.push_back(base + ".median");
        fv.values.push_back(stats.median);
    }
    fv.degenerate.assign(fv.values.size(), 0);
    return fv;
}

std::vector<std::string> fractal_names(ModelKind kind, const Basis& basis) {
    std::vector<std::string> names;
    for (int p = 0; p < model_param_count(kind); ++p) {
        const std::string base = std::string(model_name(kind)) + "." +
                                 model_param_name(kind, p);
        for (const auto& [level, index] : basis) {
            const std::string node =
                ".l" + std::to_string(level) + "q" + std::to_string(index);
            names.push_back(base + node + ".fd");
            names.push_back(base + node + ".lac");
        }
    }
    return names;
}

std::vector<std::string> baseline_names(ModelKind kind) {
    std::vector<std::string> names;
    for (int p = 0; p < model_param_count(kind); ++p) {
        const std::string base = std::string(model_name(kind)) + "." +
                                 model_param_name(kind, p);
        names.push_back(base + ".mean");
        names.push_back(base + ".variance");
        names.push_back(base + ".median");
    }
    return names;
}

} // namespace

StageReport run_features(const PipelineConfig& config) {
    validate_config(config);

    // Input resolution: prefer stored envelopes, fall back to RF frames and
    // demodulate in memory.
    std::string src;
    bool from_env = true;
    if (!config.input_dir.empty()) {
        if (!list_files(config.input_dir, ".env").empty()) {
            src = config.input_dir;
        } else if (!list_files(config.input_dir, ".rf").empty()) {
            src = config.input_dir;
            from_env = false;
        } else {
            fail(ErrorCode::io,
                 "no envelope (*.env) or RF (*.rf) inputs found in '" +
                     config.input_dir + "'");
        }
    } else {
        const std::string env_dir = join_path(config.output_dir, "envelopes");
        const std::string rf_dir = join_path(config.output_dir, "frames");
        if (!list_files(env_dir, ".env").empty()) {
            src = env_dir;
        } else if (!list_files(rf_dir, ".rf").empty()) {
            src = rf_dir;
            from_env = false;
        } else {
            fail(ErrorCode::io, "no envelope (*.env) inputs in '" + env_dir +
                                    "' and no RF (*.rf) inputs in '" + rf_dir +
                                    "'");
        }
    }
    const std::vector<std::string> files =
        list_files(src, from_env ? ".env" : ".rf");
    const size_t n = files.size();
    const int threads = resolve_threads(config.threads);

    // Load every input once; the envelopes are shared across model kinds.
    std::vector<std::optional<EnvelopeImage>> envs(n);
    std::vector<std::string> load_errors(n);
    for_each_indexed(n, threads, [&](size_t i) {
        try {
            envs[i] = from_env ? load_envelope(files[i])
                               : detect_envelope(load_rf(files[i]));
        } catch (const Error& e) {
            load_errors[i] = base_name(files[i]) + ": " + e.what();
        }
    });

    StageReport rep;
    std::vector<char> ok(n, 0);
    for (size_t i = 0; i < n; ++i) {
        ok[i] = envs[i].has_value() ? 1 : 0;
        if (!ok[i]) {
            rep.failures.push_back(load_errors[i]);
            log_line(config, "features: FAILED " + load_errors[i]);
        }
    }

    const std::string feature_dir =
        ensure_dir(join_path(config.output_dir, "features"));
    const std::string hash = config_hash(config);

    for (ModelKind kind : config.kinds) {
        const FitOptions options = FitOptions::defaults(kind);

        // The subband basis is fixed per kind so every row has the same
        // layout. The adaptive policy derives it from the first frame whose
        // maps can be computed, in input order.
        Basis basis;
        std::vector<std::optional<ParametricImageSet>> cached(n);
        if (config.basis_policy == BasisPolicy::full) {
            basis = full_leaf_basis(config.wavelet_depth);
        } else {
            for (size_t i = 0; i < n && basis.empty(); ++i) {
                if (!envs[i]) continue;
                try {
                    ParametricImageSet ref = generate_maps(
                        *envs[i], kind, config.window, options, 1);
                    basis = reference_basis(ref.maps.front(),
                                            config.wavelet_depth);
                    cached[i] = std::move(ref);
                } catch (const Error&) {
                    // The frame will fail in the main pass and be reported
                    // there; try the next one as the reference.
                }
            }
            if (basis.empty()) basis = full_leaf_basis(config.wavelet_depth);
        }

        struct RowPair {
            FeatureVector fractal;
            FeatureVector baseline;
            int fit_failures = 0;
            int degenerate = 0;
        };
        std::vector<std::optional<RowPair>> produced(n);
        std::vector<std::string> errors(n);
        for_each_indexed(n, threads, [&](size_t i) {
            if (!envs[i]) return;
            try {
                ParametricImageSet maps =
                    cached[i] ? std::move(*cached[i])
                              : generate_maps(*envs[i], kind, config.window,
                                              options, 1);
                RowPair pair;
                pair.fractal =
                    extract_features(maps, config.wavelet_depth, basis);
                pair.baseline = baseline_features(maps);
                for (const ParametricMap& map : maps.maps)
                    pair.fit_failures += map.fit_failures;
                for (uint8_t flag : pair.fractal.degenerate)
                    pair.degenerate += flag ? 1 : 0;
                produced[i] = std::move(pair);
            } catch (const Error& e) {
                errors[i] = "frame '" + envs[i]->frame_id + "' (" +
                            base_name(files[i]) + "), model " +
                            model_name(kind) + ": " + e.what();
            }
        });

        FeatureTable fractal_table, baseline_table;
        int fit_failures = 0, degenerate_cells = 0;
        for (size_t i = 0; i < n; ++i) {
            if (!envs[i]) continue;
            if (!produced[i]) {
                ok[i] = 0;
                rep.failures.push_back(errors[i]);
                log_line(config, "features: FAILED " + errors[i]);
                continue;
            }
            fit_failures += produced[i]->fit_failures;
            degenerate_cells += produced[i]->degenerate;
            log_line(config, std::string("features[") + model_name(kind) +
                                 "]: " + produced[i]->fractal.frame_id +
                                 " fit_failures=" +
                                 std::to_string(produced[i]->fit_failures));
            fractal_table.rows.push_back(std::move(produced[i]->fractal));
            baseline_table.rows.push_back(std::move(produced[i]->baseline));
        }
        fractal_table.names = fractal_table.rows.empty()
                                  ? fractal_names(kind, basis)
                                  : fractal_table.rows.front().names;
        baseline_table.names = baseline_table.rows.empty()
                                   ? baseline_names(kind)
                                   : baseline_table.rows.front().names;

        const std::string window_text = window_string(config.window);
        auto shared_meta = [&](const char* set) {
            container::Entries meta;
            meta.emplace_back("config_hash", hash);
            meta.emplace_back("seed", std::to_string(config.seed));
            meta.emplace_back("model", model_name(kind));
            meta.emplace_back("feature_set", set);
            meta.emplace_back("depth", std::to_string(config.wavelet_depth));
            meta.emplace_back("window", window_text);
            return meta;
        };
        fractal_table.meta = shared_meta("fractal");
        fractal_table.meta.emplace_back("basis", basis_string(basis));
        fractal_table.meta.emplace_back(
            "rows", std::to_string(fractal_table.rows.size()));
        fractal_table.meta.emplace_back("fit_failures",
                                        std::to_string(fit_failures));
        fractal_table.meta.emplace_back("degenerate_cells",
                                        std::to_string(degenerate_cells));
        baseline_table.meta = shared_meta("baseline");
        baseline_table.meta.emplace_back(
            "rows", std::to_string(baseline_table.rows.size()));
        baseline_table.meta.emplace_back("fit_failures",
                                         std::to_string(fit_failures));

        const std::string fractal_path = join_path(
            feature_dir, std::string(model_name(kind)) + ".fractal.tsv");
        const std::string baseline_path = join_path(
            feature_dir, std::string(model_name(kind)) + ".baseline.tsv");
        save_feature_table(fractal_path, fractal_table);
        save_feature_table(baseline_path, baseline_table);
        rep.outputs.push_back(fractal_path);
        rep.outputs.push_back(baseline_path);
        log_line(config, std::string("features[") + model_name(kind) + "]: " +
                             std::to_string(fractal_table.rows.size()) +
                             " rows, fit_failures=" +
                             std::to_string(fit_failures));
    }

    for (size_t i = 0; i < n; ++i)
        ok[i] ? ++rep.processed : ++rep.failed;
    return rep;
}

namespace {

struct EvalCell {
    bool present = false;
    size_t rows = 0;
    CvResult result;
};

void require_labeled(const FeatureTable& table, const std::string& path) {
    std::string missing;
    for (const FeatureVector& row : table.rows) {
        if (row.class_label) continue;
        if (!missing.empty()) missing += ", ";
        missing += row.frame_id;
    }
    if (!missing.empty())
        fail(ErrorCode::argument,
             "feature table '" + path + "' has unlabeled rows: " + missing);
}

struct MetricRow {
    const char* label;
    const char* key;
    Metric MetricsReport::*field;
};

constexpr MetricRow kMetricRows[] = {
    {"FP rate", "fp_rate", &MetricsReport::fp_rate},
    {"Sensitivity", "sensitivity", &MetricsReport::sensitivity},
    {"Specificity", "specificity", &MetricsReport::specificity},
    {"Accuracy", "accuracy", &MetricsReport::accuracy},
    {"Precision", "precision", &MetricsReport::precision},
    {"Dice SC", "dice_sc", &MetricsReport::dice_sc},
    {"ROC Area", "roc_area", &MetricsReport::roc_area},
};

void append_metric_table(std::string& out, const std::string& title,
                         const std::vector<ModelKind>& kinds,
                         const std::vector<EvalCell>& cells) {
    out += title + "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-12s", "Metric");
    out += buf;
    for (ModelKind kind : kinds) {
        std::snprintf(buf, sizeof(buf), " %11s", model_name(kind));
        out += buf;
    }
    out += "\n";
    for (const MetricRow& row : kMetricRows) {
        std::snprintf(buf, sizeof(buf), "%-12s", row.label);
        out += buf;
        for (size_t i = 0; i < kinds.size(); ++i) {
            if (!cells[i].present) {
                std::snprintf(buf, sizeof(buf), " %11s", "n/a");
            } else {
                const Metric& m = cells[i].result.pooled.*(row.field);
                if (m.defined)
                    std::snprintf(buf, sizeof(buf), " %11.4f", m.value);
                else
                    std::snprintf(buf, sizeof(buf), " %11s", "n/a");
            }
            out += buf;
        }
        out += "\n";
    }
    out += "\n";
}

void append_details(std::string& out, const std::string& set,
                    const std::vector<ModelKind>& kinds,
                    const std::vector<EvalCell>& cells, CvScheme scheme,
                    int repeats) {
    for (size_t i = 0; i < kinds.size(); ++i) {
        if (!cells[i].present) continue;
        const std::string prefix = set + "." + model_name(kinds[i]) + ".";
        const CvResult& r = cells[i].result;
        out += prefix + "rows=" + std::to_string(cells[i].rows) + "\n";
        out += prefix + "folds=" + std::to_string(r.folds) + "\n";
        out += prefix + "tp=" + std::to_string(r.pooled.tp) + "\n";
        out += prefix + "fp=" + std::to_string(r.pooled.fp) + "\n";
        out += prefix + "tn=" + std::to_string(r.pooled.tn) + "\n";
        out += prefix + "fn=" + std::to_string(r.pooled.fn) + "\n";
        for (const MetricRow& row : kMetricRows) {
            const Metric& m = r.pooled.*(row.field);
            out += prefix + row.key + "=" +
                   (m.defined ? fmt_real(m.value) : "undefined") + "\n";
        }
        if (scheme == CvScheme::k_fold) {
            out += prefix + "repeats=" + std::to_string(repeats) + "\n";
            for (const MetricRow& row : kMetricRows) {
                const MetricSummary s =
                    summarize_metric(r.per_repeat, row.field);
                if (s.count == 0) {
                    out += prefix + row.key + "_mean=undefined\n";
                    out += prefix + row.key + "_std=undefined\n";
                } else {
                    out += prefix + row.key + "_mean=" + fmt_real(s.mean) + "\n";
                    out += prefix + row.key + "_std=" + fmt_real(s.stddev) +
                           "\n";
                }
            }
        }
    }
}

} // namespace

StageReport run_evaluate(const PipelineConfig& config) {
    validate_config(config);
    const std::string dir = !config.input_dir.empty()
                                ? config.input_dir
                                : join_path(config.output_dir, "features");

    CvConfig cv;
    cv.scheme = config.cv_scheme;
    cv.k = config.cv_k;
    cv.repeats = config.cv_repeats;
    cv.seed = config.seed;
    cv.stratified = true;

    const size_t kind_count = config.kinds.size();
    std::vector<EvalCell> fractal_cells(kind_count), baseline_cells(kind_count);
    for (size_t i = 0; i < kind_count; ++i) {
        const std::string model = model_name(config.kinds[i]);
        const std::string fractal_path =
            join_path(dir, model + ".fractal.tsv");
        require(fs::exists(fractal_path), ErrorCode::io,
                "feature table '" + fractal_path + "' not found");
        const FeatureTable fractal = load_feature_table(fractal_path);
        require_labeled(fractal, fractal_path);
        fractal_cells[i].present = true;
        fractal_cells[i].rows = fractal.rows.size();
        fractal_cells[i].result = cross_validate(fractal.rows, cv);

        const std::string baseline_path =
            join_path(dir, model + ".baseline.tsv");
        if (fs::exists(baseline_path)) {
            const FeatureTable baseline = load_feature_table(baseline_path);
            require_labeled(baseline, baseline_path);
            baseline_cells[i].present = true;
            baseline_cells[i].rows = baseline.rows.size();
            baseline_cells[i].result = cross_validate(baseline.rows, cv);
        }
    }
    const bool any_baseline =
        std::any_of(baseline_cells.begin(), baseline_cells.end(),
                    [](const EvalCell& c) { return c.present; });

    std::string text;
    text += "quantitative ultrasound evaluation report\n";
    text += "config_hash=" + config_hash(config) + "\n";
    text += "seed=" + std::to_string(config.seed) + "\n";
    text += std::string("scheme=") + scheme_label(config.cv_scheme) + "\n";
    text += "folds=" + std::to_string(fractal_cells.front().result.folds) + "\n";
    text += "models=" + model_list_string(config.kinds) + "\n";
    text += std::string("feature_sets=fractal") +
            (any_baseline ? ",baseline" : "") + "\n\n";
    append_metric_table(text, "[fractal]", config.kinds, fractal_cells);
    if (any_baseline)
        append_metric_table(text, "[baseline]", config.kinds, baseline_cells);
    text += "[details]\n";
    append_details(text, "fractal", config.kinds, fractal_cells,
                   config.cv_scheme, config.cv_repeats);
    if (any_baseline)
        append_details(text, "baseline", config.kinds, baseline_cells,
                       config.cv_scheme, config.cv_repeats);

    const std::string report_dir =
        ensure_dir(join_path(config.output_dir, "reports"));
    const std::string report_path = join_path(
        report_dir,
        std::string("evaluation_") + scheme_token(config.cv_scheme) + ".txt");
    write_text_file(report_path, text);

    StageReport rep;
    rep.processed = int(kind_count) * (any_baseline ? 2 : 1);
    rep.outputs.push_back(report_path);
    if (config.log) *config.log << text;
    return rep;
}

StageReport run_all(const PipelineConfig& config) {
    validate_config(config);
    PipelineConfig chained = config;
    chained.input_dir.clear(); // stages consume each other's outputs
    StageReport total;
    const StageReport stages[] = {
        run_simulate(chained), run_envelope(chained), run_features(chained),
        run_evaluate(chained)};
    for (const StageReport& r : stages) {
        total.processed += r.processed;
        total.failed += r.failed;
        total.failures.insert(total.failures.end(), r.failures.begin(),
                              r.failures.end());
        total.outputs.insert(total.outputs.end(), r.outputs.begin(),
                             r.outputs.end());
    }
    return total;
}

} // namespace usqt
