#include "pmap.hpp"

#include "distributions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace usqt {

void validate_window(const WindowSpec& window, ModelKind kind) {
    require(window.height > 0 && window.height % 2 == 1 && window.width > 0 &&
                window.width % 2 == 1,
            ErrorCode::argument, "window height and width must be odd and positive");
    require(window.stride >= 1, ErrorCode::argument, "window stride must be >= 1");
    require(window.height * window.width >= 3 * model_param_count(kind),
            ErrorCode::argument,
            "window area must hold at least three samples per model parameter");
}

ParametricImageSet generate_maps(const EnvelopeImage& envelope, ModelKind kind,
                                 const WindowSpec& window,
                                 const FitOptions& options, int threads) {
    validate_window(window, kind);
    require(threads >= 1, ErrorCode::argument, "thread count must be >= 1");
    const MatrixF& env = envelope.values;
    require(env.rows() >= window.height && env.cols() >= window.width,
            ErrorCode::argument, "envelope is smaller than the fitting window");

    const int out_rows = (env.rows() - window.height) / window.stride + 1;
    const int out_cols = (env.cols() - window.width) / window.stride + 1;
    const int nparam = model_param_count(kind);

    ParametricImageSet set;
    set.maps.resize(size_t(nparam));
    for (int j = 0; j < nparam; ++j) {
        ParametricMap& m = set.maps[size_t(j)];
        m.values.resize(out_rows, out_cols);
        m.parameter_name = model_param_name(kind, j);
        m.kind = kind;
        m.window = window;
        m.frame_id = envelope.frame_id;
        m.group_id = envelope.group_id;
        m.class_label = envelope.class_label;
    }

    const size_t sites = size_t(out_rows) * size_t(out_cols);
    std::vector<unsigned char> failed(sites, 0);

    auto fit_site = [&](size_t site) {
        const int sr = int(site) / out_cols;
        const int sc = int(site) % out_cols;
        const int r0 = sr * window.stride;
        const int c0 = sc * window.stride;
        std::vector<double> xs;
        xs.reserve(size_t(window.height) * window.width);
        for (int r = 0; r < window.height; ++r)
            for (int c = 0; c < window.width; ++c)
                xs.push_back(double(env(r0 + r, c0 + c)));

        ModelParams p;
        try {
            p = fit_mle(kind, xs, options).params;
        } catch (const Error&) {
            failed[site] = 1;
            try {
                p = moment_init(kind, xs);
                for (int j = 0; j < nparam; ++j)
                    p.p[j] = std::clamp(p.p[j], options.lower[j], options.upper[j]);
            } catch (const Error&) {
                p.kind = kind;
                for (int j = 0; j < nparam; ++j) p.p[j] = options.lower[j];
            }
        }
        for (int j = 0; j < nparam; ++j)
            set.maps[size_t(j)].values(sr, sc) = float(p.p[j]);
    };

    if (threads == 1 || sites <= 1) {
        for (size_t site = 0; site < sites; ++site) fit_site(site);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        const int n_workers = int(std::min<size_t>(size_t(threads), sites));
        pool.reserve(size_t(n_workers));
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back([&] {
                for (size_t site = next.fetch_add(1); site < sites;
                     site = next.fetch_add(1))
                    fit_site(site);
            });
        for (auto& th : pool) th.join();
    }

    int failures = 0;
    for (unsigned char f : failed) failures += f;
    for (auto& m : set.maps) m.fit_failures = failures;
    return set;
}

MapStats map_stats(const ParametricMap& map) {
    require(!map.values.empty(), ErrorCode::argument, "map is empty");
    const auto& v = map.values.storage();
    MapStats s;
    s.fit_failures = map.fit_failures;
    double sum = 0.0;
    s.min = v[0];
    s.max = v[0];
    for (float x : v) {
        sum += x;
        s.min = std::min(s.min, double(x));
        s.max = std::max(s.max, double(x));
    }
    s.mean = sum / double(v.size());
    double ss = 0.0;
    for (float x : v) {
        const double d = double(x) - s.mean;
        ss += d * d;
    }
    s.variance = ss / double(v.size());
    std::vector<float> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    s.median = n % 2 ? sorted[n / 2]
                     : 0.5 * (double(sorted[n / 2 - 1]) + double(sorted[n / 2]));
    return s;
}

void save_map(const ParametricMap& map, const std::string& path) {
    require(!map.values.empty(), ErrorCode::argument, "map is empty");
    container::Entries e;
    e.emplace_back("kind", model_name(map.kind));
    e.emplace_back("parameter_name", map.parameter_name);
    e.emplace_back("window_height", std::to_string(map.window.height));
    e.emplace_back("window_width", std::to_string(map.window.width));
    e.emplace_back("stride", std::to_string(map.window.stride));
    e.emplace_back("fit_failures", std::to_string(map.fit_failures));
    e.emplace_back("frame_id", map.frame_id);
    e.emplace_back("group_id", map.group_id);
    if (map.class_label) e.emplace_back("class_label", class_label_name(*map.class_label));
    container::write(path, e, map.values);
}

ParametricMap load_map(const std::string& path) {
    container::Entries e;
    ParametricMap m;
    m.values = container::read(path, e);
    const std::string& kind = container::need(e, "kind", path);
    try {
        m.kind = model_from_name(kind);
    } catch (const Error&) {
        fail(ErrorCode::format,
             "field 'kind' of '" + path + "' is not a model name: '" + kind + "'");
    }
    m.parameter_name = container::need(e, "parameter_name", path);
    m.window.height = int(container::parse_integer(e, "window_height", path));
    m.window.width = int(container::parse_integer(e, "window_width", path));
    m.window.stride = int(container::parse_integer(e, "stride", path));
    m.fit_failures = int(container::parse_integer(e, "fit_failures", path));
    m.frame_id = container::need(e, "frame_id", path);
    m.group_id = container::need(e, "group_id", path);
    if (const std::string* label = container::find(e, "class_label")) {
        try {
            m.class_label = class_label_from_name(*label);
        } catch (const Error&) {
            fail(ErrorCode::format, "field 'class_label' of '" + path +
                                        "' has unknown value '" + *label + "'");
        }
    }
    return m;
}

} // namespace usqt
