#include "fractal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace usqt {

double similarity_dimension(double pieces, double scale) {
    require(pieces > 0.0, ErrorCode::argument, "piece count must be positive");
    require(scale > 0.0 && scale < 1.0, ErrorCode::argument,
            "scale factor must lie strictly between 0 and 1");
    return std::log(pieces) / std::log(1.0 / scale);
}

FractalEstimate fractal_dimension(const MatrixD& image) {
    const int rows = image.rows(), cols = image.cols();
    require(rows >= 8 && cols >= 8, ErrorCode::argument,
            "roughness estimation needs at least an 8x8 image");

    // Mean absolute increment at each dyadic lag, pooled over the vertical
    // and horizontal directions. For a self-affine surface this grows as
    // lag^hurst, so the log-log slope estimates the roughness exponent.
    std::vector<double> log_lag, log_inc;
    for (int lag : {1, 2, 4, 8}) {
        double sum = 0.0;
        long count = 0;
        for (int r = 0; r + lag < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                sum += std::abs(image(r + lag, c) - image(r, c));
                ++count;
            }
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c + lag < cols; ++c) {
                sum += std::abs(image(r, c + lag) - image(r, c));
                ++count;
            }
        if (count == 0) continue;
        const double mean = sum / double(count);
        if (mean <= 0.0) continue; // no variation at this lag
        log_lag.push_back(std::log(double(lag)));
        log_inc.push_back(std::log(mean));
    }
    require(log_lag.size() >= 2, ErrorCode::degenerate_data,
            "image has no measurable variation at two or more lags");

    // Least-squares line through (log lag, log mean increment).
    const size_t n = log_lag.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += log_lag[i];
        my += log_inc[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = log_lag[i] - mx, dy = log_inc[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;

    FractalEstimate est;
    est.hurst = std::clamp(slope, 0.0, 1.0);
    est.fd = 3.0 - est.hurst;
    if (syy <= 0.0) {
        est.regression_r2 = 1.0; // flat line fitted exactly
    } else {
        const double ss_res = syy - sxy * sxy / sxx;
        est.regression_r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return est;
}

double lacunarity(const MatrixD& image) {
    require(image.rows() > 0 && image.cols() > 0, ErrorCode::argument,
            "lacunarity of an empty image is undefined");
    double sum = 0.0;
    for (const double v : image.storage()) sum += v;
    const double n = double(image.storage().size());
    const double mean = sum / n;
    require(mean > 0.0, ErrorCode::degenerate_data,
            "lacunarity needs a positive mean intensity");
    // Second moment about the mean rather than E[x^2]/mean^2 - 1: the two
    // are identical in exact arithmetic, but this form cancels exactly for
    // constant input instead of leaving the rounding residue of two
    // near-equal quotients.
    double centered = 0.0;
    for (const double v : image.storage()) {
        const double d = v - mean;
        centered += d * d;
    }
    return (centered / n) / (mean * mean);
}

namespace {

double node_roughness(const MatrixD& node) {
    MatrixD magnitude(node.rows(), node.cols());
    for (size_t i = 0; i < node.storage().size(); ++i)
        magnitude.storage()[i] = std::abs(node.storage()[i]);
    try {
        return fractal_dimension(magnitude).fd;
    } catch (const Error&) {
        return 2.0; // unmeasurable nodes count as perfectly smooth
    }
}

void select_recurse(const WaveletPacketTree& tree, int level, int index,
                    double fd, Basis& out) {
    if (level == tree.levels) {
        out.emplace_back(level, index);
        return;
    }
    std::array<double, 4> child_fd{};
    double roughest = 0.0;
    for (int q = 0; q < 4; ++q) {
        child_fd[size_t(q)] = node_roughness(tree.nodes[size_t(level) + 1]
                                                       [size_t(4 * index + q)]);
        roughest = std::max(roughest, child_fd[size_t(q)]);
    }
    if (roughest > fd) {
        for (int q = 0; q < 4; ++q)
            select_recurse(tree, level + 1, 4 * index + q, child_fd[size_t(q)],
                           out);
    } else {
        out.emplace_back(level, index);
    }
}

} // namespace

Basis select_basis(const WaveletPacketTree& tree) {
    require(!tree.nodes.empty() && !tree.nodes[0].empty(), ErrorCode::argument,
            "basis selection needs a decomposed tree");
    Basis basis;
    select_recurse(tree, 0, 0, node_roughness(tree.nodes[0][0]), basis);
    return basis;
}

FeatureVector extract_features(const ParametricImageSet& maps, int depth,
                               const Basis& basis) {
    require(!maps.maps.empty(), ErrorCode::argument,
            "feature extraction needs at least one parametric map");
    require(depth >= 1, ErrorCode::argument,
            "decomposition depth must be at least 1");
    require(basis_tiles_plane(depth, basis), ErrorCode::argument,
            "subband basis must tile the frequency plane exactly once");

    const int block = 1 << depth;
    FeatureVector fv;
    fv.frame_id = maps.maps.front().frame_id;
    fv.group_id = maps.maps.front().group_id;
    fv.class_label = maps.maps.front().class_label;
    fv.values.reserve(maps.maps.size() * basis.size() * 2);
    fv.names.reserve(maps.maps.size() * basis.size() * 2);
    fv.degenerate.reserve(maps.maps.size() * basis.size());

    for (const ParametricMap& map : maps.maps) {
        const int crop_rows = (map.values.rows() / block) * block;
        const int crop_cols = (map.values.cols() / block) * block;
        if (crop_rows < 8 * block || crop_cols < 8 * block) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "map %s.%s is %dx%d; depth %d needs at least %dx%d "
                          "after cropping",
                          model_name(map.kind), map.parameter_name.c_str(),
                          map.values.rows(), map.values.cols(), depth,
                          8 * block, 8 * block);
            fail(ErrorCode::argument, msg);
        }
        MatrixF cropped(crop_rows, crop_cols);
        for (int r = 0; r < crop_rows; ++r)
            for (int c = 0; c < crop_cols; ++c) cropped(r, c) = map.values(r, c);
        const WaveletPacketTree tree = wpt_decompose(cropped, depth);

        for (const auto& [level, index] : basis) {
            const MatrixD& node = tree.nodes[size_t(level)][size_t(index)];
            MatrixD magnitude(node.rows(), node.cols());
            for (size_t i = 0; i < node.storage().size(); ++i)
                magnitude.storage()[i] = std::abs(node.storage()[i]);

            double fd = 2.0, lac = 0.0;
            bool bad = false;
            try {
                fd = fractal_dimension(magnitude).fd;
            } catch (const Error&) {
                bad = true;
            }
            try {
                lac = lacunarity(magnitude);
            } catch (const Error&) {
                lac = 0.0;
                bad = true;
            }
            const std::string stem = std::string(model_name(map.kind)) + "." +
                                     map.parameter_name + ".l" +
                                     std::to_string(level) + "q" +
                                     std::to_string(index) + ".";
            fv.values.push_back(bad ? 2.0 : fd);
            fv.names.push_back(stem + "fd");
            fv.values.push_back(bad ? 0.0 : lac);
            fv.names.push_back(stem + "lac");
            fv.degenerate.push_back(bad ? 1 : 0);
        }
    }
    return fv;
}

} // namespace usqt
