#include "wavelet.hpp"

#include <cmath>

namespace usqt {

namespace {

// 8-tap orthonormal lowpass with four vanishing moments in its mirror.
constexpr std::array<double, 8> kLowpass = {
    0.23037781330885523,  0.71484657055254153, 0.63088076792959036,
    -0.02798376941698385, -0.18703481171888114, 0.03084138183598697,
    0.03288301166698295,  -0.01059740178499728,
};

std::array<double, 8> make_highpass() {
    std::array<double, 8> g{};
    for (int k = 0; k < 8; ++k)
        g[size_t(k)] = (k % 2 == 0 ? 1.0 : -1.0) * kLowpass[size_t(7 - k)];
    return g;
}

const std::array<double, 8> kHighpass = make_highpass();

// Periodized analysis of every row: out has the same rows and cols/2.
// band 0 applies the lowpass, band 1 the highpass.
MatrixD analyze_rows(const MatrixD& in, int band) {
    const auto& f = band == 0 ? kLowpass : kHighpass;
    const int n = in.cols();
    const int half = n / 2;
    MatrixD out(in.rows(), half);
    for (int r = 0; r < in.rows(); ++r)
        for (int i = 0; i < half; ++i) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += f[size_t(k)] * in(r, (2 * i + k) % n);
            out(r, i) = acc;
        }
    return out;
}

MatrixD analyze_cols(const MatrixD& in, int band) {
    const auto& f = band == 0 ? kLowpass : kHighpass;
    const int n = in.rows();
    const int half = n / 2;
    MatrixD out(half, in.cols());
    for (int c = 0; c < in.cols(); ++c)
        for (int i = 0; i < half; ++i) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += f[size_t(k)] * in((2 * i + k) % n, c);
            out(i, c) = acc;
        }
    return out;
}

// Transposed (synthesis) counterparts: given both bands, rebuild the signal.
MatrixD synthesize_rows(const MatrixD& lo, const MatrixD& hi) {
    const int half = lo.cols();
    const int n = 2 * half;
    MatrixD out(lo.rows(), n);
    for (int r = 0; r < lo.rows(); ++r)
        for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            for (int k = m % 2; k < 8; k += 2) {
                const int i = ((m - k) / 2 % half + half) % half;
                acc += kLowpass[size_t(k)] * lo(r, i) + kHighpass[size_t(k)] * hi(r, i);
            }
            out(r, m) = acc;
        }
    return out;
}

MatrixD synthesize_cols(const MatrixD& lo, const MatrixD& hi) {
    const int half = lo.rows();
    const int n = 2 * half;
    MatrixD out(n, lo.cols());
    for (int c = 0; c < lo.cols(); ++c)
        for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            for (int k = m % 2; k < 8; k += 2) {
                const int i = ((m - k) / 2 % half + half) % half;
                acc += kLowpass[size_t(k)] * lo(i, c) + kHighpass[size_t(k)] * hi(i, c);
            }
            out(m, c) = acc;
        }
    return out;
}

} // namespace

const std::array<double, 8>& wavelet_lowpass() { return kLowpass; }
const std::array<double, 8>& wavelet_highpass() { return kHighpass; }

WaveletPacketTree wpt_decompose(const MatrixF& input, int depth) {
    require(depth >= 1, ErrorCode::argument, "decomposition depth must be >= 1");
    require(!input.empty(), ErrorCode::argument, "input matrix is empty");
    const int scale = 1 << depth;
    require(input.rows() % scale == 0 && input.cols() % scale == 0,
            ErrorCode::argument,
            "input dimensions must be divisible by 2^depth for periodic splits");
    require(input.rows() >= 8 * scale && input.cols() >= 8 * scale,
            ErrorCode::argument,
            "input dimensions must be at least 8 * 2^depth for this filter length");

    WaveletPacketTree tree;
    tree.levels = depth;
    tree.nodes.resize(size_t(depth) + 1);
    tree.nodes[0].resize(1);
    MatrixD& root = tree.nodes[0][0];
    root.resize(input.rows(), input.cols());
    for (size_t i = 0; i < input.size(); ++i)
        root.storage()[i] = double(input.storage()[i]);

    for (int level = 0; level < depth; ++level) {
        const auto& parents = tree.nodes[size_t(level)];
        auto& children = tree.nodes[size_t(level) + 1];
        children.resize(parents.size() * 4);
        for (size_t p = 0; p < parents.size(); ++p) {
            const MatrixD lo_h = analyze_rows(parents[p], 0);
            const MatrixD hi_h = analyze_rows(parents[p], 1);
            for (int v = 0; v < 2; ++v) {
                children[4 * p + size_t(2 * v + 0)] = analyze_cols(lo_h, v);
                children[4 * p + size_t(2 * v + 1)] = analyze_cols(hi_h, v);
            }
        }
    }
    return tree;
}

MatrixD wpt_reconstruct(const WaveletPacketTree& tree) {
    require(tree.levels >= 1 && tree.nodes.size() == size_t(tree.levels) + 1,
            ErrorCode::argument, "tree is not a complete decomposition");
    std::vector<MatrixD> current = tree.nodes[size_t(tree.levels)];
    for (int level = tree.levels; level >= 1; --level) {
        std::vector<MatrixD> parents(current.size() / 4);
        for (size_t p = 0; p < parents.size(); ++p) {
            const MatrixD lo_h =
                synthesize_cols(current[4 * p + 0], current[4 * p + 2]);
            const MatrixD hi_h =
                synthesize_cols(current[4 * p + 1], current[4 * p + 3]);
            parents[p] = synthesize_rows(lo_h, hi_h);
        }
        current = std::move(parents);
    }
    return current[0];
}

Basis full_leaf_basis(int depth) {
    require(depth >= 1, ErrorCode::argument, "depth must be >= 1");
    Basis basis;
    const int count = 1 << (2 * depth);
    basis.reserve(size_t(count));
    for (int i = 0; i < count; ++i) basis.emplace_back(depth, i);
    return basis;
}

bool basis_tiles_plane(int depth, const Basis& basis) {
    if (depth < 1) return false;
    const int cells = 1 << (2 * depth);
    std::vector<int> cover(size_t(cells), 0);
    for (const auto& [level, index] : basis) {
        if (level < 0 || level > depth) return false;
        if (index < 0 || index >= (1 << (2 * level))) return false;
        const int span = 1 << (2 * (depth - level));
        for (int c = index * span; c < (index + 1) * span; ++c) cover[size_t(c)]++;
    }
    for (int c : cover)
        if (c != 1) return false;
    return true;
}

} // namespace usqt
