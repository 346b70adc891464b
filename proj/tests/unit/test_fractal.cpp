#include <doctest.h>

#include "distributions.hpp"
#include "fractal.hpp"
#include "rng.hpp"
#include "support/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace usqt;

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MatrixD abs_noise(int rows, int cols, uint64_t seed) {
    MatrixD m(rows, cols);
    Rng rng(seed);
    for (auto& v : m.storage()) v = std::abs(rng.normal());
    return m;
}

} // namespace

TEST_CASE("similarity dimension of three half-scale pieces is log3/log2") {
    CHECK(similarity_dimension(3.0, 0.5) == std::log(3.0) / std::log(2.0));
    CHECK(similarity_dimension(4.0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(similarity_dimension(9.0, 1.0 / 3.0) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("surface roughness estimates track the synthesis exponent") {
    std::vector<double> fds;
    for (double hurst : {0.2, 0.5, 0.8}) {
        std::vector<double> runs;
        for (uint64_t seed = 0; seed < 5; ++seed)
            runs.push_back(
                fractal_dimension(test::synth_fbm(256, hurst, 4000 + seed)).fd);
        fds.push_back(median(runs));
        CHECK(std::abs(fds.back() - (3.0 - hurst)) < 0.1);
    }
    CHECK(fds[0] > fds[1]);
    CHECK(fds[1] > fds[2]);
}

TEST_CASE("dimension and exponent stay consistent and bounded") {
    const MatrixD surface = test::synth_fbm(128, 0.5, 4100);
    const FractalEstimate est = fractal_dimension(surface);
    CHECK(est.fd >= 2.0);
    CHECK(est.fd <= 3.0);
    CHECK(est.hurst >= 0.0);
    CHECK(est.hurst <= 1.0);
    CHECK(std::abs(est.fd - (3.0 - est.hurst)) < 1e-12);
    CHECK(est.regression_r2 >= 0.0);
    CHECK(est.regression_r2 <= 1.0);
    CHECK(est.regression_r2 > 0.9); // a clean power law regresses well
}

TEST_CASE("white noise saturates at the rough end") {
    CHECK(fractal_dimension(abs_noise(128, 128, 4200)).fd >= 2.9);
}

TEST_CASE("dimension is invariant to positive affine intensity changes") {
    const MatrixD surface = test::synth_fbm(64, 0.6, 4300);
    MatrixD scaled = surface;
    for (auto& v : scaled.storage()) v = 2.75 * v + 1.5;
    const FractalEstimate a = fractal_dimension(surface);
    const FractalEstimate b = fractal_dimension(scaled);
    CHECK(std::abs(a.fd - b.fd) < 1e-9);
}

TEST_CASE("degenerate and undersized patches are rejected") {
    MatrixD constant(16, 16, 3.0);
    CHECK_THROWS_WITH_AS(static_cast<void>(fractal_dimension(constant)),
                         doctest::Contains("variation"), Error);
    MatrixD tiny(4, 4, 0.0);
    tiny(1, 2) = 1.0;
    CHECK_THROWS_AS(static_cast<void>(fractal_dimension(tiny)), Error);
}

TEST_CASE("gap statistic matches the hand-computed cases exactly") {
    MatrixD constant(5, 7, 4.0);
    CHECK(lacunarity(constant) == 0.0);

    MatrixD two(1, 2);
    two(0, 0) = 0.0;
    two(0, 1) = 2.0;
    CHECK(lacunarity(two) == 1.0);

    MatrixD board(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) board(r, c) = ((r + c) % 2 == 0) ? 1.0 : 3.0;
    CHECK(lacunarity(board) == 0.25);
}

TEST_CASE("gap statistic ignores intensity scale") {
    const MatrixD surface = test::synth_fbm(64, 0.4, 4400);
    MatrixD scaled = surface;
    for (auto& v : scaled.storage()) v *= 1.7;
    CHECK(std::abs(lacunarity(scaled) - lacunarity(surface)) < 1e-12);
}

TEST_CASE("larger bright objects leave fewer gaps and lower the statistic") {
    auto disk_image = [](double radius) {
        MatrixD img(64, 64, 0.0);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c) {
                const double dr = r - 31.5, dc = c - 31.5;
                if (dr * dr + dc * dc <= radius * radius) img(r, c) = 1.0;
            }
        return img;
    };
    const double small = lacunarity(disk_image(8.0));
    const double mid = lacunarity(disk_image(16.0));
    const double large = lacunarity(disk_image(28.0));
    CHECK(small > mid);
    CHECK(mid > large);
}

TEST_CASE("zero-mean images cannot be scored") {
    MatrixD zeros(8, 8, 0.0);
    CHECK_THROWS_AS(static_cast<void>(lacunarity(zeros)), Error);
    MatrixD empty;
    CHECK_THROWS_AS(static_cast<void>(lacunarity(empty)), Error);
}

TEST_CASE("constant maps keep the root as the only selected subband") {
    MatrixF constant(64, 64, 2.5f);
    const WaveletPacketTree tree = wpt_decompose(constant, 2);
    const Basis basis = select_basis(tree);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0] == std::pair<int, int>(0, 0));
}

TEST_CASE("localized high-frequency content splits the root") {
    // Smooth gradient everywhere, rough fBm texture in one quadrant only:
    // one child tile sees far more roughness than the pooled parent.
    MatrixD quad = test::synth_fbm(32, 0.2, 4500);
    MatrixF map(64, 64);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) map(r, c) = float(r + c) / 64.0f;
    double amp = 0.0;
    for (double v : quad.storage()) amp = std::max(amp, v);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c)
            map(r, c) += float(8.0 * quad(r, c) / amp);
    const WaveletPacketTree tree = wpt_decompose(map, 1);
    const Basis basis = select_basis(tree);
    CHECK(basis.size() == 4);
    CHECK(basis_tiles_plane(1, basis));
}

TEST_CASE("selected bases always tile the plane") {
    for (uint64_t seed : {4600, 4601, 4602}) {
        MatrixF map(64, 64);
        const MatrixD s = test::synth_fbm(64, 0.5, seed);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c) map(r, c) = float(s(r, c));
        const WaveletPacketTree tree = wpt_decompose(map, 2);
        CHECK(basis_tiles_plane(2, select_basis(tree)));
    }
}

TEST_CASE("feature vectors have the documented layout and length") {
    const auto xs = sample(ModelParams::make_rayleigh(1.0), 64 * 64, 4700);
    ParametricImageSet set;
    for (int p = 0; p < 2; ++p) {
        ParametricMap m;
        m.kind = ModelKind::nakagami;
        m.parameter_name = model_param_name(ModelKind::nakagami, p);
        m.values.resize(64, 64);
        for (size_t i = 0; i < xs.size(); ++i)
            m.values.storage()[i] = float(xs[i] * (p + 1));
        m.frame_id = "f1";
        m.group_id = "g1";
        m.class_label = ClassLabel::respondent;
        set.maps.push_back(std::move(m));
    }
    const FeatureVector fv = extract_features(set, 1, full_leaf_basis(1));
    CHECK(fv.values.size() == 2 * 4 * 2); // maps x subbands x (fd, lac)
    CHECK(fv.names.size() == fv.values.size());
    CHECK(fv.degenerate.size() == 2 * 4);
    CHECK(fv.frame_id == "f1");
    CHECK(fv.group_id == "g1");
    REQUIRE(fv.class_label.has_value());
    CHECK(fv.names[0] == "nakagami.m.l1q0.fd");
    CHECK(fv.names[1] == "nakagami.m.l1q0.lac");
    CHECK(fv.names[8] == "nakagami.omega.l1q0.fd");
    for (double v : fv.values) CHECK(std::isfinite(v));

    const FeatureVector again = extract_features(set, 1, full_leaf_basis(1));
    CHECK(again.values == fv.values);
}

TEST_CASE("feature length is a pure function of kind, depth, basis size") {
    const auto xs = sample(ModelParams::make_rayleigh(2.0), 64 * 64, 4800);
    for (int kind = 0; kind < kModelCount; ++kind) {
        const ModelKind mk = ModelKind(kind);
        const int np = model_param_count(mk);
        ParametricImageSet set;
        for (int p = 0; p < np; ++p) {
            ParametricMap m;
            m.kind = mk;
            m.parameter_name = model_param_name(mk, p);
            m.values.resize(64, 64);
            for (size_t i = 0; i < xs.size(); ++i)
                m.values.storage()[i] = float(xs[i] + p);
            set.maps.push_back(std::move(m));
        }
        for (int depth : {1, 2}) {
            const Basis basis = full_leaf_basis(depth);
            const FeatureVector fv = extract_features(set, depth, basis);
            CHECK(fv.values.size() == size_t(np) * basis.size() * 2);
        }
    }
}

TEST_CASE("degenerate subbands contribute sentinels and flags") {
    ParametricImageSet set;
    ParametricMap m;
    m.kind = ModelKind::rayleigh;
    m.parameter_name = "sigma2";
    m.values.resize(64, 64, 1.25f); // constant map: every subband degenerate
    set.maps.push_back(std::move(m));
    const FeatureVector fv = extract_features(set, 1, full_leaf_basis(1));
    REQUIRE(fv.values.size() == 8);
    for (size_t q = 0; q < 4; ++q) {
        CHECK(fv.degenerate[q] == 1);
        CHECK(fv.values[2 * q] == 2.0);
        CHECK(fv.values[2 * q + 1] == 0.0);
    }
}

TEST_CASE("maps cropped to the transform grid still produce features") {
    ParametricImageSet set;
    ParametricMap m;
    m.kind = ModelKind::rayleigh;
    m.parameter_name = "sigma2";
    const MatrixD s = test::synth_fbm(64, 0.5, 4900);
    m.values.resize(57, 61); // not divisible by 4: cropped to 56x60
    for (int r = 0; r < 57; ++r)
        for (int c = 0; c < 61; ++c) m.values(r, c) = float(s(r % 64, c % 64));
    set.maps.push_back(std::move(m));
    const FeatureVector fv = extract_features(set, 2, full_leaf_basis(2));
    CHECK(fv.values.size() == 16 * 2);
    for (double v : fv.values) CHECK(std::isfinite(v));

    ParametricMap tiny = set.maps[0];
    tiny.values.resize(20, 20, 1.0f); // below 8 * 2^2 in both dimensions
    ParametricImageSet bad;
    bad.maps.push_back(std::move(tiny));
    CHECK_THROWS_AS(extract_features(bad, 2, full_leaf_basis(2)), Error);
}
