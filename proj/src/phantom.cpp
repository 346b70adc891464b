#include "phantom.hpp"

#include "rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

namespace usqt {

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::pre_rayleigh: return "pre-rayleigh";
        case Regime::rayleigh: return "rayleigh";
        case Regime::post_rayleigh: return "post-rayleigh";
    }
    fail(ErrorCode::internal, "unknown regime tag");
}

namespace {

void validate_spec(const PhantomSpec& spec) {
    require(spec.rows > 0 && spec.cols > 0, ErrorCode::argument,
            "phantom grid dimensions must be positive");
    require(spec.density > 0.0 && std::isfinite(spec.density),
            ErrorCode::argument, "scatterer density must be positive");
    require(spec.coherent_ratio >= 0.0 && std::isfinite(spec.coherent_ratio),
            ErrorCode::argument, "coherent ratio must be non-negative");
    require(spec.amplitude_variance >= 0.0 &&
                std::isfinite(spec.amplitude_variance),
            ErrorCode::argument, "amplitude variance must be non-negative");
    require(spec.psf.pulse_length >= 4, ErrorCode::argument,
            "pulse length must be at least 4 samples");
    require(spec.psf.lateral_width >= 1, ErrorCode::argument,
            "lateral width must be at least 1 line");
    require(spec.psf.center_frequency > 0.0 &&
                spec.psf.center_frequency < 0.5,
            ErrorCode::argument,
            "center frequency must lie strictly between 0 and Nyquist (0.5)");
    if (spec.periodic_spacing)
        require(*spec.periodic_spacing >= 2.0 &&
                    std::isfinite(*spec.periodic_spacing),
                ErrorCode::argument,
                "periodic spacing must be at least 2 samples");
    // The frame must hold a 20 x 20 grid of resolution cells so interior
    // statistics are meaningful.
    require(spec.rows >= 20 * spec.psf.pulse_length, ErrorCode::argument,
            "grid must span at least 20 resolution cells axially");
    require(spec.cols >= 20 * spec.psf.lateral_width, ErrorCode::argument,
            "grid must span at least 20 resolution cells laterally");
}

Regime classify_regime(const PhantomSpec& spec) {
    if (spec.coherent_ratio >= 2.0) return Regime::post_rayleigh;
    if (spec.density < 3.0 && spec.coherent_ratio == 0.0)
        return Regime::pre_rayleigh;
    return Regime::rayleigh;
}

// Axial pulse: Gaussian envelope modulated at the carrier. The nominal
// pulse length is twice the Gaussian RMS width, and the support is
// truncated at 4 sigma where the envelope is ~3e-4. This sizing keeps the
// effective scatterer count per point-spread function high enough that the
// nominal per-cell density governs the speckle regime.
std::vector<double> axial_kernel(const PsfSpec& psf) {
    const double sigma = double(psf.pulse_length) / 2.0;
    const int half = 2 * psf.pulse_length;
    std::vector<double> k(size_t(2 * half + 1));
    for (int t = -half; t <= half; ++t)
        k[size_t(t + half)] =
            std::exp(-0.5 * (t / sigma) * (t / sigma)) *
            std::cos(2.0 * std::numbers::pi * psf.center_frequency * t);
    return k;
}

std::vector<double> lateral_kernel(const PsfSpec& psf) {
    const double sigma = double(psf.lateral_width) / 2.0;
    const int half = 2 * psf.lateral_width;
    std::vector<double> k(size_t(2 * half + 1));
    for (int x = -half; x <= half; ++x)
        k[size_t(x + half)] = std::exp(-0.5 * (x / sigma) * (x / sigma));
    return k;
}

} // namespace

int axial_margin(const PsfSpec& psf) { return 2 * psf.pulse_length; }
int lateral_margin(const PsfSpec& psf) { return 2 * psf.lateral_width; }

PhantomFrame synthesize(const PhantomSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);

    // Unit-mean lognormal amplitudes with the requested variance.
    const double ln_var = std::log1p(spec.amplitude_variance);
    const double ln_sigma = std::sqrt(ln_var);
    const double ln_mu = -0.5 * ln_var;
    auto draw_amplitude = [&]() {
        return std::exp(ln_mu + ln_sigma * rng.normal());
    };

    PhantomFrame frame;
    frame.truth.spec = spec;
    frame.truth.regime = classify_regime(spec);

    // Diffuse scatterers: Poisson count over the whole grid at
    // density / (resolution cell area), uniform positions.
    MatrixD field(spec.rows, spec.cols, 0.0);
    const double cell_area =
        double(spec.psf.pulse_length) * double(spec.psf.lateral_width);
    const double mean_count =
        spec.density * double(spec.rows) * double(spec.cols) / cell_area;
    const int64_t count = rng.poisson(mean_count);
    frame.truth.scatterers.reserve(size_t(count));
    for (int64_t i = 0; i < count; ++i) {
        const int r = int(rng.uniform() * spec.rows);
        const int c = int(rng.uniform() * spec.cols);
        const double a = draw_amplitude();
        field(r, c) += a;
        frame.truth.scatterers.push_back({r, c, a});
    }

    // Optional aligned scatterer planes every periodic_spacing samples.
    if (spec.periodic_spacing) {
        const double spacing = *spec.periodic_spacing;
        for (double rp = spacing * 0.5; rp < double(spec.rows); rp += spacing) {
            const int r = int(rp);
            for (int c = 0; c < spec.cols; ++c) {
                const double a = draw_amplitude();
                field(r, c) += a;
                frame.truth.scatterers.push_back({r, c, a});
            }
        }
    }

    // Separable convolution with the pulse.
    const std::vector<double> ka = axial_kernel(spec.psf);
    const std::vector<double> kl = lateral_kernel(spec.psf);
    const int ha = int(ka.size()) / 2, hl = int(kl.size()) / 2;
    MatrixD tmp(spec.rows, spec.cols, 0.0);
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            const double v = field(r, c);
            if (v == 0.0) continue;
            const int t0 = std::max(-ha, -r);
            const int t1 = std::min(ha, spec.rows - 1 - r);
            for (int t = t0; t <= t1; ++t)
                tmp(r + t, c) += v * ka[size_t(t + ha)];
        }
    MatrixD rf(spec.rows, spec.cols, 0.0);
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            const double v = tmp(r, c);
            if (v == 0.0) continue;
            const int x0 = std::max(-hl, -c);
            const int x1 = std::min(hl, spec.cols - 1 - c);
            for (int x = x0; x <= x1; ++x)
                rf(r, c + x) += v * kl[size_t(x + hl)];
        }

    // Constant coherent reflector at the carrier. Its amplitude is set
    // against the diffuse envelope RMS predicted for a filtered Poisson
    // field (shot-noise variance: rate x E[amplitude^2] x kernel energy),
    // so the ratio is an input, not a measurement.
    if (spec.coherent_ratio > 0.0) {
        double kernel_energy = 0.0;
        for (double a : ka)
            for (double l : kl) kernel_energy += (a * l) * (a * l);
        const double rate = spec.density / cell_area; // per sample
        const double amp_ms = 1.0 + spec.amplitude_variance; // E[a^2], mean 1
        const double rf_var = rate * amp_ms * kernel_energy;
        const double coherent_amp =
            spec.coherent_ratio * std::sqrt(2.0 * rf_var);
        for (int r = 0; r < spec.rows; ++r) {
            const double carrier =
                coherent_amp * std::cos(2.0 * std::numbers::pi *
                                        spec.psf.center_frequency * r);
            for (int c = 0; c < spec.cols; ++c) rf(r, c) += carrier;
        }
    }

    frame.rf.samples.resize(spec.rows, spec.cols);
    for (size_t i = 0; i < rf.storage().size(); ++i)
        frame.rf.samples.storage()[i] = float(rf.storage()[i]);
    frame.rf.sampling_rate_hz = 1.0;
    frame.rf.center_frequency_hz = spec.psf.center_frequency;
    return frame;
}

std::vector<PhantomFrame> make_dataset(const PhantomSpec& class_a,
                                       const PhantomSpec& class_b,
                                       int frames_per_class,
                                       int groups_per_class, uint64_t seed) {
    require(frames_per_class >= 1, ErrorCode::argument,
            "need at least one frame per class");
    require(groups_per_class >= 1 && groups_per_class <= frames_per_class,
            ErrorCode::argument,
            "groups per class must be in [1, frames_per_class]");
    std::vector<PhantomFrame> frames;
    frames.reserve(size_t(2 * frames_per_class));
    for (int cls = 0; cls < 2; ++cls) {
        const PhantomSpec& base = cls == 0 ? class_a : class_b;
        const char tag = cls == 0 ? 'a' : 'b';
        for (int i = 0; i < frames_per_class; ++i) {
            PhantomSpec spec = base;
            spec.seed =
                derive_seed(seed, uint64_t(cls * frames_per_class + i));
            PhantomFrame frame = synthesize(spec);
            char id[32];
            std::snprintf(id, sizeof id, "%c_%03d", tag, i);
            frame.rf.frame_id = id;
            std::snprintf(id, sizeof id, "g%c_%d", tag,
                          i % groups_per_class);
            frame.rf.group_id = id;
            frame.rf.class_label = cls == 0 ? ClassLabel::respondent
                                            : ClassLabel::non_respondent;
            frames.push_back(std::move(frame));
        }
    }
    return frames;
}

void save_truth(const std::string& path, const PhantomTruth& truth) {
    save_truth(path, truth, {});
}

void save_truth(const std::string& path, const PhantomTruth& truth,
                const std::vector<std::pair<std::string, std::string>>& extra) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) fail(ErrorCode::io, "cannot open " + path + " for writing");
    const PhantomSpec& s = truth.spec;
    for (const auto& [k, v] : extra)
        std::fprintf(f, "%s=%s\n", k.c_str(), v.c_str());
    std::fprintf(f, "regime=%s\n", regime_name(truth.regime));
    std::fprintf(f, "rows=%d\ncols=%d\n", s.rows, s.cols);
    std::fprintf(f, "density=%.17g\n", s.density);
    std::fprintf(f, "coherent_ratio=%.17g\n", s.coherent_ratio);
    if (s.periodic_spacing)
        std::fprintf(f, "periodic_spacing=%.17g\n", *s.periodic_spacing);
    std::fprintf(f, "amplitude_variance=%.17g\n", s.amplitude_variance);
    std::fprintf(f, "pulse_length=%d\n", s.psf.pulse_length);
    std::fprintf(f, "lateral_width=%d\n", s.psf.lateral_width);
    std::fprintf(f, "center_frequency=%.17g\n", s.psf.center_frequency);
    std::fprintf(f, "seed=%llu\n", (unsigned long long)s.seed);
    std::fprintf(f, "scatterer_count=%zu\n", truth.scatterers.size());
    if (std::fclose(f) != 0)
        fail(ErrorCode::io, "failed to finish writing " + path);
}

} // namespace usqt
