#pragma once

// Synthetic RF frames from controlled point-scatterer fields. Scatterers
// are placed by a spatial Poisson process with a prescribed mean count per
// resolution cell (pulse length x lateral width), given lognormal
// amplitudes, and convolved with a separable Gaussian-modulated sinusoidal
// pulse. Optional additions: a constant coherent reflector component at the
// carrier and periodic planes of aligned scatterers. Every frame is
// reproducible from its spec alone.

#include "common.hpp"
#include "frame_io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace usqt {

struct PsfSpec {
    int pulse_length = 16;   // axial pulse extent in samples
    int lateral_width = 4;   // lateral beam extent in scan lines
    double center_frequency = 0.25; // carrier, cycles per sample, in (0, 0.5)
};

struct PhantomSpec {
    int rows = 400; // axial samples
    int cols = 96;  // scan lines
    double density = 20.0;        // mean scatterers per resolution cell
    double coherent_ratio = 0.0;  // coherent amplitude / RMS diffuse envelope
    std::optional<double> periodic_spacing; // samples between scatterer planes
    double amplitude_variance = 0.25; // variance of the unit-mean amplitude law
    PsfSpec psf;
    uint64_t seed = 0;
};

enum class Regime { pre_rayleigh = 0, rayleigh = 1, post_rayleigh = 2 };
const char* regime_name(Regime regime);

struct Scatterer {
    int row;
    int col;
    double amplitude;
};

struct PhantomTruth {
    PhantomSpec spec;
    Regime regime;
    std::vector<Scatterer> scatterers;
};

struct PhantomFrame {
    RFFrame rf;
    PhantomTruth truth;
};

// Interior margins outside which PSF tails and demodulation edge effects
// have died out; statistics should be measured inside them.
int axial_margin(const PsfSpec& psf);
int lateral_margin(const PsfSpec& psf);

// Builds one frame from the spec. Deterministic per seed.
PhantomFrame synthesize(const PhantomSpec& spec);

// Builds a labeled two-class dataset: class_a frames are respondents,
// class_b non-respondents. Frames are assigned round-robin to
// groups_per_class synthetic groups per class; per-frame seeds derive from
// the dataset seed, so the collection is reproducible as a whole.
std::vector<PhantomFrame> make_dataset(const PhantomSpec& class_a,
                                       const PhantomSpec& class_b,
                                       int frames_per_class,
                                       int groups_per_class, uint64_t seed);

// Writes the generating parameters, regime tag, and scatterer count as
// key=value lines. The `extra` overload writes caller-supplied lines first
// (e.g. run provenance); its keys must not collide with the standard ones.
void save_truth(const std::string& path, const PhantomTruth& truth);
void save_truth(const std::string& path, const PhantomTruth& truth,
                const std::vector<std::pair<std::string, std::string>>& extra);

} // namespace usqt
