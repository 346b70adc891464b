#pragma once

#include "common.hpp"
#include "fitting.hpp"
#include "frame_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace usqt {

// Sliding-window geometry for local parameter estimation. Height and width
// are odd sample counts (axial x lateral); the window must hold at least
// three samples per model parameter.
struct WindowSpec {
    int height = 15;
    int width = 15;
    int stride = 1;
};

void validate_window(const WindowSpec& window, ModelKind kind);

// One parameter image: values(i, j) is that parameter's local estimate for
// the window whose top-left corner sits at (i*stride, j*stride) on the
// source envelope. Only fully interior windows are evaluated, so the map
// shape is the envelope shape shrunk by the window and divided by stride.
struct ParametricMap {
    MatrixF values;
    std::string parameter_name;
    ModelKind kind = ModelKind::rayleigh;
    WindowSpec window;
    std::string frame_id;
    std::string group_id;
    std::optional<ClassLabel> class_label;
    int fit_failures = 0;
};

struct ParametricImageSet {
    std::vector<ParametricMap> maps; // one per model parameter, in order
};

struct MapStats {
    double mean = 0.0;
    double median = 0.0;
    double variance = 0.0; // population
    double min = 0.0;
    double max = 0.0;
    int fit_failures = 0;
};

// Fits the model over every stride-grid window of the envelope. Sites where
// the fit fails fall back to the moment initializer (clamped into the
// option bounds) and are tallied in fit_failures; sites where even the
// initializer is undefined (e.g. an all-zero window) fall back to the lower
// parameter bounds. Results are bit-identical for any thread count.
ParametricImageSet generate_maps(const EnvelopeImage& envelope, ModelKind kind,
                                 const WindowSpec& window,
                                 const FitOptions& options, int threads = 1);

MapStats map_stats(const ParametricMap& map);

// Maps persist in the shared header+float32 container; the header carries
// kind (model name), parameter_name, window geometry, stride, fit_failures,
// and provenance.
void save_map(const ParametricMap& map, const std::string& path);
ParametricMap load_map(const std::string& path);

} // namespace usqt
