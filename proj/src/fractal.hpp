#pragma once

// Multiscale roughness features. A parametric map is decomposed into
// wavelet-packet subbands; each selected subband is summarized by a fractal
// dimension (variogram regression) and a lacunarity (normalized second
// moment). Subband selection greedily splits a node whenever one of its
// children looks rougher than the node itself, so the basis adapts to where
// the spatial detail actually lives.

#include "common.hpp"
#include "pmap.hpp"
#include "wavelet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace usqt {

// Dimension of an exactly self-similar set made of `pieces` copies, each
// scaled down by `scale` (0 < scale < 1): log(pieces) / log(1/scale).
double similarity_dimension(double pieces, double scale);

struct FractalEstimate {
    double fd = 0.0;            // surface fractal dimension, in [2, 3]
    double hurst = 0.0;         // roughness exponent, fd = 3 - hurst
    double regression_r2 = 0.0; // goodness of the log-log variogram fit
};

// Estimates surface roughness of a single-channel image by regressing the
// log mean absolute increment against log lag over dyadic lags {1,2,4,8}.
// Requires at least 8x8 pixels; throws degenerate_data when the image has
// no variation at any usable lag.
FractalEstimate fractal_dimension(const MatrixD& image);

// Gap statistic mean(F^2) / mean(F)^2 - 1 for a non-negative texture F.
// Zero for constant images, invariant to positive rescaling, larger when
// mass is concentrated in sparse clumps. Throws when the image is empty or
// its mean is not positive.
double lacunarity(const MatrixD& image);

// Chooses a wavelet-packet basis by walking the tree from the root: a node
// is split into its four children only when the roughest child exceeds the
// node's own fractal dimension (ties keep the parent). Nodes whose
// dimension cannot be estimated count as perfectly smooth (fd = 2).
Basis select_basis(const WaveletPacketTree& tree);

// One frame's feature row: for every map in the set and every basis node,
// the fractal dimension then the lacunarity of the subband magnitudes.
struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> names; // <model>.<param>.l<level>q<index>.{fd,lac}
    std::vector<uint8_t> degenerate; // one flag per (map, subband) pair
    std::string frame_id;
    std::string group_id;
    std::optional<ClassLabel> class_label;
};

// Computes the feature row for one frame's parametric maps. Each map is
// cropped at the top-left to the largest size divisible by 2^depth,
// decomposed to `depth`, and summarized over the given basis (levels may be
// anywhere in [0, depth]). Degenerate subbands contribute the sentinel pair
// (fd = 2, lacunarity = 0) and set their flag rather than failing the frame.
FeatureVector extract_features(const ParametricImageSet& maps, int depth,
                               const Basis& basis);

} // namespace usqt
