#pragma once

#include "common.hpp"

#include <array>
#include <utility>
#include <vector>

namespace usqt {

// Orthonormal 8-tap filter pair used by the packet transform (unit-energy
// lowpass with sqrt(2) DC gain; quadrature-mirror highpass).
const std::array<double, 8>& wavelet_lowpass();
const std::array<double, 8>& wavelet_highpass();

// Full two-dimensional wavelet-packet tree under periodic extension.
// nodes[l][i] is the subband at level l (0 = the input itself) and index
// i < 4^l; the children of (l, i) are (l+1, 4i+q) with q = 2*row_band +
// col_band, where band 0 is the lowpass half along that axis. Subbands are
// kept in double precision so reconstruction error stays at rounding level.
struct WaveletPacketTree {
    int levels = 0;
    std::vector<std::vector<MatrixD>> nodes;
};

// Subbands chosen as terminals: (level, index) pairs.
using Basis = std::vector<std::pair<int, int>>;

// Decomposes to the given depth (>= 1). Both input dimensions must be
// divisible by 2^depth and at least 8 * 2^depth so every periodized split
// stays orthonormal.
WaveletPacketTree wpt_decompose(const MatrixF& input, int depth);

// Inverse transform from the deepest level of the full tree.
MatrixD wpt_reconstruct(const WaveletPacketTree& tree);

// All 4^depth deepest-level subbands, in index order.
Basis full_leaf_basis(int depth);

// True when the basis covers the time-frequency plane exactly once:
// every deepest-level cell has exactly one chosen ancestor-or-self.
bool basis_tiles_plane(int depth, const Basis& basis);

} // namespace usqt
