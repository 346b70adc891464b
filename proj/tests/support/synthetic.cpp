#include "synthetic.hpp"

#include "fft.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace usqt::test {

MatrixD synth_fbm(int n, double hurst, uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<std::complex<double>>> grid;
    grid.assign(size_t(n), std::vector<std::complex<double>>(size_t(n)));
    // Sampling a continuum self-affine surface on an n x n lattice folds all
    // super-Nyquist power back into the lattice band, so the lattice power
    // spectrum is the sum of |f + n*k|^-(2*hurst+2) over integer replica
    // shifts k. Truncating the sum at |k| <= 3 keeps the error well below
    // the roughness-estimation tolerances this oracle serves.
    const double expo = hurst + 1.0;
    for (int i = 0; i < n; ++i) {
        const double fi = (i <= n / 2) ? double(i) : double(i - n);
        for (int j = 0; j < n; ++j) {
            const double fj = (j <= n / 2) ? double(j) : double(j - n);
            if (fi == 0.0 && fj == 0.0) {
                grid[size_t(i)][size_t(j)] = 0.0; // drop the mean
                continue;
            }
            double power = 0.0;
            for (int kx = -3; kx <= 3; ++kx)
                for (int ky = -3; ky <= 3; ++ky) {
                    const double gx = fi + double(n) * kx;
                    const double gy = fj + double(n) * ky;
                    power += std::pow(gx * gx + gy * gy, -expo);
                }
            grid[size_t(i)][size_t(j)] =
                std::complex<double>(rng.normal(), rng.normal()) *
                std::sqrt(power);
        }
    }
    // Inverse transform rows then columns; the real part has the same
    // power-law spectrum (Hermitian averaging only halves the power).
    for (int i = 0; i < n; ++i) fft(grid[size_t(i)], true);
    std::vector<std::complex<double>> col(size_t(n), std::complex<double>{});
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[size_t(i)] = grid[size_t(i)][size_t(j)];
        fft(col, true);
        for (int i = 0; i < n; ++i) grid[size_t(i)][size_t(j)] = col[size_t(i)];
    }
    MatrixD out(n, n);
    double min_v = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out(i, j) = grid[size_t(i)][size_t(j)].real();
            min_v = std::min(min_v, out(i, j));
        }
    for (auto& v : out.storage()) v -= min_v;
    return out;
}

} // namespace usqt::test
