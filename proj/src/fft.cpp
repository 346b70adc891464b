#include "fft.hpp"

#include "common.hpp"

#include <cmath>

namespace usqt {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
    size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / double(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Bluestein chirp-z: re-expresses an arbitrary-length DFT as a circular
// convolution of power-of-two length >= 2n-1.
void fft_bluestein(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    const size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    // chirp[k] = exp(sign * i * pi * k^2 / n); k^2 mod 2n keeps the phase
    // argument small for exactness at large k.
    std::vector<std::complex<double>> chirp(n);
    for (size_t k = 0; k < n; ++k) {
        const size_t k2 = (k * k) % (2 * n);
        const double ang = sign * kPi * double(k2) / double(n);
        chirp[k] = std::complex<double>(std::cos(ang), std::sin(ang));
    }

    std::vector<std::complex<double>> x(m, {0.0, 0.0}), y(m, {0.0, 0.0});
    for (size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);

    fft_pow2(x, false);
    fft_pow2(y, false);
    for (size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, true);
    const double scale = 1.0 / double(m);
    for (size_t k = 0; k < n; ++k) a[k] = x[k] * scale * chirp[k];
}

} // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    const size_t n = data.size();
    require(n >= 1, ErrorCode::argument, "fft requires a non-empty input");
    if (n > 1) {
        if (is_pow2(n)) {
            fft_pow2(data, inverse);
        } else {
            fft_bluestein(data, inverse);
        }
    }
    if (inverse) {
        const double scale = 1.0 / double(n);
        for (auto& v : data) v *= scale;
    }
}

} // namespace usqt
