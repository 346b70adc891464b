#pragma once

#include <complex>
#include <vector>

namespace usqt {

// In-place discrete Fourier transform of arbitrary length n >= 1.
// Forward uses the exp(-2*pi*i*j*k/n) kernel; inverse applies the conjugate
// kernel and divides by n, so inverse(forward(x)) == x.
void fft(std::vector<std::complex<double>>& data, bool inverse);

} // namespace usqt
