#include "envelope.hpp"

#include "fft.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace usqt {

MatrixF envelope_detect(const MatrixF& rf) {
    require(rf.rows() > 0 && rf.cols() > 0, ErrorCode::argument,
            "envelope_detect requires a nonempty frame");
    require(rf.rows() >= 8, ErrorCode::argument,
            "envelope_detect requires at least 8 samples per scan line");
    const int n = rf.rows();
    MatrixF out(n, rf.cols());
    std::vector<std::complex<double>> line(static_cast<size_t>(n));
    for (int c = 0; c < rf.cols(); ++c) {
        for (int r = 0; r < n; ++r) line[r] = {double(rf(r, c)), 0.0};
        fft(line, false);
        // One-sided spectrum: keep DC (and Nyquist when n is even) as-is,
        // double strictly positive frequencies, zero the negative half.
        const int half = n / 2;
        const int pos_end = (n % 2 == 0) ? half : half + 1;
        for (int k = 1; k < pos_end; ++k) line[k] *= 2.0;
        for (int k = (n % 2 == 0) ? half + 1 : pos_end; k < n; ++k)
            line[k] = {0.0, 0.0};
        fft(line, true);
        for (int r = 0; r < n; ++r)
            out(r, c) = float(std::abs(line[r]));
    }
    return out;
}

} // namespace usqt

namespace usqt {

EnvelopeImage detect_envelope(const RFFrame& frame) {
    validate_frame(frame);
    EnvelopeImage img;
    img.values = envelope_detect(frame.samples);
    img.frame_id = frame.frame_id;
    img.group_id = frame.group_id;
    img.class_label = frame.class_label;
    return img;
}

} // namespace usqt
