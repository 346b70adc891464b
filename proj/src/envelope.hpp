#pragma once

#include "common.hpp"
#include "frame_io.hpp"

namespace usqt {

// Amplitude envelope of an RF frame. Columns are scan lines and rows are
// axial samples; each column is demodulated independently as the magnitude
// of its analytic signal (one-sided spectrum doubling). Output shape equals
// input shape and all values are >= 0. No log compression or gain is applied.
MatrixF envelope_detect(const MatrixF& rf);

// Validates the frame, demodulates its sample matrix, and carries the
// provenance fields through to the envelope image.
EnvelopeImage detect_envelope(const RFFrame& frame);

} // namespace usqt
