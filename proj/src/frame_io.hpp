#pragma once

#include "common.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace usqt {

// One beamformed RF frame: rows are axial samples, columns are scan lines.
struct RFFrame {
    MatrixF samples;
    double sampling_rate_hz = 0.0;
    double center_frequency_hz = 0.0;
    std::string frame_id;
    std::string group_id; // lesion/subject grouping for leakage-safe CV
    std::optional<ClassLabel> class_label;
};

// Envelope-detected image with the provenance needed downstream.
struct EnvelopeImage {
    MatrixF values;
    std::string frame_id;
    std::string group_id;
    std::optional<ClassLabel> class_label;
};

// Throws an argument error unless the frame is nonempty and the sampling
// rate exceeds twice the center frequency.
void validate_frame(const RFFrame& frame);

// On-disk container shared by frames, envelopes, and parametric maps:
// a raw little-endian float32 payload (row-major) at `path` plus a UTF-8
// `key=value` text header at `path + ".hdr"`. The writer emits rows/cols
// from the payload shape; the reader checks the payload length against the
// declared shape and rejects non-finite samples, naming the row, column,
// and payload byte offset.
namespace container {

using Entries = std::vector<std::pair<std::string, std::string>>;

extern const char kHeaderSuffix[]; // ".hdr"

void write(const std::string& path, const Entries& header, const MatrixF& payload);
MatrixF read(const std::string& path, Entries& header_out);

// First value stored under `key`, or nullptr.
const std::string* find(const Entries& entries, const std::string& key);
// Same, but a missing key is a format error naming the field and file.
const std::string& need(const Entries& entries, const std::string& key,
                        const std::string& path);
// Strict numeric parses; failures are format errors naming the field.
double parse_real(const Entries& entries, const std::string& key,
                  const std::string& path);
long parse_integer(const Entries& entries, const std::string& key,
                   const std::string& path);

} // namespace container

// RF frame files carry kind=rf plus sampling_rate_hz, center_frequency_hz,
// frame_id, group_id, and an optional class_label. Envelope files carry
// kind=envelope with the same provenance keys. Loads validate kind, shape,
// finiteness, and (for envelopes) nonnegativity. The `extra` overloads
// append caller-supplied header entries (e.g. run provenance) after the
// standard ones; readers ignore keys they do not know.
void save_rf(const RFFrame& frame, const std::string& path);
void save_rf(const RFFrame& frame, const std::string& path,
             const container::Entries& extra);
RFFrame load_rf(const std::string& path);
void save_envelope(const EnvelopeImage& image, const std::string& path);
void save_envelope(const EnvelopeImage& image, const std::string& path,
                   const container::Entries& extra);
EnvelopeImage load_envelope(const std::string& path);

} // namespace usqt
