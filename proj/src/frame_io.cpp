#include "frame_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

namespace usqt {

const char* class_label_name(ClassLabel label) {
    switch (label) {
        case ClassLabel::respondent: return "respondent";
        case ClassLabel::non_respondent: return "non-respondent";
    }
    fail(ErrorCode::internal, "unreachable class label");
}

ClassLabel class_label_from_name(const std::string& name) {
    if (name == "respondent") return ClassLabel::respondent;
    if (name == "non-respondent") return ClassLabel::non_respondent;
    fail(ErrorCode::argument, "unknown class label '" + name +
                                  "' (expected respondent or non-respondent)");
}

void validate_frame(const RFFrame& frame) {
    require(!frame.samples.empty(), ErrorCode::argument,
            "frame sample matrix must be nonempty");
    require(frame.sampling_rate_hz > 0.0 && frame.center_frequency_hz > 0.0,
            ErrorCode::argument, "frame sampling and center frequencies must be > 0");
    require(frame.sampling_rate_hz > 2.0 * frame.center_frequency_hz,
            ErrorCode::argument,
            "sampling_rate_hz must exceed twice center_frequency_hz");
}

namespace container {

const char kHeaderSuffix[] = ".hdr";

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

const std::string* find(const Entries& entries, const std::string& key) {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

const std::string& need(const Entries& entries, const std::string& key,
                        const std::string& path) {
    const std::string* v = find(entries, key);
    if (!v)
        fail(ErrorCode::format,
             "header of '" + path + "' is missing the field '" + key + "'");
    return *v;
}

double parse_real(const Entries& entries, const std::string& key,
                  const std::string& path) {
    const std::string& text = need(entries, key, path);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end != text.c_str() + text.size() || text.empty() ||
        !std::isfinite(v))
        fail(ErrorCode::format, "field '" + key + "' of '" + path +
                                    "' is not a finite real: '" + text + "'");
    return v;
}

long parse_integer(const Entries& entries, const std::string& key,
                   const std::string& path) {
    const std::string& text = need(entries, key, path);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size() || text.empty())
        fail(ErrorCode::format, "field '" + key + "' of '" + path +
                                    "' is not an integer: '" + text + "'");
    return v;
}

void write(const std::string& path, const Entries& header, const MatrixF& payload) {
    Entries all;
    all.emplace_back("rows", std::to_string(payload.rows()));
    all.emplace_back("cols", std::to_string(payload.cols()));
    all.insert(all.end(), header.begin(), header.end());

    std::string text;
    for (const auto& [k, v] : all) {
        require(!k.empty() && k.find('=') == std::string::npos &&
                    k.find('\n') == std::string::npos,
                ErrorCode::argument, "header key '" + k + "' is not writable");
        require(v.find('\n') == std::string::npos, ErrorCode::argument,
                "header value for '" + k + "' must not contain newlines");
        text += k;
        text += '=';
        text += v;
        text += '\n';
    }

    const std::string hdr_path = path + kHeaderSuffix;
    std::ofstream hdr(hdr_path, std::ios::binary | std::ios::trunc);
    require(hdr.good(), ErrorCode::io, "cannot open '" + hdr_path + "' for writing");
    hdr.write(text.data(), std::streamsize(text.size()));
    hdr.close();
    require(hdr.good(), ErrorCode::io, "failed writing '" + hdr_path + "'");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(payload.data()),
              std::streamsize(payload.size() * sizeof(float)));
    out.close();
    require(out.good(), ErrorCode::io, "failed writing '" + path + "'");
}

MatrixF read(const std::string& path, Entries& header_out) {
    const std::string hdr_path = path + kHeaderSuffix;
    std::ifstream hdr(hdr_path, std::ios::binary);
    require(hdr.good(), ErrorCode::io, "cannot open '" + hdr_path + "'");
    std::string text((std::istreambuf_iterator<char>(hdr)),
                     std::istreambuf_iterator<char>());
    require(!hdr.bad(), ErrorCode::io, "failed reading '" + hdr_path + "'");

    header_out.clear();
    int line_no = 0;
    for (size_t pos = 0; pos < text.size();) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos = end + 1;
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(ErrorCode::format, "header line " + std::to_string(line_no) +
                                        " of '" + hdr_path +
                                        "' is not a key=value pair: '" + line + "'");
        header_out.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }

    const long rows = parse_integer(header_out, "rows", path);
    const long cols = parse_integer(header_out, "cols", path);
    if (rows <= 0 || rows > std::numeric_limits<int>::max())
        fail(ErrorCode::format, "field 'rows' of '" + path + "' is out of range");
    if (cols <= 0 || cols > std::numeric_limits<int>::max())
        fail(ErrorCode::format, "field 'cols' of '" + path + "' is out of range");

    std::ifstream in(path, std::ios::binary | std::ios::ate);
    require(in.good(), ErrorCode::io, "cannot open '" + path + "'");
    const auto actual = static_cast<unsigned long long>(in.tellg());
    const unsigned long long expected =
        4ULL * static_cast<unsigned long long>(rows) *
        static_cast<unsigned long long>(cols);
    if (actual != expected)
        fail(ErrorCode::format,
             "payload of '" + path + "' holds " + std::to_string(actual) +
                 " bytes but the header shape " + std::to_string(rows) + "x" +
                 std::to_string(cols) + " requires " + std::to_string(expected));
    in.seekg(0);
    MatrixF m(static_cast<int>(rows), static_cast<int>(cols));
    in.read(reinterpret_cast<char*>(m.data()),
            std::streamsize(m.size() * sizeof(float)));
    require(in.good(), ErrorCode::io, "failed reading '" + path + "'");

    const float* data = m.data();
    for (size_t i = 0; i < m.size(); ++i) {
        if (!std::isfinite(data[i]))
            fail(ErrorCode::format,
                 "non-finite sample in '" + path + "' at row " +
                     std::to_string(long(i) / cols) + ", col " +
                     std::to_string(long(i) % cols) + " (payload byte offset " +
                     std::to_string(4 * i) + ")");
    }
    return m;
}

} // namespace container

namespace {

void append_provenance(container::Entries& e, const std::string& frame_id,
                       const std::string& group_id,
                       const std::optional<ClassLabel>& label) {
    e.emplace_back("frame_id", frame_id);
    e.emplace_back("group_id", group_id);
    if (label) e.emplace_back("class_label", class_label_name(*label));
}

void require_kind(const container::Entries& e, const std::string& expected,
                  const std::string& path) {
    const std::string& kind = container::need(e, "kind", path);
    if (kind != expected)
        fail(ErrorCode::format, "field 'kind' of '" + path + "' is '" + kind +
                                    "', expected '" + expected + "'");
}

std::optional<ClassLabel> read_label(const container::Entries& e,
                                     const std::string& path) {
    const std::string* text = container::find(e, "class_label");
    if (!text) return std::nullopt;
    try {
        return class_label_from_name(*text);
    } catch (const Error&) {
        fail(ErrorCode::format, "field 'class_label' of '" + path +
                                    "' has unknown value '" + *text + "'");
    }
}

} // namespace

void save_rf(const RFFrame& frame, const std::string& path) {
    save_rf(frame, path, {});
}

void save_rf(const RFFrame& frame, const std::string& path,
             const container::Entries& extra) {
    validate_frame(frame);
    container::Entries e;
    e.emplace_back("kind", "rf");
    e.emplace_back("sampling_rate_hz", [&] {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", frame.sampling_rate_hz);
        return std::string(buf);
    }());
    e.emplace_back("center_frequency_hz", [&] {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", frame.center_frequency_hz);
        return std::string(buf);
    }());
    append_provenance(e, frame.frame_id, frame.group_id, frame.class_label);
    e.insert(e.end(), extra.begin(), extra.end());
    container::write(path, e, frame.samples);
}

RFFrame load_rf(const std::string& path) {
    container::Entries e;
    RFFrame f;
    f.samples = container::read(path, e);
    require_kind(e, "rf", path);
    f.sampling_rate_hz = container::parse_real(e, "sampling_rate_hz", path);
    f.center_frequency_hz = container::parse_real(e, "center_frequency_hz", path);
    if (!(f.sampling_rate_hz > 0.0) || !(f.center_frequency_hz > 0.0) ||
        f.sampling_rate_hz <= 2.0 * f.center_frequency_hz)
        fail(ErrorCode::format,
             "field 'sampling_rate_hz' of '" + path +
                 "' must exceed twice center_frequency_hz and both must be > 0");
    f.frame_id = container::need(e, "frame_id", path);
    f.group_id = container::need(e, "group_id", path);
    f.class_label = read_label(e, path);
    return f;
}

void save_envelope(const EnvelopeImage& image, const std::string& path) {
    save_envelope(image, path, {});
}

void save_envelope(const EnvelopeImage& image, const std::string& path,
                   const container::Entries& extra) {
    require(!image.values.empty(), ErrorCode::argument,
            "envelope image must be nonempty");
    container::Entries e;
    e.emplace_back("kind", "envelope");
    append_provenance(e, image.frame_id, image.group_id, image.class_label);
    e.insert(e.end(), extra.begin(), extra.end());
    container::write(path, e, image.values);
}

EnvelopeImage load_envelope(const std::string& path) {
    container::Entries e;
    EnvelopeImage img;
    img.values = container::read(path, e);
    require_kind(e, "envelope", path);
    const float* data = img.values.data();
    for (size_t i = 0; i < img.values.size(); ++i) {
        if (data[i] < 0.0f)
            fail(ErrorCode::format,
                 "negative envelope value in '" + path + "' at row " +
                     std::to_string(long(i) / img.values.cols()) + ", col " +
                     std::to_string(long(i) % img.values.cols()));
    }
    img.frame_id = container::need(e, "frame_id", path);
    img.group_id = container::need(e, "group_id", path);
    img.class_label = read_label(e, path);
    return img;
}

} // namespace usqt
