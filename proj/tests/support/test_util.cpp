#include "test_util.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace usqt::test {

Moments sample_moments(const std::vector<double>& xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            const double d = x - m.mean;
            ss += d * d;
        }
        m.variance = ss / static_cast<double>(xs.size() - 1);
    }
    return m;
}

double mean_stderr(const Moments& m) {
    if (m.count < 2) return 0.0;
    return std::sqrt(m.variance / static_cast<double>(m.count));
}

void write_file(const std::string& path, const std::string& contents) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string scratch_dir() {
    static const std::string dir = [] {
        std::filesystem::path base = std::filesystem::temp_directory_path();
        std::ostringstream leaf;
        leaf << "usqt_test_" << static_cast<unsigned long>(::getpid());
        std::filesystem::path full = base / leaf.str();
        std::filesystem::create_directories(full);
        return full.string();
    }();
    return dir;
}

std::string scratch_dir(const std::string& name) {
    const std::filesystem::path full = std::filesystem::path(scratch_dir()) / name;
    std::filesystem::create_directories(full);
    return full.string();
}

std::string scratch_path(const std::string& leaf) {
    return (std::filesystem::path(scratch_dir()) / leaf).string();
}

} // namespace usqt::test
