#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace usqt {

// Deterministic random source. The engine is the standard-specified
// mt19937_64; every distribution on top is implemented here so sequences
// are bit-identical across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t bits() { return engine_(); }

    // [0, 1)
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }
    // (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }

    double normal();
    double gamma(double shape, double scale);
    int64_t poisson(double mean);

    // Generalized inverse Gaussian: density proportional to
    // w^{p-1} exp(-(a w + b / w) / 2) on w > 0. Requires a > 0 and
    // either b > 0 or p > 0.
    double gig(double p, double a, double b);

    // Unbiased integer in [0, n)
    uint64_t below(uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    int64_t poisson_knuth(double mean);

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stream-splitting helper so components draw from independent substreams.
uint64_t derive_seed(uint64_t base, uint64_t stream);

} // namespace usqt
