#include "rng.hpp"

#include "common.hpp"

#include <cmath>

namespace usqt {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

uint64_t derive_seed(uint64_t base, uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = kTwoPi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

double Rng::gamma(double shape, double scale) {
    require(shape > 0.0 && scale > 0.0, ErrorCode::param_domain,
            "gamma sampler requires shape > 0 and scale > 0");
    if (shape < 1.0) {
        // Boost: if G ~ Gamma(shape + 1) and U uniform, G * U^{1/shape} has
        // the target shape < 1 distribution.
        const double u = uniform_pos();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze method.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

int64_t Rng::poisson_knuth(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double p = 1.0;
    int64_t k = 0;
    do {
        ++k;
        p *= uniform_pos();
    } while (p > limit);
    return k - 1;
}

int64_t Rng::poisson(double mean) {
    require(mean >= 0.0 && std::isfinite(mean), ErrorCode::param_domain,
            "poisson sampler requires a finite mean >= 0");
    // Split a large mean into chunks; Poisson counts are additive in the
    // mean, and the product-of-uniforms loop stays in exp() range for the
    // per-chunk mean used here.
    int64_t total = 0;
    while (mean > 30.0) {
        total += poisson_knuth(30.0);
        mean -= 30.0;
    }
    total += poisson_knuth(mean);
    return total;
}

double Rng::gig(double p, double a, double b) {
    require(std::isfinite(p) && std::isfinite(a) && std::isfinite(b),
            ErrorCode::param_domain, "gig sampler requires finite parameters");
    require(a > 0.0 && b >= 0.0 && (b > 0.0 || p > 0.0), ErrorCode::param_domain,
            "gig sampler requires a > 0 and b > 0 (or b = 0 with p > 0)");
    if (b == 0.0) return gamma(p, 2.0 / a); // density reduces to a gamma law

    // Work with t = log(w): the log-density h(t) = p t - (a e^t + b e^-t)/2
    // is strictly concave, so an exponential envelope built from two
    // tangents plus the flat top at the mode dominates it everywhere.
    const double ab = a * b;
    const double ustar = (p + std::sqrt(p * p + ab)) / a; // mode in w
    const double tstar = std::log(ustar);
    const double hstar = p * tstar - 0.5 * (a * ustar + b / ustar);
    auto hat = [&](double t) {
        const double w = std::exp(t);
        return p * t - 0.5 * (a * w + b / w) - hstar;
    };
    auto slope = [&](double t) {
        const double w = std::exp(t);
        return p - 0.5 * (a * w - b / w);
    };

    // Pick tangent points roughly one to three nats below the peak on each
    // side; any choice keeps the envelope valid, this one keeps it tight.
    const double curvature = 0.5 * (a * ustar + b / ustar); // -h''(tstar) > 0
    auto tangent_point = [&](double direction) {
        double step = 1.0 / std::sqrt(curvature);
        if (!(step > 1e-3)) step = 1e-3;
        if (step > 2.0) step = 2.0;
        double t = tstar + direction * step;
        int guard = 0;
        while (hat(t) > -1.0 && ++guard < 200) {
            step *= 2.0;
            t = tstar + direction * step;
        }
        guard = 0;
        while (hat(t) < -3.0 && ++guard < 200) {
            step *= 0.7;
            t = tstar + direction * step;
        }
        return t;
    };
    const double tl = tangent_point(-1.0);
    const double tr = tangent_point(+1.0);
    const double gl = slope(tl); // > 0 left of the mode
    const double gr = slope(tr); // < 0 right of the mode
    // Tangent lines reach envelope height 0 at these abscissae.
    const double cl = tl - hat(tl) / gl;
    const double cr = tr - hat(tr) / gr;

    const double mass_left = 1.0 / gl;
    const double mass_mid = cr - cl;
    const double mass_right = -1.0 / gr;
    const double mass = mass_left + mass_mid + mass_right;

    for (;;) {
        const double pick = uniform() * mass;
        const double u = uniform_pos();
        double t, env;
        if (pick < mass_left) {
            t = cl + std::log(u) / gl;
            env = gl * (t - cl);
        } else if (pick < mass_left + mass_mid) {
            t = cl + (pick - mass_left); // uniform over the flat segment
            env = 0.0;
        } else {
            t = cr + std::log(u) / gr;
            env = gr * (t - cr);
        }
        if (std::log(uniform_pos()) <= hat(t) - env) return std::exp(t);
    }
}

uint64_t Rng::below(uint64_t n) {
    require(n > 0, ErrorCode::argument, "below() requires n > 0");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

} // namespace usqt
