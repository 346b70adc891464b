#include "distributions.hpp"

#include "rng.hpp"
#include "special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace usqt {

using special::log_bessel_i0;
using special::log_bessel_k;
using special::log_gamma;

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

struct BasicStats {
    double mean2 = 0.0; // E[x^2]
    double var2 = 0.0;  // population variance of x^2
    double mean4 = 0.0; // E[x^4]
    double var_x = 0.0; // population variance of x
};

BasicStats basic_stats(const std::vector<double>& xs) {
    BasicStats s;
    const double n = double(xs.size());
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (double x : xs) {
        const double x2 = x * x;
        s1 += x;
        s2 += x2;
        s4 += x2 * x2;
    }
    const double mean = s1 / n;
    s.mean2 = s2 / n;
    s.mean4 = s4 / n;
    s.var2 = std::max(0.0, s.mean4 - s.mean2 * s.mean2);
    s.var_x = std::max(0.0, s.mean2 - mean * mean);
    return s;
}

} // namespace

double nig_mixing_log_norm(double theta, double lambda) {
    // At lambda = 0 the limiting value Gamma(theta) 2^(theta-1) applies and
    // the density takes its gamma-mixing form.
    if (lambda == 0.0) return log_gamma(theta) + (theta - 1.0) * kLn2;
    return 0.5 * theta * std::log(lambda) + log_bessel_k(theta, std::sqrt(lambda));
}

const char* model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::rayleigh: return "rayleigh";
        case ModelKind::rician: return "rician";
        case ModelKind::k: return "k";
        case ModelKind::nakagami: return "nakagami";
        case ModelKind::nig: return "nig";
    }
    fail(ErrorCode::internal, "unreachable model kind");
}

ModelKind model_from_name(const std::string& name) {
    for (int i = 0; i < kModelCount; ++i) {
        const ModelKind kind = ModelKind(i);
        if (name == model_name(kind)) return kind;
    }
    fail(ErrorCode::argument,
         "unknown model '" + name + "' (expected rayleigh, rician, k, nakagami, or nig)");
}

int model_param_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::rayleigh: return 1;
        case ModelKind::rician: return 2;
        case ModelKind::k: return 2;
        case ModelKind::nakagami: return 2;
        case ModelKind::nig: return 4;
    }
    fail(ErrorCode::internal, "unreachable model kind");
}

const char* model_param_name(ModelKind kind, int index) {
    static const char* names[5][4] = {
        {"sigma2", nullptr, nullptr, nullptr},
        {"epsilon", "sigma2", nullptr, nullptr},
        {"alpha", "sigma2", nullptr, nullptr},
        {"m", "omega", nullptr, nullptr},
        {"m", "omega", "theta", "lambda"},
    };
    require(index >= 0 && index < model_param_count(kind), ErrorCode::argument,
            "parameter index out of range");
    return names[int(kind)][index];
}

ModelParams ModelParams::make_rayleigh(double sigma2) {
    return {ModelKind::rayleigh, {sigma2, 0.0, 0.0, 0.0}};
}
ModelParams ModelParams::make_rician(double epsilon, double sigma2) {
    return {ModelKind::rician, {epsilon, sigma2, 0.0, 0.0}};
}
ModelParams ModelParams::make_kdist(double alpha, double sigma2) {
    return {ModelKind::k, {alpha, sigma2, 0.0, 0.0}};
}
ModelParams ModelParams::make_nakagami(double m, double omega) {
    return {ModelKind::nakagami, {m, omega, 0.0, 0.0}};
}
ModelParams ModelParams::make_nig(double m, double omega, double theta, double lambda) {
    return {ModelKind::nig, {m, omega, theta, lambda}};
}

namespace {
void require_kind(const ModelParams& p, ModelKind kind) {
    require(p.kind == kind, ErrorCode::argument, "parameter tag does not match accessor");
}
} // namespace

RayleighParams ModelParams::as_rayleigh() const {
    require_kind(*this, ModelKind::rayleigh);
    return {p[0]};
}
RicianParams ModelParams::as_rician() const {
    require_kind(*this, ModelKind::rician);
    return {p[0], p[1]};
}
KDistParams ModelParams::as_kdist() const {
    require_kind(*this, ModelKind::k);
    return {p[0], p[1]};
}
NakagamiParams ModelParams::as_nakagami() const {
    require_kind(*this, ModelKind::nakagami);
    return {p[0], p[1]};
}
NigParams ModelParams::as_nig() const {
    require_kind(*this, ModelKind::nig);
    return {p[0], p[1], p[2], p[3]};
}

void validate_params(const ModelParams& params) {
    const int n = model_param_count(params.kind);
    for (int i = 0; i < n; ++i)
        require(std::isfinite(params.p[i]), ErrorCode::param_domain,
                std::string("parameter '") + model_param_name(params.kind, i) +
                    "' must be finite");
    auto positive = [&](int i) {
        require(params.p[i] > 0.0, ErrorCode::param_domain,
                std::string("parameter '") + model_param_name(params.kind, i) +
                    "' must be > 0");
    };
    switch (params.kind) {
        case ModelKind::rayleigh:
            positive(0);
            break;
        case ModelKind::rician:
            require(params.p[0] >= 0.0, ErrorCode::param_domain,
                    "parameter 'epsilon' must be >= 0");
            positive(1);
            break;
        case ModelKind::k:
            positive(0);
            positive(1);
            break;
        case ModelKind::nakagami:
            positive(0);
            positive(1);
            break;
        case ModelKind::nig:
            positive(0);
            positive(1);
            positive(2);
            require(params.p[3] >= 0.0, ErrorCode::param_domain,
                    "parameter 'lambda' must be >= 0");
            break;
    }
}

double log_pdf(const ModelParams& params, double x) {
    validate_params(params);
    require(std::isfinite(x) && x >= 0.0, ErrorCode::argument,
            "density argument must be finite and >= 0");
    if (x == 0.0) return -kInf;
    const double lx = std::log(x);
    switch (params.kind) {
        case ModelKind::rayleigh: {
            const auto [s2] = params.as_rayleigh();
            return lx - std::log(s2) - x * x / (2.0 * s2);
        }
        case ModelKind::rician: {
            const auto [eps, s2] = params.as_rician();
            return lx - std::log(s2) + log_bessel_i0(eps * x / s2) -
                   (eps * eps + x * x) / (2.0 * s2);
        }
        case ModelKind::k: {
            const auto [alpha, s2] = params.as_kdist();
            return 2.0 * kLn2 + alpha * lx - 0.5 * (alpha + 1.0) * std::log(2.0 * s2) -
                   log_gamma(alpha) + log_bessel_k(alpha - 1.0, x * std::sqrt(2.0 / s2));
        }
        case ModelKind::nakagami: {
            const auto [m, omega] = params.as_nakagami();
            return kLn2 + m * std::log(m) - log_gamma(m) - m * std::log(omega) +
                   (2.0 * m - 1.0) * lx - m * x * x / omega;
        }
        case ModelKind::nig: {
            const auto [m, omega, theta, lambda] = params.as_nig();
            const double x2 = x * x;
            return kLn2 + m * std::log(m) - 0.5 * (m + theta) * std::log(omega) -
                   nig_mixing_log_norm(theta, lambda) - log_gamma(m) + (2.0 * m - 1.0) * lx +
                   0.5 * (theta - m) * std::log(lambda * omega + 2.0 * m * x2) +
                   log_bessel_k(theta - m, std::sqrt(lambda + 2.0 * m * x2 / omega));
        }
    }
    fail(ErrorCode::internal, "unreachable model kind");
}

double pdf(const ModelParams& params, double x) {
    const double lp = log_pdf(params, x);
    return lp == -kInf ? 0.0 : std::exp(lp);
}

double log_likelihood(const ModelParams& params, const std::vector<double>& samples) {
    validate_params(params);
    require(!samples.empty(), ErrorCode::argument,
            "log_likelihood requires at least one sample");
    double max_x = 0.0;
    for (double x : samples) {
        require(std::isfinite(x) && x >= 0.0, ErrorCode::argument,
                "samples must be finite and >= 0");
        max_x = std::max(max_x, x);
    }
    const double zero_substitute = 1e-12 * max_x;
    double total = 0.0;
    for (double x : samples) {
        total += log_pdf(params, x == 0.0 ? zero_substitute : x);
        if (total == -kInf) break;
    }
    return total;
}

std::vector<double> sample(const ModelParams& params, int count, uint64_t seed) {
    validate_params(params);
    require(count >= 1, ErrorCode::argument, "sample count must be >= 1");
    Rng rng(seed);
    std::vector<double> out(static_cast<size_t>(count));
    switch (params.kind) {
        case ModelKind::rayleigh: {
            const auto [s2] = params.as_rayleigh();
            for (auto& x : out) x = std::sqrt(-2.0 * s2 * std::log(rng.uniform_pos()));
            break;
        }
        case ModelKind::rician: {
            const auto [eps, s2] = params.as_rician();
            const double s = std::sqrt(s2);
            for (auto& x : out)
                x = std::hypot(eps + s * rng.normal(), s * rng.normal());
            break;
        }
        case ModelKind::k: {
            const auto [alpha, s2] = params.as_kdist();
            for (auto& x : out) {
                const double g = rng.gamma(alpha, s2);
                x = std::sqrt(-2.0 * g * std::log(rng.uniform_pos()));
            }
            break;
        }
        case ModelKind::nakagami: {
            const auto [m, omega] = params.as_nakagami();
            for (auto& x : out) x = std::sqrt(rng.gamma(m, omega / m));
            break;
        }
        case ModelKind::nig: {
            const auto [m, omega, theta, lambda] = params.as_nig();
            for (auto& x : out) {
                const double w = rng.gig(theta, 1.0 / omega, lambda * omega);
                x = std::sqrt(rng.gamma(m, w / m));
            }
            break;
        }
    }
    return out;
}

void check_fit_samples(ModelKind kind, const std::vector<double>& samples) {
    require(!samples.empty(), ErrorCode::argument, "samples must be nonempty");
    int positive = 0;
    for (double x : samples) {
        require(std::isfinite(x) && x >= 0.0, ErrorCode::argument,
                "samples must be finite and >= 0");
        positive += x > 0.0 ? 1 : 0;
    }
    require(positive >= model_param_count(kind) + 1, ErrorCode::argument,
            "need more strictly positive samples than parameters");
}

void default_param_bounds(ModelKind kind, double lower[4], double upper[4]) {
    for (int i = 0; i < 4; ++i) {
        lower[i] = 0.0;
        upper[i] = 0.0;
    }
    switch (kind) {
        case ModelKind::rayleigh:
            lower[0] = 1e-15;
            upper[0] = 1e15;
            break;
        case ModelKind::rician:
            lower[0] = 1e-12; // effectively zero coherent amplitude
            upper[0] = 1e12;
            lower[1] = 1e-15;
            upper[1] = 1e15;
            break;
        case ModelKind::k:
            lower[0] = 1e-2;
            upper[0] = 1e4;
            lower[1] = 1e-15;
            upper[1] = 1e15;
            break;
        case ModelKind::nakagami:
            lower[0] = 1e-3;
            upper[0] = 1e4;
            lower[1] = 1e-15;
            upper[1] = 1e15;
            break;
        case ModelKind::nig:
            lower[0] = 1e-3;
            upper[0] = 1e4;
            lower[1] = 1e-15;
            upper[1] = 1e15;
            lower[2] = 1e-3; // mixing-shape ridge guard
            upper[2] = 1e3;
            lower[3] = 1e-6; // mixing-concentration ridge guard
            upper[3] = 1e6;
            break;
    }
}

ModelParams moment_init(ModelKind kind, const std::vector<double>& samples) {
    check_fit_samples(kind, samples);
    const BasicStats s = basic_stats(samples);
    require(s.var_x > 0.0, ErrorCode::degenerate_data,
            "samples are constant; moments carry no shape information");
    double lo[4], hi[4];
    default_param_bounds(kind, lo, hi);
    switch (kind) {
        case ModelKind::rayleigh:
            return ModelParams::make_rayleigh(clamp(s.mean2 / 2.0, lo[0], hi[0]));
        case ModelKind::rician: {
            // x^2 is noncentral chi-square (2 dof): E[x^2] = eps^2 + 2 s2,
            // Var[x^2] = 4 s2^2 + 4 s2 eps^2; solve the quadratic for s2.
            const double disc = s.mean2 * s.mean2 - s.var2;
            double sigma2, eps;
            if (disc <= 0.0) {
                sigma2 = s.mean2 / 2.0;
                eps = lo[0];
            } else {
                sigma2 = 0.5 * (s.mean2 - std::sqrt(disc));
                eps = std::pow(disc, 0.25);
            }
            return ModelParams::make_rician(clamp(eps, lo[0], hi[0]),
                                            clamp(sigma2, lo[1], hi[1]));
        }
        case ModelKind::k: {
            // E[x^4]/E[x^2]^2 = 2 (1 + 1/alpha); the estimator diverges as the
            // data approach Rayleigh (ratio -> 2), where the bound takes over.
            const double ratio = s.mean4 / (s.mean2 * s.mean2);
            const double alpha =
                ratio <= 2.0 ? hi[0] : clamp(2.0 / (ratio - 2.0), lo[0], hi[0]);
            return ModelParams::make_kdist(alpha,
                                           clamp(s.mean2 / (2.0 * alpha), lo[1], hi[1]));
        }
        case ModelKind::nakagami: {
            const double m = clamp(s.mean2 * s.mean2 / s.var2, lo[0], hi[0]);
            return ModelParams::make_nakagami(m, clamp(s.mean2, lo[1], hi[1]));
        }
        case ModelKind::nig: {
            const double m = clamp(s.mean2 * s.mean2 / s.var2, lo[0], hi[0]);
            return ModelParams::make_nig(m, clamp(s.mean2, lo[1], hi[1]), 1.0, 1.0);
        }
    }
    fail(ErrorCode::internal, "unreachable model kind");
}

double envelope_snr(const std::vector<double>& samples) {
    require(!samples.empty(), ErrorCode::argument, "envelope_snr requires samples");
    double sum = 0.0;
    for (double x : samples) {
        require(std::isfinite(x), ErrorCode::argument, "samples must be finite");
        sum += x;
    }
    const double mean = sum / double(samples.size());
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    require(ss > 0.0 && samples.size() > 1, ErrorCode::degenerate_data,
            "envelope_snr undefined for constant samples");
    const double sd = std::sqrt(ss / double(samples.size() - 1));
    return mean / sd;
}

} // namespace usqt
