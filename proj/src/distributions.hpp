#pragma once

#include "common.hpp"

#include <cstdint>
#include <vector>

namespace usqt {

// Envelope-amplitude distribution parameters. Scale parameters carry
// amplitude-squared units; shape parameters are dimensionless.
struct RayleighParams {
    double sigma2; // > 0
};
struct RicianParams {
    double epsilon; // coherent amplitude, >= 0
    double sigma2;  // > 0
};
struct KDistParams {
    double alpha;  // shape (effective scatterer clustering), > 0
    double sigma2; // > 0
};
struct NakagamiParams {
    double m;     // shape, > 0
    double omega; // spread (mean square amplitude), > 0
};
struct NigParams {
    double m;      // > 0
    double omega;  // > 0
    double theta;  // mixing shape, > 0
    double lambda; // mixing concentration, >= 0 (0 selects the gamma-mixing limit)
};

// Tagged union over the five parameter types. Values live in a flat array in
// the canonical order given by model_param_name(kind, i), which keeps generic
// optimizer and serialization code trivial; typed accessors check the tag.
struct ModelParams {
    ModelKind kind = ModelKind::rayleigh;
    double p[4] = {0.0, 0.0, 0.0, 0.0};

    static ModelParams make_rayleigh(double sigma2);
    static ModelParams make_rician(double epsilon, double sigma2);
    static ModelParams make_kdist(double alpha, double sigma2);
    static ModelParams make_nakagami(double m, double omega);
    static ModelParams make_nig(double m, double omega, double theta, double lambda);

    RayleighParams as_rayleigh() const;
    RicianParams as_rician() const;
    KDistParams as_kdist() const;
    NakagamiParams as_nakagami() const;
    NigParams as_nig() const;
};

// Throws a parameter-domain error unless params satisfy the invariants of
// their kind (positivity, finiteness).
void validate_params(const ModelParams& params);

// Density at x >= 0. Exactly 0 at x = 0 for every model.
double pdf(const ModelParams& params, double x);

// log pdf; -inf where the density vanishes.
double log_pdf(const ModelParams& params, double x);

// Sum of log pdf over samples. Samples equal to exactly 0 are replaced by
// 1e-12 times the sample maximum first (envelope quantization can produce
// zeros, and every model's density vanishes at 0). -inf is representable.
double log_likelihood(const ModelParams& params, const std::vector<double>& samples);

// Draws count >= 1 samples; deterministic for a fixed seed.
std::vector<double> sample(const ModelParams& params, int count, uint64_t seed);

// Default estimation bounds per kind, indexed like ModelParams::p. Entries
// beyond the kind's parameter count are set to 0.
void default_param_bounds(ModelKind kind, double lower[4], double upper[4]);

// Moment-matching initializer used to start maximum-likelihood fits.
// Shape estimates are clamped into the default fit bounds for the kind.
ModelParams moment_init(ModelKind kind, const std::vector<double>& samples);

// mean / standard deviation of the samples.
double envelope_snr(const std::vector<double>& samples);

// Shared guard for estimation entry points: samples nonempty with at least
// (parameter count + 1) strictly positive values, all finite and >= 0.
void check_fit_samples(ModelKind kind, const std::vector<double>& samples);

// log of the mixed-spread normalizer lambda^{theta/2} K_theta(sqrt(lambda));
// continuous at lambda = 0 where it becomes Gamma(theta) 2^{theta-1}.
double nig_mixing_log_norm(double theta, double lambda);

} // namespace usqt
