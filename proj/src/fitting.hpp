#pragma once

#include "distributions.hpp"

namespace usqt {

struct FitOptions {
    int max_iterations = 500;
    double tolerance = 1e-8; // relative log-likelihood spread at convergence
    // Box constraints indexed like ModelParams::p; entries beyond the kind's
    // parameter count are ignored.
    double lower[4] = {0.0, 0.0, 0.0, 0.0};
    double upper[4] = {0.0, 0.0, 0.0, 0.0};
    // The four-parameter family has a flat likelihood ridge in its mixing
    // pair (theta, lambda): freeing them buys chi-square-noise-scale gains
    // while inflating their variance enormously. The fit therefore first
    // maximizes over (m, omega) with the mixing pair held at the
    // initializer, then releases all four and keeps the released optimum
    // only when it improves the log-likelihood by more than this relative
    // threshold. Points inside the band count as ties and resolve toward
    // the initializer; 0 always adopts the released optimum.
    double ridge_tie_tolerance = 1e-3;

    static FitOptions defaults(ModelKind kind);
};

struct FitResult {
    ModelParams params;
    double log_likelihood = 0.0;
    int iterations = 0;
};

// Raised when the optimizer exhausts its iteration budget before the
// stopping rule fires; carries the best point seen.
class FitConvergenceError : public Error {
  public:
    FitConvergenceError(const std::string& message, FitResult best)
        : Error(ErrorCode::convergence, message), best_(best) {}
    const FitResult& best() const { return best_; }

  private:
    FitResult best_;
};

// Maximum-likelihood fit. Scale parameters with closed-form maximizers are
// solved exactly (Rayleigh scale; Nakagami spread, with the shape found by a
// safeguarded Newton iteration); the remaining models run a bounded
// derivative-free simplex search in log-parameter space from moment_init.
// The result's likelihood never falls below the initializer's. Samples equal
// to exactly 0 are substituted as in log_likelihood.
FitResult fit_mle(ModelKind kind, const std::vector<double>& samples,
                  const FitOptions& options);
FitResult fit_mle(ModelKind kind, const std::vector<double>& samples);

} // namespace usqt
