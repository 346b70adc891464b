#include "fitting.hpp"

#include "special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace usqt {

using special::LogBesselKSeries;
using special::digamma;
using special::log_bessel_i0;
using special::log_gamma;
using special::trigamma;

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct SampleStats {
    std::vector<double> xs; // zero-substituted samples
    double n = 0.0;
    double sum_sq = 0.0;  // sum of x^2
    double sum_ln = 0.0;  // sum of ln x
    double min_x = 0.0;
    double max_x = 0.0;
    double mean_sq = 0.0;
};

SampleStats preprocess(const std::vector<double>& samples) {
    SampleStats s;
    s.xs = samples;
    double max_x = 0.0;
    for (double x : s.xs) max_x = std::max(max_x, x);
    const double zero_substitute = 1e-12 * max_x;
    s.min_x = kInf;
    for (double& x : s.xs) {
        if (x == 0.0) x = zero_substitute;
        s.sum_sq += x * x;
        s.sum_ln += std::log(x);
        s.min_x = std::min(s.min_x, x);
    }
    s.n = double(s.xs.size());
    s.max_x = max_x;
    s.mean_sq = s.sum_sq / s.n;
    return s;
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// --- per-kind log-likelihoods over preprocessed samples ------------------
//
// Sufficient-statistic forms are O(1); the Bessel-K families evaluate one
// Chebyshev proxy of log K_nu per sample, rebuilt whenever the order or the
// argument range moves (cheap next to the per-sample loop it replaces).

double ll_rayleigh(const SampleStats& s, double sigma2) {
    return s.sum_ln - s.n * std::log(sigma2) - s.sum_sq / (2.0 * sigma2);
}

double ll_nakagami(const SampleStats& s, double m, double omega) {
    return s.n * (kLn2 + m * std::log(m) - log_gamma(m) - m * std::log(omega)) +
           (2.0 * m - 1.0) * s.sum_ln - m / omega * s.sum_sq;
}

double ll_rician(const SampleStats& s, double eps, double sigma2) {
    double bessel = 0.0;
    const double scale = eps / sigma2;
    for (double x : s.xs) bessel += log_bessel_i0(scale * x);
    return s.sum_ln - s.n * std::log(sigma2) + bessel -
           (s.n * eps * eps + s.sum_sq) / (2.0 * sigma2);
}

double ll_kdist(const SampleStats& s, double alpha, double sigma2) {
    const double c = std::sqrt(2.0 / sigma2);
    const LogBesselKSeries lk(std::abs(alpha - 1.0), c * s.min_x, c * s.max_x);
    double bessel = 0.0;
    for (double x : s.xs) bessel += lk(c * x);
    return s.n * (2.0 * kLn2 - 0.5 * (alpha + 1.0) * std::log(2.0 * sigma2) -
                  log_gamma(alpha)) +
           alpha * s.sum_ln + bessel;
}

double ll_nig(const SampleStats& s, double m, double omega, double theta,
              double lambda) {
    const double two_m = 2.0 * m;
    const double ymin = std::sqrt(lambda + two_m * s.min_x * s.min_x / omega);
    const double ymax = std::sqrt(lambda + two_m * s.max_x * s.max_x / omega);
    const LogBesselKSeries lk(std::abs(theta - m), ymin, ymax);
    double tail = 0.0;
    const double half_dm = 0.5 * (theta - m);
    const double lam_om = lambda * omega;
    for (double x : s.xs) {
        const double q = two_m * x * x;
        tail += half_dm * std::log(lam_om + q) + lk(std::sqrt(lambda + q / omega));
    }
    return s.n * (kLn2 + m * std::log(m) - 0.5 * (m + theta) * std::log(omega) -
                  nig_mixing_log_norm(theta, lambda) - log_gamma(m)) +
           (two_m - 1.0) * s.sum_ln + tail;
}

// --- Nakagami shape: safeguarded Newton ----------------------------------
//
// The spread maximizer is mean(x^2) independent of shape; the profiled shape
// solves ln m - digamma(m) = R with R = ln mean(x^2) - mean(ln x^2) > 0.
// The left side decreases strictly from +inf to 0, so the root is unique.
double solve_nakagami_shape(double r, int* iterations) {
    if (r < 1e-15) return kInf; // numerically constant x^2; caller clamps
    double m = (3.0 - r + std::sqrt((r - 3.0) * (r - 3.0) + 24.0 * r)) / (12.0 * r);
    for (int i = 0; i < 60; ++i) {
        ++*iterations;
        const double g = std::log(m) - digamma(m) - r;
        const double dg = 1.0 / m - trigamma(m);
        double step = g / dg;
        double next = m - step;
        while (next <= 0.0) { // keep the iterate in the domain
            step *= 0.5;
            next = m - step;
        }
        const bool done = std::abs(next - m) <= 1e-14 * m;
        m = next;
        if (done) break;
    }
    return m;
}

// --- bounded simplex search in log-parameter space -----------------------

using Point = std::array<double, 4>;

struct SimplexProblem {
    int dim;
    Point lo_log, hi_log;
    std::function<double(const Point&)> ll; // of linear-space parameters
};

Point to_linear(const Point& z, int dim) {
    Point p{};
    for (int i = 0; i < dim; ++i) p[i] = std::exp(z[i]);
    return p;
}

FitResult run_simplex(const SimplexProblem& prob, const Point& init_linear,
                      ModelKind kind, const FitOptions& options) {
    const int d = prob.dim;
    auto clamp_box = [&](Point& z) {
        for (int i = 0; i < d; ++i) z[i] = clamp(z[i], prob.lo_log[i], prob.hi_log[i]);
    };
    auto value = [&](const Point& z) { return -prob.ll(to_linear(z, d)); };

    std::vector<Point> verts(d + 1);
    std::vector<double> f(d + 1);
    Point z0{};
    for (int i = 0; i < d; ++i) z0[i] = std::log(init_linear[i]);
    clamp_box(z0);
    verts[0] = z0;
    for (int j = 0; j < d; ++j) {
        Point z = z0;
        const double step = 0.25;
        z[j] = (z[j] + step <= prob.hi_log[j]) ? z[j] + step : z[j] - step;
        clamp_box(z);
        verts[j + 1] = z;
    }
    for (int i = 0; i <= d; ++i) f[i] = value(verts[i]);

    auto order = [&] {
        for (int i = 1; i <= d; ++i) { // insertion sort; d <= 4
            Point vz = verts[i];
            double fv = f[i];
            int j = i - 1;
            while (j >= 0 && f[j] > fv) {
                verts[j + 1] = verts[j];
                f[j + 1] = f[j];
                --j;
            }
            verts[j + 1] = vz;
            f[j + 1] = fv;
        }
    };
    order();

    int iterations = 0;
    bool converged = false;
    for (; iterations < options.max_iterations; ++iterations) {
        if (f[d] - f[0] <= options.tolerance * (std::abs(f[0]) + options.tolerance)) {
            converged = true;
            break;
        }
        Point centroid{};
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) centroid[j] += verts[i][j] / d;

        auto along = [&](double t) {
            Point z{};
            for (int j = 0; j < d; ++j) z[j] = centroid[j] + t * (centroid[j] - verts[d][j]);
            clamp_box(z);
            return z;
        };
        const Point zr = along(1.0);
        const double fr = value(zr);
        if (fr < f[0]) {
            const Point ze = along(2.0);
            const double fe = value(ze);
            if (fe < fr) {
                verts[d] = ze;
                f[d] = fe;
            } else {
                verts[d] = zr;
                f[d] = fr;
            }
        } else if (fr < f[d - 1]) {
            verts[d] = zr;
            f[d] = fr;
        } else {
            const Point zc = along(fr < f[d] ? 0.5 : -0.5);
            const double fc = value(zc);
            if (fc < std::min(fr, f[d])) {
                verts[d] = zc;
                f[d] = fc;
            } else {
                for (int i = 1; i <= d; ++i) {
                    for (int j = 0; j < d; ++j)
                        verts[i][j] = verts[0][j] + 0.5 * (verts[i][j] - verts[0][j]);
                    f[i] = value(verts[i]);
                }
            }
        }
        order();
    }

    FitResult result;
    result.params.kind = kind;
    const Point best = to_linear(verts[0], d);
    for (int i = 0; i < d; ++i) result.params.p[i] = best[i];
    result.log_likelihood = -f[0];
    result.iterations = iterations;
    if (!converged)
        throw FitConvergenceError("fit did not converge within the iteration budget",
                                  result);
    return result;
}

} // namespace

FitOptions FitOptions::defaults(ModelKind kind) {
    FitOptions o;
    default_param_bounds(kind, o.lower, o.upper);
    return o;
}

FitResult fit_mle(ModelKind kind, const std::vector<double>& samples,
                  const FitOptions& options) {
    require(options.max_iterations >= 1, ErrorCode::argument,
            "max_iterations must be >= 1");
    require(options.tolerance > 0.0, ErrorCode::argument, "tolerance must be > 0");
    require(options.ridge_tie_tolerance >= 0.0, ErrorCode::argument,
            "ridge_tie_tolerance must be >= 0");
    const int nparam = model_param_count(kind);
    for (int i = 0; i < nparam; ++i)
        require(std::isfinite(options.lower[i]) && std::isfinite(options.upper[i]) &&
                    options.lower[i] > 0.0 && options.upper[i] >= options.lower[i],
                ErrorCode::argument, "parameter bounds must be finite, positive, ordered");

    ModelParams init = moment_init(kind, samples); // also validates the samples
    for (int i = 0; i < nparam; ++i)
        init.p[i] = clamp(init.p[i], options.lower[i], options.upper[i]);
    const SampleStats stats = preprocess(samples);

    switch (kind) {
        case ModelKind::rayleigh: {
            FitResult r;
            r.params = ModelParams::make_rayleigh(
                clamp(stats.mean_sq / 2.0, options.lower[0], options.upper[0]));
            r.log_likelihood = ll_rayleigh(stats, r.params.p[0]);
            return r;
        }
        case ModelKind::nakagami: {
            const double omega =
                clamp(stats.mean_sq, options.lower[1], options.upper[1]);
            const double r_stat = std::log(stats.mean_sq) - 2.0 * stats.sum_ln / stats.n;
            FitResult r;
            const double m_root = solve_nakagami_shape(r_stat, &r.iterations);
            const double m = clamp(m_root, options.lower[0], options.upper[0]);
            r.params = ModelParams::make_nakagami(m, omega);
            r.log_likelihood = ll_nakagami(stats, m, omega);
            return r;
        }
        case ModelKind::rician: {
            SimplexProblem prob;
            prob.dim = 2;
            for (int i = 0; i < 2; ++i) {
                prob.lo_log[i] = std::log(options.lower[i]);
                prob.hi_log[i] = std::log(options.upper[i]);
            }
            prob.ll = [&](const Point& p) { return ll_rician(stats, p[0], p[1]); };
            return run_simplex(prob, {init.p[0], init.p[1]}, kind, options);
        }
        case ModelKind::k: {
            SimplexProblem prob;
            prob.dim = 2;
            for (int i = 0; i < 2; ++i) {
                prob.lo_log[i] = std::log(options.lower[i]);
                prob.hi_log[i] = std::log(options.upper[i]);
            }
            prob.ll = [&](const Point& p) { return ll_kdist(stats, p[0], p[1]); };
            return run_simplex(prob, {init.p[0], init.p[1]}, kind, options);
        }
        case ModelKind::nig: {
            // Stage one maximizes over (m, omega) with the mixing pair held
            // at the initializer; those two directions are sharply
            // identified while (theta, lambda) sit on a flat ridge.
            const double theta0 = init.p[2];
            const double lambda0 = init.p[3];
            SimplexProblem anchored;
            anchored.dim = 2;
            for (int i = 0; i < 2; ++i) {
                anchored.lo_log[i] = std::log(options.lower[i]);
                anchored.hi_log[i] = std::log(options.upper[i]);
            }
            anchored.ll = [&](const Point& p) {
                return ll_nig(stats, p[0], p[1], theta0, lambda0);
            };
            FitResult held;
            bool held_converged = true;
            try {
                held = run_simplex(anchored, {init.p[0], init.p[1]}, kind, options);
            } catch (const FitConvergenceError& e) {
                held = e.best();
                held_converged = false;
            }
            held.params.p[2] = theta0;
            held.params.p[3] = lambda0;

            // Stage two releases all four parameters from the anchored
            // optimum; the released point is adopted only when it clears the
            // ridge-tie band, otherwise the tie resolves to the initializer's
            // mixing pair.
            SimplexProblem release;
            release.dim = 4;
            for (int i = 0; i < 4; ++i) {
                release.lo_log[i] = std::log(options.lower[i]);
                release.hi_log[i] = std::log(options.upper[i]);
            }
            release.ll = [&](const Point& p) {
                return ll_nig(stats, p[0], p[1], p[2], p[3]);
            };
            FitResult released;
            bool released_converged = true;
            try {
                released = run_simplex(
                    release, {held.params.p[0], held.params.p[1], theta0, lambda0},
                    kind, options);
            } catch (const FitConvergenceError& e) {
                released = e.best();
                released_converged = false;
            }

            const double band =
                options.ridge_tie_tolerance * std::abs(held.log_likelihood);
            FitResult r = (released.log_likelihood > held.log_likelihood + band)
                              ? released
                              : held;
            r.iterations = held.iterations + released.iterations;
            if (!held_converged || !released_converged)
                throw FitConvergenceError(
                    "fit did not converge within the iteration budget", r);
            return r;
        }
    }
    fail(ErrorCode::internal, "unreachable model kind");
}

FitResult fit_mle(ModelKind kind, const std::vector<double>& samples) {
    return fit_mle(kind, samples, FitOptions::defaults(kind));
}

} // namespace usqt
