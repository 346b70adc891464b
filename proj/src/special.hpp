#pragma once

#include <vector>

namespace usqt::special {

// All routines work in log space so extreme orders and arguments stay
// representable. Accuracy target: 1e-10 relative on the function value.

double log_gamma(double x); // x > 0
double digamma(double x);   // x > 0
double trigamma(double x);  // x > 0

double log_bessel_i0(double x); // log I_0(|x|)

// log K_nu(x) for any real nu, x > 0. K_{-nu} = K_nu.
double log_bessel_k(double nu, double x);

// Piecewise Chebyshev proxy for log K_nu over a fixed argument range.
// Built once per likelihood evaluation where nu is constant and only the
// argument varies across samples; evaluation costs a few dozen flops.
// Falls back to direct evaluation outside the range or for large |nu|
// (where the direct uniform asymptotic is already O(1)).
class LogBesselKSeries {
  public:
    LogBesselKSeries(double nu, double ymin, double ymax);
    double operator()(double y) const;

  private:
    struct Segment {
        double t0, t1; // ln-argument window
        double coef[32];
        int n;
    };
    void build(double t0, double t1, int depth);

    double nu_ = 0.0;
    double tmin_ = 0.0, tmax_ = 0.0;
    bool direct_ = true;
    std::vector<Segment> segments_;
};

} // namespace usqt::special
