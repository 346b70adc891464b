#include "special.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace usqt::special {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Taylor coefficients of 1/Gamma(1+z) = 1 + c1 z + c2 z^2 + c3 z^3 + ...
constexpr double kRGamma1 = 0.57721566490153286061;
constexpr double kRGamma2 = -0.65587807152025388108;
constexpr double kRGamma3 = -0.042002635034095235529;

// Series of Temme, Num. Math. 25 (1975): K_mu(x) and K_{mu+1}(x) for
// |mu| <= 1/2 and 0 < x <= 2. Values stay in linear range there.
void bessel_k_temme(double mu, double x, double* k_mu, double* k_mu1) {
    double gampl, gammi, gam1, gam2;
    if (std::fabs(mu) < 1e-4) {
        const double mu2 = mu * mu;
        gam1 = -(kRGamma1 + kRGamma3 * mu2); // (1/G(1-mu) - 1/G(1+mu)) / 2mu
        gam2 = 1.0 + kRGamma2 * mu2;         // (1/G(1-mu) + 1/G(1+mu)) / 2
        gampl = gam2 - mu * gam1;            // 1/Gamma(1+mu)
        gammi = gam2 + mu * gam1;            // 1/Gamma(1-mu)
    } else {
        gampl = 1.0 / std::tgamma(1.0 + mu);
        gammi = 1.0 / std::tgamma(1.0 - mu);
        gam1 = (gammi - gampl) / (2.0 * mu);
        gam2 = (gammi + gampl) / 2.0;
    }
    const double ln2x = std::log(2.0 / x);
    const double sigma = mu * ln2x;
    const double fact =
        (std::fabs(mu) < 1e-10) ? 1.0 : (kPi * mu) / std::sin(kPi * mu);
    const double shr =
        (std::fabs(sigma) < 1e-10) ? 1.0 : std::sinh(sigma) / sigma;

    double f = fact * (gam1 * std::cosh(sigma) + gam2 * shr * ln2x);
    double p = 0.5 * std::exp(sigma) / gampl;  // (1/2)(2/x)^mu Gamma(1+mu)
    double q = 0.5 * std::exp(-sigma) / gammi; // (1/2)(x/2)^mu Gamma(1-mu)
    double c = 1.0;
    const double d = x * x / 4.0;
    double sum = f;
    double sum1 = p;
    for (int k = 1; k < 300; ++k) {
        f = (k * f + p + q) / (k * static_cast<double>(k) - mu * mu);
        p /= (k - mu);
        q /= (k + mu);
        c *= d / k;
        const double del = c * f;
        sum += del;
        sum1 += c * (p - k * f);
        if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
    }
    *k_mu = sum;
    *k_mu1 = sum1 * (2.0 / x);
}

// Steed/Thompson-Barnett continued fraction for x > 2, |mu| <= 1/2.
// Returns logs of K_mu, K_{mu+1}.
void bessel_k_cf2(double mu, double x, double* lk_mu, double* lk_mu1) {
    const double a1 = 0.25 - mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double delh = d;
    double h = d;
    double q1 = 0.0, q2 = 1.0;
    double a = -a1;
    double q = a1, c = a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 20000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < 1e-16) break;
    }
    h = a1 * h;
    *lk_mu = 0.5 * std::log(kPi / (2.0 * x)) - x - std::log(s);
    *lk_mu1 = *lk_mu + std::log((mu + x + 0.5 - h) / x);
}

// Olver's uniform large-order expansion. u_k(t) coefficients generated from
// the recurrence u_{k+1} = t^2(1-t^2)u_k'/2 + (1/8) int_0^t (1-5s^2) u_k.
constexpr int kOlverTerms = 9;
const std::vector<std::vector<double>> kOlverU = {
    {1.0},
    {0.0, 1.25e-01, 0.0, -2.0833333333333334259e-01},
    {0.0, 0.0, 7.03125e-02, 0.0, -4.0104166666666668517e-01, 0.0,
     3.3420138888888889506e-01},
    {0.0, 0.0, 0.0, 7.32421875e-02, 0.0, -8.9121093750000002220e-01, 0.0,
     1.8464626736111111605e+00, 0.0, -1.0258125964506172867e+00},
    {0.0, 0.0, 0.0, 0.0, 1.12152099609375e-01, 0.0,
     -2.3640869140624998224e+00, 0.0, 8.78912353515625e+00, 0.0,
     -1.1207002616222993652e+01, 0.0, 4.6695844234262473549e+00},
    {0.0, 0.0, 0.0, 0.0, 0.0, 2.27108001708984375e-01, 0.0,
     -7.3687943594796321278e+00, 0.0, 4.2534998745388456598e+01, 0.0,
     -9.1818241543240020519e+01, 0.0, 8.4636217674600729310e+01, 0.0,
     -2.8212072558200244288e+01},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.7250142097473144531e-01, 0.0,
     -2.6491430486951554002e+01, 0.0, 2.1819051174421159089e+02, 0.0,
     -6.9957962737613252102e+02, 0.0, 1.0599904525279998779e+03, 0.0,
     -7.6525246814118168004e+02, 0.0, 2.1257013003921713334e+02},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.7277275025844573975e+00, 0.0,
     -1.0809091978839465753e+02, 0.0, 1.2009029132163525446e+03, 0.0,
     -5.3056469786134030073e+03, 0.0, 1.1655393336864533921e+04, 0.0,
     -1.3586550006434137686e+04, 0.0, 8.0617221817373092563e+03, 0.0,
     -1.9194576623184070740e+03},
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 6.0740420012734830379e+00, 0.0,
     -4.9391530477308799618e+02, 0.0, 7.1095143024893641268e+03, 0.0,
     -4.1192654968897550134e+04, 0.0, 1.2220046498301746033e+05, 0.0,
     -2.0340017728041554801e+05, 0.0, 1.9254700123253153288e+05, 0.0,
     -9.6980598388637517928e+04, 0.0, 2.0204291330966148962e+04},
};

double poly_eval(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (size_t i = c.size(); i-- > 0;) v = v * t + c[i];
    return v;
}

double log_bessel_k_olver(double nu, double x) {
    const double z = x / nu;
    const double r = std::hypot(1.0, z);
    const double t = 1.0 / r;
    const double eta = r + std::log(z / (1.0 + r));
    double series = 0.0;
    double nupow = 1.0;
    for (int k = 0; k < kOlverTerms; ++k) {
        const double term = poly_eval(kOlverU[k], t) / nupow;
        series += (k & 1) ? -term : term;
        nupow *= nu;
    }
    return 0.5 * std::log(kPi / (2.0 * nu)) - nu * eta - 0.5 * std::log(r) +
           std::log(series);
}

constexpr double kOlverMinOrder = 50.0;

} // namespace

double log_gamma(double x) {
    require(x > 0.0, ErrorCode::argument, "log_gamma requires x > 0");
    return std::lgamma(x);
}

double digamma(double x) {
    require(x > 0.0, ErrorCode::argument, "digamma requires x > 0");
    double r = 0.0;
    while (x < 10.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    const double tail =
        f * (1.0 / 12.0 -
             f * (1.0 / 120.0 -
                  f * (1.0 / 252.0 -
                       f * (1.0 / 240.0 -
                            f * (1.0 / 132.0 - f * (691.0 / 32760.0))))));
    return r + std::log(x) - 0.5 / x - tail;
}

double trigamma(double x) {
    require(x > 0.0, ErrorCode::argument, "trigamma requires x > 0");
    double r = 0.0;
    while (x < 10.0) {
        r += 1.0 / (x * x);
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    const double tail =
        (f / x) * (1.0 / 6.0 -
                   f * (1.0 / 30.0 -
                        f * (1.0 / 42.0 -
                             f * (1.0 / 30.0 -
                                  f * (5.0 / 66.0 - f * (691.0 / 2730.0))))));
    return r + 1.0 / x + 0.5 * f + tail;
}

double log_bessel_i0(double x) {
    x = std::fabs(x);
    if (x <= 60.0) {
        const double q = x * x / 4.0;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 400; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return std::log(sum);
    }
    // I_0(x) ~ e^x/sqrt(2 pi x) * sum_k prod_j (2j-1)^2 / (8 j x)
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 14; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * odd * odd / (8.0 * k * x);
        if (next >= term) break; // asymptotic tail started to diverge
        term = next;
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return x - 0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

double log_bessel_k(double nu, double x) {
    require(x > 0.0, ErrorCode::argument, "log_bessel_k requires x > 0");
    nu = std::fabs(nu);
    if (nu >= kOlverMinOrder) return log_bessel_k_olver(nu, x);

    const int n = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - n; // in [-1/2, 1/2]
    double lk0, lk1;
    if (x <= 2.0) {
        double k0, k1;
        bessel_k_temme(mu, x, &k0, &k1);
        lk0 = std::log(k0);
        lk1 = std::log(k1);
    } else {
        bessel_k_cf2(mu, x, &lk0, &lk1);
    }
    if (n == 0) return lk0;
    if (n == 1) return lk1;

    // Upward recurrence K_{v+1} = K_{v-1} + (2v/x) K_v, rescaled as needed.
    double logscale = lk1;
    double prev = std::exp(lk0 - lk1);
    double cur = 1.0;
    for (int j = 1; j < n; ++j) {
        const double next = prev + (2.0 * (mu + j) / x) * cur;
        prev = cur;
        cur = next;
        if (cur > 1e250) {
            prev /= cur;
            logscale += std::log(cur);
            cur = 1.0;
        }
    }
    return logscale + std::log(cur);
}

namespace {

// Clenshaw evaluation of sum_k a_k T_k(u); a[0] holds the constant term.
double cheb_eval(const double* a, int n, double u) {
    double b1 = 0.0, b2 = 0.0;
    for (int k = n - 1; k >= 1; --k) {
        const double b = a[k] + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    return a[0] + u * b1 - b2;
}

} // namespace

LogBesselKSeries::LogBesselKSeries(double nu, double ymin, double ymax)
    : nu_(std::fabs(nu)) {
    if (nu_ >= kOlverMinOrder || !(ymin > 0.0) || !(ymax > ymin * 1.0000001)) {
        direct_ = true;
        return;
    }
    tmin_ = std::log(ymin);
    tmax_ = std::log(ymax);
    direct_ = false;
    build(tmin_, tmax_, 0);
    std::sort(segments_.begin(), segments_.end(),
              [](const Segment& a, const Segment& b) { return a.t0 < b.t0; });
}

void LogBesselKSeries::build(double t0, double t1, int depth) {
    constexpr int kNodes = 28;
    if (t1 - t0 > 3.0 && depth < 14) {
        const double mid = 0.5 * (t0 + t1);
        build(t0, mid, depth + 1);
        build(mid, t1, depth + 1);
        return;
    }
    Segment seg;
    seg.t0 = t0;
    seg.t1 = t1;
    seg.n = kNodes;
    double fj[kNodes];
    const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    for (int j = 0; j < kNodes; ++j) {
        const double u = std::cos(kPi * (j + 0.5) / kNodes);
        const double y = std::exp(mid + half * u);
        fj[j] = log_bessel_k(nu_, y) + y; // remove the dominant e^{-y} decay
    }
    for (int k = 0; k < kNodes; ++k) {
        double acc = 0.0;
        for (int j = 0; j < kNodes; ++j)
            acc += fj[j] * std::cos(kPi * k * (j + 0.5) / kNodes);
        seg.coef[k] = 2.0 / kNodes * acc;
    }
    seg.coef[0] *= 0.5;
    // Verify against the direct path; refine if the window is too curved.
    double err = 0.0;
    for (double frac : {0.21, 0.52, 0.87}) {
        const double t = t0 + frac * (t1 - t0);
        const double y = std::exp(t);
        const double ref = log_bessel_k(nu_, y);
        const double u = (t - mid) / (half > 0 ? half : 1.0);
        const double got = cheb_eval(seg.coef, seg.n, u) - y;
        err = std::max(err, std::fabs(got - ref) /
                                std::max(1.0, std::fabs(ref)));
    }
    if (err > 5e-12 && depth < 14) {
        const double m = 0.5 * (t0 + t1);
        build(t0, m, depth + 1);
        build(m, t1, depth + 1);
        return;
    }
    segments_.push_back(seg);
}

double LogBesselKSeries::operator()(double y) const {
    if (direct_) return log_bessel_k(nu_, y);
    const double t = std::log(y);
    if (t < tmin_ || t > tmax_) return log_bessel_k(nu_, y);
    size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
        const size_t mid = (lo + hi + 1) / 2;
        if (segments_[mid].t0 <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    const Segment& s = segments_[lo];
    const double mid = 0.5 * (s.t0 + s.t1), half = 0.5 * (s.t1 - s.t0);
    const double u = half > 0.0 ? (t - mid) / half : 0.0;
    return cheb_eval(s.coef, s.n, u) - y;
}

} // namespace usqt::special
