#include "vinedist/special.hpp"

#include <cmath>
#include <limits>

#include "vinedist/errors.hpp"
#include "vinedist/quadrature.hpp"

namespace vinedist::special {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw_domain("norm_quantile: p must lie in (0,1)");
    const double q = p - 0.5;
    double r, val;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        val = q *
              (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                    6.7265770927008700853e4) *
                       r +
                   4.5921953931549871457e4) *
                      r +
                  1.3731693765509461125e4) *
                     r +
                 1.9715909503065514427e3) *
                    r +
                1.3314166789178437745e2) *
                   r +
               3.3871328727963666080e0) /
              (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                    3.9307895800092710610e4) *
                       r +
                   2.1213794301586595867e4) *
                      r +
                  5.3941960214247511077e3) *
                     r +
                 6.8718700749205790830e2) *
                    r +
                4.2313330701600911252e1) *
                   r +
               1.0);
        return val;
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) *
                       r +
                   1.27045825245236838258e0) *
                      r +
                  3.64784832476320460504e0) *
                     r +
                 5.76949722146069140550e0) *
                    r +
                4.63033784615654529590e0) *
                   r +
               1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) *
                       r +
                   1.48103976427480074590e-1) *
                      r +
                  6.89767334985100004550e-1) *
                     r +
                 1.67638483018380384940e0) *
                    r +
                2.05319162663775882187e0) *
                   r +
               1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) *
                       r +
                   2.65321895265761230930e-2) *
                      r +
                  2.96560571828504891230e-1) *
                     r +
                 1.78482653991729133580e0) *
                    r +
                5.46378491116411436990e0) *
                   r +
               6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) *
                       r +
                   7.86869131145613259100e-4) *
                      r +
                  1.48753612908506148525e-2) *
                     r +
                 1.36929880922735805310e-1) *
                    r +
                5.99832206555887937690e-1) *
                   r +
               1.0);
    }
    return (q < 0.0) ? -val : val;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIt = 400;
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIt; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) return h;
    }
    throw_numeric("inc_beta: continued fraction did not converge");
}

}  // namespace

double inc_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw_domain("inc_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double inc_beta_inv(double a, double b, double p) {
    if (!(a > 0.0 && b > 0.0)) throw_domain("inc_beta_inv: a, b must be positive");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double a1 = a - 1.0, b1 = b - 1.0;
    double x;
    if (a >= 1.0 && b >= 1.0) {
        const double pp = (p < 0.5) ? p : 1.0 - p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) z = -z;
        const double al = (z * z - 3.0) / 6.0;
        const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        const double w = z * std::sqrt(al + h) / h -
                         (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                             (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        x = a / (a + b * std::exp(2.0 * w));
    } else {
        const double lna = std::log(a / (a + b));
        const double lnb = std::log(b / (a + b));
        const double t = std::exp(a * lna) / a;
        const double u = std::exp(b * lnb) / b;
        const double w = t + u;
        if (p < t / w)
            x = std::pow(a * w * p, 1.0 / a);
        else
            x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
    const double afac = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    for (int j = 0; j < 24; ++j) {
        if (x <= 0.0 || x >= 1.0) break;
        const double err = inc_beta(a, b, x) - p;
        const double t = std::exp(a1 * std::log(x) + b1 * std::log1p(-x) + afac);
        const double u = err / t;
        // Halley step
        double step = u / (1.0 - 0.5 * std::min(1.0, u * (a1 / x - b1 / (1.0 - x))));
        x -= step;
        if (x <= 0.0) x = 0.5 * (x + step);
        if (x >= 1.0) x = 0.5 * (x + step + 1.0);
        if (std::fabs(step) < 1e-15 * x && j > 0) break;
    }
    return x;
}

double t_pdf(double x, double nu) {
    if (!(nu > 0.0)) throw_domain("t_pdf: nu must be positive");
    const double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * kPi);
    return std::exp(lg - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double t_cdf(double x, double nu) {
    if (!(nu > 0.0)) throw_domain("t_cdf: nu must be positive");
    if (x == 0.0) return 0.5;
    const double p = 0.5 * inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    return (x < 0.0) ? p : 1.0 - p;
}

double t_quantile(double p, double nu) {
    if (!(nu > 0.0)) throw_domain("t_quantile: nu must be positive");
    if (!(p > 0.0 && p < 1.0)) throw_domain("t_quantile: p must lie in (0,1)");
    if (p == 0.5) return 0.0;
    const double pp = (p < 0.5) ? 2.0 * p : 2.0 * (1.0 - p);
    const double z = inc_beta_inv(0.5 * nu, 0.5, pp);
    const double t = (z > 0.0) ? std::sqrt(nu * (1.0 - z) / z)
                               : std::numeric_limits<double>::infinity();
    return (p < 0.5) ? -t : t;
}

double debye1(double x) {
    if (!(x > 0.0)) throw_domain("debye1: x must be positive");
    const auto integrand = [](double t) { return (t == 0.0) ? 1.0 : t / std::expm1(t); };
    const QuadResult q = integrate_adaptive(integrand, 0.0, x, 1e-13 * std::max(1.0, x));
    return q.value / x;
}

}  // namespace vinedist::special
