#include "vinedist/bicop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vinedist/errors.hpp"
#include "vinedist/quadrature.hpp"
#include "vinedist/special.hpp"

namespace vinedist {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr unsigned kNeedPdf = 1u;
constexpr unsigned kNeedHx = 2u;
constexpr unsigned kNeedHy = 4u;

double clamp_prob(double p) { return std::clamp(p, kProbClampLo, kProbClampHi); }

void check_interior(double u, double v, const char* who) {
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
        throw_domain(std::string(who) + ": arguments must lie strictly inside (0,1)");
}

double logsumexp2(double a, double b) {
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// ---- fused per-family slot evaluations ----------------------------------

SlotValues gauss_slot(double x, double y, double rho, unsigned need) {
    SlotValues out;
    const double xq = special::norm_quantile(x);
    const double yq = special::norm_quantile(y);
    const double r2 = 1.0 - rho * rho;
    if (need & kNeedPdf)
        out.log_pdf = -0.5 * std::log(r2) -
                      (rho * rho * (xq * xq + yq * yq) - 2.0 * rho * xq * yq) / (2.0 * r2);
    const double s = std::sqrt(r2);
    if (need & kNeedHx) out.h_x = special::norm_cdf((xq - rho * yq) / s);
    if (need & kNeedHy) out.h_y = special::norm_cdf((yq - rho * xq) / s);
    return out;
}

SlotValues t_slot(double x, double y, double rho, double nu, unsigned need) {
    SlotValues out;
    const double xq = special::t_quantile(x, nu);
    const double yq = special::t_quantile(y, nu);
    const double r2 = 1.0 - rho * rho;
    if (need & kNeedPdf) {
        const double q = (xq * xq - 2.0 * rho * xq * yq + yq * yq) / (nu * r2);
        out.log_pdf = std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
                      2.0 * std::lgamma(0.5 * (nu + 1.0)) - 0.5 * std::log(r2) -
                      0.5 * (nu + 2.0) * std::log1p(q) +
                      0.5 * (nu + 1.0) *
                          (std::log1p(xq * xq / nu) + std::log1p(yq * yq / nu));
    }
    if (need & kNeedHx)
        out.h_x = special::t_cdf((xq - rho * yq) /
                                     std::sqrt((nu + yq * yq) * r2 / (nu + 1.0)),
                                 nu + 1.0);
    if (need & kNeedHy)
        out.h_y = special::t_cdf((yq - rho * xq) /
                                     std::sqrt((nu + xq * xq) * r2 / (nu + 1.0)),
                                 nu + 1.0);
    return out;
}

// C(u,v) = (u^-t + v^-t - 1)^(-1/t); heavy powers kept in log space
SlotValues clayton_slot(double x, double y, double theta, unsigned need) {
    SlotValues out;
    const double lu = std::log(x);
    const double lv = std::log(y);
    const double ls = logsumexp2(-theta * lu, -theta * lv);
    const double log_t = ls + std::log1p(-std::exp(-ls));
    if (need & kNeedPdf)
        out.log_pdf = std::log1p(theta) - (theta + 1.0) * (lu + lv) -
                      (2.0 + 1.0 / theta) * log_t;
    const double e = -(1.0 + 1.0 / theta) * log_t;
    if (need & kNeedHx) out.h_x = std::exp(-(theta + 1.0) * lv + e);
    if (need & kNeedHy) out.h_y = std::exp(-(theta + 1.0) * lu + e);
    return out;
}

// C(u,v) = exp(-S^(1/t)), S = (-log u)^t + (-log v)^t
SlotValues gumbel_slot(double x, double y, double theta, unsigned need) {
    SlotValues out;
    if (theta == 1.0) {
        out.h_x = x;
        out.h_y = y;
        return out;
    }
    const double lx = std::log(-std::log(x));
    const double ly = std::log(-std::log(y));
    const double log_s = logsumexp2(theta * lx, theta * ly);
    const double s_pow = std::exp(log_s / theta);
    if (need & kNeedPdf)
        out.log_pdf = -s_pow + (theta - 1.0) * (lx + ly) - std::log(x) - std::log(y) +
                      (1.0 / theta - 2.0) * log_s + std::log(s_pow + theta - 1.0);
    const double e = -s_pow + (1.0 / theta - 1.0) * log_s;
    if (need & kNeedHx) out.h_x = std::exp(e + (theta - 1.0) * ly - std::log(y));
    if (need & kNeedHy) out.h_y = std::exp(e + (theta - 1.0) * lx - std::log(x));
    return out;
}

SlotValues frank_slot(double x, double y, double theta, unsigned need) {
    SlotValues out;
    const double gu = std::expm1(-theta * x);
    const double gv = std::expm1(-theta * y);
    const double g1 = std::expm1(-theta);
    const double den = g1 + gu * gv;
    if (need & kNeedPdf)
        out.log_pdf = std::log(std::fabs(theta)) + std::log(std::fabs(g1)) -
                      theta * (x + y) - 2.0 * std::log(std::fabs(den));
    if (need & kNeedHx) out.h_x = std::exp(-theta * y) * gu / den;
    if (need & kNeedHy) out.h_y = std::exp(-theta * x) * gv / den;
    return out;
}

// C(u,v) = 1 - A^(1/t), A = a + b - a*b with a = (1-u)^t, b = (1-v)^t
SlotValues joe_slot(double x, double y, double theta, unsigned need) {
    SlotValues out;
    const double la = std::log1p(-x);
    const double lb = std::log1p(-y);
    const double ea = std::exp(theta * la);
    const double eb = std::exp(theta * lb);
    const double big = ea + eb * (1.0 - ea);
    const double log_a = (big > 0.0) ? std::log(big) : theta * std::max(la, lb);
    if (need & kNeedPdf)
        out.log_pdf = (1.0 / theta - 2.0) * log_a + (theta - 1.0) * (la + lb) +
                      std::log(theta - 1.0 + std::exp(log_a));
    const double e = (1.0 / theta - 1.0) * log_a;
    if (need & kNeedHx) out.h_x = std::exp(e + (theta - 1.0) * lb + std::log1p(-ea));
    if (need & kNeedHy) out.h_y = std::exp(e + (theta - 1.0) * la + std::log1p(-eb));
    return out;
}

SlotValues slot_base(Family family, double p1, double p2, double x, double y, unsigned need) {
    switch (family) {
        case Family::Independence: return SlotValues{0.0, x, y};
        case Family::Gaussian: return gauss_slot(x, y, p1, need);
        case Family::StudentT: return t_slot(x, y, p1, p2, need);
        case Family::Clayton: return clayton_slot(x, y, p1, need);
        case Family::Gumbel: return gumbel_slot(x, y, p1, need);
        case Family::Frank: return frank_slot(x, y, p1, need);
        case Family::Joe: return joe_slot(x, y, p1, need);
    }
    throw_domain("unknown copula family");
}

// ---- closed-form inverse h-functions ------------------------------------

double gauss_hinv(double p, double y_given, double rho) {
    const double z = special::norm_quantile(p);
    const double y = special::norm_quantile(y_given);
    return special::norm_cdf(z * std::sqrt(1.0 - rho * rho) + rho * y);
}

double t_hinv(double p, double y_given, double rho, double nu) {
    const double z = special::t_quantile(p, nu + 1.0);
    const double y = special::t_quantile(y_given, nu);
    const double scale = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
    return special::t_cdf(z * scale + rho * y, nu);
}

double clayton_hinv(double p, double y_given, double theta) {
    // T' = (p * v^(t+1))^(-t/(t+1)), x = (T' - v^-t + 1)^(-1/t); T' >= v^-t
    const double log_v = std::log(y_given);
    const double log_tp = -(theta / (theta + 1.0)) * (std::log(p) + (theta + 1.0) * log_v);
    const double log_vmt = -theta * log_v;
    const double diff = log_tp - log_vmt;
    double log_x;
    if (diff <= 0.0) {
        log_x = 0.0;
    } else {
        const double y = log_vmt + std::log(std::expm1(diff));
        log_x = (y > 0.0) ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
    }
    return std::exp(-log_x / theta);
}

double frank_hinv(double p, double y_given, double theta) {
    // g_x = p*g1 / (e^(-t*v)*(1-p) + p), x = -log1p(g_x)/t
    const double g1 = std::expm1(-theta);
    const double den = std::exp(-theta * y_given) * (1.0 - p) + p;
    const double gx = p * g1 / den;
    return -std::log1p(gx) / theta;
}

// bisection for families without a closed-form inverse h-function
double hinv_bisect(Family family, double p1, double p2, double p, double y) {
    double lo = 1e-13, hi = 1.0 - 1e-13;
    double x = 0.5;
    for (int it = 0; it < 200; ++it) {
        x = 0.5 * (lo + hi);
        const double hx = slot_base(family, p1, p2, x, y, kNeedHx).h_x;
        if (std::fabs(hx - p) <= 1e-12 || hi - lo <= 1e-15) return x;
        if (hx < p)
            lo = x;
        else
            hi = x;
    }
    if (std::fabs(slot_base(family, p1, p2, x, y, kNeedHx).h_x - p) > 1e-8)
        throw_numeric("pair_hinv: bisection did not converge after 200 steps");
    return x;
}

// ---- Kendall's tau helpers ----------------------------------------------

// tau = 1 + 4 * int_0^1 log(1-(1-t)^th) * (1-(1-t)^th) / (th*(1-t)^(th-1)) dt
double joe_tau(double theta) {
    const auto integrand = [theta](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double l1mt = std::log1p(-t);
        const double xt = std::exp(theta * l1mt);  // (1-t)^theta
        const double den = theta * std::exp((theta - 1.0) * l1mt);
        if (den == 0.0) return 0.0;
        return std::log1p(-xt) * (1.0 - xt) / den;
    };
    const QuadResult q = integrate_adaptive(integrand, 0.0, 1.0, 1e-11, 4000);
    return 1.0 + 4.0 * q.value;
}

double frank_tau(double theta) {
    const double at = std::fabs(theta);
    const double tau = 1.0 - 4.0 / at * (1.0 - special::debye1(at));
    return (theta > 0.0) ? tau : -tau;
}

// bisection inversion of a monotone increasing tau(theta) on [lo, hi]
template <class F>
double invert_tau(F&& tau_of, double target, double lo, double hi, const char* family) {
    const double flo = tau_of(lo) - target;
    const double fhi = tau_of(hi) - target;
    if (flo > 0.0 || fhi < 0.0)
        throw_domain(std::string("pair_from_tau: tau ") + std::to_string(target) +
                     " not attainable for " + family);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = tau_of(mid) - target;
        if (std::fabs(fm) < 1e-12 || hi - lo < 1e-13) return mid;
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void check_pair(const PairCopula& pc) {
    switch (pc.family) {
        case Family::Independence:
            if (pc.survival) throw_domain("independence pair cannot carry a survival flag");
            return;
        case Family::Gaussian:
        case Family::StudentT:
            if (!(pc.p1 > -1.0 && pc.p1 < 1.0))
                throw_domain("correlation parameter must lie in (-1,1)");
            if (pc.family == Family::StudentT && !(pc.p2 > 2.0))
                throw_domain("StudentT degrees of freedom must exceed 2");
            if (pc.survival)
                throw_domain("survival flag is redundant for radially symmetric families");
            return;
        case Family::Clayton:
            if (!(pc.p1 > 0.0)) throw_domain("Clayton parameter must be positive");
            return;
        case Family::Gumbel:
            if (!(pc.p1 >= 1.0)) throw_domain("Gumbel parameter must be >= 1");
            return;
        case Family::Frank:
            if (pc.p1 == 0.0 || !std::isfinite(pc.p1))
                throw_domain("Frank parameter must be nonzero");
            if (pc.survival)
                throw_domain("survival flag is redundant for radially symmetric families");
            return;
        case Family::Joe:
            if (!(pc.p1 > 1.0)) throw_domain("Joe parameter must exceed 1");
            return;
    }
    throw_domain("unknown copula family");
}

SlotValues pair_slot(const PairCopula& pc, double x, double y, unsigned need) {
    if (pc.survival) {
        SlotValues v = slot_base(pc.family, pc.p1, pc.p2, 1.0 - x, 1.0 - y, need);
        v.h_x = clamp_prob(1.0 - v.h_x);
        v.h_y = clamp_prob(1.0 - v.h_y);
        return v;
    }
    SlotValues v = slot_base(pc.family, pc.p1, pc.p2, x, y, need);
    v.h_x = clamp_prob(v.h_x);
    v.h_y = clamp_prob(v.h_y);
    return v;
}

double pair_log_pdf(const PairCopula& pc, double u, double v) {
    check_pair(pc);
    check_interior(u, v, "pair_pdf");
    return pair_slot(pc, u, v, 1u).log_pdf;
}

double pair_pdf(const PairCopula& pc, double u, double v) {
    return std::exp(pair_log_pdf(pc, u, v));
}

double pair_hfun(const PairCopula& pc, double x, double y, Side) {
    check_pair(pc);
    check_interior(x, y, "pair_hfun");
    return pair_slot(pc, x, y, 2u).h_x;
}

double pair_hinv(const PairCopula& pc, double p, double y, Side) {
    check_pair(pc);
    check_interior(p, y, "pair_hinv");
    const double pp = pc.survival ? 1.0 - p : p;
    const double yy = pc.survival ? 1.0 - y : y;
    double x;
    switch (pc.family) {
        case Family::Independence: x = pp; break;
        case Family::Gaussian: x = gauss_hinv(pp, yy, pc.p1); break;
        case Family::StudentT: x = t_hinv(pp, yy, pc.p1, pc.p2); break;
        case Family::Clayton: x = clayton_hinv(pp, yy, pc.p1); break;
        case Family::Gumbel:
            x = (pc.p1 == 1.0) ? pp : hinv_bisect(pc.family, pc.p1, pc.p2, pp, yy);
            break;
        case Family::Frank: x = frank_hinv(pp, yy, pc.p1); break;
        case Family::Joe: x = hinv_bisect(pc.family, pc.p1, pc.p2, pp, yy); break;
        default: throw_domain("unknown copula family");
    }
    if (pc.survival) x = 1.0 - x;
    return clamp_prob(x);
}

double pair_tau(const PairCopula& pc) {
    check_pair(pc);
    switch (pc.family) {
        case Family::Independence: return 0.0;
        case Family::Gaussian:
        case Family::StudentT: return 2.0 / kPi * std::asin(pc.p1);
        case Family::Clayton: return pc.p1 / (pc.p1 + 2.0);
        case Family::Gumbel: return 1.0 - 1.0 / pc.p1;
        case Family::Frank: return frank_tau(pc.p1);
        case Family::Joe: return joe_tau(pc.p1);
    }
    throw_domain("unknown copula family");
}

PairCopula pair_from_tau(Family family, double tau, std::optional<double> nu, bool survival) {
    PairCopula pc;
    pc.family = family;
    pc.survival = survival;
    switch (family) {
        case Family::Independence:
            if (tau != 0.0) throw_domain("pair_from_tau: independence requires tau = 0");
            break;
        case Family::Gaussian:
        case Family::StudentT:
            if (!(tau > -1.0 && tau < 1.0))
                throw_domain("pair_from_tau: tau must lie in (-1,1)");
            pc.p1 = std::sin(kPi * 0.5 * tau);
            if (family == Family::StudentT) {
                if (!nu) throw_domain("pair_from_tau: StudentT requires degrees of freedom");
                pc.p2 = *nu;
            }
            break;
        case Family::Clayton:
            if (!(tau > 0.0 && tau < 1.0))
                throw_domain("pair_from_tau: Clayton requires tau in (0,1)");
            pc.p1 = 2.0 * tau / (1.0 - tau);
            break;
        case Family::Gumbel:
            if (!(tau > 0.0 && tau < 1.0))
                throw_domain("pair_from_tau: Gumbel requires tau in (0,1)");
            pc.p1 = 1.0 / (1.0 - tau);
            break;
        case Family::Frank: {
            if (tau == 0.0 || !(tau > -1.0 && tau < 1.0))
                throw_domain("pair_from_tau: Frank requires nonzero tau in (-1,1)");
            const double at = std::fabs(tau);
            const double theta = invert_tau(frank_tau, at, 1e-6, 50.0, "Frank");
            pc.p1 = (tau > 0.0) ? theta : -theta;
            break;
        }
        case Family::Joe:
            if (!(tau > 0.0 && tau < 1.0))
                throw_domain("pair_from_tau: Joe requires tau in (0,1)");
            pc.p1 = invert_tau(joe_tau, tau, 1.0 + 1e-6, 50.0, "Joe");
            break;
    }
    check_pair(pc);
    return pc;
}

std::string family_code(const PairCopula& pc) {
    const char* base = nullptr;
    switch (pc.family) {
        case Family::Independence: base = "I"; break;
        case Family::Gaussian: base = "N"; break;
        case Family::StudentT: base = "t"; break;
        case Family::Clayton: base = "C"; break;
        case Family::Gumbel: base = "G"; break;
        case Family::Frank: base = "F"; break;
        case Family::Joe: base = "J"; break;
    }
    return pc.survival ? std::string("s") + base : std::string(base);
}

PairCopula pair_from_code(const std::string& code, double p1, double p2) {
    PairCopula pc;
    std::string c = code;
    if (!c.empty() && c[0] == 's') {
        pc.survival = true;
        c = c.substr(1);
    }
    if (c == "I")
        pc.family = Family::Independence;
    else if (c == "N")
        pc.family = Family::Gaussian;
    else if (c == "t")
        pc.family = Family::StudentT;
    else if (c == "C")
        pc.family = Family::Clayton;
    else if (c == "G")
        pc.family = Family::Gumbel;
    else if (c == "F")
        pc.family = Family::Frank;
    else if (c == "J")
        pc.family = Family::Joe;
    else
        throw Error(ErrorKind::Parse, "unknown family code '" + code + "'");
    pc.p1 = p1;
    pc.p2 = p2;
    check_pair(pc);
    return pc;
}

// ---- BoundSlot -----------------------------------------------------------

BoundSlot::BoundSlot(const PairCopula& pc, double a)
    : family_(pc.family), survival_(pc.survival), p1_(pc.p1), p2_(pc.p2) {
    const double ab = survival_ ? 1.0 - a : a;
    switch (family_) {
        case Family::Independence: break;
        case Family::Gaussian: {
            c0_ = special::norm_quantile(ab);
            const double r2 = 1.0 - p1_ * p1_;
            c1_ = std::sqrt(r2);
            c2_ = -0.5 * std::log(r2);
            break;
        }
        case Family::StudentT: {
            const double nu = p2_;
            c0_ = special::t_quantile(ab, nu);
            const double r2 = 1.0 - p1_ * p1_;
            c1_ = std::sqrt((nu + c0_ * c0_) * r2 / (nu + 1.0));
            c2_ = std::log1p(c0_ * c0_ / nu);
            c3_ = std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
                  2.0 * std::lgamma(0.5 * (nu + 1.0)) - 0.5 * std::log(r2);
            c4_ = r2;
            break;
        }
        case Family::Clayton:
            c0_ = std::log(ab);
            c1_ = -p1_ * c0_;
            break;
        case Family::Gumbel:
            if (p1_ != 1.0) {
                c0_ = std::log(-std::log(ab));
                c1_ = p1_ * c0_;
                c2_ = std::log(ab);
            }
            break;
        case Family::Frank:
            c0_ = std::expm1(-p1_ * ab);                  // g_a
            c1_ = p1_ * ab;                               // theta * a
            c3_ = std::expm1(-p1_);                       // g_1
            c2_ = std::log(std::fabs(p1_)) + std::log(std::fabs(c3_));
            c4_ = std::exp(-p1_ * ab);
            break;
        case Family::Joe:
            c0_ = std::log1p(-ab);
            c1_ = std::exp(p1_ * c0_);  // (1-a)^theta
            c2_ = (p1_ - 1.0) * c0_;
            break;
    }
}

double BoundSlot::log_pdf_step(double b, double* next) const {
    const double bb = survival_ ? 1.0 - b : b;
    double log_pdf = 0.0;
    double h = bb;
    switch (family_) {
        case Family::Independence: break;
        case Family::Gaussian: {
            const double xb = special::norm_quantile(bb);
            const double rho = p1_;
            const double r2 = c1_ * c1_;
            log_pdf = c2_ - (rho * rho * (xb * xb + c0_ * c0_) - 2.0 * rho * xb * c0_) /
                               (2.0 * r2);
            if (next) h = special::norm_cdf((xb - rho * c0_) / c1_);
            break;
        }
        case Family::StudentT: {
            const double nu = p2_;
            const double xb = special::t_quantile(bb, nu);
            const double q = (xb * xb - 2.0 * p1_ * xb * c0_ + c0_ * c0_) / (nu * c4_);
            log_pdf = c3_ - 0.5 * (nu + 2.0) * std::log1p(q) +
                      0.5 * (nu + 1.0) * (std::log1p(xb * xb / nu) + c2_);
            if (next) h = special::t_cdf((xb - p1_ * c0_) / c1_, nu + 1.0);
            break;
        }
        case Family::Clayton: {
            const double theta = p1_;
            const double lb = std::log(bb);
            const double ls = logsumexp2(c1_, -theta * lb);
            const double log_t = ls + std::log1p(-std::exp(-ls));
            log_pdf = std::log1p(theta) - (theta + 1.0) * (c0_ + lb) -
                      (2.0 + 1.0 / theta) * log_t;
            if (next) h = std::exp(-(theta + 1.0) * c0_ - (1.0 + 1.0 / theta) * log_t);
            break;
        }
        case Family::Gumbel: {
            const double theta = p1_;
            if (theta == 1.0) break;
            const double lb = std::log(-std::log(bb));
            const double log_s = logsumexp2(c1_, theta * lb);
            const double s_pow = std::exp(log_s / theta);
            log_pdf = -s_pow + (theta - 1.0) * (c0_ + lb) - c2_ - std::log(bb) +
                      (1.0 / theta - 2.0) * log_s + std::log(s_pow + theta - 1.0);
            if (next)
                h = std::exp(-s_pow + (theta - 1.0) * c0_ + (1.0 / theta - 1.0) * log_s - c2_);
            break;
        }
        case Family::Frank: {
            const double theta = p1_;
            const double gb = std::expm1(-theta * bb);
            const double den = c3_ + c0_ * gb;
            log_pdf = c2_ - c1_ - theta * bb - 2.0 * std::log(std::fabs(den));
            if (next) h = c4_ * gb / den;
            break;
        }
        case Family::Joe: {
            const double theta = p1_;
            const double lb = std::log1p(-bb);
            const double eb = std::exp(theta * lb);
            const double big = eb + c1_ * (1.0 - eb);
            const double log_a = (big > 0.0) ? std::log(big)
                                             : theta * std::max(c0_, lb);
            log_pdf = (1.0 / theta - 2.0) * log_a + (theta - 1.0) * lb + c2_ +
                      std::log(theta - 1.0 + std::exp(log_a));
            if (next)
                h = std::exp((1.0 / theta - 1.0) * log_a + c2_ + std::log1p(-eb));
            break;
        }
    }
    if (next) *next = clamp_prob(survival_ ? 1.0 - h : h);
    return log_pdf;
}

}  // namespace vinedist
