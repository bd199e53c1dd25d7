#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "vinedist/errors.hpp"

namespace vinedist {

struct QuadResult {
    double value = 0;
    double error = 0;
    std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod nodes (positive half) and weights, 7-point Gauss weights.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    const double fc = f(c);
    fv[7] = fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGK15Nodes[i];
        fv[i] = f(c - dx);
        fv[14 - i] = f(c + dx);
    }
    double resk = kGK15WeightsK[7] * fc;
    double resg = kGK15WeightsG[3] * fc;
    double resabs = std::fabs(resk);
    for (int i = 0; i < 7; ++i) {
        const double sum = fv[i] + fv[14 - i];
        resk += kGK15WeightsK[i] * sum;
        resabs += kGK15WeightsK[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
        if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * sum;
    }
    const double mean = resk * 0.5;
    double resasc = kGK15WeightsK[7] * std::fabs(fc - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kGK15WeightsK[i] * (std::fabs(fv[i] - mean) + std::fabs(fv[14 - i] - mean));
    resasc *= std::fabs(h);
    resabs *= std::fabs(h);
    value = resk * h;
    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double round = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    error = std::max(err, round);
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b] to an
// absolute tolerance. Throws a Numeric error (carrying the worst remaining
// subinterval) when the subdivision budget is exhausted.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                              std::size_t max_intervals = 2000) {
    struct Seg {
        double a, b, value, error;
        bool operator<(const Seg& o) const { return error < o.error; }
    };
    QuadResult res;
    std::priority_queue<Seg> heap;
    Seg s{a, b, 0, 0};
    detail::gk15(f, a, b, s.value, s.error);
    res.evaluations = 15;
    double total_value = s.value;
    double total_error = s.error;
    heap.push(s);
    while (total_error > abs_tol) {
        if (heap.size() >= max_intervals) {
            const Seg worst = heap.top();
            throw Error(ErrorKind::Numeric,
                        "adaptive quadrature did not reach tolerance " + std::to_string(abs_tol) +
                            "; worst subinterval [" + std::to_string(worst.a) + ", " +
                            std::to_string(worst.b) + "] error " + std::to_string(worst.error));
        }
        const Seg worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // interval no longer splittable; accept its estimate
            total_error -= worst.error;
            continue;
        }
        Seg left{worst.a, mid, 0, 0}, right{mid, worst.b, 0, 0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        res.evaluations += 30;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    res.value = total_value;
    res.error = total_error;
    return res;
}

}  // namespace vinedist
