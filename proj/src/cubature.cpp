#include "vinedist/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "vinedist/errors.hpp"
#include "vinedist/parallel.hpp"

namespace vinedist {

namespace {

constexpr double kLambda2 = 0.35856858280031809199;  // sqrt(9/70)
constexpr double kLambda4 = 0.94868329805051379960;  // sqrt(9/10)
constexpr double kLambda5 = 0.68824720161168529772;  // sqrt(9/19)

struct GmRule {
    int dim;
    double w[5];
    double we[4];
    std::uint64_t points;

    explicit GmRule(int k) : dim(k) {
        const double k2 = static_cast<double>(k) * k;
        w[0] = (12824.0 - 9120.0 * k + 400.0 * k2) / 19683.0;
        w[1] = 980.0 / 6561.0;
        w[2] = (1820.0 - 400.0 * k) / 19683.0;
        w[3] = 200.0 / 19683.0;
        w[4] = (6859.0 / 19683.0) / static_cast<double>(1ULL << k);
        we[0] = (729.0 - 950.0 * k + 50.0 * k2) / 729.0;
        we[1] = 245.0 / 486.0;
        we[2] = (265.0 - 100.0 * k) / 1458.0;
        we[3] = 25.0 / 729.0;
        points = 1 + 4ULL * k + 2ULL * k * (k - 1) + (1ULL << k);
    }
};

struct Region {
    std::vector<double> lo, hi;
    double value = 0.0;
    double error = 0.0;
    int split_dim = 0;
    std::uint64_t id = 0;
};

struct RegionOrder {
    bool operator()(const Region& a, const Region& b) const {
        if (a.error != b.error) return a.error < b.error;
        return a.id > b.id;  // older regions first among equals
    }
};

void evaluate_region(const PointFn& f, const GmRule& rule, Region& reg) {
    const int k = rule.dim;
    std::vector<double> c(k), h(k), p(k);
    double vol = 1.0;
    for (int i = 0; i < k; ++i) {
        c[i] = 0.5 * (reg.lo[i] + reg.hi[i]);
        h[i] = 0.5 * (reg.hi[i] - reg.lo[i]);
        vol *= 2.0 * h[i];
    }
    const double f0 = f(c);
    double sum2 = 0.0, sum3 = 0.0;
    const double ratio = (kLambda2 * kLambda2) / (kLambda4 * kLambda4);
    double max_diff = -1.0;
    int split = 0;
    p = c;
    for (int i = 0; i < k; ++i) {
        p[i] = c[i] + kLambda2 * h[i];
        const double f2p = f(p);
        p[i] = c[i] - kLambda2 * h[i];
        const double f2m = f(p);
        p[i] = c[i] + kLambda4 * h[i];
        const double f4p = f(p);
        p[i] = c[i] - kLambda4 * h[i];
        const double f4m = f(p);
        p[i] = c[i];
        const double d2 = f2p + f2m;
        const double d4 = f4p + f4m;
        sum2 += d2;
        sum3 += d4;
        const double diff = std::fabs(d2 - 2.0 * f0 - ratio * (d4 - 2.0 * f0));
        if (diff > max_diff) {
            max_diff = diff;
            split = i;
        }
    }
    double sum4 = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            for (int si = -1; si <= 1; si += 2) {
                for (int sj = -1; sj <= 1; sj += 2) {
                    p[i] = c[i] + si * kLambda4 * h[i];
                    p[j] = c[j] + sj * kLambda4 * h[j];
                    sum4 += f(p);
                }
            }
            p[i] = c[i];
            p[j] = c[j];
        }
    }
    double sum5 = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        for (int i = 0; i < k; ++i)
            p[i] = c[i] + ((mask >> i) & 1 ? kLambda5 : -kLambda5) * h[i];
        sum5 += f(p);
    }
    const double i7 = vol * (rule.w[0] * f0 + rule.w[1] * sum2 + rule.w[2] * sum3 +
                             rule.w[3] * sum4 + rule.w[4] * sum5);
    const double i5 = vol * (rule.we[0] * f0 + rule.we[1] * sum2 + rule.we[2] * sum3 +
                             rule.we[3] * sum4);
    reg.value = i7;
    reg.error = std::fabs(i7 - i5);
    reg.split_dim = split;
}

}  // namespace

CubatureResult cubature_integrate(const std::function<PointFn(int)>& integrand_for_worker,
                                  std::span<const double> lo, std::span<const double> hi,
                                  double abs_tol, std::uint64_t max_evals, int workers) {
    const int k = static_cast<int>(lo.size());
    if (k < 2 || k != static_cast<int>(hi.size()))
        throw_shape("cubature_integrate: needs a box of dimension >= 2");
    if (workers <= 0) workers = default_workers();
    const GmRule rule(k);

    std::vector<PointFn> fns;
    fns.reserve(workers);
    for (int w = 0; w < workers; ++w) fns.push_back(integrand_for_worker(w));

    CubatureResult res;
    std::uint64_t next_id = 0;

    Region root;
    root.lo.assign(lo.begin(), lo.end());
    root.hi.assign(hi.begin(), hi.end());
    root.id = next_id++;
    evaluate_region(fns[0], rule, root);
    res.evaluations += rule.points;

    std::priority_queue<Region, std::vector<Region>, RegionOrder> heap;
    double total_value = root.value;
    double total_error = root.error;
    heap.push(std::move(root));

    constexpr std::size_t kBatch = 16;  // fixed so results match for any worker count
    std::vector<Region> children;
    while (total_error > abs_tol && !heap.empty()) {
        if (res.evaluations >= max_evals) {
            res.value = total_value;
            res.error = total_error;
            res.converged = false;
            return res;
        }
        children.clear();
        const std::size_t batch = std::min(kBatch, heap.size());
        for (std::size_t t = 0; t < batch; ++t) {
            Region parent = heap.top();
            heap.pop();
            const int sd = parent.split_dim;
            const double mid = 0.5 * (parent.lo[sd] + parent.hi[sd]);
            Region left = parent, right = parent;
            left.hi[sd] = mid;
            right.lo[sd] = mid;
            left.id = next_id++;
            right.id = next_id++;
            // remove the parent's contribution now, add children's after eval
            total_value -= parent.value;
            total_error -= parent.error;
            children.push_back(std::move(left));
            children.push_back(std::move(right));
        }
        parallel_for(children.size(), workers,
                     [&](std::size_t i, int w) { evaluate_region(fns[w], rule, children[i]); });
        res.evaluations += rule.points * children.size();
        for (auto& ch : children) {
            total_value += ch.value;
            total_error += ch.error;
            heap.push(std::move(ch));
        }
    }
    res.value = total_value;
    res.error = total_error;
    res.converged = total_error <= abs_tol;
    return res;
}

}  // namespace vinedist
