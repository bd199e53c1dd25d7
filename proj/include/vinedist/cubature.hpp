#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace vinedist {

struct CubatureResult {
    double value = 0.0;
    double error = 0.0;
    std::uint64_t evaluations = 0;
    bool converged = false;
};

using PointFn = std::function<double(std::span<const double>)>;

// Adaptive multidimensional integration over an axis-aligned box using the
// embedded degree 7/5 Genz-Malik rule with bisection along the direction of
// largest fourth difference. Regions are processed in deterministic order, so
// the result is identical for any worker count. `integrand_for_worker` must
// hand out one independent integrand per worker id.
CubatureResult cubature_integrate(const std::function<PointFn(int)>& integrand_for_worker,
                                  std::span<const double> lo, std::span<const double> hi,
                                  double abs_tol, std::uint64_t max_evals, int workers = 0);

}  // namespace vinedist
