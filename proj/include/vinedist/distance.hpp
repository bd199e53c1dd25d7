#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vinedist/quadrature.hpp"
#include "vinedist/vine.hpp"

namespace vinedist {

// Evaluation-grid parameters shared by the grid-based distances: points per
// margin (or per diagonal), coverage volume beta of the structured grid, and
// the tail-transform shape a (0 disables the transform).
struct GridSpec {
    int n = 10;
    double beta = 0.95;
    double a = 4.0;
};

// margin clipping of the structured grid: (1 - beta^(1/dim)) / 2
double grid_epsilon(double beta, int dim);

// One of the 2^(dim-1) diagonals of [0,1]^dim, represented by its canonical
// corner (first component 0) and direction vector.
struct Diagonal {
    int dim = 1;
    std::vector<int> corner;     // r in {0,1}^dim with r[0] = 0
    std::vector<int> direction;  // +1 where the corner is 0, -1 where it is 1
};

struct EvaluationGrid {
    int dim = 0;
    std::vector<double> points;   // row-major, count() * dim values
    std::vector<double> weights;  // one per point, all 1 without tail transform
    std::size_t count() const { return weights.size(); }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

struct DistanceReport {
    std::string method;
    double value = 0.0;
    int n = 0;
    double beta = 0.0;
    double a = 0.0;
    std::uint64_t n_mc = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::uint64_t evaluations = 0;  // univariate-KL / integrand calls
    double wallclock_s = 0.0;
    std::string note;
};

inline constexpr double kKlInteriorGuard = 1e-7;
inline constexpr double kKlDensityFloorLog = -690.7755278982137;  // log(1e-300)

// KL distance between two univariate densities on (0,1): adaptive quadrature
// of log(f/g) * f over [1e-7, 1-1e-7], densities floored at 1e-300, result
// floored at 0.
template <class F, class G>
double univariate_kl(F&& f, G&& g, double tol = 1e-8) {
    const auto integrand = [&](double u) {
        const double fv = std::max(f(u), 1e-300);
        const double gv = std::max(g(u), 1e-300);
        return std::log(fv / gv) * fv;
    };
    const QuadResult q =
        integrate_adaptive(integrand, kKlInteriorGuard, 1.0 - kKlInteriorGuard, tol);
    return std::max(q.value, 0.0);
}

// same integral computed from bound conditional log-densities
double kl_between_conditionals(const ConditionalDensity& f, const ConditionalDensity& g,
                               double tol = 1e-8);

// Full lattice with n points per margin on [eps, 1-eps]^dim (w-scale).
EvaluationGrid structured_grid(int dim, const GridSpec& spec);

// Image of a w-scale grid under the margin vine's inverse Rosenblatt
// transform; weights pass through unchanged.
EvaluationGrid warp_points(const VineSpec& margin, const EvaluationGrid& grid);

// All 2^(dim-1) canonical diagonals in lexicographic corner order.
std::vector<Diagonal> enumerate_diagonals(int dim);

// n points on the diagonal (w-scale). Without tail transform: equidistant
// gamma(t_i) on [eps, 1-eps] with unit weights. With shape a > 0: points
// gamma(Psi_a(s_i)) with weights Psi_a'(s_i), pushing evaluations toward the
// cube corners.
EvaluationGrid discretize_diagonal(const Diagonal& diag, const GridSpec& spec);

// the tail transform and its derivative / inverse
double tail_transform(double t, double a);
double tail_transform_prime(double t, double a);
double tail_transform_inv(double p, double a);

// Line-integral weight of a diagonal under the margin's density, approximated
// by n midpoint evaluations: mean of c(gamma(t_i)) times sqrt(dim).
double diagonal_weight(const VineSpec& margin, const Diagonal& diag, int n);

// Sign vector from the margin's unconditional dependence tree: the smallest
// label gets +1 and signs propagate breadth-first, flipping across edges with
// negative Kendall's tau.
std::vector<int> starting_direction(const VineSpec& margin);

// Hill climb over single sign flips, moving to the best strict improver of
// diagonal_weight (ties broken by the lowest flipped index).
Diagonal best_diagonal(const VineSpec& margin, const std::vector<int>& v0, int n);

Diagonal diagonal_from_signs(const std::vector<int>& signs);

// The three grid-based distances. Both vines must share the structure-matrix
// diagonal. Soft dimension limits (aKL d <= 6, dKL d <= 12) can be lifted
// with force = true.
DistanceReport akl(const VineSpec& rf, const VineSpec& rg, const GridSpec& spec,
                   bool force = false, int workers = 0);
DistanceReport dkl(const VineSpec& rf, const VineSpec& rg, const GridSpec& spec,
                   bool force = false, int workers = 0);
DistanceReport sdkl(const VineSpec& rf, const VineSpec& rg, const GridSpec& spec,
                    int workers = 0);

// Monte-Carlo KL: mean log-density ratio over a seeded sample of rf. May be
// slightly negative by sampling noise; reported as-is.
DistanceReport mckl(const VineSpec& rf, const VineSpec& rg, std::uint64_t n_mc,
                    std::uint64_t seed, int workers = 0);

// Closed-form KL between two Gaussian copulas with the given correlation
// matrices (symmetric positive definite, unit diagonal).
double gaussian_kl_analytic(const TriMat<double>& sigma_f, const TriMat<double>& sigma_g);

// Correlation matrix implied by an all-Gaussian vine's partial correlations,
// unwound along the structure.
TriMat<double> gaussian_vine_corr(const VineSpec& r);

// Adaptive-cubature benchmark of the full KL integral over the centered
// subcube of volume beta (beta = 1 integrates over the guarded unit cube).
// Hard-limited to d <= 4.
DistanceReport cubature_kl(const VineSpec& rf, const VineSpec& rg, double beta = 0.95,
                           double tol = 1e-4, int workers = 0,
                           std::uint64_t max_evals = 400000000ULL);

}  // namespace vinedist
