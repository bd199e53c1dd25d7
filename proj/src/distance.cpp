#include "vinedist/distance.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>

#include "vinedist/cubature.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/parallel.hpp"
#include "vinedist/rng.hpp"
#include "vinedist/special.hpp"

namespace vinedist {

namespace {

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Distances require equal structure diagonals; with that settled, both specs
// are brought to canonical labels by the shared permutation.
std::pair<VineSpec, VineSpec> prepare_pair(const VineSpec& rf, const VineSpec& rg,
                                           const char* who) {
    if (rf.dim() != rg.dim())
        throw_contract(std::string(who) + ": vines must have equal dimension");
    const int d = rf.dim();
    for (int i = 1; i <= d; ++i)
        if (rf.structure().at(i, i) != rg.structure().at(i, i))
            throw_contract(std::string(who) +
                           ": structure-matrix diagonals differ at position " +
                           std::to_string(i));
    if (rf.canonical() && rg.canonical()) return {rf, rg};
    auto [fc, perm] = relabel_canonical(rf);
    return {std::move(fc), apply_permutation(rg, perm)};
}

double mean_in_order(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

double grid_epsilon(double beta, int dim) {
    if (!(beta > 0.0 && beta < 1.0)) throw_domain("beta must lie in (0,1)");
    if (dim < 1) throw_domain("grid dimension must be >= 1");
    return 0.5 * (1.0 - std::pow(beta, 1.0 / dim));
}

double kl_between_conditionals(const ConditionalDensity& f, const ConditionalDensity& g,
                               double tol) {
    const auto integrand = [&](double u) {
        const double lf = std::max(f.log_density(u), kKlDensityFloorLog);
        const double lg = std::max(g.log_density(u), kKlDensityFloorLog);
        return (lf - lg) * std::exp(lf);
    };
    const QuadResult q =
        integrate_adaptive(integrand, kKlInteriorGuard, 1.0 - kKlInteriorGuard, tol);
    return std::max(q.value, 0.0);
}

EvaluationGrid structured_grid(int dim, const GridSpec& spec) {
    if (spec.n < 2) throw_domain("structured_grid: n must be >= 2");
    const double eps = grid_epsilon(spec.beta, dim);
    const double delta = (1.0 - 2.0 * eps) / (spec.n - 1);

    std::size_t count = 1;
    for (int i = 0; i < dim; ++i) {
        if (count > (std::size_t{1} << 40) / static_cast<std::size_t>(spec.n))
            throw Error(ErrorKind::Refusal, "structured_grid: lattice too large");
        count *= static_cast<std::size_t>(spec.n);
    }

    EvaluationGrid grid;
    grid.dim = dim;
    grid.points.resize(count * dim);
    grid.weights.assign(count, 1.0);
    std::vector<int> idx(dim, 0);
    for (std::size_t p = 0; p < count; ++p) {
        for (int i = 0; i < dim; ++i) grid.points[p * dim + i] = eps + idx[i] * delta;
        for (int i = dim - 1; i >= 0; --i) {  // last coordinate fastest
            if (++idx[i] < spec.n) break;
            idx[i] = 0;
        }
    }
    return grid;
}

EvaluationGrid warp_points(const VineSpec& margin, const EvaluationGrid& grid) {
    if (margin.dim() != grid.dim)
        throw_shape("warp_points: margin dimension does not match grid dimension");
    EvaluationGrid out;
    out.dim = grid.dim;
    out.points.resize(grid.points.size());
    out.weights = grid.weights;
    VineEvaluator ev(margin);
    const std::size_t n = grid.count();
    for (std::size_t i = 0; i < n; ++i) {
        ev.inverse(grid.point(i),
                   std::span<double>(out.points.data() + i * grid.dim, grid.dim));
    }
    return out;
}

std::vector<Diagonal> enumerate_diagonals(int dim) {
    if (dim < 1) throw_domain("enumerate_diagonals: dim must be >= 1");
    const std::size_t count = std::size_t{1} << (dim - 1);
    std::vector<Diagonal> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        Diagonal d;
        d.dim = dim;
        d.corner.resize(dim, 0);
        d.direction.resize(dim, 1);
        for (int pos = 2; pos <= dim; ++pos) {
            const int bit = static_cast<int>((c >> (dim - pos)) & 1);
            d.corner[pos - 1] = bit;
            d.direction[pos - 1] = bit ? -1 : 1;
        }
        out.push_back(std::move(d));
    }
    return out;
}

double tail_transform(double t, double a) {
    const double den = 2.0 * special::norm_cdf(a) - 1.0;
    return (special::norm_cdf(2.0 * a * (t - 0.5)) - special::norm_cdf(-a)) / den;
}

double tail_transform_prime(double t, double a) {
    const double den = 2.0 * special::norm_cdf(a) - 1.0;
    return 2.0 * a * special::norm_pdf(2.0 * a * (t - 0.5)) / den;
}

double tail_transform_inv(double p, double a) {
    const double den = 2.0 * special::norm_cdf(a) - 1.0;
    return 0.5 + special::norm_quantile(p * den + special::norm_cdf(-a)) / (2.0 * a);
}

EvaluationGrid discretize_diagonal(const Diagonal& diag, const GridSpec& spec) {
    if (spec.n < 2) throw_domain("discretize_diagonal: n must be >= 2");
    if (spec.a < 0.0) throw_domain("discretize_diagonal: tail shape must be >= 0");
    const int dim = diag.dim;
    const double eps = grid_epsilon(spec.beta, dim);

    EvaluationGrid grid;
    grid.dim = dim;
    grid.points.resize(static_cast<std::size_t>(spec.n) * dim);
    grid.weights.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        double t, w;
        if (spec.a == 0.0) {
            t = eps + i * (1.0 - 2.0 * eps) / (spec.n - 1);
            w = 1.0;
        } else {
            const double s_lo = tail_transform_inv(eps, spec.a);
            const double s_hi = tail_transform_inv(1.0 - eps, spec.a);
            const double s = s_lo + i * (s_hi - s_lo) / (spec.n - 1);
            t = tail_transform(s, spec.a);
            w = tail_transform_prime(s, spec.a);
        }
        for (int p = 0; p < dim; ++p)
            grid.points[static_cast<std::size_t>(i) * dim + p] =
                diag.corner[p] + t * diag.direction[p];
        grid.weights[i] = w;
    }
    return grid;
}

double diagonal_weight(const VineSpec& margin, const Diagonal& diag, int n) {
    if (margin.dim() != diag.dim)
        throw_shape("diagonal_weight: margin dimension does not match diagonal");
    if (n < 1) throw_domain("diagonal_weight: n must be >= 1");
    VineEvaluator ev(margin);
    std::vector<double> pt(diag.dim);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) / n;
        for (int p = 0; p < diag.dim; ++p) pt[p] = diag.corner[p] + t * diag.direction[p];
        sum += std::exp(ev.log_density(pt));
    }
    return sum / n * std::sqrt(static_cast<double>(diag.dim));
}

std::vector<int> starting_direction(const VineSpec& margin) {
    const int d = margin.dim();
    std::vector<int> signs(static_cast<std::size_t>(d), 0);
    signs[0] = 1;
    if (d == 1) return signs;

    // unconditional pairs: last structure-matrix row against the diagonal
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(d) + 1);
    for (int i = 1; i < d; ++i) {
        const int other = margin.structure().at(d, i);
        const double tau = pair_tau(margin.pair(d, i));
        adj[i].push_back({other, tau});
        adj[other].push_back({i, tau});
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());

    std::deque<int> queue{1};
    int assigned = 1;
    while (!queue.empty()) {
        const int node = queue.front();
        queue.pop_front();
        for (const auto& [nbr, tau] : adj[node]) {
            if (signs[nbr - 1] != 0) continue;
            signs[nbr - 1] = (tau >= 0.0) ? signs[node - 1] : -signs[node - 1];
            ++assigned;
            queue.push_back(nbr);
        }
    }
    if (assigned != d)
        throw Error(ErrorKind::Structural,
                    "starting_direction: unconditional pairs do not form a connected tree");
    return signs;
}

Diagonal diagonal_from_signs(const std::vector<int>& signs) {
    if (signs.empty()) throw_domain("diagonal_from_signs: empty sign vector");
    Diagonal d;
    d.dim = static_cast<int>(signs.size());
    d.corner.resize(d.dim);
    d.direction.resize(d.dim);
    const int flip = signs[0] < 0 ? -1 : 1;
    for (int i = 0; i < d.dim; ++i) {
        const int s = signs[i] * flip;
        if (s != 1 && s != -1) throw_domain("diagonal_from_signs: entries must be +-1");
        d.corner[i] = (s == 1) ? 0 : 1;
        d.direction[i] = s;
    }
    return d;
}

Diagonal best_diagonal(const VineSpec& margin, const std::vector<int>& v0, int n) {
    const int dim = margin.dim();
    if (static_cast<int>(v0.size()) != dim)
        throw_shape("best_diagonal: sign vector length must match margin dimension");
    std::vector<int> current = v0;
    double current_w = diagonal_weight(margin, diagonal_from_signs(current), n);
    while (true) {
        double best_w = current_w;
        int best_flip = 0;
        for (int i = 1; i <= dim; ++i) {
            std::vector<int> cand = current;
            cand[i - 1] = -cand[i - 1];
            const double w = diagonal_weight(margin, diagonal_from_signs(cand), n);
            if (w > best_w) {  // strict improvement, ties keep the lowest index
                best_w = w;
                best_flip = i;
            }
        }
        if (best_flip == 0) break;
        current[best_flip - 1] = -current[best_flip - 1];
        current_w = best_w;
    }
    return diagonal_from_signs(current);
}

namespace {

// shared worker loop: per-point univariate KL between the j-th conditionals
void kl_over_points(const VineSpec& fc, const VineSpec& gc, int j,
                    const EvaluationGrid& warped, int workers, std::vector<double>& out) {
    const std::size_t npts = warped.count();
    out.resize(npts);
    const int nw = std::max(1, workers);
    std::vector<VineEvaluator> evf, evg;
    evf.reserve(nw);
    evg.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        evf.emplace_back(fc);
        evg.emplace_back(gc);
    }
    parallel_for(npts, nw, [&](std::size_t i, int w) {
        const ConditionalDensity f = evf[w].bind(j, warped.point(i));
        const ConditionalDensity g = evg[w].bind(j, warped.point(i));
        out[i] = kl_between_conditionals(f, g);
    });
}

}  // namespace

DistanceReport akl(const VineSpec& rf, const VineSpec& rg, const GridSpec& spec, bool force,
                   int workers) {
    const Stopwatch clock;
    auto [fc, gc] = prepare_pair(rf, rg, "akl");
    const int d = fc.dim();
    if (d > 6 && !force)
        throw Error(ErrorKind::Refusal,
                    "akl: dimension " + std::to_string(d) +
                        " exceeds the soft limit 6 (evaluation count grows as n^(d-1)); "
                        "pass force to override");
    if (workers <= 0) workers = default_workers();

    DistanceReport rep;
    rep.method = "akl";
    rep.n = spec.n;
    rep.beta = spec.beta;
    std::vector<double> vals;
    for (int j = 1; j <= d - 1; ++j) {
        const int dims = d - j;
        const EvaluationGrid lattice = structured_grid(dims, spec);
        const VineSpec margin = trim_structure(fc, j);
        const EvaluationGrid warped = warp_points(margin, lattice);
        kl_over_points(fc, gc, j, warped, workers, vals);
        rep.value += mean_in_order(vals);
        rep.evaluations += warped.count();
    }
    rep.wallclock_s = clock.seconds();
    return rep;
}

DistanceReport dkl(const VineSpec& rf, const VineSpec& rg, const GridSpec& spec, bool force,
                   int workers) {
    const Stopwatch clock;
    auto [fc, gc] = prepare_pair(rf, rg, "dkl");
    const int d = fc.dim();
    if (d > 12 && !force)
        throw Error(ErrorKind::Refusal,
                    "dkl: dimension " + std::to_string(d) +
                        " exceeds the soft limit 12 (2^(d-1)-1 diagonals); pass force "
                        "to override");
    if (workers <= 0) workers = default_workers();

    DistanceReport rep;
    rep.method = "dkl";
    rep.n = spec.n;
    rep.beta = spec.beta;
    rep.a = spec.a;
    std::vector<double> vals;
    for (int j = 1; j <= d - 1; ++j) {
        const int dims = d - j;
        const VineSpec margin = trim_structure(fc, j);
        const std::vector<Diagonal> diags = enumerate_diagonals(dims);

        // one flat batch per level: all diagonals' points side by side
        EvaluationGrid level;
        level.dim = dims;
        for (const Diagonal& dg : diags) {
            const EvaluationGrid g = discretize_diagonal(dg, spec);
            level.points.insert(level.points.end(), g.points.begin(), g.points.end());
            level.weights.insert(level.weights.end(), g.weights.begin(), g.weights.end());
        }
        const EvaluationGrid warped = warp_points(margin, level);
        kl_over_points(fc, gc, j, warped, workers, vals);

        double level_sum = 0.0;
        for (std::size_t k = 0; k < diags.size(); ++k) {
            double diag_sum = 0.0;
            for (int i = 0; i < spec.n; ++i) {
                const std::size_t idx = k * spec.n + i;
                diag_sum += vals[idx] * warped.weights[idx];
            }
            level_sum += diag_sum / spec.n;
        }
        rep.value += level_sum / static_cast<double>(diags.size());
        rep.evaluations += warped.count();
    }
    rep.wallclock_s = clock.seconds();
    return rep;
}

DistanceReport sdkl(const VineSpec& rf, const VineSpec& rg, const GridSpec& spec, int workers) {
    const Stopwatch clock;
    auto [fc, gc] = prepare_pair(rf, rg, "sdkl");
    const int d = fc.dim();
    if (workers <= 0) workers = default_workers();
    constexpr int kWeightPoints = 50;  // density evaluations per weight estimate

    DistanceReport rep;
    rep.method = "sdkl";
    rep.n = spec.n;
    rep.beta = spec.beta;
    rep.a = spec.a;
    std::vector<double> vals;
    for (int j = 1; j <= d - 1; ++j) {
        const VineSpec margin = trim_structure(fc, j);
        const std::vector<int> v0 = starting_direction(margin);
        const Diagonal star = best_diagonal(margin, v0, kWeightPoints);
        const EvaluationGrid grid = discretize_diagonal(star, spec);
        const EvaluationGrid warped = warp_points(margin, grid);
        kl_over_points(fc, gc, j, warped, workers, vals);
        double diag_sum = 0.0;
        for (std::size_t i = 0; i < warped.count(); ++i)
            diag_sum += vals[i] * warped.weights[i];
        rep.value += diag_sum / spec.n;
        rep.evaluations += warped.count();
    }
    rep.wallclock_s = clock.seconds();
    return rep;
}

DistanceReport mckl(const VineSpec& rf, const VineSpec& rg, std::uint64_t n_mc,
                    std::uint64_t seed, int workers) {
    const Stopwatch clock;
    auto [fc, gc] = prepare_pair(rf, rg, "mckl");
    const int d = fc.dim();
    if (n_mc < 1) throw_domain("mckl: sample size must be >= 1");
    if (workers <= 0) workers = default_workers();

    const int nw = std::max(1, workers);
    std::vector<VineEvaluator> evf, evg;
    evf.reserve(nw);
    evg.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        evf.emplace_back(fc);
        evg.emplace_back(gc);
    }

    // block sums keep the reduction order fixed for any worker count
    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t nblocks = (n_mc + kBlock - 1) / kBlock;
    std::vector<double> block_sums(nblocks, 0.0);
    parallel_for(nblocks, nw, [&](std::size_t bi, int w) {
        std::vector<double> wbuf(static_cast<std::size_t>(d));
        std::vector<double> u(static_cast<std::size_t>(d));
        const std::uint64_t lo = bi * kBlock;
        const std::uint64_t hi = std::min(n_mc, lo + kBlock);
        double s = 0.0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            const CounterRng rng(seed, i);
            for (int p = 0; p < d; ++p) wbuf[p] = rng.uniform(p);
            evf[w].inverse(wbuf, u);
            s += evf[w].log_density(u) - evg[w].log_density(u);
        }
        block_sums[bi] = s;
    });
    double total = 0.0;
    for (double s : block_sums) total += s;

    DistanceReport rep;
    rep.method = "mckl";
    rep.value = total / static_cast<double>(n_mc);
    rep.n_mc = n_mc;
    rep.seed = seed;
    rep.evaluations = n_mc;
    if (rep.value < 0.0) rep.note = "negative by sampling noise";
    rep.wallclock_s = clock.seconds();
    return rep;
}

namespace {

// Cholesky factor (lower) of a symmetric positive definite matrix; throws a
// Domain error when the matrix is not positive definite.
TriMat<double> cholesky(const TriMat<double>& s, const char* who) {
    const int d = s.dim();
    TriMat<double> l(d, 0.0);
    for (int i = 1; i <= d; ++i) {
        for (int j = 1; j <= i; ++j) {
            double sum = s.at(i, j);
            for (int k = 1; k < j; ++k) sum -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (sum <= 0.0)
                    throw_domain(std::string(who) + ": matrix is not positive definite");
                l.at(i, i) = std::sqrt(sum);
            } else {
                l.at(i, j) = sum / l.at(j, j);
            }
        }
    }
    return l;
}

}  // namespace

double gaussian_kl_analytic(const TriMat<double>& sigma_f, const TriMat<double>& sigma_g) {
    const int d = sigma_f.dim();
    if (sigma_g.dim() != d) throw_shape("gaussian_kl_analytic: dimension mismatch");
    for (int i = 1; i <= d; ++i) {
        if (std::fabs(sigma_f.at(i, i) - 1.0) > 1e-8 || std::fabs(sigma_g.at(i, i) - 1.0) > 1e-8)
            throw_domain("gaussian_kl_analytic: correlation matrices need unit diagonal");
    }
    const TriMat<double> lf = cholesky(sigma_f, "gaussian_kl_analytic");
    const TriMat<double> lg = cholesky(sigma_g, "gaussian_kl_analytic");
    double logdet_f = 0.0, logdet_g = 0.0;
    for (int i = 1; i <= d; ++i) {
        logdet_f += 2.0 * std::log(lf.at(i, i));
        logdet_g += 2.0 * std::log(lg.at(i, i));
    }
    // trace(Sg^-1 Sf) via forward/backward solves against the columns of Sf
    double trace = 0.0;
    std::vector<double> col(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
    for (int c = 1; c <= d; ++c) {
        for (int i = 1; i <= d; ++i) col[i - 1] = sigma_f.at(i, c);
        for (int i = 1; i <= d; ++i) {
            double sum = col[i - 1];
            for (int k = 1; k < i; ++k) sum -= lg.at(i, k) * y[k - 1];
            y[i - 1] = sum / lg.at(i, i);
        }
        for (int i = d; i >= 1; --i) {
            double sum = y[i - 1];
            for (int k = i + 1; k <= d; ++k) sum -= lg.at(k, i) * y[k - 1];
            y[i - 1] = sum / lg.at(i, i);
        }
        trace += y[c - 1];
    }
    const double kl = 0.5 * (logdet_g - logdet_f + trace - d);
    return std::max(kl, 0.0);
}

TriMat<double> gaussian_vine_corr(const VineSpec& r) {
    if (!r.canonical())
        throw_contract("gaussian_vine_corr: requires a canonical spec");
    const int d = r.dim();
    for (int j = 1; j < d; ++j)
        for (int i = j + 1; i <= d; ++i)
            if (r.pair(i, j).family != Family::Gaussian)
                throw_domain("gaussian_vine_corr: slot (" + std::to_string(i) + "," +
                             std::to_string(j) + ") is not Gaussian");

    // On the normal scale the inverse Rosenblatt map of a Gaussian vine is
    // linear in the iid normal inputs. Running the recursion on coefficient
    // vectors instead of numbers yields Z = A * eta exactly, and Sigma = AA'.
    using Form = std::vector<double>;
    const auto axpy = [d](double alpha, const Form& x, double beta, const Form& y) {
        Form out(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) out[i] = alpha * x[i] + beta * y[i];
        return out;
    };
    std::vector<Form> u_form(static_cast<std::size_t>(d) + 1, Form(static_cast<std::size_t>(d), 0.0));
    std::vector<std::vector<Form>> b_form(static_cast<std::size_t>(d) + 1,
                                          std::vector<Form>(static_cast<std::size_t>(d) + 1));
    std::vector<std::vector<Form>> hf_form(static_cast<std::size_t>(d) + 1,
                                           std::vector<Form>(static_cast<std::size_t>(d) + 1));
    const auto unit = [d](int label) {
        Form e(static_cast<std::size_t>(d), 0.0);
        e[label - 1] = 1.0;
        return e;
    };

    u_form[d] = unit(d);
    for (int j = d - 1; j >= 1; --j) {
        // fetch the conditioning forms, mirroring the numeric inverse
        const auto a_of = [&](int k) -> const Form& {
            const auto& src = r.a_source(k, j);
            switch (src.kind) {
                case VineSpec::ASource::Kind::UStart:
                    return u_form[r.structure().at(k, j)];
                case VineSpec::ASource::Kind::BStack: return b_form[k][src.col];
                case VineSpec::ASource::Kind::HFunc: return hf_form[k + 1][src.col];
            }
            throw Error(ErrorKind::Structural, "invalid evaluation plan entry");
        };
        b_form[j][j] = unit(j);
        for (int k = j + 1; k <= d; ++k) {
            const double rho = r.pair(k, j).p1;
            const double s = std::sqrt(1.0 - rho * rho);
            // z_b = rho * z_a + s * z_prev  (inverse of the residual step)
            b_form[k][j] = axpy(rho, a_of(k), s, b_form[k - 1][j]);
        }
        u_form[j] = b_form[d][j];
        for (int k = d; k > j; --k) {
            const double rho = r.pair(k, j).p1;
            const double s = std::sqrt(1.0 - rho * rho);
            // z residual of the column entry given diagonal and below
            hf_form[k][j] = axpy(1.0 / s, a_of(k), -rho / s, b_form[k][j]);
        }
    }

    TriMat<double> sigma(d, 0.0);
    std::vector<double> norms(static_cast<std::size_t>(d) + 1, 0.0);
    for (int i = 1; i <= d; ++i) {
        double nn = 0.0;
        for (double x : u_form[i]) nn += x * x;
        norms[i] = std::sqrt(nn);
    }
    for (int i = 1; i <= d; ++i) {
        for (int j = 1; j <= d; ++j) {
            double dot = 0.0;
            for (int k = 0; k < d; ++k) dot += u_form[i][k] * u_form[j][k];
            sigma.at(i, j) = dot / (norms[i] * norms[j]);
        }
    }
    return sigma;
}

DistanceReport cubature_kl(const VineSpec& rf, const VineSpec& rg, double beta, double tol,
                           int workers, std::uint64_t max_evals) {
    const Stopwatch clock;
    auto [fc, gc] = prepare_pair(rf, rg, "cubature_kl");
    const int d = fc.dim();
    if (d > 4)
        throw Error(ErrorKind::Refusal,
                    "cubature_kl: refusing dimension " + std::to_string(d) +
                        " (> 4); full numerical integration is not tractable there");
    if (!(beta > 0.0 && beta <= 1.0)) throw_domain("cubature_kl: beta must lie in (0,1]");
    if (!(tol > 0.0)) throw_domain("cubature_kl: tol must be positive");
    if (workers <= 0) workers = default_workers();

    const double lo_edge = (beta == 1.0) ? kKlInteriorGuard : grid_epsilon(beta, d);
    std::vector<double> lo(static_cast<std::size_t>(d), lo_edge);
    std::vector<double> hi(static_cast<std::size_t>(d), 1.0 - lo_edge);

    const auto make_integrand = [&fc, &gc](int) -> PointFn {
        auto evf = std::make_shared<VineEvaluator>(fc);
        auto evg = std::make_shared<VineEvaluator>(gc);
        return [evf, evg](std::span<const double> u) {
            const double lf = std::max(evf->log_density(u), kKlDensityFloorLog);
            const double lg = std::max(evg->log_density(u), kKlDensityFloorLog);
            return (lf - lg) * std::exp(lf);
        };
    };
    const CubatureResult cr = cubature_integrate(make_integrand, lo, hi, tol, max_evals, workers);
    if (!cr.converged)
        throw Error(ErrorKind::Numeric,
                    "cubature_kl: subdivision budget exhausted; best estimate " +
                        std::to_string(cr.value) + " with error bound " +
                        std::to_string(cr.error));

    DistanceReport rep;
    rep.method = "cubature";
    rep.value = cr.value;
    rep.beta = beta;
    rep.tol = tol;
    rep.evaluations = cr.evaluations;
    rep.wallclock_s = clock.seconds();
    return rep;
}

}  // namespace vinedist
