#include "vinedist/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "vinedist/errors.hpp"
#include "vinedist/rng.hpp"
#include "vinedist/special.hpp"

namespace vinedist {

namespace {

double now_minus(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StudyCell timed_cell(double value, std::chrono::steady_clock::time_point t0) {
    StudyCell c;
    c.value = value;
    c.time_s = now_minus(t0);
    return c;
}

StudyCell skipped_cell(std::string note) {
    StudyCell c;
    c.note = std::move(note);
    return c;
}

}  // namespace

StructureMatrix dvine_structure(int d) {
    if (d < 2) throw_domain("dvine_structure: d must be >= 2");
    StructureMatrix m(d, 0);
    for (int j = 1; j <= d; ++j) {
        m.at(j, j) = j;
        for (int i = j + 1; i <= d; ++i) m.at(i, j) = d + 1 + j - i;
    }
    return m;
}

VineSpec t_vine(int d, double tau, double nu) {
    if (!(std::fabs(tau) < 1.0)) throw_domain("t_vine: |tau| must be < 1");
    if (!(nu > 2.0)) throw_domain("t_vine: nu must exceed 2");
    StructureMatrix m = dvine_structure(d);
    TriMat<PairCopula> pairs(d);
    for (int j = 1; j < d; ++j) {
        for (int i = j + 1; i <= d; ++i) {
            const double kij = std::pow(0.5, d - i) * tau;
            const double vij = nu + d - i;
            if (kij == 0.0) {
                PairCopula pc;
                pc.family = Family::StudentT;
                pc.p1 = 0.0;
                pc.p2 = vij;
                pairs.at(i, j) = pc;
            } else {
                pairs.at(i, j) = pair_from_tau(Family::StudentT, kij, vij, false);
            }
        }
    }
    return VineSpec(std::move(m), std::move(pairs));
}

VineSpec single_family_vine(int d, Family family, bool survival, double tau) {
    StructureMatrix m = dvine_structure(d);
    TriMat<PairCopula> pairs(d);
    for (int j = 1; j < d; ++j) {
        for (int i = j + 1; i <= d; ++i) {
            const double kij = std::pow(0.5, d - i) * tau;
            pairs.at(i, j) = pair_from_tau(family, kij, std::nullopt, survival);
        }
    }
    return VineSpec(std::move(m), std::move(pairs));
}

VineSpec random_gaussian_vine(int d, std::uint64_t seed) {
    StructureMatrix m = dvine_structure(d);
    TriMat<PairCopula> pairs(d);
    CounterRng rng(seed);
    std::uint64_t counter = 0;
    for (int i = 2; i <= d; ++i) {
        for (int j = 1; j < i; ++j) {
            const double u = rng.uniform(counter++);
            const double x = special::inc_beta_inv(0.5 * i, 0.5 * i, u);
            PairCopula pc;
            pc.family = Family::Gaussian;
            pc.p1 = 2.0 * x - 1.0;
            pairs.at(i, j) = pc;
        }
    }
    return VineSpec(std::move(m), std::move(pairs));
}

VineSpec euro_stoxx4() {
    StructureMatrix m(4, 0);
    const int rows[4][4] = {{1, 0, 0, 0}, {4, 2, 0, 0}, {2, 4, 3, 0}, {3, 3, 4, 4}};
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) m.at(i, j) = rows[i - 1][j - 1];

    TriMat<PairCopula> pairs(4);
    const auto tpair = [](double rho, double nu) {
        PairCopula pc;
        pc.family = Family::StudentT;
        pc.p1 = rho;
        pc.p2 = nu;
        return pc;
    };
    PairCopula frank;
    frank.family = Family::Frank;
    frank.p1 = 1.01;
    pairs.at(2, 1) = frank;
    pairs.at(3, 1) = tpair(0.36, 6.34);
    pairs.at(3, 2) = tpair(0.36, 10.77);
    pairs.at(4, 1) = tpair(0.91, 6.23);
    pairs.at(4, 2) = tpair(0.89, 4.96);
    pairs.at(4, 3) = tpair(0.88, 6.80);
    return VineSpec(std::move(m), std::move(pairs));
}

double spearman(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw_shape("spearman: length mismatch");
    if (n < 2) throw_shape("spearman: needs at least two observations");

    const auto ranks = [](std::span<const double> v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;  // average rank for ties
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw_domain("spearman: constant input has no rank correlation");
    return sxy / std::sqrt(sxx * syy);
}

TableId table_from_string(const std::string& s) {
    if (s == "T1") return TableId::T1_akl;
    if (s == "T2") return TableId::T2_dkl;
    if (s == "T3") return TableId::T3_plausibility;
    if (s == "T4") return TableId::T4_sdkl_plausibility;
    if (s == "T5") return TableId::T5_rankcorr;
    if (s == "T6") return TableId::T6_timings;
    throw_domain("unknown table id '" + s + "' (expected T1..T6)");
}

std::string to_string(TableId id) {
    switch (id) {
        case TableId::T1_akl: return "T1";
        case TableId::T2_dkl: return "T2";
        case TableId::T3_plausibility: return "T3";
        case TableId::T4_sdkl_plausibility: return "T4";
        case TableId::T5_rankcorr: return "T5";
        case TableId::T6_timings: return "T6";
    }
    return "?";
}

std::uint64_t comparison_vine_seed(int d, int r) {
    return kStudySeedBase + 1000ULL * static_cast<std::uint64_t>(d) +
           static_cast<std::uint64_t>(r);
}

namespace {

StudyResult table1(StudyScale scale, int workers) {
    StudyResult res;
    res.table = "T1";
    res.title = "aKL vs numeric and Monte Carlo KL, four-dimensional stock fixture";
    const VineSpec rf = euro_stoxx4();
    const VineSpec rg = nearest_gaussian(rf);

    const std::vector<int> ns = {10, 20, 50};
    for (int n : ns) res.columns.push_back("aKL(n=" + std::to_string(n) + ")");
    res.columns.push_back("numeric(tol=1e-4)");
    res.columns.push_back("MCKL(1e5)");
    res.columns.push_back("MCKL(1e6)");
    res.seeds = {kMcklSeed};

    const std::vector<double> betas =
        (scale == StudyScale::Paper) ? std::vector<double>{0.95, 0.99} : std::vector<double>{0.95};
    for (double beta : betas) {
        StudyRow row;
        row.label = "beta=" + std::to_string(beta).substr(0, 4);
        for (int n : ns) {
            const auto t0 = std::chrono::steady_clock::now();
            const DistanceReport r = akl(rf, rg, {n, beta, 0.0}, false, workers);
            row.cells.push_back(timed_cell(r.value, t0));
        }
        {
            const auto t0 = std::chrono::steady_clock::now();
            const DistanceReport r = cubature_kl(rf, rg, beta, 1e-4, workers);
            row.cells.push_back(timed_cell(r.value, t0));
        }
        for (std::uint64_t nmc : {100000ULL, 1000000ULL}) {
            const auto t0 = std::chrono::steady_clock::now();
            const DistanceReport r = mckl(rf, rg, nmc, kMcklSeed, workers);
            row.cells.push_back(timed_cell(r.value, t0));
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

StudyResult table2(StudyScale scale, int workers) {
    StudyResult res;
    res.table = "T2";
    res.title = "dKL over grid sizes, four-dimensional stock fixture";
    const VineSpec rf = euro_stoxx4();
    const VineSpec rg = nearest_gaussian(rf);
    std::vector<int> ns = {10, 20, 50, 100, 1000};
    if (scale == StudyScale::Paper) ns.push_back(10000);
    for (int n : ns) res.columns.push_back("n=" + std::to_string(n));
    StudyRow row;
    row.label = "dKL";
    for (int n : ns) {
        const auto t0 = std::chrono::steady_clock::now();
        const DistanceReport r = dkl(rf, rg, {n, 0.95, 4.0}, false, workers);
        row.cells.push_back(timed_cell(r.value, t0));
    }
    res.rows.push_back(std::move(row));
    return res;
}

// the three plausibility panels, shared by T3 (dKL) and T4 (sdKL)
StudyResult plausibility(bool single_diag, int workers) {
    StudyResult res;
    res.table = single_diag ? "T4" : "T3";
    res.title = std::string(single_diag ? "sdKL" : "dKL") +
                " plausibility checks on five-dimensional vines";
    const char* method = single_diag ? "sdKL" : "dKL";
    res.columns = {std::string(method) + "(n=10)", "MCKL(1e6)", "ratio"};
    res.seeds = {kMcklSeed};
    const GridSpec spec{10, 0.95, 4.0};

    const auto run = [&](const VineSpec& rf, const VineSpec& rg, const std::string& label) {
        StudyRow row;
        row.label = label;
        auto t0 = std::chrono::steady_clock::now();
        const DistanceReport rd = single_diag ? sdkl(rf, rg, spec, workers)
                                              : dkl(rf, rg, spec, false, workers);
        row.cells.push_back(timed_cell(rd.value, t0));
        t0 = std::chrono::steady_clock::now();
        const DistanceReport rm = mckl(rf, rg, 1000000ULL, kMcklSeed, workers);
        row.cells.push_back(timed_cell(rm.value, t0));
        StudyCell ratio;
        ratio.value = rd.value / rm.value;
        row.cells.push_back(ratio);
        res.rows.push_back(std::move(row));
    };

    for (double nu : {3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 25.0, 30.0}) {
        const VineSpec rf = t_vine(5, 0.5, nu);
        run(rf, nearest_gaussian(rf), "nu=" + std::to_string(static_cast<int>(nu)));
    }
    const VineSpec ref = t_vine(5, 0.0, 3.0);
    for (double tau : {-0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7}) {
        const VineSpec rf = t_vine(5, tau, 3.0);
        char label[32];
        std::snprintf(label, sizeof(label), "tau=%+.1f", tau);
        run(rf, ref, label);
    }
    const VineSpec gumbel = single_family_vine(5, Family::Gumbel, false, 0.5);
    run(gumbel, nearest_gaussian(gumbel), "family=N");
    run(gumbel, single_family_vine(5, Family::Clayton, false, 0.5), "family=C");
    run(gumbel, single_family_vine(5, Family::Clayton, true, 0.5), "family=sC");
    run(gumbel, single_family_vine(5, Family::Joe, false, 0.5), "family=J");
    return res;
}

}  // namespace

StudyResult rankcorr_study(const std::vector<int>& dims, int m,
                           const std::vector<std::string>& methods, int workers) {
    StudyResult res;
    res.table = "T5";
    res.title = "rank correlation against the analytic Gaussian KL (" + std::to_string(m) +
                " random vines per dimension)";
    res.columns = methods;
    const auto has = [&](const char* name) {
        return std::find(methods.begin(), methods.end(), name) != methods.end();
    };

    for (int d : dims) {
        // reference vine and its correlation matrix
        VineSpec ref = [&] {
            StructureMatrix m = dvine_structure(d);
            TriMat<PairCopula> pairs(d);
            for (int j = 1; j < d; ++j)
                for (int i = j + 1; i <= d; ++i) {
                    PairCopula pc;
                    pc.family = Family::Gaussian;
                    pc.p1 = std::sin(3.14159265358979323846 * 0.5 * std::pow(0.5, d - i) * 0.5);
                    pairs.at(i, j) = pc;
                }
            return VineSpec(std::move(m), std::move(pairs));
        }();
        const TriMat<double> sigma_ref = gaussian_vine_corr(ref);

        std::vector<double> exact(m);
        std::vector<std::vector<double>> vals(methods.size(), std::vector<double>(m));
        std::vector<double> times(methods.size(), 0.0);
        std::vector<bool> feasible(methods.size(), true);
        for (std::size_t c = 0; c < methods.size(); ++c) {
            if (methods[c] == "akl" && d > 3) feasible[c] = false;  // desk budget
        }

        for (int r = 0; r < m; ++r) {
            const VineSpec cand = random_gaussian_vine(d, comparison_vine_seed(d, r));
            res.seeds.push_back(comparison_vine_seed(d, r));
            exact[r] = gaussian_kl_analytic(gaussian_vine_corr(cand), sigma_ref);
            for (std::size_t c = 0; c < methods.size(); ++c) {
                if (!feasible[c]) continue;
                const auto t0 = std::chrono::steady_clock::now();
                double v = std::numeric_limits<double>::quiet_NaN();
                if (methods[c] == "akl")
                    v = akl(cand, ref, {20, 0.95, 0.0}, false, workers).value;
                else if (methods[c] == "dkl")
                    v = dkl(cand, ref, {10, 0.95, 4.0}, false, workers).value;
                else if (methods[c] == "sdkl")
                    v = sdkl(cand, ref, {10, 0.95, 4.0}, workers).value;
                else if (methods[c] == "mckl")
                    v = mckl(cand, ref, 1000000ULL, kMcklSeed + r, workers).value;
                else
                    throw_domain("rankcorr_study: unknown method '" + methods[c] + "'");
                vals[c][r] = v;
                times[c] += now_minus(t0);
            }
        }

        StudyRow row;
        row.label = "d=" + std::to_string(d);
        for (std::size_t c = 0; c < methods.size(); ++c) {
            if (!feasible[c]) {
                row.cells.push_back(skipped_cell("skipped: soft limit"));
                continue;
            }
            StudyCell cell;
            cell.value = spearman(vals[c], exact);
            cell.time_s = times[c] / m;
            row.cells.push_back(cell);
            res.rank_correlations.push_back(
                {methods[c] + "@d=" + std::to_string(d), cell.value});
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

namespace {

StudyResult table5(StudyScale scale, int workers) {
    const std::vector<int> dims = (scale == StudyScale::Paper)
                                      ? std::vector<int>{3, 4, 5, 7, 10, 15, 20, 30}
                                      : std::vector<int>{3, 5, 7, 10};
    StudyResult res = rankcorr_study(dims, 50, {"akl", "dkl", "sdkl", "mckl"}, workers);
    res.scale = (scale == StudyScale::Paper) ? "paper" : "desk";
    return res;
}

StudyResult table6(StudyScale scale, int workers) {
    StudyResult res;
    res.table = "T6";
    res.title = "values and wall times over dimension, t-vine ladder";
    res.columns = {"dKL(n=10)", "sdKL(n=10)", "MCKL(1e6)"};
    res.seeds = {kMcklSeed};
    const int dmax = (scale == StudyScale::Paper) ? 12 : 10;
    for (int d = 3; d <= dmax; ++d) {
        const VineSpec rf = t_vine(d, 0.5, 3.0);
        const VineSpec rg = nearest_gaussian(rf);
        StudyRow row;
        row.label = "d=" + std::to_string(d);
        auto t0 = std::chrono::steady_clock::now();
        row.cells.push_back(timed_cell(dkl(rf, rg, {10, 0.95, 4.0}, false, workers).value, t0));
        t0 = std::chrono::steady_clock::now();
        row.cells.push_back(timed_cell(sdkl(rf, rg, {10, 0.95, 4.0}, workers).value, t0));
        t0 = std::chrono::steady_clock::now();
        row.cells.push_back(
            timed_cell(mckl(rf, rg, 1000000ULL, kMcklSeed, workers).value, t0));
        res.rows.push_back(std::move(row));
    }
    return res;
}

}  // namespace

StudyResult reproduce_table(TableId id, StudyScale scale, int workers) {
    StudyResult res;
    switch (id) {
        case TableId::T1_akl: res = table1(scale, workers); break;
        case TableId::T2_dkl: res = table2(scale, workers); break;
        case TableId::T3_plausibility: res = plausibility(false, workers); break;
        case TableId::T4_sdkl_plausibility: res = plausibility(true, workers); break;
        case TableId::T5_rankcorr: res = table5(scale, workers); break;
        case TableId::T6_timings: res = table6(scale, workers); break;
    }
    res.scale = (scale == StudyScale::Paper) ? "paper" : "desk";
    return res;
}

}  // namespace vinedist
