#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vinedist/distance.hpp"
#include "vinedist/vine.hpp"

namespace vinedist {

// Path-structured (D-vine) structure matrix: diagonal 1..d, first column
// (1, d, d-1, ..., 2).
StructureMatrix dvine_structure(int d);

// D-vine of Student t pairs with the dependence ladder tau * (1/2)^(d-i) per
// row i and degrees of freedom nu + d - i.
VineSpec t_vine(int d, double tau, double nu);

// D-vine built from a single family at the same Kendall's tau ladder.
VineSpec single_family_vine(int d, Family family, bool survival, double tau);

// D-vine of Gaussian pairs whose partial correlations are drawn from
// Beta(i/2, i/2) rescaled to (-1,1), row by row; uniform over the space of
// valid correlation matrices.
VineSpec random_gaussian_vine(int d, std::uint64_t seed);

// The fitted four-dimensional stock-index vine used as the running fixture:
// one Frank pair, five Student t pairs.
VineSpec euro_stoxx4();

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

enum class TableId { T1_akl, T2_dkl, T3_plausibility, T4_sdkl_plausibility, T5_rankcorr, T6_timings };
enum class StudyScale { Desk, Paper };

TableId table_from_string(const std::string& s);
std::string to_string(TableId id);

struct StudyCell {
    double value = std::numeric_limits<double>::quiet_NaN();
    double time_s = std::numeric_limits<double>::quiet_NaN();
    std::string note;  // e.g. "skipped: soft limit"
    bool present() const { return !std::isnan(value); }
};

struct StudyRow {
    std::string label;
    std::vector<StudyCell> cells;  // aligned with StudyResult::columns
};

struct StudyResult {
    std::string table;
    std::string title;
    std::string scale;
    std::vector<std::string> columns;
    std::vector<StudyRow> rows;
    // Spearman rank correlation of each method against the analytic KL,
    // filled by the rank-correlation study ("method@d=3" -> rho)
    std::vector<std::pair<std::string, double>> rank_correlations;
    std::vector<std::uint64_t> seeds;
};

// Runs one of the study scenarios. Desk scale caps grid sizes and skips the
// cells that are out of reach on a workstation; skipped cells carry a note
// instead of failing.
StudyResult reproduce_table(TableId id, StudyScale scale, int workers = 0);

// Rank-correlation study against the analytic Gaussian KL: one reference
// D-vine with tau ladder 0.5 per dimension, m random comparison vines, the
// requested methods ("akl", "dkl", "sdkl", "mckl"). Exposed separately so
// callers can run method subsets.
StudyResult rankcorr_study(const std::vector<int>& dims, int m,
                           const std::vector<std::string>& methods, int workers = 0);

// fixed seed constants so every study is reproducible bit for bit
inline constexpr std::uint64_t kStudySeedBase = 20240718;
inline constexpr std::uint64_t kMcklSeed = 8571;
std::uint64_t comparison_vine_seed(int d, int r);

}  // namespace vinedist
