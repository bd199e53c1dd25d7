#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vinedist/bicop.hpp"

namespace vinedist {

// Dense square matrix with 1-based accessors so the code reads like the
// usual lower-triangular matrix notation m_{i,j}.
template <class T>
class TriMat {
  public:
    TriMat() = default;
    explicit TriMat(int d, T fill = T{}) : d_(d), data_(static_cast<std::size_t>(d) * d, fill) {}

    int dim() const { return d_; }
    T& at(int i, int j) { return data_[static_cast<std::size_t>(i - 1) * d_ + (j - 1)]; }
    const T& at(int i, int j) const {
        return data_[static_cast<std::size_t>(i - 1) * d_ + (j - 1)];
    }
    bool operator==(const TriMat&) const = default;

  private:
    int d_ = 0;
    std::vector<T> data_;
};

using StructureMatrix = TriMat<int>;

struct StructureViolation {
    int property;  // 0 = well-formedness, 1..3 = matrix property
    int i, j, k;   // 1-based coordinates, 0 where not applicable
    std::string message;
};

struct ValidationResult {
    std::vector<StructureViolation> violations;
    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

// Checks the three structure-matrix properties and reports every violation.
// Throws a Shape error for non-square / non-lower-triangular input.
ValidationResult validate_structure(const StructureMatrix& m);

// A vine copula: structure matrix plus one pair copula per strictly
// lower-triangular slot. Construction validates the structure and all pair
// parameters and precomputes the recursion wiring used by the evaluators.
class VineSpec {
  public:
    VineSpec(StructureMatrix structure, TriMat<PairCopula> pairs);

    int dim() const { return structure_.dim(); }
    const StructureMatrix& structure() const { return structure_; }
    const PairCopula& pair(int i, int j) const { return pairs_.at(i, j); }
    const TriMat<PairCopula>& pairs() const { return pairs_; }
    bool canonical() const { return canonical_; }

    // where the conditional value feeding slot (k, j) comes from
    struct ASource {
        enum class Kind : std::uint8_t { UStart, BStack, HFunc } kind;
        int col;
    };
    const ASource& a_source(int k, int j) const { return plan_.at(k, j); }
    bool hfun_needed(int k, int j) const { return hf_needed_.at(k, j) != 0; }

  private:
    StructureMatrix structure_;
    TriMat<PairCopula> pairs_;
    TriMat<ASource> plan_;
    TriMat<unsigned char> hf_needed_;
    bool canonical_ = false;
};

// Equivalent spec with structure diagonal (1, ..., d) plus the applied
// relabeling: perm[old_label - 1] = new_label.
std::pair<VineSpec, std::vector<int>> relabel_canonical(const VineSpec& r);

// Relabels every structure entry v -> new_label_of[v - 1]; pair slots and
// parameters stay in place.
VineSpec apply_permutation(const VineSpec& r, const std::vector<int>& new_label_of);

// Marginal vine of the variables (k+1, ..., d) of a canonical spec, with
// labels shifted down to 1..d-k.
VineSpec trim_structure(const VineSpec& r, int k);

// log of the vine copula density at an interior point. u is indexed by
// variable label (u[v-1] belongs to variable v).
double vine_log_density(const VineSpec& r, std::span<const double> u);

// Conditional density of variable j given u_{j+1}, ..., u_d (canonical spec).
double cond_density(const VineSpec& r, int j, double u_j, std::span<const double> u_rest);

// Conditional density of variable j with the conditioning vector bound once;
// evaluating at many u_j values then costs one column walk each. Owns its
// bound slots, so it stays valid after the spec or evaluator is gone.
class ConditionalDensity {
  public:
    double log_density(double u_j) const;
    double density(double u_j) const;

  private:
    friend class VineEvaluator;
    std::vector<BoundSlot> slots_;  // column slots, bottom row first
};

ConditionalDensity bind_conditional(const VineSpec& r, int j, std::span<const double> u_rest);

// Rosenblatt transform of the vine and its inverse (canonical spec).
// forward: w_j = C_{j|(j+1):d}(u_j | ...); inverse maps iid uniforms to the
// copula's law via successive conditional quantiles.
std::vector<double> rosenblatt_forward(const VineSpec& r, std::span<const double> u);
std::vector<double> rosenblatt_inverse(const VineSpec& r, std::span<const double> w);

// n independent draws (row-major n x d). Each sample row consumes its own
// counter-RNG substream, so output is identical for any worker count.
std::vector<double> sample_vine(const VineSpec& r, std::size_t n, std::uint64_t seed);

// Same structure, every pair Gaussian with parameter sin(pi/2 * tau).
VineSpec nearest_gaussian(const VineSpec& r);

// Kendall's tau of every pair slot.
TriMat<double> kendall_matrix(const VineSpec& r);

// Number of vine decompositions sharing a fixed structure-matrix diagonal:
// 2^(binom(d-2,2) + d - 2). The plain version throws a Domain error once the
// count exceeds the 64-bit range; the _str version is exact for any d.
std::uint64_t count_same_diagonal(int d);
std::string count_same_diagonal_str(int d);

// Reusable evaluator holding scratch space; the free functions above wrap it.
// One instance per thread; not safe for concurrent use.
class VineEvaluator {
  public:
    explicit VineEvaluator(const VineSpec& r);

    double log_density(std::span<const double> u);
    void forward(std::span<const double> u, std::span<double> w_out);
    void inverse(std::span<const double> w, std::span<double> u_out);
    double cond_log_density(int j, double u_j, std::span<const double> u_rest);
    ConditionalDensity bind(int j, std::span<const double> u_rest);

  private:
    // evaluates stacks for columns jmin..d-1 on a point indexed by label;
    // returns the accumulated log density over the visited slots when asked
    double run_columns(std::span<const double> u, int jmin, bool accumulate);
    void run_one_column(std::span<const double> u, int j, double* log_acc);
    double fetch_a(int k, int j, std::span<const double> u) const;

    const VineSpec* r_;
    int d_;
    std::vector<double> b_, hf_;  // (d+1)^2 scratch, 1-based (k, j)
    friend ConditionalDensity;

    double& bval(int k, int j) { return b_[static_cast<std::size_t>(k) * (d_ + 1) + j]; }
    double& hfval(int k, int j) { return hf_[static_cast<std::size_t>(k) * (d_ + 1) + j]; }
};

}  // namespace vinedist
