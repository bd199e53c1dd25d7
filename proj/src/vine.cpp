#include "vinedist/vine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vinedist/errors.hpp"
#include "vinedist/rng.hpp"

namespace vinedist {

namespace {

using Mask = std::uint64_t;

Mask bit_of(int label) { return Mask{1} << (label - 1); }

// suffix[k][j] = set of entries m(k..d, j), as a bitmask
std::vector<std::vector<Mask>> suffix_masks(const StructureMatrix& m) {
    const int d = m.dim();
    std::vector<std::vector<Mask>> s(d + 2, std::vector<Mask>(d + 1, 0));
    for (int j = 1; j <= d; ++j)
        for (int k = d; k >= j; --k) s[k][j] = s[k + 1][j] | bit_of(m.at(k, j));
    return s;
}

void check_matrix_shape(const StructureMatrix& m) {
    const int d = m.dim();
    if (d < 1) throw_shape("structure matrix must have dimension >= 1");
    if (d > 64) throw_shape("structure matrices above dimension 64 are not supported");
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            if (m.at(i, j) != 0)
                throw_shape("structure matrix must be lower triangular (nonzero entry at (" +
                            std::to_string(i) + "," + std::to_string(j) + "))");
}

}  // namespace

std::string ValidationResult::describe() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (std::size_t t = 0; t < violations.size(); ++t) {
        if (t) os << "; ";
        os << violations[t].message;
    }
    return os.str();
}

ValidationResult validate_structure(const StructureMatrix& m) {
    check_matrix_shape(m);
    const int d = m.dim();
    ValidationResult res;
    auto add = [&res](int prop, int i, int j, int k, std::string msg) {
        res.violations.push_back({prop, i, j, k, std::move(msg)});
    };

    bool entries_ok = true;
    for (int j = 1; j <= d; ++j) {
        Mask seen = 0;
        for (int i = j; i <= d; ++i) {
            const int v = m.at(i, j);
            if (v < 1 || v > d) {
                add(0, i, j, 0, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") = " + std::to_string(v) + " outside 1.." +
                                    std::to_string(d));
                entries_ok = false;
                continue;
            }
            if (seen & bit_of(v)) {
                add(0, i, j, 0, "entry " + std::to_string(v) + " repeated in column " +
                                    std::to_string(j));
                entries_ok = false;
            }
            seen |= bit_of(v);
        }
    }
    if (!entries_ok) return res;  // property checks need well-formed entries

    const auto s = suffix_masks(m);

    // Property 1: column entry sets nest from right to left
    for (int i = 1; i < d; ++i)
        for (int j = i + 1; j <= d; ++j)
            if (s[j][j] & ~s[i][i])
                add(1, i, j, 0, "Property 1 violated: column " + std::to_string(j) +
                                    " is not contained in column " + std::to_string(i));

    // Property 2: a diagonal entry never reappears to the right
    for (int i = 1; i < d; ++i)
        if (bit_of(m.at(i, i)) & s[i + 1][i + 1])
            add(2, i, i + 1, 0, "Property 2 violated: diagonal entry " +
                                    std::to_string(m.at(i, i)) + " of column " +
                                    std::to_string(i) + " reappears in column " +
                                    std::to_string(i + 1));

    // Property 3: every (entry, conditioning set) pair matches a column to the
    // right, in one of the two admissible forms
    for (int i = 1; i <= d - 2; ++i) {
        for (int k = i + 1; k <= d; ++k) {
            const int x = m.at(k, i);
            const Mask cond = s[k + 1][i];
            bool found = false;
            for (int j = i + 1; j <= std::min(k, d) && !found; ++j) {
                if (m.at(j, j) == x && s[k + 1][j] == cond) found = true;
                if (!found && k < d && m.at(k + 1, j) == x &&
                    (bit_of(m.at(j, j)) | s[k + 2][j]) == cond)
                    found = true;
            }
            if (!found)
                add(3, i, 0, k, "Property 3 violated: entry (" + std::to_string(k) + "," +
                                    std::to_string(i) + ") has no matching column");
        }
    }
    return res;
}

VineSpec::VineSpec(StructureMatrix structure, TriMat<PairCopula> pairs)
    : structure_(std::move(structure)), pairs_(std::move(pairs)) {
    const int d = structure_.dim();
    if (pairs_.dim() != d) throw_shape("pair-copula matrix dimension mismatch");
    const ValidationResult val = validate_structure(structure_);
    if (!val.ok()) throw Error(ErrorKind::Validation, val.describe());
    for (int j = 1; j < d; ++j) {
        for (int i = j + 1; i <= d; ++i) {
            try {
                check_pair(pairs_.at(i, j));
            } catch (const Error& e) {
                throw_domain("slot (" + std::to_string(i) + "," + std::to_string(j) +
                             "): " + e.what());
            }
        }
    }
    canonical_ = true;
    for (int i = 1; i <= d; ++i)
        if (structure_.at(i, i) != i) canonical_ = false;

    // Wire up where each slot's first conditional argument comes from. The
    // value C_{x|S} needed at slot (k, j) is produced by a column to the
    // right: either as the b-stack value of the column whose diagonal is x,
    // or as the h output of the slot right below the same row level.
    plan_ = TriMat<ASource>(d, ASource{ASource::Kind::UStart, 0});
    const auto s = suffix_masks(structure_);
    for (int j = 1; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            const int x = structure_.at(k, j);
            const Mask cond = s[k + 1][j];
            bool wired = false;
            for (int j2 = j + 1; j2 <= std::min(k, d) && !wired; ++j2) {
                if (structure_.at(j2, j2) == x && s[k + 1][j2] == cond) {
                    plan_.at(k, j) = {ASource::Kind::BStack, j2};
                    wired = true;
                } else if (k < d && structure_.at(k + 1, j2) == x &&
                           (bit_of(structure_.at(j2, j2)) | s[k + 2][j2]) == cond) {
                    plan_.at(k, j) = {ASource::Kind::HFunc, j2};
                    wired = true;
                }
            }
            if (!wired)
                throw Error(ErrorKind::Structural,
                            "no source column for the conditional at slot (" +
                                std::to_string(k) + "," + std::to_string(j) + ")");
        }
    }

    // mark the h outputs some later column actually fetches
    hf_needed_ = TriMat<unsigned char>(d, 0);
    for (int j = 1; j < d; ++j)
        for (int k = j + 1; k < d; ++k)
            if (plan_.at(k, j).kind == ASource::Kind::HFunc)
                hf_needed_.at(k + 1, plan_.at(k, j).col) = 1;
}

namespace {

void require_canonical(const VineSpec& r, const char* who) {
    if (!r.canonical())
        throw_contract(std::string(who) +
                       ": requires a canonical spec (structure diagonal 1..d)");
}

void check_point_interior(std::span<const double> u, const char* who) {
    for (double x : u)
        if (!(x > 0.0 && x < 1.0))
            throw_domain(std::string(who) + ": point must lie strictly inside (0,1)^d");
}

}  // namespace

// ---- evaluator -----------------------------------------------------------

VineEvaluator::VineEvaluator(const VineSpec& r)
    : r_(&r),
      d_(r.dim()),
      b_(static_cast<std::size_t>(d_ + 1) * (d_ + 1)),
      hf_(static_cast<std::size_t>(d_ + 1) * (d_ + 1)) {}

double VineEvaluator::fetch_a(int k, int j, std::span<const double> u) const {
    const auto& src = r_->a_source(k, j);
    switch (src.kind) {
        case VineSpec::ASource::Kind::UStart: return u[r_->structure().at(k, j) - 1];
        case VineSpec::ASource::Kind::BStack:
            return b_[static_cast<std::size_t>(k) * (d_ + 1) + src.col];
        case VineSpec::ASource::Kind::HFunc:
            return hf_[static_cast<std::size_t>(k + 1) * (d_ + 1) + src.col];
    }
    throw Error(ErrorKind::Structural, "invalid evaluation plan entry");
}

void VineEvaluator::run_one_column(std::span<const double> u, int j, double* log_acc) {
    const auto& M = r_->structure();
    double bcur = u[M.at(j, j) - 1];
    bval(d_, j) = bcur;
    for (int k = d_; k > j; --k) {
        const double a = fetch_a(k, j, u);
        const PairCopula& pc = r_->pair(k, j);
        const bool want_hf = r_->hfun_needed(k, j);
        const unsigned need = (log_acc ? 1u : 0u) | (want_hf ? 2u : 0u) | 4u;
        const SlotValues v = pair_slot(pc, a, bcur, need);
        if (log_acc) *log_acc += v.log_pdf;
        if (want_hf) hfval(k, j) = v.h_x;  // C of the column entry given diagonal + below
        bcur = v.h_y;                      // C of the diagonal variable given entry + below
        bval(k - 1, j) = bcur;
    }
}

double VineEvaluator::run_columns(std::span<const double> u, int jmin, bool accumulate) {
    double acc = 0.0;
    for (int j = d_ - 1; j >= jmin; --j) run_one_column(u, j, accumulate ? &acc : nullptr);
    return acc;
}

double VineEvaluator::log_density(std::span<const double> u) {
    if (static_cast<int>(u.size()) != d_) throw_shape("point dimension mismatch");
    check_point_interior(u, "vine_log_density");
    if (d_ == 1) return 0.0;
    return run_columns(u, 1, true);
}

void VineEvaluator::forward(std::span<const double> u, std::span<double> w_out) {
    require_canonical(*r_, "rosenblatt_forward");
    if (static_cast<int>(u.size()) != d_ || static_cast<int>(w_out.size()) != d_)
        throw_shape("point dimension mismatch");
    check_point_interior(u, "rosenblatt_forward");
    run_columns(u, 1, false);
    w_out[d_ - 1] = u[d_ - 1];
    for (int j = 1; j < d_; ++j) w_out[j - 1] = bval(j, j);
}

void VineEvaluator::inverse(std::span<const double> w, std::span<double> u_out) {
    require_canonical(*r_, "rosenblatt_inverse");
    if (static_cast<int>(w.size()) != d_ || static_cast<int>(u_out.size()) != d_)
        throw_shape("point dimension mismatch");
    check_point_interior(w, "rosenblatt_inverse");
    u_out[d_ - 1] = w[d_ - 1];
    for (int j = d_ - 1; j >= 1; --j) {
        // invert the h chain of column j from the top, then refresh its stack
        double bcur = w[j - 1];
        bval(j, j) = bcur;
        for (int k = j + 1; k <= d_; ++k) {
            const double a = fetch_a(k, j, std::span<const double>(u_out));
            bcur = pair_hinv(r_->pair(k, j), bcur, a, Side::SecondGivenFirst);
            bval(k, j) = bcur;
        }
        u_out[j - 1] = bcur;
        for (int k = d_; k > j; --k) {
            if (!r_->hfun_needed(k, j)) continue;
            const double a = fetch_a(k, j, std::span<const double>(u_out));
            const SlotValues v = pair_slot(r_->pair(k, j), a, bval(k, j), 2u);
            hfval(k, j) = v.h_x;
        }
    }
}

double VineEvaluator::cond_log_density(int j, double u_j, std::span<const double> u_rest) {
    ConditionalDensity cd = bind(j, u_rest);
    return cd.log_density(u_j);
}

ConditionalDensity VineEvaluator::bind(int j, std::span<const double> u_rest) {
    require_canonical(*r_, "cond_density");
    if (j < 1 || j >= d_) throw_domain("cond_density: j must lie in 1..d-1");
    if (static_cast<int>(u_rest.size()) != d_ - j)
        throw_shape("cond_density: conditioning vector must have length d-j");
    check_point_interior(u_rest, "cond_density");

    // assemble the full point; position j-1 is never read by columns > j
    std::vector<double> u(static_cast<std::size_t>(d_), 0.5);
    for (int p = 0; p < d_ - j; ++p) u[j + p] = u_rest[p];
    for (int col = d_ - 1; col > j; --col) run_one_column(u, col, nullptr);

    ConditionalDensity cd;
    cd.slots_.reserve(d_ - j);
    for (int k = d_; k > j; --k) cd.slots_.emplace_back(r_->pair(k, j), fetch_a(k, j, u));
    return cd;
}

double ConditionalDensity::log_density(double u_j) const {
    if (!(u_j > 0.0 && u_j < 1.0))
        throw_domain("cond_density: argument must lie strictly inside (0,1)");
    double acc = 0.0;
    double b = u_j;
    const std::size_t m = slots_.size();
    for (std::size_t t = 0; t < m; ++t) {
        double next = 0.0;
        acc += slots_[t].log_pdf_step(b, (t + 1 < m) ? &next : nullptr);
        if (t + 1 < m) b = next;
    }
    return acc;
}

double ConditionalDensity::density(double u_j) const { return std::exp(log_density(u_j)); }

// ---- free functions ------------------------------------------------------

double vine_log_density(const VineSpec& r, std::span<const double> u) {
    VineEvaluator ev(r);
    return ev.log_density(u);
}

double cond_density(const VineSpec& r, int j, double u_j, std::span<const double> u_rest) {
    VineEvaluator ev(r);
    return std::exp(ev.cond_log_density(j, u_j, u_rest));
}

ConditionalDensity bind_conditional(const VineSpec& r, int j, std::span<const double> u_rest) {
    VineEvaluator ev(r);
    return ev.bind(j, u_rest);
}

std::vector<double> rosenblatt_forward(const VineSpec& r, std::span<const double> u) {
    VineEvaluator ev(r);
    std::vector<double> w(u.size());
    ev.forward(u, w);
    return w;
}

std::vector<double> rosenblatt_inverse(const VineSpec& r, std::span<const double> w) {
    VineEvaluator ev(r);
    std::vector<double> u(w.size());
    ev.inverse(w, u);
    return u;
}

std::vector<double> sample_vine(const VineSpec& r, std::size_t n, std::uint64_t seed) {
    require_canonical(r, "sample_vine");
    if (n < 1) throw_domain("sample_vine: n must be >= 1");
    const int d = r.dim();
    std::vector<double> out(n * static_cast<std::size_t>(d));
    VineEvaluator ev(r);
    std::vector<double> w(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        const CounterRng rng(seed, i);
        for (int j = 0; j < d; ++j) w[j] = rng.uniform(j);
        ev.inverse(w, std::span<double>(out).subspan(i * d, d));
    }
    return out;
}

VineSpec nearest_gaussian(const VineSpec& r) {
    const int d = r.dim();
    TriMat<PairCopula> pairs(d);
    for (int j = 1; j < d; ++j) {
        for (int i = j + 1; i <= d; ++i) {
            const double tau = pair_tau(r.pair(i, j));
            PairCopula pc;
            pc.family = Family::Gaussian;
            pc.p1 = std::sin(3.14159265358979323846 * 0.5 * tau);
            pairs.at(i, j) = pc;
        }
    }
    return VineSpec(r.structure(), std::move(pairs));
}

TriMat<double> kendall_matrix(const VineSpec& r) {
    const int d = r.dim();
    TriMat<double> k(d, 0.0);
    for (int j = 1; j < d; ++j)
        for (int i = j + 1; i <= d; ++i) k.at(i, j) = pair_tau(r.pair(i, j));
    return k;
}

std::pair<VineSpec, std::vector<int>> relabel_canonical(const VineSpec& r) {
    const int d = r.dim();
    std::vector<int> new_label_of(static_cast<std::size_t>(d));
    for (int i = 1; i <= d; ++i) new_label_of[r.structure().at(i, i) - 1] = i;
    return {apply_permutation(r, new_label_of), new_label_of};
}

VineSpec apply_permutation(const VineSpec& r, const std::vector<int>& new_label_of) {
    const int d = r.dim();
    if (static_cast<int>(new_label_of.size()) != d)
        throw_shape("apply_permutation: permutation length mismatch");
    std::vector<bool> hit(static_cast<std::size_t>(d), false);
    for (int v : new_label_of) {
        if (v < 1 || v > d || hit[v - 1]) throw_domain("apply_permutation: not a permutation");
        hit[v - 1] = true;
    }
    StructureMatrix m(d, 0);
    for (int j = 1; j <= d; ++j)
        for (int i = j; i <= d; ++i) m.at(i, j) = new_label_of[r.structure().at(i, j) - 1];
    return VineSpec(std::move(m), r.pairs());
}

VineSpec trim_structure(const VineSpec& r, int k) {
    require_canonical(r, "trim_structure");
    const int d = r.dim();
    if (k < 1 || k > d - 1) throw_domain("trim_structure: k must lie in 1..d-1");
    const int nd = d - k;
    StructureMatrix m(nd, 0);
    TriMat<PairCopula> pairs(nd);
    for (int j = 1; j <= nd; ++j) {
        for (int i = j; i <= nd; ++i) {
            m.at(i, j) = r.structure().at(i + k, j + k) - k;
            if (i > j) pairs.at(i, j) = r.pair(i + k, j + k);
        }
    }
    return VineSpec(std::move(m), std::move(pairs));
}

std::uint64_t count_same_diagonal(int d) {
    if (d < 3) throw_domain("count_same_diagonal: d must be >= 3");
    const std::uint64_t e =
        static_cast<std::uint64_t>(d - 2) * (d - 3) / 2 + static_cast<std::uint64_t>(d - 2);
    if (e >= 64)
        throw_domain("count_same_diagonal: count exceeds 64-bit range at d = " +
                     std::to_string(d) + "; use count_same_diagonal_str");
    return std::uint64_t{1} << e;
}

std::string count_same_diagonal_str(int d) {
    if (d < 3) throw_domain("count_same_diagonal: d must be >= 3");
    const std::uint64_t e =
        static_cast<std::uint64_t>(d - 2) * (d - 3) / 2 + static_cast<std::uint64_t>(d - 2);
    // decimal digits of 2^e by repeated doubling
    std::vector<int> digits{1};
    for (std::uint64_t t = 0; t < e; ++t) {
        int carry = 0;
        for (auto& dg : digits) {
            const int v = dg * 2 + carry;
            dg = v % 10;
            carry = v / 10;
        }
        if (carry) digits.push_back(carry);
    }
    std::string s;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) s += static_cast<char>('0' + *it);
    return s;
}

}  // namespace vinedist
