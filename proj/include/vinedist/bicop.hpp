#pragma once

#include <optional>
#include <string>

namespace vinedist {

enum class Family { Independence, Gaussian, StudentT, Clayton, Gumbel, Frank, Joe };

// Which conditional a h-function evaluates. All families implemented here are
// exchangeable (c(u,v) = c(v,u)), so both sides coincide numerically; the tag
// is kept for call-site clarity.
enum class Side { FirstGivenSecond, SecondGivenFirst };

// One bivariate building block: family, up to two parameters and an optional
// 180-degree (survival) rotation.
//
// Parameter ranges: Gaussian/StudentT p1 in (-1,1), Clayton p1 > 0,
// Gumbel p1 >= 1, Frank p1 != 0, Joe p1 > 1; StudentT additionally p2 > 2.
// The survival flag is only allowed for the asymmetric families Clayton,
// Gumbel and Joe.
struct PairCopula {
    Family family = Family::Independence;
    double p1 = 0.0;
    double p2 = 0.0;
    bool survival = false;
};

// Conditional-probability outputs are clamped to this interval so that the
// downstream quantile recursions stay finite.
inline constexpr double kProbClampLo = 1e-10;
inline constexpr double kProbClampHi = 1.0 - 1e-10;

// Throws a Domain error if the parameters violate the family's range.
void check_pair(const PairCopula& pc);

double pair_log_pdf(const PairCopula& pc, double u, double v);
double pair_pdf(const PairCopula& pc, double u, double v);

// Conditional distribution function of the conditioned coordinate at x given
// the other coordinate equals y. Output clamped to [1e-10, 1-1e-10].
double pair_hfun(const PairCopula& pc, double x, double y, Side side = Side::FirstGivenSecond);

// Inverse of pair_hfun in its first argument: returns x with
// pair_hfun(pc, x, y, side) = p. Closed form for Gaussian, StudentT, Clayton
// and Frank; monotone bisection for Gumbel and Joe.
double pair_hinv(const PairCopula& pc, double p, double y, Side side = Side::FirstGivenSecond);

// Kendall's tau. Closed forms where available, adaptive quadrature of the
// generator integral for Joe, Debye function for Frank.
double pair_tau(const PairCopula& pc);

// Builds a pair copula attaining the given Kendall's tau. StudentT requires
// nu; Clayton/Gumbel/Joe require tau > 0; Frank and Joe invert pair_tau by
// bisection.
PairCopula pair_from_tau(Family family, double tau, std::optional<double> nu = std::nullopt,
                         bool survival = false);

// Serialization codes: "I", "N", "t", "C", "G", "F", "J", survival prefixed
// with "s" (e.g. "sC").
std::string family_code(const PairCopula& pc);
PairCopula pair_from_code(const std::string& code, double p1, double p2);

// Fused evaluation of one pair-copula slot, sharing the marginal transforms
// between the density and the two conditionals. `need` is a bit mask:
// 1 = log_pdf, 2 = h_x (conditional CDF at x given y), 4 = h_y.
struct SlotValues {
    double log_pdf = 0.0;
    double h_x = 0.0;
    double h_y = 0.0;
};
SlotValues pair_slot(const PairCopula& pc, double x, double y, unsigned need);

// A pair copula with the conditioning argument bound. Precomputes the
// transforms of the bound side so that repeated evaluations along the free
// argument only pay for one marginal transform each.
class BoundSlot {
  public:
    BoundSlot(const PairCopula& pc, double a);

    // log c(b, a); when next != nullptr also stores h(b | a), clamped
    double log_pdf_step(double b, double* next) const;

  private:
    Family family_;
    bool survival_;
    double p1_ = 0.0, p2_ = 0.0;
    double c0_ = 0.0, c1_ = 0.0, c2_ = 0.0, c3_ = 0.0, c4_ = 0.0;  // family-specific caches
};

}  // namespace vinedist
