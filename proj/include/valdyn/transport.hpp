#pragma once

#include <optional>
#include <string>
#include <vector>

#include "valdyn/dynamics.hpp"

namespace valdyn {

// E -> E' with ramification k along E and coefficient e of E in f^*E'.
struct PrimeMap {
    int src = 0;
    int dst = 0;
    int k = 1;
    int e = 1;
};

// A non-exceptional curve of the source contracted by f onto the target prime.
struct ContractedCurve {
    std::string label;
    std::vector<int> attach;  // C_pi . E_i for every source prime
    int m = 1;
    int dst = 0;
    int k = 1;
};

// One term coeff * C of the ramification divisor R_f.  `attach` gives the
// intersection numbers of the curve with the source primes.
struct RfTerm {
    std::string curve;
    Rat coeff;
    std::vector<int> attach;
};

struct GermResolutionTable {
    DualGraph source;
    DualGraph target;
    std::vector<PrimeMap> maps;  // one per source prime, indexed by src
    std::vector<ContractedCurve> contracted;
    std::optional<std::vector<RfTerm>> r_f;

    GermResolutionTable() = default;
    GermResolutionTable(DualGraph src, DualGraph dst, std::vector<PrimeMap> prime_maps,
                        std::vector<ContractedCurve> curves = {}, std::optional<std::vector<RfTerm>> rf = std::nullopt);

    const PrimeMap& map_of(int src_prime) const { return maps.at(src_prime); }
};

// A divisor on the source with exceptional part plus multiples of the
// orthogonal curve classes C-hat.
struct CurveDivisor {
    std::vector<Rat> exceptional;
    std::vector<Rat> curves;  // coefficient of C-hat, in table order
};

// -C_pi . E-check, the positive correction coefficient for curve c at prime e.
Rat curve_dual_coefficient(const GermResolutionTable& tbl, int curve, int prime);

std::vector<Rat> pushforward_dual(int prime, const GermResolutionTable& tbl);
CurveDivisor pullback_dual(int target_prime, const GermResolutionTable& tbl);
// Exceptional part of C-hat (the curve itself enters with coefficient -1).
std::vector<Rat> curve_hat_divisor(int curve, const GermResolutionTable& tbl);
Rat attraction_rate_from_table(int prime, const GermResolutionTable& tbl);

// Intersection of two exceptional divisors on a graph.
Rat intersect(const std::vector<Rat>& d1, const std::vector<Rat>& d2, const DualGraph& g);
// C-hat is orthogonal to every exceptional prime, so only the exceptional
// part contributes against an exceptional divisor.
Rat intersect(const CurveDivisor& d1, const std::vector<Rat>& d2, const DualGraph& g);

// Pull-back coefficients c = -M^{-1} attach of a curve onto the primes.
std::vector<Rat> curve_pullback_coeffs(const std::vector<int>& attach, const DualGraph& g);
// nu(R_f) for a valuation of the source graph.  Throws missing_data without R_f.
Rat ramification_value(const QMValuation& v, const GermResolutionTable& tbl);
Rat ramification_value(const QMValuation& v, const DualGraph& g, const std::vector<RfTerm>& r_f);

struct JacobianResult {
    bool holds = false;
    Rat lhs;  // c(f,nu) A(f.nu)
    Rat rhs;  // A(nu) + nu(R_f)
};

// Checks c(f,nu) A(f.nu) = A(nu) + nu(R_f); `v` and `image` are normalized
// internally and `rate` refers to the normalized nu.
JacobianResult jacobian_check(const QMValuation& v, const GermResolutionTable& tbl, const QMValuation& image,
                              const Rat& rate);
JacobianResult jacobian_check(const QMValuation& v, const DualGraph& source, const DualGraph& target,
                              const std::vector<RfTerm>& r_f, const QMValuation& image, const Rat& rate);
// Self-map form: the image and the rate come from applying the skeleton map.
JacobianResult jacobian_check(const QMValuation& v, const SkeletonMap& f, const std::vector<RfTerm>& r_f);

}  // namespace valdyn
