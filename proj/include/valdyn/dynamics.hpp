#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "valdyn/valuation.hpp"

namespace valdyn {

// A one-dimensional cell of the skeleton: an edge (t in [0,1]) or a ray
// (t in [0,inf)).
struct Cell {
    Where kind = Where::Edge;
    int index = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellRef {
    Cell cell;
    bool flipped = false;  // literal lists the edge ends in reverse order
};

// `edge:(E1,E2)#0` or `ray:y`.
CellRef parse_cell(std::string_view literal, const DualGraph& g);
std::string cell_literal(const Cell& c, const DualGraph& g);

// 2x2 integer matrix [[a,b],[c,d]] acting on column vectors (r,s).
struct IntMat2 {
    Int a, b, c, d;

    Int det() const { return a * d - b * c; }
    Int trace() const { return a + d; }
    friend bool operator==(const IntMat2&, const IntMat2&) = default;
};

IntMat2 operator*(const IntMat2& x, const IntMat2& y);

/*
 * One piece of the germ action: points of `src` with parameter t in
 * [lo, hi] (hi empty = infinity on a ray) have homogeneous weights mapped by
 * (r', s') = M (r, s), read in the orientation of `dst`.
 */
struct Sector {
    Cell src;
    Rat lo = 0;
    std::optional<Rat> hi = Rat(1);
    IntMat2 m;
    Cell dst;
};

// Tail behaviour t -> lambda t + mu of the action far out on a ray.
struct RayTail {
    int ray = 0;
    Rat lambda = 1;
    Rat mu = 0;
};

// Rotation data known from the arithmetic of a cusp germ.
struct RotationInfo {
    bool rational = false;
    Int p = 0, q = 1;
    double beta = 0;
};

class SkeletonMap {
public:
    SkeletonMap() = default;
    // Validates determinants, cone images, coverage and continuity.
    SkeletonMap(DualGraph g, std::vector<Sector> sectors, bool finite, std::vector<RayTail> tails = {},
                std::optional<RotationInfo> rotation = std::nullopt);

    const DualGraph& graph() const { return graph_; }
    const std::vector<Sector>& sectors() const { return sectors_; }
    const std::vector<RayTail>& tails() const { return tails_; }
    bool finite() const { return finite_; }
    const std::optional<RotationInfo>& rotation() const { return rotation_; }
    std::vector<Cell> domain() const;

private:
    DualGraph graph_;
    std::vector<Sector> sectors_;
    std::vector<RayTail> tails_;
    bool finite_ = true;
    std::optional<RotationInfo> rotation_;
};

// Homogeneous weights of the normalized point with parameter t of a cell.
std::array<Rat, 2> cell_point(const Cell& c, const Rat& t, const DualGraph& g);
// Primitive integer generators of a sector's cone (hi = inf gives (0,1)).
std::array<std::array<Int, 2>, 2> sector_generators(const Sector& s, const DualGraph& g);
// The sector matrix written on the cone's primitive generators: columns are
// M g_lo and M g_hi in the target cell's weights.
IntMat2 sector_generator_matrix(const Sector& s, const DualGraph& g);

struct Step {
    QMValuation image;  // normalized
    Rat rate;
    int sector = -1;
};

Step apply(const QMValuation& v, const SkeletonMap& f);

struct OrbitPoint {
    QMValuation point;
    Rat rate;  // c(f^k, nu)
};

// The first n points nu, f.nu, ..., with cumulative attraction rates.
std::vector<OrbitPoint> orbit(const QMValuation& v, const SkeletonMap& f, int n);

struct Recursion {
    int m = 0;
    Int a, b;
    int n0 = 0;
};

// Smallest m, then smallest N0, with c_{n+2m} = a c_{n+m} + b c_n for all n >= N0.
std::optional<Recursion> detect_recursion(const std::vector<Rat>& seq, int m_max = 6, int n_max = 8);

// Root >= 1 of a monic integer polynomial of degree one or two.
struct QuadraticInteger {
    std::vector<Int> minpoly;  // leading coefficient first
    double approx = 0;
};

std::string to_string(const QuadraticInteger& q);

enum class FixedKind { DivisorialPoint, IrrationalPoint, End, Segment, CircleRotation };
std::string to_string(FixedKind k);

struct FixedSet {
    FixedKind kind = FixedKind::DivisorialPoint;
    std::optional<QMValuation> point;  // divisorial point
    // Irrational point: cell, parameter t, slope s/r, and the fixed sector.
    Cell cell;
    std::optional<QuadElem> t;
    std::optional<QuadElem> slope;
    std::vector<Int> slope_minpoly;
    std::vector<Int> skewness_minpoly;
    int sector = -1;
    int ray = -1;  // end attractor
    std::optional<QMValuation> segment_lo, segment_hi;
    // Circle rotation.
    std::optional<bool> rational;
    Int p = 0, q = 0;
    std::optional<double> beta;
    std::vector<std::string> diagnostics;
};

FixedSet find_fixed_set(const SkeletonMap& f, int budget = 256);
QuadraticInteger dynamical_degree(const SkeletonMap& f, const FixedSet& fixed);
QuadraticInteger dynamical_degree(const SkeletonMap& f);

struct NonexpansionSample {
    QMValuation v, mu;
    Rat before, after;  // exp(rho)
    bool ok = false;
    bool strict = false;
};

struct NonexpansionReport {
    std::vector<NonexpansionSample> samples;
    bool all_ok = true;
    bool all_strict = true;
    bool all_equal = true;
    bool strictness_required = false;
};

NonexpansionReport check_nonexpansion(const SkeletonMap& f,
                                      const std::vector<std::pair<QMValuation, QMValuation>>& pairs);

// Uniformly drawn rational points of the map's domain.
QMValuation random_point(const SkeletonMap& f, std::mt19937_64& rng);

struct StabilityReport {
    std::string verdict;
    std::string instruction;
    std::vector<QMValuation> endpoints;  // realize these divisorial points
    int blowups = 0;
    bool cyclic_quotient = false;
    std::optional<QMValuation> witness;
};

StabilityReport stability_report(const SkeletonMap& f, const FixedSet& fixed);

}  // namespace valdyn
