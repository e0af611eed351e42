#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "valdyn/dynamics.hpp"

namespace valdyn {

/*
 * A cusp given by the period k_0 ... k_{r-1} of its modified continued
 * fraction and the exponent s of the deck unit eps = eps_omega^s.  The
 * lattice N_omega = Z + Z omega carries the vertex sequence
 * e_0 = 1, e_1 = omega, e_{n+1} = k_n e_n - e_{n-1}.
 */
struct CuspData {
    std::vector<int> cycle;
    int s = 1;
    QuadElem omega{2, 0};
    QuadElem eps_omega{2, 1};
    QuadElem eps{2, 1};

    int r() const { return static_cast<int>(cycle.size()); }
    int k(long n) const;  // k_n with the index read mod r
    const Int& d() const { return omega.d(); }
};

QuadElem cf_to_quadratic(const std::vector<int>& cycle);
CuspData make_cusp(const std::vector<int>& cycle, int s = 1);
QuadElem vertex_sequence(const CuspData& c, long n);
QuadElem fundamental_unit(const CuspData& c);

// Coordinates (x, y) of v = x + y omega.
std::pair<Rat, Rat> lattice_coords(const QuadElem& v, const CuspData& c);
bool in_lattice(const QuadElem& v, const CuspData& c);

struct AlphaCheck {
    Int degree = 0;
    bool ok = false;
    std::string reason;
};

AlphaCheck validate_alpha(const QuadElem& alpha, const CuspData& c);

struct Rotation {
    double beta = 0;
    std::string beta_digits;  // 30 significant digits
    bool rational = false;
    Int p = 0, q = 1;  // beta = p/q when rational
};

Rotation rotation_number(const QuadElem& alpha, const CuspData& c);
QuadElem irrational_example(const CuspData& c, int search_bound = 10000);

DualGraph cusp_dual_graph(const CuspData& c);

// Coordinates (x, y) with v = x e_m + y e_{m+1}.
std::pair<Rat, Rat> face_coords(const QuadElem& v, const CuspData& c, long m);
// The face index m with v in the closed cone (e_m, e_{m+1}), preferring y > 0.
long locate_face(const QuadElem& v, const CuspData& c);

SkeletonMap induced_skeleton_map(const QuadElem& alpha, const CuspData& c);

}  // namespace valdyn
