#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "valdyn/resolution.hpp"

namespace valdyn {

enum class Where { Vertex, Edge, Ray };

/*
 * Quasimonomial valuation, located on the embedded dual graph.
 *
 *   Vertex : the weight r on E (s = 0); r = 1/b_E is the normalized nu_E;
 *   Edge   : monomial weights (r, s) at the point of edge handle `index`,
 *            r on edge.u and s on edge.v;
 *   Ray    : weights (r on the base prime, s on the curve) at the point
 *            where the ray's curve meets its base prime.
 *
 * Weights are homogeneous; normalization (nu(m) = r b_E + s b_F, the curve
 * of a ray contributing nothing) is explicit.  Constructors canonicalize
 * points with a vanishing weight to the corresponding vertex.
 */
struct QMValuation {
    Where where = Where::Vertex;
    int index = 0;
    Rat r = 1;
    Rat s = 0;

    friend bool operator==(const QMValuation&, const QMValuation&) = default;
};

QMValuation vertex_val(const DualGraph& g, int prime);
QMValuation vertex_val(const DualGraph& g, int prime, const Rat& scale);
QMValuation edge_val(const DualGraph& g, int edge, const Rat& r, const Rat& s);
QMValuation ray_val(const DualGraph& g, int ray, const Rat& r, const Rat& s);
// Normalized point of an edge (t in [0,1]) or of a ray (t in [0,inf)),
// in the monomial parameter t = s b_F (edges) and t = s / (r b_E) (rays);
// a normalized ray point has r = 1/b_E and s = t.
QMValuation edge_at(const DualGraph& g, int edge, const Rat& t);
QMValuation ray_at(const DualGraph& g, int ray, const Rat& t);

// `vertex:E1`, `edge:(E1,E2)#0 r=1/3 s=2/3`, `edge:(E1,E2) t=1/2`, `ray:y t=2`.
QMValuation parse_valuation(std::string_view literal, const DualGraph& g);
std::string to_literal(const QMValuation& v, const DualGraph& g);

Rat norm_value(const QMValuation& v, const DualGraph& g);  // v(m)
QMValuation normalize(const QMValuation& v, const DualGraph& g);
Rat monomial_parameter(const QMValuation& v, const DualGraph& g);  // t of the normalized point
bool same_point(const QMValuation& a, const QMValuation& b, const DualGraph& g);

std::vector<Rat> divisor_of(const QMValuation& v, const DualGraph& g);
Rat b_intersection(const QMValuation& a, const QMValuation& b, const DualGraph& g);
Rat skewness(const QMValuation& v, const DualGraph& g);
Rat rel_skewness(const QMValuation& v, const QMValuation& mu, const DualGraph& g);

struct AngularDistance {
    Rat exact_exp;     // beta(v|mu) * beta(mu|v)
    double log_value;  // rho itself, for display
};

AngularDistance angular_distance(const QMValuation& v, const QMValuation& mu, const DualGraph& g);
bool leq(const QMValuation& mu, const QMValuation& v, const DualGraph& g);
// Homogeneous of degree one in the weights: r A_div(E) + s A_div(F); a ray's
// curve has A_div = 1.
Rat log_discrepancy(const QMValuation& v, const DualGraph& g, const DiscrepancyTable& table);
Rat edge_metric(const QMValuation& v, const QMValuation& mu, const DualGraph& g);
Rat edge_length(const DualGraph& g, int edge);
bool monotone_edge_test(int edge, const DualGraph& g);

/*
 * Field-generic kernel of b_intersection.  `conv` maps the rational entries
 * of the dual basis into the scalar type (Rat, double, QuadElem ...).
 */
template <class T, class Conv>
T b_intersection_generic(const DualGraph& g, Where w1, int i1, const T& r1, const T& s1, Where w2, int i2,
                         const T& r2, const T& s2, Conv conv) {
    const Mat& inv = g.dual_basis();
    auto support = [&](Where w, int idx, const T& r, const T& s, int* p, T* c) -> int {
        if (w == Where::Vertex) {
            p[0] = idx;
            c[0] = r;
            return 1;
        }
        if (w == Where::Ray) {
            p[0] = g.ray(idx).base;
            c[0] = r;
            return 1;
        }
        p[0] = g.edge(idx).u;
        c[0] = r;
        p[1] = g.edge(idx).v;
        c[1] = s;
        return 2;
    };
    int p1[2], p2[2];
    T c1[2] = {r1, r1}, c2[2] = {r2, r2};
    int n1 = support(w1, i1, r1, s1, p1, c1), n2 = support(w2, i2, r2, s2, p2, c2);
    T total = conv(Rat(0));
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b) total = total + c1[a] * c2[b] * conv(inv(p1[a], p2[b]));
    if (w1 == w2 && i1 == i2 && w1 != Where::Vertex) {
        T x = r1 * s2, y = r2 * s1;
        total = total - (x < y ? x : y);
    }
    return total;
}

}  // namespace valdyn
