#include "doctest.h"

#include "support.hpp"

using namespace valdyn;
using testing::error_kind;
using testing::fixture;

namespace {

struct Cusp3 {
    DualGraph g = load_graph(fixture("cusp3.toml"));
    QMValuation e1 = vertex_val(g, 0), e2 = vertex_val(g, 1), e3 = vertex_val(g, 2);
    int h12 = g.edge_handle(0, 1);
};

}  // namespace

TEST_CASE("literals round-trip") {
    Cusp3 c;
    QMValuation v = parse_valuation("edge:(E1,E2)#0 r=1/3 s=2/3", c.g);
    CHECK(v.where == Where::Edge);
    CHECK(v.r == Rat(1, 3));
    CHECK(v.s == Rat(2, 3));
    CHECK(parse_valuation(to_literal(v, c.g), c.g) == v);

    // the reversed orientation swaps the weights
    QMValuation w = parse_valuation("edge:(E2,E1) r=2/3 s=1/3", c.g);
    CHECK(w == v);
    CHECK(parse_valuation("edge:(E1,E2) t=2/3", c.g) == v);

    // vanishing weight canonicalizes to the vertex
    CHECK(parse_valuation("edge:(E1,E2) r=1 s=0", c.g) == c.e1);

    CHECK(error_kind([&] { return parse_valuation("vertex:E9", c.g); }) == "unknown_prime");
    CHECK(error_kind([&] { return parse_valuation("edge:(E1,E2) r=0 s=0", c.g); }) == "invalid_valuation");
    CHECK(error_kind([&] { return parse_valuation("somewhere", c.g); }) == "parse_error");
}

TEST_CASE("dual divisors") {
    Cusp3 c;
    CHECK(divisor_of(c.e1, c.g) == std::vector<Rat>{Rat(-5, 3), Rat(-4, 3), -1});
    QMValuation mid = edge_val(c.g, c.h12, Rat(1, 2), Rat(1, 2));
    CHECK(divisor_of(mid, c.g) == std::vector<Rat>{Rat(-3, 2), Rat(-3, 2), -1});

    DualGraph smooth({{"E", 0, -1, 1}}, {});
    CHECK(divisor_of(vertex_val(smooth, 0), smooth) == std::vector<Rat>{-1});
}

TEST_CASE("intersections and skewness") {
    Cusp3 c;
    CHECK(b_intersection(c.e3, c.e3, c.g) == -1);
    CHECK(b_intersection(c.e1, c.e3, c.g) == -1);
    QMValuation mid = edge_val(c.g, c.h12, Rat(1, 2), Rat(1, 2));
    std::vector<Rat> z = divisor_of(mid, c.g);
    Rat plain = bilinear(z, intersection_matrix(c.g), z);
    CHECK(b_intersection(mid, mid, c.g) == plain - Rat(1, 4));

    CHECK(skewness(c.e3, c.g) == 1);
    CHECK(skewness(mid, c.g) == Rat(7, 4));
    DualGraph smooth({{"E", 0, -1, 1}}, {});
    CHECK(skewness(vertex_val(smooth, 0), smooth) == 1);

    // the midpoint is ord_G / 2 for the satellite prime G of b_G = 2
    testing::Refinement r = testing::start_refinement(c.g, c.h12);
    int gi = testing::refine_to(r, 1, 1);
    testing::RatMatrix inv = testing::gauss_inverse(r.matrix);
    CHECK(-inv[gi][gi] / 4 == Rat(7, 4));
}

TEST_CASE("relative skewness, angular distance and order") {
    Cusp3 c;
    CHECK(rel_skewness(c.e1, c.e1, c.g) == 1);
    CHECK(rel_skewness(c.e3, c.e1, c.g) == 1);
    CHECK(rel_skewness(c.e1, c.e3, c.g) == Rat(5, 3));
    AngularDistance d = angular_distance(c.e1, c.e3, c.g);
    CHECK(d.exact_exp == Rat(5, 3));
    CHECK(d.log_value == doctest::Approx(std::log(5.0 / 3.0)));
    CHECK(angular_distance(c.e3, c.e1, c.g).exact_exp == d.exact_exp);
    CHECK(angular_distance(c.e2, c.e2, c.g).exact_exp == 1);

    CHECK(leq(c.e3, c.e1, c.g));
    CHECK_FALSE(leq(c.e1, c.e2, c.g));
    CHECK_FALSE(leq(c.e2, c.e1, c.g));
    CHECK(leq(c.e2, c.e2, c.g));
}

TEST_CASE("log discrepancy") {
    Cusp3 c;
    DiscrepancyTable t = canonical_coeffs(c.g);
    CHECK(log_discrepancy(edge_at(c.g, c.h12, Rat(2, 7)), c.g, t) == 0);

    DualGraph ell = load_graph(fixture("elliptic2.toml"));
    DiscrepancyTable te = canonical_coeffs(ell);
    CHECK(log_discrepancy(vertex_val(ell, 0), ell, te) == 0);
    CHECK(log_discrepancy(vertex_val(ell, 1), ell, te) == Rat(1, 2));
    CHECK(log_discrepancy(vertex_val(ell, 1), ell, te) == te.a_norm[1]);
}

TEST_CASE("edge metric") {
    Cusp3 c;
    CHECK(edge_metric(c.e1, c.e2, c.g) == 1);
    CHECK(edge_metric(edge_at(c.g, c.h12, Rat(1, 4)), c.e2, c.g) == Rat(3, 4));
    // going around: E1 -> E3 -> E2 is 2, the direct edge is 1
    QMValuation p = edge_at(c.g, c.g.edge_handle(0, 2), Rat(1, 2));
    QMValuation q = edge_at(c.g, c.g.edge_handle(1, 2), Rat(1, 2));
    CHECK(edge_metric(p, q, c.g) == 1);
    // circumference: half-way around from the midpoint of (E1,E2)
    QMValuation m = edge_at(c.g, c.h12, Rat(1, 2));
    CHECK(edge_metric(m, vertex_val(c.g, 2), c.g) == Rat(3, 2));

    DualGraph base = DualGraph({{"E", 0, -3, 2}, {"F", 0, -2, 3}}, {{0, 1}}, {}, false);
    DualGraph sub = blowup_satellite(base, 0);
    CHECK(edge_metric(vertex_val(sub, 0), vertex_val(sub, 1), sub) ==
          edge_metric(vertex_val(base, 0), vertex_val(base, 1), base));
}

TEST_CASE("monotone edges") {
    DualGraph smooth({{"E", 0, -1, 1}}, {});
    DualGraph up = blowup_free(smooth, 0);
    CHECK(monotone_edge_test(0, up));
    Cusp3 c;
    CHECK_FALSE(monotone_edge_test(c.h12, c.g));
}

TEST_CASE("normalization") {
    Cusp3 c;
    QMValuation v = edge_val(c.g, c.h12, 3, 1);
    CHECK(norm_value(v, c.g) == 4);
    QMValuation n = normalize(v, c.g);
    CHECK(n.r == Rat(3, 4));
    CHECK(monomial_parameter(v, c.g) == Rat(1, 4));
    CHECK(same_point(v, n, c.g));
    CHECK(vertex_val(c.g, 0, 5).r == 5);
    CHECK(error_kind([&] { return edge_val(c.g, c.h12, -1, 2); }) == "invalid_valuation");
}

TEST_CASE("ray points") {
    DualGraph g = load_graph(fixture("smooth_finite.toml"));
    QMValuation y = ray_at(g, g.ray_index("y"), 5);
    CHECK(monomial_parameter(y, g) == 5);
    CHECK(norm_value(y, g) == 1);
    // a ray point above E2 dominates E2 and has skewness alpha(E2) + t
    QMValuation e2 = vertex_val(g, 2);
    CHECK(leq(e2, y, g));
    CHECK(skewness(y, g) == skewness(e2, g) + 5);
    CHECK(parse_valuation("ray:y t=5", g) == y);
}
