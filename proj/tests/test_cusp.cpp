#include "doctest.h"

#include "support.hpp"

using namespace valdyn;
using testing::error_kind;

namespace {

QuadElem sqrt2(Rat a, Rat b) { return QuadElem(2, std::move(a), std::move(b)); }

}  // namespace

TEST_CASE("continued fractions and units") {
    CuspData c = make_cusp({4, 2});
    CHECK(c.omega == sqrt2(2, 1));
    CHECK(c.eps_omega == sqrt2(3, 2));
    CHECK(c.eps == c.eps_omega);
    CHECK(vertex_sequence(c, 2) == c.eps_omega);
    CHECK(is_unit(c.eps_omega));
    CHECK(c.eps_omega * c.eps_omega.conj() == QuadElem(2, 1));

    CuspData g = make_cusp({3});
    CHECK(g.omega == QuadElem(5, Rat(3, 2), Rat(1, 2)));
    CHECK(g.eps_omega == g.omega);
    // omega * omega = 3 omega - 1 stays in the lattice
    CHECK(g.omega * g.omega == 3 * g.omega - Rat(1));

    CuspData c2 = make_cusp({4, 2}, 2);
    CHECK(c2.eps == sqrt2(17, 12));

    CHECK(error_kind([] { return make_cusp({2, 2}); }) == "invalid_cusp");
    CHECK(error_kind([] { return make_cusp({1, 3}); }) == "invalid_cusp");
}

TEST_CASE("vertex sequence is equivariant under the unit") {
    for (auto cycle : std::vector<std::vector<int>>{{4, 2}, {3}, {2, 2, 3}, {5, 2, 3}}) {
        CuspData c = make_cusp(cycle);
        for (long n = -4; n < 8; ++n) CHECK(vertex_sequence(c, n + c.r()) == c.eps_omega * vertex_sequence(c, n));
        CHECK(vertex_sequence(c, 0) == QuadElem(c.d(), 1));
        CHECK(vertex_sequence(c, 1) == c.omega);
    }
}

TEST_CASE("lattice coordinates") {
    CuspData c = make_cusp({4, 2});
    QuadElem alpha = sqrt2(3, 1);
    CHECK(lattice_coords(alpha, c) == std::pair<Rat, Rat>(1, 1));
    CHECK(lattice_coords(alpha * c.omega, c) == std::pair<Rat, Rat>(-2, 5));
    CHECK(in_lattice(alpha, c));
    CHECK_FALSE(in_lattice(sqrt2(Rat(1, 2), 0), c));
}

TEST_CASE("validating multipliers") {
    CuspData c = make_cusp({4, 2});
    AlphaCheck a = validate_alpha(sqrt2(3, 1), c);
    CHECK(a.ok);
    CHECK(a.degree == 7);
    AlphaCheck e = validate_alpha(c.eps_omega, c);
    CHECK(e.ok);
    CHECK(e.degree == 1);
    AlphaCheck r = validate_alpha(sqrt2(0, 1), c);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.reason.empty());
    CHECK_FALSE(validate_alpha(sqrt2(Rat(1, 2), 1), c).ok);
}

TEST_CASE("rotation numbers") {
    CuspData c = make_cusp({4, 2});
    Rotation irr = rotation_number(sqrt2(3, 1), c);
    CHECK_FALSE(irr.rational);
    CHECK(std::abs(irr.beta - 0.290384589822251914) < 1e-12);
    CHECK(irr.beta_digits.rfind("0.29038458982225191431", 0) == 0);

    Rotation deck = rotation_number(c.eps_omega, c);
    CHECK(deck.rational);
    CHECK(deck.p == deck.q);  // beta = 1, a full turn

    Rotation two = rotation_number(QuadElem(2, 2), c);
    CHECK(two.rational);
    CHECK(two.p == 0);
    CHECK(two.beta == 0);

    // with s = 2 the deck unit is eps_omega^2, so eps_omega is half a turn
    CuspData c2 = make_cusp({4, 2}, 2);
    Rotation half = rotation_number(c2.eps_omega, c2);
    CHECK(half.rational);
    CHECK(Rat(half.p, half.q) == Rat(1, 2));
}

TEST_CASE("irrational example") {
    CuspData c = make_cusp({4, 2});
    QuadElem a = irrational_example(c);
    CHECK(a == sqrt2(5, 2));
    CHECK(field_norm(a) == 17);
    CHECK(validate_alpha(a, c).ok);
    CHECK_FALSE(rotation_number(a, c).rational);
    // the construction writes alpha as (p - a) + eps, a lattice element
    CHECK(in_lattice(a - c.eps, c));
    CHECK(rotation_number(c.eps, c).rational);
}

TEST_CASE("dual graph of a cusp") {
    DualGraph g = cusp_dual_graph(make_cusp({4, 2}));
    REQUIRE(g.size() == 2);
    CHECK(g.prime(0).self_int == -4);
    CHECK(g.prime(1).self_int == -2);
    CHECK(g.multiplicity(0, 1) == 2);
    CHECK(classify_singularity(g).type == "cusp");

    DualGraph g4 = cusp_dual_graph(make_cusp({4, 2}, 2));
    REQUIRE(g4.size() == 4);
    std::vector<int> selfs;
    for (const auto& p : g4.primes()) selfs.push_back(p.self_int);
    CHECK(selfs == std::vector<int>{-4, -2, -4, -2});
    CHECK(error_kind([] { return cusp_dual_graph(make_cusp({3})); }) == "invalid_cusp");
    CHECK_NOTHROW(cusp_dual_graph(make_cusp({3}, 2)));
}

TEST_CASE("fan faces") {
    CuspData c = make_cusp({4, 2});
    QuadElem alpha = sqrt2(3, 1);
    // alpha e0 = e0 + e1 and alpha e1 = e1 + 2 e2
    CHECK(face_coords(alpha, c, 0) == std::pair<Rat, Rat>(1, 1));
    CHECK(face_coords(alpha * c.omega, c, 1) == std::pair<Rat, Rat>(1, 2));
    CHECK(locate_face(alpha, c) == 0);
    CHECK(locate_face(alpha * c.omega, c) == 1);
    CHECK(locate_face(c.eps_omega * alpha, c) == 2);
}

TEST_CASE("induced skeleton map of alpha = 3 + sqrt 2") {
    CuspData c = make_cusp({4, 2});
    SkeletonMap f = induced_skeleton_map(sqrt2(3, 1), c);
    const auto& s = f.sectors();
    REQUIRE(s.size() == 4);
    // table frozen from the symbolic oracle
    struct Row {
        int src;
        Rat lo, hi;
        IntMat2 m;
        int dst;
    };
    std::vector<Row> expect{{0, 0, Rat(1, 3), {1, -2, 1, 5}, 0},
                            {0, Rat(1, 3), 1, {3, 1, -1, 2}, 1},
                            {1, 0, Rat(1, 2), {1, -1, 2, 5}, 1},
                            {1, Rat(1, 2), 1, {6, 1, -1, 1}, 0}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(s[i].src.index == expect[i].src);
        CHECK(s[i].lo == expect[i].lo);
        CHECK(*s[i].hi == expect[i].hi);
        CHECK(s[i].m == expect[i].m);
        CHECK(s[i].dst.index == expect[i].dst);
        CHECK(s[i].m.det() == 7);
        IntMat2 gm = sector_generator_matrix(s[i], f.graph());
        CHECK(gm.a >= 0);
        CHECK(gm.b >= 0);
        CHECK(gm.c >= 0);
        CHECK(gm.d >= 0);
    }
    REQUIRE(f.rotation());
    CHECK_FALSE(f.rotation()->rational);
    CHECK(f.finite());

    // c(f, w(t)) = t + 2 along the first edge
    for (Rat t : {Rat(0), Rat(1, 5), Rat(1, 3), Rat(3, 4), Rat(1)})
        CHECK(apply(edge_at(f.graph(), 0, t), f).rate == t + 2);

    CHECK(dynamical_degree(f).minpoly == std::vector<Int>{1, 0, -7});
}

TEST_CASE("dynamical degree is the square root of the norm") {
    CuspData c = make_cusp({4, 2});
    for (QuadElem a : {sqrt2(3, 1), sqrt2(5, 2), sqrt2(2, 0), sqrt2(6, 3)}) {
        REQUIRE(validate_alpha(a, c).ok);
        QuadraticInteger deg = dynamical_degree(induced_skeleton_map(a, c));
        Int n = numerator(field_norm(a));
        if (auto r = exact_sqrt(n))
            CHECK(deg.minpoly == std::vector<Int>{1, -*r});
        else
            CHECK(deg.minpoly == std::vector<Int>{1, 0, -n});
        CHECK(deg.approx == doctest::Approx(std::sqrt(static_cast<double>(n))));
    }
}
