#include "doctest.h"

#include "support.hpp"

using namespace valdyn;
using testing::error_kind;
using testing::fixture;

namespace {

DualGraph single(int self_int, int genus = 0) { return DualGraph({{"E0", genus, self_int, 1}}, {}); }

DualGraph chain(std::vector<int> selfs) {
    std::vector<Prime> primes;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < selfs.size(); ++i) {
        primes.push_back({"E" + std::to_string(i), 0, selfs[i], 1});
        if (i) edges.push_back({static_cast<int>(i) - 1, static_cast<int>(i)});
    }
    return DualGraph(primes, edges, {}, false);
}

}  // namespace

TEST_CASE("graph checks") {
    DualGraph cusp = load_graph(fixture("cusp3.toml"));
    GraphCheck c = check_graph(cusp);
    CHECK(c.connected);
    CHECK(c.negative_definite);
    CHECK(c.minors == std::vector<Rat>{-2, 3, -3});

    CHECK(check_graph(single(-1)).negative_definite);
    CHECK(error_kind([] { return load_graph(fixture("broken.toml")); }) == "not_negative_definite");
    CHECK(error_kind([] {
              return DualGraph({{"A", 0, -2, 1}, {"B", 0, -2, 1}}, {});
          }) == "not_connected");
    CHECK(error_kind([] { return DualGraph({{"A", 0, 0, 1}}, {}); }) == "invalid_graph");
    CHECK(error_kind([] { return DualGraph({{"A", 0, -2, 1}, {"A", 0, -2, 1}}, {{0, 1}}); }) == "invalid_graph");
}

TEST_CASE("dual basis") {
    DualGraph cusp = load_graph(fixture("cusp3.toml"));
    const Mat& inv = cusp.dual_basis();
    CHECK(inv.column(0) == std::vector<Rat>{Rat(-5, 3), Rat(-4, 3), Rat(-1)});
    CHECK(inv.column(2) == std::vector<Rat>{-1, -1, -1});
    CHECK(intersection_matrix(cusp) * inv == Mat::identity(3));

    DualGraph c22 = load_graph(fixture("chain22.toml"));
    CHECK(c22.dual_basis().column(0) == std::vector<Rat>{Rat(-2, 3), Rat(-1, 3)});
}

TEST_CASE("canonical coefficients and log discrepancies") {
    DualGraph cusp = load_graph(fixture("cusp3.toml"));
    DiscrepancyTable t = canonical_coeffs(cusp);
    CHECK(t.k == std::vector<Rat>{-1, -1, -1});
    CHECK(t.a_div == std::vector<Rat>{0, 0, 0});

    DiscrepancyTable smooth = canonical_coeffs(single(-1));
    CHECK(smooth.k == std::vector<Rat>{1});
    CHECK(smooth.a_norm == std::vector<Rat>{2});

    DiscrepancyTable ell = canonical_coeffs(single(-1, 1));
    CHECK(ell.k == std::vector<Rat>{-1});
    CHECK(ell.a_div == std::vector<Rat>{0});

    DiscrepancyTable two = canonical_coeffs(load_graph(fixture("elliptic2.toml")));
    CHECK(two.a_norm == std::vector<Rat>{0, Rat(1, 2)});

    // (-2)-curves are crepant: K = 0
    DiscrepancyTable a2 = canonical_coeffs(load_graph(fixture("chain22.toml")));
    CHECK(a2.k == std::vector<Rat>{0, 0});
    CHECK(a2.a_norm == std::vector<Rat>{1, 1});
}

TEST_CASE("essential skeleton") {
    DualGraph cusp = load_graph(fixture("cusp3.toml"));
    Subgraph s = essential_skeleton(cusp);
    CHECK(s.primes == std::vector<int>{0, 1, 2});
    CHECK(s.edges.size() == 3);

    CHECK(essential_skeleton(load_graph(fixture("chain22.toml"))).primes.empty());

    // fork with three rational legs: D4
    DualGraph d4({{"C", 0, -2, 1}, {"L1", 0, -2, 1}, {"L2", 0, -2, 1}, {"L3", 0, -2, 1}}, {{0, 1}, {0, 2}, {0, 3}}, {},
                 false);
    CHECK(essential_skeleton(d4).primes == std::vector<int>{0});

    DualGraph tail = blowup_free(load_graph(fixture("elliptic1.toml")), 0);
    CHECK(essential_skeleton(tail).primes == std::vector<int>{0});
}

TEST_CASE("classification") {
    Classification c = classify_singularity(load_graph(fixture("cusp3.toml")));
    CHECK(c.cls == LcClass::LcNotLt);
    CHECK(c.type == "cusp");

    Classification a2 = classify_singularity(load_graph(fixture("chain22.toml")));
    CHECK(a2.cls == LcClass::LogTerminal);
    CHECK(a2.type == "cyclic-quotient");

    Classification e = classify_singularity(load_graph(fixture("elliptic1.toml")));
    CHECK(e.cls == LcClass::LcNotLt);
    CHECK(e.type == "simple-elliptic");

    DualGraph d4({{"C", 0, -2, 1}, {"L1", 0, -2, 1}, {"L2", 0, -2, 1}, {"L3", 0, -2, 1}}, {{0, 1}, {0, 2}, {0, 3}}, {},
                 false);
    Classification q = classify_singularity(d4);
    CHECK(q.cls == LcClass::LogTerminal);
    CHECK(q.type == "other-quotient");

    // a genus-two curve is not log canonical
    CHECK(classify_singularity(single(-1, 2)).cls == LcClass::NotLc);
    CHECK(to_string(LcClass::LcNotLt) == "lc-not-lt");
}

TEST_CASE("no positive log discrepancy on the skeleton of a non-lt graph") {
    for (const char* name : {"cusp3.toml", "elliptic1.toml", "elliptic2.toml"}) {
        DualGraph g = load_graph(fixture(name));
        DiscrepancyTable t = canonical_coeffs(g);
        REQUIRE(classify_singularity(g, t).cls != LcClass::LogTerminal);
        for (int p : essential_skeleton(g).primes) CHECK(t.a_norm[p] <= 0);
    }
    DualGraph g2 = single(-1, 2);
    CHECK(canonical_coeffs(g2).a_norm[0] < 0);
}

TEST_CASE("free blow-up") {
    DualGraph g = blowup_free(single(-1), 0);
    REQUIRE(g.size() == 2);
    CHECK(g.prime(0).self_int == -2);
    CHECK(g.prime(1).self_int == -1);
    CHECK(g.prime(1).b == 1);
    CHECK(canonical_coeffs(g).a_norm == std::vector<Rat>{2, 3});

    DualGraph cusp = load_graph(fixture("cusp3.toml"));
    DualGraph up = blowup_free(cusp, 2);
    CHECK(up.size() == 4);
    CHECK(up.prime(2).self_int == -4);
    CHECK(up.prime(3).self_int == -1);
    CHECK(up.degree(3) == 1);
    DiscrepancyTable t = canonical_coeffs(up);
    CHECK(t.a_div[3] == canonical_coeffs(cusp).a_div[2] + 1);
}

TEST_CASE("satellite blow-up") {
    DualGraph g = blowup_satellite(chain({-2, -1}), 0);
    CHECK(g.prime(0).self_int == -3);
    CHECK(g.prime(1).self_int == -2);
    CHECK(g.prime(2).self_int == -1);
    CHECK(g.prime(2).b == 2);
    CHECK(g.multiplicity(0, 1) == 0);
    CHECK(g.multiplicity(0, 2) == 1);
    CHECK(g.multiplicity(2, 1) == 1);
    DiscrepancyTable t = canonical_coeffs(g);
    CHECK(t.a_div == std::vector<Rat>{2, 3, 5});

    DualGraph cusp = load_graph(fixture("cusp3.toml"));
    DualGraph up = blowup_satellite(cusp, cusp.edge_handle(0, 1));
    CHECK(up.prime(3).b == 2);
    CHECK(canonical_coeffs(up).a_div[3] == 0);

    // the two new edges subdivide the old one isometrically
    DualGraph base = DualGraph({{"E", 0, -3, 2}, {"F", 0, -2, 3}}, {{0, 1}}, {}, false);
    DualGraph sub = blowup_satellite(base, 0);
    CHECK(edge_length(sub, 0) + edge_length(sub, 1) == edge_length(base, 0));
    CHECK(edge_length(base, 0) == Rat(1, 6));
}

TEST_CASE("dot export lists primes and edges") {
    std::string dot = to_dot(load_graph(fixture("cusp3.toml")));
    CHECK(dot.find("graph dual") != std::string::npos);
    CHECK(dot.find("\"E1\" -- \"E2\"") != std::string::npos);
}
