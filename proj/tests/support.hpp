#pragma once

// Test-side helpers: fixture lookup, random graph generators and small
// exact linear algebra written independently of the library's Mat.

#include <algorithm>
#include <array>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "valdyn/io.hpp"
#include "valdyn/valuation.hpp"

namespace testing {

using valdyn::DualGraph;
using valdyn::Int;
using valdyn::Rat;

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(VALDYN_FIXTURE_DIR) / name;
}

// Kind of the valdyn::Error thrown by f, or "" when nothing is thrown.
template <class F>
std::string error_kind(F&& f) {
    try {
        f();
    } catch (const valdyn::Error& e) {
        return e.kind();
    }
    return "";
}

using RatMatrix = std::vector<std::vector<Rat>>;

// Gauss-Jordan inverse with row pivoting; returns empty on singular input.
inline RatMatrix gauss_inverse(RatMatrix a) {
    const std::size_t n = a.size();
    RatMatrix inv(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return {};
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rat p = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a[i][col] == 0) continue;
            Rat f = a[i][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[col][j];
                inv[i][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

// Negative definite iff every leading minor of -A is positive; minors by
// cofactor-free elimination on a copy.
inline bool negative_definite(const RatMatrix& a) {
    const std::size_t n = a.size();
    RatMatrix m(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = -a[i][j];
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k][k] <= 0) return false;
        for (std::size_t i = k + 1; i < n; ++i) {
            Rat f = m[i][k] / m[k][k];
            for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
        }
    }
    return true;
}

inline RatMatrix matrix_of(const DualGraph& g) {
    const std::size_t n = g.size();
    RatMatrix m(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = g.prime(static_cast<int>(i)).self_int;
    for (const auto& e : g.edges()) {
        m[e.u][e.v] += 1;
        m[e.v][e.u] += 1;
    }
    return m;
}

// Connected components by breadth-first search, skipping `removed`.
inline std::vector<int> components(const DualGraph& g, int removed = -1) {
    const int n = static_cast<int>(g.size());
    std::vector<int> comp(n, -1);
    int next = 0;
    for (int start = 0; start < n; ++start) {
        if (start == removed || comp[start] >= 0) continue;
        std::vector<int> queue{start};
        comp[start] = next;
        while (!queue.empty()) {
            int x = queue.back();
            queue.pop_back();
            for (const auto& e : g.edges()) {
                int y = e.u == x ? e.v : e.v == x ? e.u : -1;
                if (y < 0 || y == removed || comp[y] >= 0) continue;
                comp[y] = next;
                queue.push_back(y);
            }
        }
        ++next;
    }
    return comp;
}

/*
 * Random negative definite graph with 1..max_primes primes.  `pieces`
 * > 1 yields a disjoint union.  Self-intersections are drawn and the draw is
 * repeated until the intersection matrix is negative definite.
 */
inline DualGraph random_nd_graph(std::mt19937_64& rng, int max_primes, int pieces = 1) {
    std::uniform_int_distribution<int> size_dist(1, max_primes);
    for (;;) {
        int n = std::max(pieces, size_dist(rng));
        std::vector<valdyn::Prime> primes;
        std::vector<valdyn::Edge> edges;
        std::vector<int> piece(n);
        for (int i = 0; i < n; ++i) piece[i] = i < pieces ? i : std::uniform_int_distribution<int>(0, pieces - 1)(rng);
        for (int i = 1; i < n; ++i) {
            std::vector<int> earlier;
            for (int j = 0; j < i; ++j)
                if (piece[j] == piece[i]) earlier.push_back(j);
            if (earlier.empty()) continue;
            edges.push_back({earlier[std::uniform_int_distribution<std::size_t>(0, earlier.size() - 1)(rng)], i});
        }
        // a few extra edges inside pieces: cycles and parallel edges
        int extra = std::uniform_int_distribution<int>(0, 2)(rng);
        for (int k = 0; k < extra && n > 1; ++k) {
            int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
            int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
            if (a != b && piece[a] == piece[b]) edges.push_back({a, b});
        }
        std::vector<int> deg(n, 0);
        for (const auto& e : edges) ++deg[e.u], ++deg[e.v];
        for (int i = 0; i < n; ++i) {
            int lo = -(deg[i] + 2);
            int self = std::uniform_int_distribution<int>(lo, -1)(rng);
            primes.push_back({"P" + std::to_string(i), std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? 1 : 0, self,
                              std::uniform_int_distribution<int>(1, 3)(rng)});
        }
        DualGraph g(primes, edges, {}, false);
        if (negative_definite(matrix_of(g))) return g;
    }
}

/*
 * Blow-up refinement oracle for two quasimonomial points on the same edge.
 *
 * The edge (u, v) is replaced by the chain of primes produced by repeated
 * satellite blow-ups; a prime of the chain carries primitive integer
 * weights (a, b) = (ord u, ord v).  Points with primitive weights become
 * primes of the refined graph, whose dual basis then gives the pairing
 * directly: Z(ord_E) . Z(ord_F) = (M^{-1})_{EF}.
 */
struct Refinement {
    RatMatrix matrix;
    std::vector<std::array<Int, 2>> weights;  // (ord u, ord v) of chain primes, zero elsewhere
    std::vector<int> chain;                   // primes along the edge from u to v
    std::size_t depth = 0;
};

inline Refinement start_refinement(const DualGraph& g, int edge) {
    Refinement r;
    const std::size_t n = g.size();
    r.matrix.assign(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) r.matrix[i][i] = g.prime(static_cast<int>(i)).self_int;
    for (const auto& e : g.edges()) {
        r.matrix[e.u][e.v] += 1;
        r.matrix[e.v][e.u] += 1;
    }
    const auto& e = g.edge(edge);
    r.weights.assign(n, {Int(0), Int(0)});
    r.weights[e.u] = {Int(1), Int(0)};
    r.weights[e.v] = {Int(0), Int(1)};
    r.chain = {e.u, e.v};
    return r;
}

// Index of the chain prime with primitive weights (a, b), blowing up as needed.
inline int refine_to(Refinement& r, Int a, Int b) {
    Int g = boost::multiprecision::gcd(a, b);
    a /= g;
    b /= g;
    for (;;) {
        for (int p : r.chain)
            if (r.weights[p][0] == a && r.weights[p][1] == b) return p;
        // the adjacent pair whose cone contains (a, b): slope b/a between
        std::size_t k = 0;
        for (; k + 1 < r.chain.size(); ++k) {
            const auto& lo = r.weights[r.chain[k]];
            const auto& hi = r.weights[r.chain[k + 1]];
            if (lo[1] * a < b * lo[0] && b * hi[0] < hi[1] * a) break;
        }
        int x = r.chain[k], y = r.chain[k + 1];
        const std::size_t n = r.matrix.size();
        for (auto& row : r.matrix) row.push_back(Rat(0));
        r.matrix.push_back(std::vector<Rat>(n + 1, Rat(0)));
        int z = static_cast<int>(n);
        r.matrix[x][y] -= 1;
        r.matrix[y][x] -= 1;
        r.matrix[x][x] -= 1;
        r.matrix[y][y] -= 1;
        r.matrix[z][z] = -1;
        r.matrix[x][z] = r.matrix[z][x] = 1;
        r.matrix[y][z] = r.matrix[z][y] = 1;
        r.weights.push_back({r.weights[x][0] + r.weights[y][0], r.weights[x][1] + r.weights[y][1]});
        r.chain.insert(r.chain.begin() + static_cast<long>(k) + 1, z);
        ++r.depth;
    }
}

// Random primitive weights at Stern-Brocot depth 1..max_depth.
inline std::array<Int, 2> random_stern_brocot(std::mt19937_64& rng, int max_depth) {
    int depth = std::uniform_int_distribution<int>(1, max_depth)(rng);
    Int la = 1, lb = 0, ha = 0, hb = 1;
    Int a = 1, b = 1;
    for (int i = 1; i < depth; ++i) {
        if (rng() & 1) {
            la = a;
            lb = b;
        } else {
            ha = a;
            hb = b;
        }
        a = la + ha;
        b = lb + hb;
    }
    return {a, b};
}

inline Rat random_rat(std::mt19937_64& rng, int max_num, int max_den) {
    int q = std::uniform_int_distribution<int>(1, max_den)(rng);
    int p = std::uniform_int_distribution<int>(0, max_num * q)(rng);
    return Rat(p, q);
}

// A normalized point on a random edge, or a random vertex when there is none.
inline valdyn::QMValuation random_graph_point(const DualGraph& g, std::mt19937_64& rng) {
    int n = static_cast<int>(g.size());
    if (g.edges().empty() || rng() % 4 == 0)
        return valdyn::vertex_val(g, std::uniform_int_distribution<int>(0, n - 1)(rng));
    int h = std::uniform_int_distribution<int>(0, static_cast<int>(g.edges().size()) - 1)(rng);
    return valdyn::edge_at(g, h, random_rat(rng, 1, 12));
}

inline DualGraph random_graph_with_edge(std::mt19937_64& rng, int max_primes) {
    for (;;) {
        DualGraph g = random_nd_graph(rng, max_primes);
        if (!g.edges().empty()) return g;
    }
}

/*
 * Unramified cyclic cover of a graph: every prime lifts to `sheets` primes
 * with the same self-intersection, and an edge u-v with voltage a lifts to
 * (u,i)-(v,i+a).  Loops are avoided by the generator, so self-intersections
 * are preserved and the cover stays negative definite.
 */
inline DualGraph cyclic_cover(const DualGraph& g, int sheets, std::mt19937_64& rng) {
    std::vector<valdyn::Prime> primes;
    for (int i = 0; i < sheets; ++i)
        for (const auto& p : g.primes()) primes.push_back({p.id + "_" + std::to_string(i), p.genus, p.self_int, p.b});
    const int n = static_cast<int>(g.size());
    std::vector<valdyn::Edge> edges;
    for (const auto& e : g.edges()) {
        int a = std::uniform_int_distribution<int>(0, sheets - 1)(rng);
        for (int i = 0; i < sheets; ++i) edges.push_back({i * n + e.u, ((i + a) % sheets) * n + e.v});
    }
    return DualGraph(primes, edges, {}, false);
}

}  // namespace testing
