#include "valdyn/resolution.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace valdyn {

DualGraph::DualGraph(std::vector<Prime> primes, std::vector<Edge> edges, std::vector<Ray> rays, bool validate)
    : primes_(std::move(primes)), edges_(std::move(edges)), rays_(std::move(rays)) {
    if (primes_.empty()) throw Error("invalid_graph", "a dual graph needs at least one prime");
    std::set<std::string> seen;
    for (const auto& p : primes_) {
        if (p.id.empty()) throw Error("invalid_graph", "prime with empty id");
        if (!seen.insert(p.id).second) throw Error("invalid_graph", "duplicate prime id '" + p.id + "'");
        if (p.genus < 0) throw Error("invalid_graph", "prime '" + p.id + "' has negative genus");
        if (p.self_int >= 0) throw Error("invalid_graph", "prime '" + p.id + "' must have negative self-intersection");
        if (p.b < 1) throw Error("invalid_graph", "prime '" + p.id + "' must have b >= 1");
    }
    const int n = static_cast<int>(primes_.size());
    for (const auto& e : edges_) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) throw Error("invalid_graph", "edge end out of range");
        if (e.u == e.v) throw Error("invalid_graph", "self-loop at '" + primes_[e.u].id + "'");
    }
    std::set<std::string> labels;
    for (const auto& r : rays_) {
        if (r.base < 0 || r.base >= n) throw Error("invalid_graph", "ray '" + r.label + "' has no base prime");
        if (!labels.insert(r.label).second) throw Error("invalid_graph", "duplicate ray label '" + r.label + "'");
    }
    Mat m = intersection_matrix();
    if (validate) {
        GraphCheck c = check_graph(*this);
        if (!c.connected) throw Error("not_connected", "dual graph is not connected");
        if (!c.negative_definite) throw Error("not_negative_definite", "intersection matrix is not negative definite");
        if (!c.nef) throw Error("not_nef", "the divisor -sum b_E E is not nef for the given multiplicities");
    }
    try {
        inverse_ = m.inverse();
        has_inverse_ = true;
    } catch (const Error&) {
        has_inverse_ = false;
    }
}

int DualGraph::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < primes_.size(); ++i)
        if (primes_[i].id == id) return static_cast<int>(i);
    throw Error("unknown_prime", "no prime named '" + id + "'");
}

bool DualGraph::has_prime(const std::string& id) const {
    return std::any_of(primes_.begin(), primes_.end(), [&](const Prime& p) { return p.id == id; });
}

int DualGraph::ray_index(const std::string& label) const {
    for (std::size_t i = 0; i < rays_.size(); ++i)
        if (rays_[i].label == label) return static_cast<int>(i);
    throw Error("unknown_ray", "no ray labelled '" + label + "'");
}

int DualGraph::edge_handle(int a, int b, int k) const {
    int count = 0;
    for (std::size_t h = 0; h < edges_.size(); ++h) {
        const Edge& e = edges_[h];
        if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) {
            if (count == k) return static_cast<int>(h);
            ++count;
        }
    }
    throw Error("unknown_edge", "no edge #" + std::to_string(k) + " between '" + primes_.at(a).id + "' and '" +
                                    primes_.at(b).id + "'");
}

int DualGraph::multiplicity(int a, int b) const {
    int count = 0;
    for (const auto& e : edges_)
        if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) ++count;
    return count;
}

std::vector<int> DualGraph::neighbors(int i) const {
    std::vector<int> out;
    for (const auto& e : edges_) {
        if (e.u == i) out.push_back(e.v);
        if (e.v == i) out.push_back(e.u);
    }
    return out;
}

int DualGraph::degree(int i) const { return static_cast<int>(neighbors(i).size()); }

Mat DualGraph::intersection_matrix() const {
    std::size_t n = primes_.size();
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = primes_[i].self_int;
    for (const auto& e : edges_) {
        m(e.u, e.v) += 1;
        m(e.v, e.u) += 1;
    }
    return m;
}

const Mat& DualGraph::dual_basis() const {
    if (!has_inverse_) throw Error("singular_matrix", "intersection matrix is singular");
    return inverse_;
}

DualGraph DualGraph::with_rays(std::vector<Ray> extra) const {
    std::vector<Ray> all = rays_;
    all.insert(all.end(), extra.begin(), extra.end());
    return DualGraph(primes_, edges_, all, false);
}

std::string DualGraph::fresh_id() const {
    for (std::size_t k = primes_.size();; ++k) {
        std::string id = "E" + std::to_string(k);
        if (!has_prime(id)) return id;
    }
}

Mat intersection_matrix(const DualGraph& g) { return g.intersection_matrix(); }

bool check_negative_definite(const Mat& m) {
    auto minors = m.leading_minors();
    for (std::size_t k = 0; k < minors.size(); ++k) {
        int expected = (k % 2 == 0) ? -1 : 1;  // sign of the (k+1)-th minor
        if (sgn(minors[k]) != expected) return false;
    }
    return true;
}

bool is_connected(const DualGraph& g) {
    std::vector<char> seen(g.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        int i = q.front();
        q.pop();
        for (int j : g.neighbors(i))
            if (!seen[j]) {
                seen[j] = 1;
                ++count;
                q.push(j);
            }
    }
    return count == g.size();
}

GraphCheck check_graph(const DualGraph& g) {
    GraphCheck c;
    Mat m = g.intersection_matrix();
    c.connected = is_connected(g);
    c.minors = m.leading_minors();
    c.negative_definite = check_negative_definite(m);
    c.nef = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Rat s = 0;
        for (std::size_t j = 0; j < g.size(); ++j) s += Rat(g.prime(j).b) * m(i, j);
        c.nef_row_sums.push_back(s);
        if (s > 0) c.nef = false;
    }
    return c;
}

Mat dual_basis(const DualGraph& g) { return g.dual_basis(); }

DiscrepancyTable canonical_coeffs(const DualGraph& g) {
    std::vector<Rat> rhs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = 2 * g.prime(i).genus - 2 - g.prime(i).self_int;
    DiscrepancyTable t;
    t.k = g.dual_basis() * rhs;
    for (std::size_t i = 0; i < g.size(); ++i) {
        t.a_div.push_back(1 + t.k[i]);
        t.a_norm.push_back(t.a_div.back() / g.prime(i).b);
    }
    return t;
}

namespace {

// Vertices lying on some cycle: the 2-core of the multigraph, minus the
// trees hanging between cycles are fine to keep (they connect cycles).
std::vector<char> two_core(const DualGraph& g) {
    std::vector<char> alive(g.size(), 1);
    std::vector<int> deg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) deg[i] = g.degree(i);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (alive[i] && deg[i] <= 1) {
                alive[i] = 0;
                changed = true;
                for (int j : g.neighbors(i))
                    if (alive[j]) --deg[j];
            }
        }
    }
    return alive;
}

}  // namespace

Subgraph essential_skeleton(const DualGraph& g) {
    std::vector<char> core = two_core(g);
    std::vector<char> keep(g.size(), 1), protect(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i)
        protect[i] = core[i] || g.degree(i) >= 3 || g.prime(i).genus > 0;
    std::vector<int> deg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) deg[i] = g.degree(i);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (keep[i] && !protect[i] && deg[i] <= 1) {
                keep[i] = 0;
                changed = true;
                for (int j : g.neighbors(i))
                    if (keep[j]) --deg[j];
            }
        }
    }
    Subgraph s;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (keep[i]) s.primes.push_back(static_cast<int>(i));
    for (std::size_t h = 0; h < g.edges().size(); ++h)
        if (keep[g.edge(h).u] && keep[g.edge(h).v]) s.edges.push_back(static_cast<int>(h));
    return s;
}

std::string to_string(LcClass c) {
    switch (c) {
        case LcClass::LogTerminal: return "log-terminal";
        case LcClass::LcNotLt: return "lc-not-lt";
        case LcClass::NotLc: return "not-lc";
    }
    return "?";
}

Classification classify_singularity(const DualGraph& g, const DiscrepancyTable& table) {
    Rat lo = *std::min_element(table.a_norm.begin(), table.a_norm.end());
    if (lo < 0) return {LcClass::NotLc, "not-lc", lo};
    if (lo > 0) {
        bool chain = g.edges().size() + 1 == g.size();
        for (std::size_t i = 0; i < g.size() && chain; ++i)
            chain = g.prime(i).genus == 0 && g.degree(i) <= 2;
        return {LcClass::LogTerminal, chain ? "cyclic-quotient" : "other-quotient", lo};
    }
    Subgraph s = essential_skeleton(g);
    auto sdeg = [&](int i) {
        int d = 0;
        for (int h : s.edges) d += (g.edge(h).u == i) + (g.edge(h).v == i);
        return d;
    };
    bool all_rational = std::all_of(s.primes.begin(), s.primes.end(), [&](int i) { return g.prime(i).genus == 0; });
    if (!s.primes.empty() && all_rational && s.edges.size() == s.primes.size() &&
        std::all_of(s.primes.begin(), s.primes.end(), [&](int i) { return sdeg(i) == 2; }))
        return {LcClass::LcNotLt, "cusp", lo};
    if (s.primes.size() == 1) {
        int v = s.primes[0];
        if (g.prime(v).genus == 1) return {LcClass::LcNotLt, "simple-elliptic", lo};
        if (g.prime(v).genus == 0 && (g.degree(v) == 3 || g.degree(v) == 4))
            return {LcClass::LcNotLt, "elliptic-quotient", lo};
    }
    if (s.primes.size() >= 2 && all_rational && s.edges.size() + 1 == s.primes.size()) {
        int forks = 0, ends = 0;
        for (int i : s.primes) {
            if (g.degree(i) == 3) ++forks;
            if (sdeg(i) == 1) ++ends;
        }
        bool ends_are_forks = std::all_of(s.primes.begin(), s.primes.end(),
                                          [&](int i) { return sdeg(i) != 1 || g.degree(i) == 3; });
        if (forks == 2 && ends == 2 && ends_are_forks) return {LcClass::LcNotLt, "quotient-cusp", lo};
    }
    throw Error("unrecognized_lc_shape", "log canonical graph whose skeleton matches no known shape");
}

Classification classify_singularity(const DualGraph& g) { return classify_singularity(g, canonical_coeffs(g)); }

DualGraph blowup_free(const DualGraph& g, int prime, std::string new_id) {
    if (prime < 0 || prime >= static_cast<int>(g.size())) throw Error("unknown_prime", "blow-up center out of range");
    if (new_id.empty()) new_id = g.fresh_id();
    if (g.has_prime(new_id)) throw Error("invalid_graph", "prime id '" + new_id + "' already used");
    auto primes = g.primes();
    auto edges = g.edges();
    primes[prime].self_int -= 1;
    primes.push_back(Prime{new_id, 0, -1, primes[prime].b});
    edges.push_back(Edge{prime, static_cast<int>(primes.size()) - 1});
    return DualGraph(primes, edges, g.rays(), false);
}

DualGraph blowup_satellite(const DualGraph& g, int edge, std::string new_id) {
    if (edge < 0 || edge >= static_cast<int>(g.edges().size()))
        throw Error("unknown_edge", "satellite blow-up edge out of range");
    if (new_id.empty()) new_id = g.fresh_id();
    if (g.has_prime(new_id)) throw Error("invalid_graph", "prime id '" + new_id + "' already used");
    auto primes = g.primes();
    auto edges = g.edges();
    Edge e = edges[edge];
    primes[e.u].self_int -= 1;
    primes[e.v].self_int -= 1;
    primes.push_back(Prime{new_id, 0, -1, primes[e.u].b + primes[e.v].b});
    int gi = static_cast<int>(primes.size()) - 1;
    edges[edge] = Edge{e.u, gi};
    edges.push_back(Edge{gi, e.v});
    return DualGraph(primes, edges, g.rays(), false);
}

std::string to_dot(const DualGraph& g) {
    std::ostringstream out;
    out << "graph dual {\n  node [shape=circle];\n";
    for (const auto& p : g.primes())
        out << "  \"" << p.id << "\" [label=\"" << p.id << "\\n" << p.self_int << (p.genus ? " g" + std::to_string(p.genus) : "")
            << (p.b != 1 ? " b" + std::to_string(p.b) : "") << "\"];\n";
    for (const auto& e : g.edges()) out << "  \"" << g.prime(e.u).id << "\" -- \"" << g.prime(e.v).id << "\";\n";
    for (const auto& r : g.rays())
        out << "  \"ray:" << r.label << "\" [shape=point];\n  \"" << g.prime(r.base).id << "\" -- \"ray:" << r.label
            << "\" [style=dashed, label=\"" << r.label << "\"];\n";
    out << "}\n";
    return out.str();
}

}  // namespace valdyn
