#include "valdyn/valuation.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace valdyn {

namespace {

void check_weights(const Rat& r, const Rat& s) {
    if (r < 0 || s < 0) throw Error("invalid_valuation", "monomial weights must be nonnegative");
    if (r == 0 && s == 0) throw Error("invalid_valuation", "monomial weights cannot both vanish");
}

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

QMValuation vertex_val(const DualGraph& g, int prime) { return vertex_val(g, prime, Rat(1, g.prime(prime).b)); }

QMValuation vertex_val(const DualGraph& g, int prime, const Rat& scale) {
    if (prime < 0 || prime >= static_cast<int>(g.size())) throw Error("unknown_prime", "vertex out of range");
    if (scale <= 0) throw Error("invalid_valuation", "vertex weight must be positive");
    return QMValuation{Where::Vertex, prime, scale, 0};
}

QMValuation edge_val(const DualGraph& g, int edge, const Rat& r, const Rat& s) {
    check_weights(r, s);
    const Edge& e = g.edge(edge);
    if (s == 0) return vertex_val(g, e.u, r);
    if (r == 0) return vertex_val(g, e.v, s);
    return QMValuation{Where::Edge, edge, r, s};
}

QMValuation ray_val(const DualGraph& g, int ray, const Rat& r, const Rat& s) {
    check_weights(r, s);
    if (r == 0) throw Error("invalid_valuation", "the end of a ray is not quasimonomial");
    if (s == 0) return vertex_val(g, g.ray(ray).base, r);
    return QMValuation{Where::Ray, ray, r, s};
}

QMValuation edge_at(const DualGraph& g, int edge, const Rat& t) {
    if (t < 0 || t > 1) throw Error("invalid_valuation", "edge parameter must lie in [0,1]");
    const Edge& e = g.edge(edge);
    return edge_val(g, edge, (1 - t) / g.prime(e.u).b, t / g.prime(e.v).b);
}

QMValuation ray_at(const DualGraph& g, int ray, const Rat& t) {
    if (t < 0) throw Error("invalid_valuation", "ray parameter must be nonnegative");
    return ray_val(g, ray, Rat(1, g.prime(g.ray(ray).base).b), t);
}

QMValuation parse_valuation(std::string_view literal, const DualGraph& g) {
    std::istringstream in{std::string(literal)};
    std::string head;
    in >> head;
    std::optional<Rat> r, s, t;
    std::string tok;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error("parse_error", "expected key=value in '" + std::string(literal) + "'");
        std::string key = tok.substr(0, eq);
        Rat val = parse_rat(tok.substr(eq + 1));
        if (key == "r")
            r = val;
        else if (key == "s")
            s = val;
        else if (key == "t")
            t = val;
        else
            throw Error("parse_error", "unknown weight '" + key + "'");
    }
    auto colon = head.find(':');
    if (colon == std::string::npos) throw Error("parse_error", "bad valuation literal '" + std::string(literal) + "'");
    std::string kind = head.substr(0, colon), body = head.substr(colon + 1);
    if (kind == "vertex") {
        int i = g.index_of(trim(body));
        return r ? vertex_val(g, i, *r) : vertex_val(g, i);
    }
    if (kind == "ray") {
        int h = g.ray_index(trim(body));
        if (t) return ray_at(g, h, *t);
        if (!r || !s) throw Error("parse_error", "ray literal needs t=.. or r=.. s=..");
        return ray_val(g, h, *r, *s);
    }
    if (kind == "edge") {
        auto open = body.find('('), comma = body.find(','), close = body.find(')');
        if (open != 0 || comma == std::string::npos || close == std::string::npos || comma > close)
            throw Error("parse_error", "bad edge literal '" + std::string(literal) + "'");
        int a = g.index_of(trim(body.substr(1, comma - 1)));
        int b = g.index_of(trim(body.substr(comma + 1, close - comma - 1)));
        int k = 0;
        std::string rest = body.substr(close + 1);
        if (!rest.empty()) {
            if (rest[0] != '#') throw Error("parse_error", "bad edge literal '" + std::string(literal) + "'");
            k = std::stoi(rest.substr(1));
        }
        int h = g.edge_handle(a, b, k);
        bool flipped = g.edge(h).u != a;
        if (t) return edge_at(g, h, flipped ? Rat(1 - *t) : *t);
        if (!r || !s) throw Error("parse_error", "edge literal needs t=.. or r=.. s=..");
        return flipped ? edge_val(g, h, *s, *r) : edge_val(g, h, *r, *s);
    }
    throw Error("parse_error", "unknown location kind '" + kind + "'");
}

std::string edge_literal(const DualGraph& g, int h) {
    const Edge& e = g.edge(h);
    int k = 0;
    for (int j = 0; j < h; ++j) {
        const Edge& f = g.edge(j);
        if ((f.u == e.u && f.v == e.v) || (f.u == e.v && f.v == e.u)) ++k;
    }
    return "edge:(" + g.prime(e.u).id + "," + g.prime(e.v).id + ")#" + std::to_string(k);
}

std::string to_literal(const QMValuation& v, const DualGraph& g) {
    switch (v.where) {
        case Where::Vertex: {
            std::string out = "vertex:" + g.prime(v.index).id;
            if (v.r != Rat(1, g.prime(v.index).b)) out += " r=" + to_string(v.r);
            return out;
        }
        case Where::Edge: return edge_literal(g, v.index) + " r=" + to_string(v.r) + " s=" + to_string(v.s);
        case Where::Ray: return "ray:" + g.ray(v.index).label + " r=" + to_string(v.r) + " s=" + to_string(v.s);
    }
    return {};
}

Rat norm_value(const QMValuation& v, const DualGraph& g) {
    switch (v.where) {
        case Where::Vertex: return v.r * g.prime(v.index).b;
        case Where::Edge: return v.r * g.prime(g.edge(v.index).u).b + v.s * g.prime(g.edge(v.index).v).b;
        case Where::Ray: return v.r * g.prime(g.ray(v.index).base).b;
    }
    return 0;
}

QMValuation normalize(const QMValuation& v, const DualGraph& g) {
    Rat n = norm_value(v, g);
    QMValuation out = v;
    out.r /= n;
    out.s /= n;
    return out;
}

Rat monomial_parameter(const QMValuation& v, const DualGraph& g) {
    QMValuation n = normalize(v, g);
    switch (v.where) {
        case Where::Vertex: return 0;
        case Where::Edge: return n.s * g.prime(g.edge(v.index).v).b;
        case Where::Ray: return n.s / n.r / g.prime(g.ray(v.index).base).b;
    }
    return 0;
}

bool same_point(const QMValuation& a, const QMValuation& b, const DualGraph& g) {
    return normalize(a, g) == normalize(b, g);
}

std::vector<Rat> divisor_of(const QMValuation& v, const DualGraph& g) {
    const Mat& inv = g.dual_basis();
    std::vector<Rat> z(g.size());
    auto add = [&](int prime, const Rat& w) {
        for (std::size_t i = 0; i < g.size(); ++i) z[i] += w * inv(i, prime);
    };
    switch (v.where) {
        case Where::Vertex: add(v.index, v.r); break;
        case Where::Edge:
            add(g.edge(v.index).u, v.r);
            add(g.edge(v.index).v, v.s);
            break;
        case Where::Ray: add(g.ray(v.index).base, v.r); break;
    }
    return z;
}

Rat b_intersection(const QMValuation& a, const QMValuation& b, const DualGraph& g) {
    return b_intersection_generic<Rat>(g, a.where, a.index, a.r, a.s, b.where, b.index, b.r, b.s,
                                       [](const Rat& x) { return x; });
}

Rat skewness(const QMValuation& v, const DualGraph& g) {
    QMValuation n = normalize(v, g);
    return -b_intersection(n, n, g);
}

Rat rel_skewness(const QMValuation& v, const QMValuation& mu, const DualGraph& g) {
    QMValuation a = normalize(v, g), b = normalize(mu, g);
    return -b_intersection(a, a, g) / -b_intersection(a, b, g);
}

AngularDistance angular_distance(const QMValuation& v, const QMValuation& mu, const DualGraph& g) {
    Rat e = rel_skewness(v, mu, g) * rel_skewness(mu, v, g);
    return {e, std::log(to_double(e))};
}

bool leq(const QMValuation& mu, const QMValuation& v, const DualGraph& g) { return rel_skewness(mu, v, g) == 1; }

Rat log_discrepancy(const QMValuation& v, const DualGraph& g, const DiscrepancyTable& table) {
    switch (v.where) {
        case Where::Vertex: return v.r * table.a_div[v.index];
        case Where::Edge: return v.r * table.a_div[g.edge(v.index).u] + v.s * table.a_div[g.edge(v.index).v];
        case Where::Ray: return v.r * table.a_div[g.ray(v.index).base] + v.s;
    }
    return 0;
}

Rat edge_length(const DualGraph& g, int edge) {
    const Edge& e = g.edge(edge);
    return Rat(1, g.prime(e.u).b * g.prime(e.v).b);
}

namespace {

struct Anchor {
    int prime;
    Rat dist;
};

std::vector<Anchor> anchors(const QMValuation& v, const DualGraph& g) {
    if (v.where == Where::Vertex) return {{v.index, 0}};
    Rat t = monomial_parameter(v, g);
    if (v.where == Where::Ray) {
        int base = g.ray(v.index).base;
        return {{base, t / g.prime(base).b}};
    }
    Rat len = edge_length(g, v.index);
    return {{g.edge(v.index).u, t * len}, {g.edge(v.index).v, (1 - t) * len}};
}

}  // namespace

Rat edge_metric(const QMValuation& v, const QMValuation& mu, const DualGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<std::optional<Rat>>> d(n, std::vector<std::optional<Rat>>(n));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = Rat(0);
    for (std::size_t h = 0; h < g.edges().size(); ++h) {
        const Edge& e = g.edge(h);
        Rat len = edge_length(g, h);
        if (!d[e.u][e.v] || len < *d[e.u][e.v]) d[e.u][e.v] = d[e.v][e.u] = len;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] && d[k][j] && (!d[i][j] || *d[i][k] + *d[k][j] < *d[i][j])) d[i][j] = *d[i][k] + *d[k][j];
    std::optional<Rat> best;
    if (v.where == mu.where && v.index == mu.index && v.where != Where::Vertex) {
        Rat dt = abs(monomial_parameter(v, g) - monomial_parameter(mu, g));
        best = v.where == Where::Edge ? dt * edge_length(g, v.index) : dt / g.prime(g.ray(v.index).base).b;
    }
    for (const auto& a : anchors(v, g))
        for (const auto& b : anchors(mu, g)) {
            if (!d[a.prime][b.prime]) continue;
            Rat cand = a.dist + *d[a.prime][b.prime] + b.dist;
            if (!best || cand < *best) best = cand;
        }
    if (!best) throw Error("not_connected", "points lie in different components");
    return *best;
}

bool monotone_edge_test(int edge, const DualGraph& g) {
    const Edge& e = g.edge(edge);
    Rat da = skewness(vertex_val(g, e.u), g), db = skewness(vertex_val(g, e.v), g);
    return edge_length(g, edge) == abs(db - da);
}

}  // namespace valdyn
