#include "valdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace valdyn {

namespace {

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

int base_b(const Cell& c, const DualGraph& g, bool second = false) {
    if (c.kind == Where::Ray) return g.prime(g.ray(c.index).base).b;
    const Edge& e = g.edge(c.index);
    return g.prime(second ? e.v : e.u).b;
}

// Parameter t of the point with homogeneous weights (r, s) on a cell.
Rat cell_param(const Cell& c, const Rat& r, const Rat& s, const DualGraph& g) {
    if (c.kind == Where::Ray) return s / (r * base_b(c, g));
    Rat bs = s * base_b(c, g, true);
    return bs / (r * base_b(c, g) + bs);
}

QMValuation cell_val(const Cell& c, const Rat& r, const Rat& s, const DualGraph& g) {
    return c.kind == Where::Ray ? ray_val(g, c.index, r, s) : edge_val(g, c.index, r, s);
}

bool in_cone(const Sector& sec, const Rat& t) { return t >= sec.lo && (!sec.hi || t <= *sec.hi); }

struct Rep {
    Cell cell;
    Rat t, r, s;
};

// Every way of reading a normalized point as (cell, t, r, s) in the domain.
std::vector<Rep> representations(const QMValuation& v, const SkeletonMap& f) {
    const DualGraph& g = f.graph();
    std::vector<Rep> out;
    if (v.where != Where::Vertex) {
        Cell c{v.where, v.index};
        out.push_back({c, monomial_parameter(v, g), v.r, v.s});
        return out;
    }
    for (const Cell& c : f.domain()) {
        if (c.kind == Where::Ray) {
            if (g.ray(c.index).base == v.index) out.push_back({c, 0, v.r, 0});
            continue;
        }
        const Edge& e = g.edge(c.index);
        if (e.u == v.index) out.push_back({c, 0, v.r, 0});
        if (e.v == v.index) out.push_back({c, 1, 0, v.r});
    }
    return out;
}

std::array<Rat, 2> mul(const IntMat2& m, const Rat& r, const Rat& s) {
    return {Rat(m.a) * r + Rat(m.b) * s, Rat(m.c) * r + Rat(m.d) * s};
}

// Unnormalized image of the weights (r, s) under one sector.
QMValuation image_via(const Sector& sec, const Rat& r, const Rat& s, const DualGraph& g) {
    auto w = mul(sec.m, r, s);
    if (w[0] < 0 || w[1] < 0) throw Error("invalid_germ", "sector image leaves the target cone");
    return cell_val(sec.dst, w[0], w[1], g);
}

std::array<Int, 2> primitive(const Rat& r, const Rat& s) {
    Int l = boost::multiprecision::lcm(denominator(r), denominator(s));
    Int x = numerator(Rat(r * l)), y = numerator(Rat(s * l));
    Int gg = boost::multiprecision::gcd(x, y);
    return {x / gg, y / gg};
}

QuadElem qe(const Int& d, const Rat& x) { return QuadElem(d, x); }

std::vector<Int> primitive_poly(std::vector<Rat> c) {
    Int l = 1;
    for (const auto& x : c) l = boost::multiprecision::lcm(l, denominator(x));
    std::vector<Int> out;
    for (const auto& x : c) out.push_back(numerator(Rat(x * l)));
    Int gg = 0;
    for (const auto& x : out) gg = boost::multiprecision::gcd(gg, abs(x));
    if (gg > 1)
        for (auto& x : out) x /= gg;
    if (!out.empty() && out[0] < 0)
        for (auto& x : out) x = -x;
    return out;
}

// Minimal polynomial over Z of a real quadratic or rational number.
std::vector<Int> minpoly_of(const QuadElem& x) {
    if (x.is_rational()) return primitive_poly({Rat(1), -x.a()});
    return primitive_poly({Rat(1), -x.trace(), x.norm()});
}

double largest_root(const std::vector<Int>& p) {
    if (p.size() == 2) return -p[1].convert_to<double>() / p[0].convert_to<double>();
    double a = p[0].convert_to<double>(), b = p[1].convert_to<double>(), c = p[2].convert_to<double>();
    return (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

}  // namespace

IntMat2 operator*(const IntMat2& x, const IntMat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

CellRef parse_cell(std::string_view literal, const DualGraph& g) {
    std::string text = trim(std::string(literal));
    auto colon = text.find(':');
    if (colon == std::string::npos) throw Error("parse_error", "bad cell literal '" + text + "'");
    std::string kind = text.substr(0, colon), body = trim(text.substr(colon + 1));
    if (kind == "ray") return {Cell{Where::Ray, g.ray_index(body)}, false};
    if (kind != "edge") throw Error("parse_error", "bad cell literal '" + text + "'");
    auto comma = body.find(','), close = body.find(')');
    if (body.empty() || body[0] != '(' || comma == std::string::npos || close == std::string::npos || comma > close)
        throw Error("parse_error", "bad edge literal '" + text + "'");
    int a = g.index_of(trim(body.substr(1, comma - 1)));
    int b = g.index_of(trim(body.substr(comma + 1, close - comma - 1)));
    int k = 0;
    std::string rest = trim(body.substr(close + 1));
    if (!rest.empty()) {
        if (rest[0] != '#') throw Error("parse_error", "bad edge literal '" + text + "'");
        k = std::stoi(rest.substr(1));
    }
    int h = g.edge_handle(a, b, k);
    return {Cell{Where::Edge, h}, g.edge(h).u != a};
}

std::string cell_literal(const Cell& c, const DualGraph& g) {
    if (c.kind == Where::Ray) return "ray:" + g.ray(c.index).label;
    const Edge& e = g.edge(c.index);
    int k = 0;
    for (int j = 0; j < c.index; ++j) {
        const Edge& o = g.edge(j);
        if ((o.u == e.u && o.v == e.v) || (o.u == e.v && o.v == e.u)) ++k;
    }
    return "edge:(" + g.prime(e.u).id + "," + g.prime(e.v).id + ")#" + std::to_string(k);
}

std::array<Rat, 2> cell_point(const Cell& c, const Rat& t, const DualGraph& g) {
    if (c.kind == Where::Ray) return {Rat(1, base_b(c, g)), t};
    return {(1 - t) / base_b(c, g), t / base_b(c, g, true)};
}

std::array<std::array<Int, 2>, 2> sector_generators(const Sector& s, const DualGraph& g) {
    auto lo = cell_point(s.src, s.lo, g);
    std::array<Int, 2> hi{0, 1};
    if (s.hi) {
        auto h = cell_point(s.src, *s.hi, g);
        hi = primitive(h[0], h[1]);
    }
    return {primitive(lo[0], lo[1]), hi};
}

IntMat2 sector_generator_matrix(const Sector& s, const DualGraph& g) {
    auto gen = sector_generators(s, g);
    IntMat2 basis{gen[0][0], gen[1][0], gen[0][1], gen[1][1]};
    return s.m * basis;
}

SkeletonMap::SkeletonMap(DualGraph g, std::vector<Sector> sectors, bool finite, std::vector<RayTail> tails,
                         std::optional<RotationInfo> rotation)
    : graph_(std::move(g)),
      sectors_(std::move(sectors)),
      tails_(std::move(tails)),
      finite_(finite),
      rotation_(std::move(rotation)) {
    const DualGraph& gr = graph_;
    if (sectors_.empty() && tails_.empty()) throw Error("invalid_germ", "a germ needs at least one sector");
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
        const Sector& s = sectors_[i];
        std::string where = "sector " + std::to_string(i) + " (" + cell_literal(s.src, gr) + ")";
        if (s.m.det() == 0) throw Error("singular_matrix", where + ": determinant vanishes");
        if (s.lo < 0) throw Error("invalid_germ", where + ": cone starts below 0");
        if (s.src.kind == Where::Edge && (!s.hi || *s.hi > 1))
            throw Error("invalid_germ", where + ": edge cones lie in [0,1]");
        if (s.hi && *s.hi <= s.lo) throw Error("invalid_germ", where + ": empty cone");
        for (const auto& gen : sector_generators(s, gr)) {
            Rat r(gen[0]), q(gen[1]);
            auto w = mul(s.m, r, q);
            if (w[0] < 0 || w[1] < 0) throw Error("invalid_germ", where + ": matrix leaves the target cone");
            if (w[0] == 0 && w[1] == 0) throw Error("invalid_germ", where + ": generator collapses");
            if (s.dst.kind == Where::Ray && w[0] == 0 && r != 0)
                throw Error("invalid_germ", where + ": finite point sent to the end of a ray");
        }
    }
    for (const auto& t : tails_) {
        if (t.ray < 0 || t.ray >= static_cast<int>(gr.rays().size())) throw Error("unknown_ray", "tail on unknown ray");
        if (t.lambda <= 0) throw Error("invalid_germ", "tail slope must be positive");
    }
    // Coverage.
    for (const Cell& c : domain()) {
        std::vector<const Sector*> parts;
        for (const auto& s : sectors_)
            if (s.src == c) parts.push_back(&s);
        std::sort(parts.begin(), parts.end(), [](auto* x, auto* y) { return x->lo < y->lo; });
        std::string where = cell_literal(c, gr);
        if (parts.front()->lo != 0) throw Error("invalid_germ", where + ": sectors do not start at 0");
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            if (!parts[i]->hi || *parts[i]->hi != parts[i + 1]->lo)
                throw Error("invalid_germ", where + ": sectors leave a gap or overlap");
            // Continuity across the shared boundary.
            auto p = cell_point(c, parts[i + 1]->lo, gr);
            QMValuation a = image_via(*parts[i], p[0], p[1], gr), b = image_via(*parts[i + 1], p[0], p[1], gr);
            if (!same_point(a, b, gr)) throw Error("invalid_germ", where + ": sectors disagree at a boundary");
        }
        const auto& last = parts.back()->hi;
        if (c.kind == Where::Edge ? (!last || *last != 1) : last.has_value())
            throw Error("invalid_germ", where + ": sectors do not cover the whole cell");
    }
    // Continuity at vertices shared by several cells.
    for (std::size_t e = 0; e < gr.size(); ++e) {
        QMValuation v = vertex_val(gr, static_cast<int>(e));
        std::optional<QMValuation> seen;
        for (const Rep& rep : representations(v, *this))
            for (const auto& s : sectors_) {
                if (!(s.src == rep.cell) || !in_cone(s, rep.t)) continue;
                QMValuation img = image_via(s, rep.r, rep.s, gr);
                if (seen && !same_point(*seen, img, gr))
                    throw Error("invalid_germ", "sectors disagree at vertex " + gr.prime(e).id);
                seen = img;
            }
    }
}

std::vector<Cell> SkeletonMap::domain() const {
    std::vector<Cell> out;
    for (const auto& s : sectors_)
        if (std::find(out.begin(), out.end(), s.src) == out.end()) out.push_back(s.src);
    return out;
}

Step apply(const QMValuation& v, const SkeletonMap& f) {
    const DualGraph& g = f.graph();
    QMValuation n = normalize(v, g);
    for (const Rep& rep : representations(n, f))
        for (std::size_t i = 0; i < f.sectors().size(); ++i) {
            const Sector& s = f.sectors()[i];
            if (!(s.src == rep.cell) || !in_cone(s, rep.t)) continue;
            QMValuation img = image_via(s, rep.r, rep.s, g);
            return {normalize(img, g), norm_value(img, g), static_cast<int>(i)};
        }
    throw Error("outside_domain", to_literal(n, g) + " is not covered by the germ's sectors");
}

std::vector<OrbitPoint> orbit(const QMValuation& v, const SkeletonMap& f, int n) {
    std::vector<OrbitPoint> out;
    if (n <= 0) return out;
    out.push_back({normalize(v, f.graph()), Rat(1)});
    while (static_cast<int>(out.size()) < n) {
        Step s = apply(out.back().point, f);
        out.push_back({s.image, out.back().rate * s.rate});
    }
    return out;
}

std::optional<Recursion> detect_recursion(const std::vector<Rat>& seq, int m_max, int n_max) {
    const int len = static_cast<int>(seq.size());
    if (m_max < 1 || n_max < 0) throw Error("invalid_argument", "recursion bounds must be positive");
    if (len < 2 * m_max + n_max + 2)
        throw Error("insufficient_terms", "need at least " + std::to_string(2 * m_max + n_max + 2) + " terms, got " +
                                              std::to_string(len));
    auto verify = [&](int m, int n0, const Rat& a, const Rat& b) {
        for (int n = n0; n + 2 * m < len; ++n)
            if (seq[n + 2 * m] != a * seq[n + m] + b * seq[n]) return false;
        return true;
    };
    for (int m = 1; m <= m_max; ++m)
        for (int n0 = 0; n0 <= n_max; ++n0) {
            if (n0 + 1 + 2 * m >= len) continue;
            const Rat &p = seq[n0 + m], &q = seq[n0], &x = seq[n0 + 1 + m], &y = seq[n0 + 1];
            const Rat &u = seq[n0 + 2 * m], &w = seq[n0 + 1 + 2 * m];
            Rat det = p * y - q * x;
            Rat a, b;
            if (det != 0) {
                a = (u * y - q * w) / det;
                b = (p * w - u * x) / det;
            } else {
                if (p == 0) continue;
                a = u / p;
                b = 0;
            }
            if (!is_integer(a) || !is_integer(b)) continue;
            if (verify(m, n0, a, b)) return Recursion{m, numerator(a), numerator(b), n0};
        }
    return std::nullopt;
}

std::string to_string(const QuadraticInteger& q) {
    std::ostringstream out;
    const char* var = "lambda";
    const int deg = static_cast<int>(q.minpoly.size()) - 1;
    bool first = true;
    for (int i = 0; i <= deg; ++i) {
        const Int& c = q.minpoly[i];
        if (c == 0) continue;
        int power = deg - i;
        Int mag = abs(c);
        if (!first) out << (c < 0 ? " - " : " + ");
        else if (c < 0) out << "-";
        if (mag != 1 || power == 0) out << mag;
        if (power >= 1) out << var;
        if (power == 2) out << "^2";
        first = false;
    }
    return out.str();
}

std::string to_string(FixedKind k) {
    switch (k) {
        case FixedKind::DivisorialPoint: return "divisorial-point";
        case FixedKind::IrrationalPoint: return "irrational-point";
        case FixedKind::End: return "end";
        case FixedKind::Segment: return "segment";
        case FixedKind::CircleRotation: return "circle-rotation";
    }
    return {};
}

namespace {

struct Candidate {
    FixedSet data;
    // Normalized weights of an irrational point.
    std::optional<std::array<QuadElem, 2>> weights;
};

// exp(rho) between a rational point and an irrational one, exactly.
QuadElem exp_rho_irrational(const QMValuation& v, const Candidate& c, const DualGraph& g) {
    const auto& w = *c.weights;
    const Int d = w[0].d();
    auto conv = [&](const Rat& x) { return qe(d, x); };
    Cell cell = c.data.cell;
    QuadElem vp = b_intersection_generic<QuadElem>(g, v.where, v.index, qe(d, v.r), qe(d, v.s), cell.kind, cell.index,
                                                   w[0], w[1], conv);
    QuadElem pp = b_intersection_generic<QuadElem>(g, cell.kind, cell.index, w[0], w[1], cell.kind, cell.index, w[0],
                                                   w[1], conv);
    Rat vv = b_intersection(v, v, g);
    return (pp * vv) / (vp * vp);
}

// Positive roots sigma = s/r of b sigma^2 + (a - d) sigma - c = 0 whose
// points lie in the sector's cone, away from the ends of the cell.
void eigen_candidates(const SkeletonMap& f, int idx, std::vector<Candidate>& out) {
    const DualGraph& g = f.graph();
    const Sector& s = f.sectors()[idx];
    const IntMat2& m = s.m;
    if (m.b == 0 && m.c == 0 && m.a == m.d) {
        Candidate c;
        c.data.kind = FixedKind::Segment;
        c.data.cell = s.src;
        c.data.sector = idx;
        auto lo = cell_point(s.src, s.lo, g);
        c.data.segment_lo = normalize(cell_val(s.src, lo[0], lo[1], g), g);
        if (s.hi) {
            auto hi = cell_point(s.src, *s.hi, g);
            c.data.segment_hi = normalize(cell_val(s.src, hi[0], hi[1], g), g);
        }
        out.push_back(std::move(c));
        return;
    }
    const Rat A(m.b), B(m.a - m.d), C(-m.c);
    const Rat bu(base_b(s.src, g)), bv(s.src.kind == Where::Edge ? base_b(s.src, g, true) : 1);
    auto accept_rational = [&](const Rat& sigma) {
        if (sigma <= 0) return;
        Rat r = 1, q = sigma;
        Rat t = cell_param(s.src, r, q, g);
        if (!in_cone(s, t)) return;
        Candidate c;
        c.data.kind = FixedKind::DivisorialPoint;
        c.data.point = normalize(cell_val(s.src, r, q, g), g);
        c.data.cell = s.src;
        c.data.sector = idx;
        out.push_back(std::move(c));
    };
    if (A == 0) {
        if (B != 0) accept_rational(-C / B);
        return;
    }
    Rat disc = B * B - 4 * A * C;
    if (disc < 0) return;
    Int num = numerator(disc), den = denominator(disc);
    auto sn = exact_sqrt(num), sd = exact_sqrt(den);
    if (sn && sd) {
        Rat root(*sn, *sd);
        accept_rational((-B + root) / (2 * A));
        accept_rational((-B - root) / (2 * A));
        return;
    }
    // sqrt(disc) = f sqrt(d) / den with num * den = f^2 d.
    auto [fct, d] = square_free_part(num * den);
    for (int sgn_root : {1, -1}) {
        QuadElem sigma = (QuadElem(d, -B, Rat(fct, den) * sgn_root)) / (2 * A);
        if (sigma.sign() <= 0) continue;
        QuadElem t = s.src.kind == Where::Ray ? sigma / bu : (sigma * bv) / (sigma * bv + bu);
        if (t < qe(d, s.lo) || (s.hi && t > qe(d, *s.hi))) continue;
        Candidate c;
        c.data.kind = FixedKind::IrrationalPoint;
        c.data.cell = s.src;
        c.data.sector = idx;
        c.data.t = t;
        c.data.slope = sigma;
        c.data.slope_minpoly = minpoly_of(sigma);
        QuadElem r = s.src.kind == Where::Ray ? qe(d, 1 / bu) : qe(d, Rat(1)) / (sigma * bv + bu);
        c.weights = std::array<QuadElem, 2>{r, s.src.kind == Where::Ray ? sigma * r : sigma * r};
        auto conv = [&](const Rat& x) { return qe(d, x); };
        QuadElem alpha = -b_intersection_generic<QuadElem>(g, s.src.kind, s.src.index, (*c.weights)[0],
                                                           (*c.weights)[1], s.src.kind, s.src.index,
                                                           (*c.weights)[0], (*c.weights)[1], conv);
        c.data.skewness_minpoly = minpoly_of(alpha);
        out.push_back(std::move(c));
    }
}

void end_candidates(const SkeletonMap& f, std::vector<Candidate>& out) {
    std::set<int> seen;
    for (std::size_t i = 0; i < f.sectors().size(); ++i) {
        const Sector& s = f.sectors()[i];
        if (s.src.kind != Where::Ray || !(s.src == s.dst) || s.hi) continue;
        const IntMat2& m = s.m;
        if (m.b != 0) continue;
        if (m.d > m.a || (m.d == m.a && m.c > 0)) {
            Candidate c;
            c.data.kind = FixedKind::End;
            c.data.ray = s.src.index;
            c.data.cell = s.src;
            c.data.sector = static_cast<int>(i);
            seen.insert(s.src.index);
            out.push_back(std::move(c));
        }
    }
    for (const auto& t : f.tails())
        if (!seen.count(t.ray) && (t.lambda > 1 || (t.lambda == 1 && t.mu > 0))) {
            Candidate c;
            c.data.kind = FixedKind::End;
            c.data.ray = t.ray;
            c.data.cell = Cell{Where::Ray, t.ray};
            out.push_back(std::move(c));
        }
}

std::vector<int> domain_vertices(const SkeletonMap& f) {
    std::set<int> vs;
    const DualGraph& g = f.graph();
    for (const Cell& c : f.domain()) {
        if (c.kind == Where::Ray) {
            vs.insert(g.ray(c.index).base);
        } else {
            vs.insert(g.edge(c.index).u);
            vs.insert(g.edge(c.index).v);
        }
    }
    return {vs.begin(), vs.end()};
}

bool point_on_segment(const QMValuation& v, const Candidate& c, const SkeletonMap& f) {
    const Sector& s = f.sectors()[c.data.sector];
    for (const Rep& rep : representations(v, f))
        if (rep.cell == s.src && in_cone(s, rep.t)) return true;
    return false;
}

// Does the orbit of every domain vertex converge to the candidate?
bool attracts(const Candidate& c, const SkeletonMap& f, int budget, std::vector<std::string>& diag) {
    const DualGraph& g = f.graph();
    for (int vtx : domain_vertices(f)) {
        QMValuation cur = vertex_val(g, vtx);
        std::string who = g.prime(vtx).id;
        try {
            switch (c.data.kind) {
                case FixedKind::DivisorialPoint: {
                    Rat prev = angular_distance(cur, *c.data.point, g).exact_exp;
                    for (int k = 0; k < budget && prev != 1; ++k) {
                        cur = apply(cur, f).image;
                        Rat d = angular_distance(cur, *c.data.point, g).exact_exp;
                        if (d > prev) return false;
                        prev = d;
                    }
                    if (to_double(prev) - 1 > 1e-9) {
                        diag.push_back("orbit of " + who + " does not approach " + to_literal(*c.data.point, g));
                        return false;
                    }
                    break;
                }
                case FixedKind::IrrationalPoint: {
                    QuadElem prev = exp_rho_irrational(cur, c, g);
                    for (int k = 0; k < budget; ++k) {
                        cur = apply(cur, f).image;
                        QuadElem d = exp_rho_irrational(cur, c, g);
                        if (d > prev) return false;
                        prev = d;
                    }
                    if (prev.approx() - 1 > 1e-9) {
                        diag.push_back("orbit of " + who + " does not approach the irrational point");
                        return false;
                    }
                    break;
                }
                case FixedKind::End: {
                    Rat last = -1;
                    int climbing = 0;
                    for (int k = 0; k < budget; ++k) {
                        cur = apply(cur, f).image;
                        if (cur.where == Where::Ray && cur.index == c.data.ray) {
                            Rat t = monomial_parameter(cur, g);
                            climbing = t > last ? climbing + 1 : 0;
                            last = t;
                        } else {
                            climbing = 0;
                            last = -1;
                        }
                    }
                    if (climbing < 8) return false;
                    break;
                }
                case FixedKind::Segment: {
                    for (int k = 0; k < budget && !point_on_segment(cur, c, f); ++k) cur = apply(cur, f).image;
                    if (!point_on_segment(cur, c, f)) return false;
                    break;
                }
                case FixedKind::CircleRotation: return false;
            }
        } catch (const Error& e) {
            diag.push_back("orbit of " + who + ": " + e.what());
            return false;
        }
    }
    return true;
}

struct CycleLayout {
    std::vector<int> edges;
    std::vector<bool> forward;
    std::vector<Rat> offset;
    Rat length = 0;
};

std::optional<CycleLayout> cycle_layout(const SkeletonMap& f) {
    const DualGraph& g = f.graph();
    auto dom = f.domain();
    if (dom.empty()) return std::nullopt;
    std::map<int, int> degree;
    for (const Cell& c : dom) {
        if (c.kind != Where::Edge) return std::nullopt;
        ++degree[g.edge(c.index).u];
        ++degree[g.edge(c.index).v];
    }
    for (auto [v, d] : degree)
        if (d != 2) return std::nullopt;
    if (degree.size() != dom.size()) return std::nullopt;
    for (const auto& s : f.sectors())
        if (std::find(dom.begin(), dom.end(), s.dst) == dom.end()) return std::nullopt;
    CycleLayout lay;
    int cur = dom[0].index;
    bool fwd = true;
    int vertex = g.edge(cur).v;
    while (true) {
        lay.edges.push_back(cur);
        lay.forward.push_back(fwd);
        lay.offset.push_back(lay.length);
        lay.length += edge_length(g, cur);
        int next = -1;
        for (const Cell& c : dom)
            if (c.index != cur && (g.edge(c.index).u == vertex || g.edge(c.index).v == vertex)) next = c.index;
        if (next == dom[0].index) break;
        if (next < 0 || std::find(lay.edges.begin(), lay.edges.end(), next) != lay.edges.end()) return std::nullopt;
        fwd = g.edge(next).u == vertex;
        vertex = fwd ? g.edge(next).v : g.edge(next).u;
        cur = next;
    }
    if (lay.edges.size() != dom.size()) return std::nullopt;
    return lay;
}

Rat cycle_position(const QMValuation& v, const CycleLayout& lay, const DualGraph& g) {
    if (v.where == Where::Vertex) {
        for (std::size_t i = 0; i < lay.edges.size(); ++i) {
            const Edge& e = g.edge(lay.edges[i]);
            if ((lay.forward[i] ? e.u : e.v) == v.index) return lay.offset[i];
        }
        throw Error("outside_domain", "vertex not on the cycle");
    }
    for (std::size_t i = 0; i < lay.edges.size(); ++i)
        if (lay.edges[i] == v.index) {
            Rat t = monomial_parameter(v, g);
            return lay.offset[i] + (lay.forward[i] ? t : 1 - t) * edge_length(g, v.index);
        }
    throw Error("outside_domain", "point not on the cycle");
}

}  // namespace

FixedSet find_fixed_set(const SkeletonMap& f, int budget) {
    const DualGraph& g = f.graph();
    std::vector<Candidate> cands;
    for (int v : domain_vertices(f)) {
        QMValuation p = vertex_val(g, v);
        try {
            if (same_point(apply(p, f).image, p, g)) {
                Candidate c;
                c.data.kind = FixedKind::DivisorialPoint;
                c.data.point = p;
                cands.push_back(std::move(c));
            }
        } catch (const Error&) {
        }
    }
    for (std::size_t i = 0; i < f.sectors().size(); ++i)
        if (f.sectors()[i].src == f.sectors()[i].dst) eigen_candidates(f, static_cast<int>(i), cands);
    end_candidates(f, cands);
    // Rational eigen-directions found twice (shared sector boundary) or at a vertex.
    std::vector<Candidate> uniq;
    for (auto& c : cands) {
        bool dup = false;
        for (const auto& u : uniq)
            if (c.data.kind == FixedKind::DivisorialPoint && u.data.kind == FixedKind::DivisorialPoint &&
                same_point(*c.data.point, *u.data.point, g))
                dup = true;
        if (!dup) uniq.push_back(std::move(c));
    }
    std::vector<std::string> diag;
    for (auto& c : uniq)
        if (attracts(c, f, budget, diag)) {
            c.data.diagnostics = diag;
            return c.data;
        }
    FixedSet out;
    out.diagnostics = diag;
    if (uniq.empty()) {
        if (auto lay = cycle_layout(f)) {
            out.kind = FixedKind::CircleRotation;
            if (f.rotation()) {
                out.rational = f.rotation()->rational;
                out.p = f.rotation()->p;
                out.q = f.rotation()->q;
                out.beta = f.rotation()->beta;
                if (!out.rational.value()) out.q = 0;
                out.diagnostics.push_back("rotation decided from cusp arithmetic");
                return out;
            }
            const Edge& e0 = g.edge(lay->edges[0]);
            QMValuation start = vertex_val(g, lay->forward[0] ? e0.u : e0.v), cur = start;
            Rat total = 0;
            for (int k = 1; k <= budget; ++k) {
                QMValuation next = apply(cur, f).image;
                Rat step = cycle_position(next, *lay, g) - cycle_position(cur, *lay, g);
                if (step <= 0) step += lay->length;
                total += step;
                cur = next;
                if (same_point(cur, start, g)) {
                    out.rational = true;
                    out.q = k;
                    out.p = numerator(Rat(total / lay->length));
                    out.beta = to_double(total / lay->length) / k;
                    return out;
                }
            }
            out.beta = to_double(total / lay->length) / budget;
            out.diagnostics.push_back("no period found within " + std::to_string(budget) + " exact iterations");
            std::ostringstream msg;
            msg << "rotation rationality unresolved after " << budget << " iterations (estimate "
                << *out.beta << ")";
            throw Error("inconclusive", msg.str());
        }
    }
    std::string msg = "no attracting fixed set found among " + std::to_string(uniq.size()) + " candidates";
    for (const auto& d : diag) msg += "; " + d;
    throw Error("inconclusive", msg);
}

QuadraticInteger dynamical_degree(const SkeletonMap& f, const FixedSet& fixed) {
    QuadraticInteger q;
    switch (fixed.kind) {
        case FixedKind::DivisorialPoint: {
            Rat rate = apply(*fixed.point, f).rate;
            q.minpoly = primitive_poly({Rat(1), -rate});
            break;
        }
        case FixedKind::IrrationalPoint: {
            const IntMat2& m = f.sectors()[fixed.sector].m;
            q.minpoly = {Int(1), -m.trace(), m.det()};
            break;
        }
        case FixedKind::Segment: {
            q.minpoly = {Int(1), -f.sectors()[fixed.sector].m.a};
            break;
        }
        case FixedKind::End: {
            if (fixed.sector < 0) throw Error("missing_data", "the end is known only through tail data; no rate");
            q.minpoly = {Int(1), -f.sectors()[fixed.sector].m.a};
            break;
        }
        case FixedKind::CircleRotation: {
            Int det = f.sectors().front().m.det();
            for (const auto& s : f.sectors())
                if (s.m.det() != det) throw Error("invalid_germ", "sector determinants differ on a rotation");
            if (auto root = exact_sqrt(det))
                q.minpoly = {Int(1), -*root};
            else
                q.minpoly = {Int(1), Int(0), -det};
            break;
        }
    }
    q.approx = largest_root(q.minpoly);
    return q;
}

QuadraticInteger dynamical_degree(const SkeletonMap& f) { return dynamical_degree(f, find_fixed_set(f)); }

NonexpansionReport check_nonexpansion(const SkeletonMap& f,
                                      const std::vector<std::pair<QMValuation, QMValuation>>& pairs) {
    const DualGraph& g = f.graph();
    NonexpansionReport rep;
    rep.strictness_required = !f.finite();
    for (const auto& [v, mu] : pairs) {
        NonexpansionSample s{v, mu, angular_distance(v, mu, g).exact_exp, 0};
        s.after = angular_distance(apply(v, f).image, apply(mu, f).image, g).exact_exp;
        s.ok = s.after <= s.before;
        s.strict = s.after < s.before;
        rep.all_ok = rep.all_ok && s.ok;
        rep.all_strict = rep.all_strict && s.strict;
        rep.all_equal = rep.all_equal && s.after == s.before;
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

QMValuation random_point(const SkeletonMap& f, std::mt19937_64& rng) {
    const DualGraph& g = f.graph();
    auto dom = f.domain();
    std::uniform_int_distribution<std::size_t> pick(0, dom.size() - 1);
    std::uniform_int_distribution<int> den(1, 64);
    const Cell c = dom[pick(rng)];
    int q = den(rng);
    if (c.kind == Where::Edge) {
        std::uniform_int_distribution<int> num(0, q);
        return edge_at(g, c.index, Rat(num(rng), q));
    }
    std::uniform_int_distribution<int> num(0, 16 * q);
    return ray_at(g, c.index, Rat(num(rng), q));
}

namespace {

// Point of a cell with homogeneous integer weights (r, s).
QMValuation weights_point(const Cell& c, const Int& r, const Int& s, const DualGraph& g) {
    return normalize(cell_val(c, Rat(r), Rat(s), g), g);
}

bool within(const Sector& s, const Cell& c, const Rat& t) { return s.src == c && in_cone(s, t); }

// Parameter of a normalized point read on cell c, if it lies there.
std::optional<Rat> param_on(const QMValuation& v, const Cell& c, const DualGraph& g) {
    if (v.where == c.kind && v.index == c.index) return monomial_parameter(v, g);
    if (v.where != Where::Vertex) return std::nullopt;
    if (c.kind == Where::Ray) return g.ray(c.index).base == v.index ? std::optional<Rat>(0) : std::nullopt;
    if (g.edge(c.index).u == v.index) return Rat(0);
    if (g.edge(c.index).v == v.index) return Rat(1);
    return std::nullopt;
}

StabilityReport interval_report(const SkeletonMap& f, const FixedSet& fixed) {
    const DualGraph& g = f.graph();
    const Cell c = fixed.cell;
    const Sector& sec = f.sectors()[fixed.sector];
    // Position of the fixed point as a slope s/r, compared exactly.
    auto cmp_slope = [&](const Int& r, const Int& s) -> int {  // sign(slope(r,s) - slope*)
        if (r == 0) return 1;
        Rat sl(s, r);
        if (fixed.slope) {
            QuadElem diff = qe(fixed.slope->d(), sl) - *fixed.slope;
            return diff.sign();
        }
        const QMValuation& p = *fixed.point;
        Rat ps = p.s / p.r;
        return sl < ps ? -1 : (sl > ps ? 1 : 0);
    };
    std::array<Int, 2> lo{1, 0}, hi{0, 1};
    int depth = 0;
    if (c.kind == Where::Ray) {
        // Free blow-ups along the curve first: (1,1), (1,2), ...
        hi = {1, 1};
        depth = 1;
        while (cmp_slope(hi[0], hi[1]) < 0) {
            lo = hi;
            hi = {1, hi[1] + 1};
            ++depth;
        }
    }
    StabilityReport rep;
    rep.verdict = to_string(fixed.kind);
    for (; depth <= 64; ++depth) {
        QMValuation pl = weights_point(c, lo[0], lo[1], g), ph = weights_point(c, hi[0], hi[1], g);
        Rat tl = *param_on(pl, c, g), th = *param_on(ph, c, g);
        if (cmp_slope(hi[0], hi[1]) == 0 || cmp_slope(lo[0], lo[1]) == 0) {
            rep.endpoints = {cmp_slope(lo[0], lo[1]) == 0 ? pl : ph};
            rep.blowups = depth;
            rep.instruction = "realize the fixed divisorial point";
            return rep;
        }
        if (within(sec, c, tl) && within(sec, c, th)) {
            auto il = param_on(apply(pl, f).image, c, g), ih = param_on(apply(ph, f).image, c, g);
            if (il && ih && *il >= tl && *il <= th && *ih >= tl && *ih <= th) {
                rep.endpoints = {pl, ph};
                rep.blowups = depth;
                rep.cyclic_quotient = true;
                rep.instruction = "realize endpoints, contract interior chain";
                return rep;
            }
        }
        std::array<Int, 2> mid{lo[0] + hi[0], lo[1] + hi[1]};
        if (cmp_slope(mid[0], mid[1]) > 0)
            hi = mid;
        else
            lo = mid;
    }
    rep.verdict = "unresolved";
    rep.instruction = "no invariant interval found within 64 refinements";
    return rep;
}

StabilityReport star_report(const SkeletonMap& f, const FixedSet& fixed) {
    const DualGraph& g = f.graph();
    const int vtx = fixed.point->index;
    struct Arm {
        Cell cell;
        bool at_u;
    };
    std::vector<Arm> arms;
    for (const Cell& c : f.domain()) {
        if (c.kind == Where::Ray) {
            if (g.ray(c.index).base == vtx) arms.push_back({c, true});
        } else {
            if (g.edge(c.index).u == vtx) arms.push_back({c, true});
            if (g.edge(c.index).v == vtx) arms.push_back({c, false});
        }
    }
    StabilityReport rep;
    rep.verdict = to_string(fixed.kind);
    for (int k = 1; k <= 64; ++k) {
        std::vector<QMValuation> ends;
        std::vector<Rat> bound;
        for (const Arm& a : arms) {
            QMValuation p = a.at_u ? weights_point(a.cell, k, 1, g) : weights_point(a.cell, 1, k, g);
            ends.push_back(p);
            bound.push_back(*param_on(p, a.cell, g));
        }
        bool ok = true;
        for (std::size_t i = 0; i < arms.size() && ok; ++i) {
            // The arm must sit in a single sector and map into the star.
            Rat t0 = arms[i].at_u ? Rat(0) : Rat(1);
            bool single = false;
            for (const auto& s : f.sectors())
                single = single || (within(s, arms[i].cell, t0) && within(s, arms[i].cell, bound[i]));
            if (!single) {
                ok = false;
                break;
            }
            QMValuation img = apply(ends[i], f).image;
            bool inside = same_point(img, *fixed.point, g);
            for (std::size_t j = 0; j < arms.size() && !inside; ++j) {
                auto t = param_on(img, arms[j].cell, g);
                if (!t) continue;
                inside = arms[j].at_u ? *t <= bound[j] : *t >= bound[j];
            }
            ok = inside;
        }
        if (ok) {
            rep.endpoints = {*fixed.point};
            rep.endpoints.insert(rep.endpoints.end(), ends.begin(), ends.end());
            rep.blowups = 0;
            rep.instruction = "realize the fixed divisorial point; its star neighbourhood is invariant";
            return rep;
        }
    }
    rep.verdict = "unresolved";
    rep.instruction = "no invariant star neighbourhood found within 64 refinements";
    return rep;
}

}  // namespace

StabilityReport stability_report(const SkeletonMap& f, const FixedSet& fixed) {
    const DualGraph& g = f.graph();
    switch (fixed.kind) {
        case FixedKind::DivisorialPoint:
            if (fixed.point->where == Where::Vertex) return star_report(f, fixed);
            return interval_report(f, fixed);
        case FixedKind::IrrationalPoint: return interval_report(f, fixed);
        case FixedKind::Segment: {
            StabilityReport rep;
            rep.verdict = to_string(fixed.kind);
            rep.endpoints = {*fixed.segment_lo};
            if (fixed.segment_hi) rep.endpoints.push_back(*fixed.segment_hi);
            rep.cyclic_quotient = true;
            rep.instruction = "realize endpoints, contract interior chain";
            return rep;
        }
        case FixedKind::End: {
            StabilityReport rep;
            rep.verdict = to_string(fixed.kind);
            Rat t0 = fixed.sector >= 0 ? f.sectors()[fixed.sector].lo : Rat(0);
            rep.witness = ray_at(g, fixed.ray, t0);
            rep.instruction = "blow up toward the end until free-point fixed";
            return rep;
        }
        case FixedKind::CircleRotation: {
            StabilityReport rep;
            rep.verdict = fixed.rational.value_or(false) ? "periodic rotation" : "irrational rotation";
            rep.instruction = fixed.rational.value_or(false)
                                  ? "a finite iterate fixes the cycle pointwise up to realizing its period orbit"
                                  : "no geometrically stable model exists";
            return rep;
        }
    }
    return {};
}

}  // namespace valdyn
