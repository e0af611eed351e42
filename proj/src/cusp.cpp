#include "valdyn/cusp.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <sstream>

namespace valdyn {

namespace {

using Float = boost::multiprecision::cpp_dec_float_50;

Float to_float(const Rat& x) {
    return Float(numerator(x).str()) / Float(denominator(x).str());
}

Float to_float(const QuadElem& x) { return to_float(x.a()) + to_float(x.b()) * sqrt(Float(x.d().str())); }

long floor_mod(long n, long m) { return ((n % m) + m) % m; }

}  // namespace

int CuspData::k(long n) const { return cycle[floor_mod(n, r())]; }

QuadElem cf_to_quadratic(const std::vector<int>& cycle) {
    if (cycle.empty()) throw Error("invalid_cusp", "the cycle is empty");
    bool all_two = true;
    for (int k : cycle) {
        if (k < 2) throw Error("invalid_cusp", "cycle entries must be at least 2");
        all_two = all_two && k == 2;
    }
    if (all_two) throw Error("invalid_cusp", "cycle entries must not all equal 2");
    // omega = T(omega) with T the composition of t -> k - 1/t.  The
    // recurrence e_{n+1} = k_n e_n - e_{n-1} started at (1, omega) closes up
    // only if omega expands along k_0, k_{r-1}, ..., k_1; for r <= 2 this is
    // the cycle itself.
    std::vector<int> order{cycle.front()};
    order.insert(order.end(), cycle.rbegin(), cycle.rend() - 1);
    Int A = 1, B = 0, C = 0, D = 1;
    for (int k : order) {
        Int a2 = A * k + B, b2 = -A, c2 = C * k + D, d2 = -C;
        A = a2, B = b2, C = c2, D = d2;
    }
    Int disc = (A + D) * (A + D) - 4;  // det T = 1
    auto [f, d] = square_free_part(disc);
    for (int sgn_root : {1, -1}) {
        QuadElem w(d, Rat(A - D, 2 * C), Rat(f * sgn_root, 2 * C));
        if (w > QuadElem(d, 1) && w.conj() < QuadElem(d, 1) && w.conj().sign() > 0) return w;
    }
    throw Error("invalid_cusp", "no root with omega > 1 > omega' > 0");
}

QuadElem vertex_sequence(const CuspData& c, long n) {
    QuadElem prev(c.d(), 1), cur = c.omega;  // e_0, e_1
    if (n == 0) return prev;
    if (n > 0) {
        for (long i = 1; i < n; ++i) {
            QuadElem next = cur * Rat(c.k(i)) - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    // Backward: e_{m-1} = k_m e_m - e_{m+1}.
    QuadElem up = cur, here = prev;  // e_1, e_0
    for (long m = 0; m > n; --m) {
        QuadElem down = here * Rat(c.k(m)) - up;
        up = here;
        here = down;
    }
    return here;
}

std::pair<Rat, Rat> lattice_coords(const QuadElem& v, const CuspData& c) {
    if (v.d() != c.d()) throw Error("mixed_field", "element lies in another quadratic field");
    Rat y = v.b() / c.omega.b();
    return {v.a() - y * c.omega.a(), y};
}

bool in_lattice(const QuadElem& v, const CuspData& c) {
    auto [x, y] = lattice_coords(v, c);
    return is_integer(x) && is_integer(y);
}

QuadElem fundamental_unit(const CuspData& c) {
    QuadElem e = vertex_sequence(c, c.r());
    if (!e.is_unit() || !e.is_totally_positive() || !(e > QuadElem(c.d(), 1)) || !in_lattice(e, c) ||
        !in_lattice(e * c.omega, c))
        throw Error("invalid_cusp", "the vertex sequence does not close up to a unit");
    return e;
}

CuspData make_cusp(const std::vector<int>& cycle, int s) {
    if (s < 1) throw Error("invalid_cusp", "the unit exponent s must be positive");
    CuspData c;
    c.cycle = cycle;
    c.s = s;
    c.omega = cf_to_quadratic(cycle);
    c.eps_omega = fundamental_unit(c);
    c.eps = c.eps_omega.pow(static_cast<unsigned>(s));
    return c;
}

AlphaCheck validate_alpha(const QuadElem& alpha, const CuspData& c) {
    AlphaCheck out;
    if (alpha.d() != c.d()) throw Error("mixed_field", "alpha lies in another quadratic field");
    Rat n = alpha.norm();
    if (!alpha.is_totally_positive()) {
        out.reason = "alpha is not totally positive";
        return out;
    }
    if (!in_lattice(alpha, c) || !in_lattice(alpha * c.omega, c)) {
        out.reason = "alpha does not preserve the lattice";
        return out;
    }
    if (!is_integer(n) || n <= 0) {
        out.reason = "the norm of alpha is not a positive integer";
        return out;
    }
    out.degree = numerator(n);
    out.ok = true;
    return out;
}

Rotation rotation_number(const QuadElem& alpha, const CuspData& c) {
    AlphaCheck chk = validate_alpha(alpha, c);
    if (!chk.ok) throw Error("invalid_alpha", chk.reason);
    Rotation out;
    QuadElem u = alpha / alpha.conj();
    Float beta = log(to_float(u)) / (2 * log(to_float(c.eps)));
    out.beta = static_cast<double>(beta);
    out.beta_digits = beta.str(30);
    out.rational = u.is_unit();
    if (!out.rational) return out;
    // u^q = eps_omega^k for some q: then beta = k / (2 s q).
    const QuadElem one(c.d(), 1);
    for (unsigned q = 1; q <= 64; ++q) {
        QuadElem w = u.pow(q);
        long k = 0;
        QuadElem cur = w;
        while (cur > one && k < 4096) cur = cur / c.eps_omega, ++k;
        while (cur < one && k > -4096) cur = cur * c.eps_omega, --k;
        if (cur == one) {
            Int num = k, den = 2 * c.s * static_cast<long>(q);
            Int g = boost::multiprecision::gcd(abs(num), den);
            if (g == 0) g = 1;
            out.p = num / g;
            out.q = den / g;
            if (out.p == 0) out.q = 1;
            return out;
        }
    }
    throw Error("inconclusive", "unit ratio is not a small power of the fundamental unit");
}

QuadElem irrational_example(const CuspData& c, int search_bound) {
    const Rat a = c.eps.a(), b = c.eps.b();
    for (Int p = floor_rat(a) + 1; p <= floor_rat(a) + search_bound; ++p) {
        QuadElem alpha(c.d(), Rat(p), b);
        if (!validate_alpha(alpha, c).ok) continue;
        if (!rotation_number(alpha, c).rational) return alpha;
    }
    throw Error("inconclusive", "search bound exceeded without an irrational rotation");
}

DualGraph cusp_dual_graph(const CuspData& c) {
    const int n = c.r() * c.s;
    if (n < 2) throw Error("invalid_cusp", "the cycle needs at least two components (refine with s)");
    std::vector<Prime> primes;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        primes.push_back(Prime{"E" + std::to_string(i), 0, -c.k(i), 1});
        edges.push_back(Edge{i, (i + 1) % n});
    }
    return DualGraph(std::move(primes), std::move(edges));
}

std::pair<Rat, Rat> face_coords(const QuadElem& v, const CuspData& c, long m) {
    QuadElem p = vertex_sequence(c, m), q = vertex_sequence(c, m + 1);
    Rat det = p.a() * q.b() - q.a() * p.b();
    Rat x = (v.a() * q.b() - q.a() * v.b()) / det;
    Rat y = (p.a() * v.b() - v.a() * p.b()) / det;
    return {x, y};
}

long locate_face(const QuadElem& v, const CuspData& c) {
    if (!v.is_totally_positive()) throw Error("invalid_alpha", "only totally positive vectors lie in the cone");
    for (long span = 0; span < 100000; ++span)
        for (long m : {span, -span - 1}) {
            auto [x, y] = face_coords(v, c, m);
            if (x >= 0 && y > 0) return m;
        }
    throw Error("inconclusive", "vector not located in the fan");
}

SkeletonMap induced_skeleton_map(const QuadElem& alpha, const CuspData& c) {
    AlphaCheck chk = validate_alpha(alpha, c);
    if (!chk.ok) throw Error("invalid_alpha", chk.reason);
    DualGraph g = cusp_dual_graph(c);
    const long n = c.r() * c.s;
    std::vector<Sector> sectors;
    for (long face = 0; face < n; ++face) {
        QuadElem g0 = alpha * vertex_sequence(c, face), g1 = alpha * vertex_sequence(c, face + 1);
        long m0 = locate_face(g0, c), m1 = locate_face(g1, c);
        // A start vector on the ray e_{m0+1} opens the next face.
        if (face_coords(g0, c, m0).first == 0) ++m0;
        QuadElem ainv = QuadElem(c.d(), 1) / alpha;
        Rat lo = 0;
        for (long m = m0; m <= m1; ++m) {
            Rat hi = 1;
            if (m < m1) {
                auto [x, y] = face_coords(ainv * vertex_sequence(c, m + 1), c, face);
                hi = y / (x + y);
            }
            auto [x0, y0] = face_coords(g0, c, m);
            auto [x1, y1] = face_coords(g1, c, m);
            IntMat2 mat{numerator(x0), numerator(x1), numerator(y0), numerator(y1)};
            if (!is_integer(x0) || !is_integer(x1) || !is_integer(y0) || !is_integer(y1))
                throw Error("invalid_alpha", "alpha does not act on the lattice");
            sectors.push_back(Sector{Cell{Where::Edge, static_cast<int>(face)}, lo, hi, mat,
                                     Cell{Where::Edge, static_cast<int>(floor_mod(m, n))}});
            lo = hi;
        }
    }
    Rotation rot = rotation_number(alpha, c);
    RotationInfo info{rot.rational, rot.p, rot.q, rot.beta};
    return SkeletonMap(std::move(g), std::move(sectors), /*finite=*/true, {}, info);
}

}  // namespace valdyn
