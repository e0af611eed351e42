#include "valdyn/transport.hpp"

namespace valdyn {

GermResolutionTable::GermResolutionTable(DualGraph src, DualGraph dst, std::vector<PrimeMap> prime_maps,
                                         std::vector<ContractedCurve> curves, std::optional<std::vector<RfTerm>> rf)
    : source(std::move(src)), target(std::move(dst)), contracted(std::move(curves)), r_f(std::move(rf)) {
    const std::size_t n = source.size();
    std::vector<std::optional<PrimeMap>> slots(n);
    for (const auto& pm : prime_maps) {
        if (pm.src < 0 || pm.src >= static_cast<int>(n)) throw Error("unknown_prime", "prime map source out of range");
        if (pm.dst < 0 || pm.dst >= static_cast<int>(target.size()))
            throw Error("unknown_prime", "prime map target out of range");
        if (pm.k < 1 || pm.e < 1) throw Error("invalid_table", "k and e must be positive integers");
        if (slots[pm.src]) throw Error("invalid_table", "source prime " + source.prime(pm.src).id + " mapped twice");
        slots[pm.src] = pm;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!slots[i]) throw Error("invalid_table", "source prime " + source.prime(i).id + " has no image");
        maps.push_back(*slots[i]);
    }
    auto check_attach = [&](const std::vector<int>& a, const std::string& what) {
        if (a.size() != n) throw Error("invalid_table", what + ": attachment needs one entry per source prime");
        bool nonzero = false;
        for (int x : a) {
            if (x < 0) throw Error("invalid_table", what + ": negative attachment");
            nonzero |= x > 0;
        }
        if (!nonzero) throw Error("invalid_table", what + ": attachment vector is zero");
    };
    for (const auto& c : contracted) {
        check_attach(c.attach, "curve " + c.label);
        if (c.dst < 0 || c.dst >= static_cast<int>(target.size()))
            throw Error("unknown_prime", "curve " + c.label + " target out of range");
        if (c.k < 1 || c.m < 1) throw Error("invalid_table", "curve " + c.label + ": k and m must be positive");
    }
    if (r_f)
        for (const auto& t : *r_f) check_attach(t.attach, "R_f term " + t.curve);
}

std::vector<Rat> curve_pullback_coeffs(const std::vector<int>& attach, const DualGraph& g) {
    const Mat& inv = g.dual_basis();
    std::vector<Rat> c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) c[i] -= inv(i, j) * attach[j];
    return c;
}

Rat curve_dual_coefficient(const GermResolutionTable& tbl, int curve, int prime) {
    const auto& c = tbl.contracted.at(curve);
    const Mat& inv = tbl.source.dual_basis();
    Rat x = 0;
    for (std::size_t j = 0; j < tbl.source.size(); ++j) x -= inv(j, prime) * c.attach[j];
    return x;
}

std::vector<Rat> pushforward_dual(int prime, const GermResolutionTable& tbl) {
    const Mat& inv = tbl.target.dual_basis();
    const PrimeMap& pm = tbl.map_of(prime);
    std::vector<Rat> out(tbl.target.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pm.k * inv(i, pm.dst);
    for (std::size_t c = 0; c < tbl.contracted.size(); ++c) {
        Rat coeff = curve_dual_coefficient(tbl, static_cast<int>(c), prime) * tbl.contracted[c].k;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= coeff * inv(i, tbl.contracted[c].dst);
    }
    return out;
}

CurveDivisor pullback_dual(int target_prime, const GermResolutionTable& tbl) {
    const Mat& src_inv = tbl.source.dual_basis();
    const Mat& dst_inv = tbl.target.dual_basis();
    CurveDivisor out{std::vector<Rat>(tbl.source.size()), std::vector<Rat>(tbl.contracted.size())};
    for (const auto& pm : tbl.maps) {
        if (pm.dst != target_prime) continue;
        for (std::size_t i = 0; i < out.exceptional.size(); ++i) out.exceptional[i] += pm.e * src_inv(i, pm.src);
    }
    for (std::size_t c = 0; c < tbl.contracted.size(); ++c)
        out.curves[c] = -dst_inv(tbl.contracted[c].dst, target_prime) * tbl.contracted[c].k;
    return out;
}

std::vector<Rat> curve_hat_divisor(int curve, const GermResolutionTable& tbl) {
    const auto& c = tbl.contracted.at(curve);
    const Mat& inv = tbl.source.dual_basis();
    const std::size_t n = tbl.source.size();
    std::vector<Rat> out(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out[i] += c.attach[j] * inv(i, j);
    // C-hat . E_j = -attach_j + (sum_i attach_i E-check_i) . E_j must vanish.
    Mat m = tbl.source.intersection_matrix();
    std::vector<Rat> check = m * out;
    for (std::size_t j = 0; j < n; ++j)
        if (check[j] != c.attach[j]) throw Error("singular_matrix", "curve class is not orthogonal to the primes");
    return out;
}

Rat attraction_rate_from_table(int prime, const GermResolutionTable& tbl) {
    const PrimeMap& pm = tbl.map_of(prime);
    return Rat(tbl.target.prime(pm.dst).b, tbl.source.prime(prime).b) * pm.k;
}

Rat intersect(const std::vector<Rat>& d1, const std::vector<Rat>& d2, const DualGraph& g) {
    return bilinear(d1, g.intersection_matrix(), d2);
}

Rat intersect(const CurveDivisor& d1, const std::vector<Rat>& d2, const DualGraph& g) {
    return intersect(d1.exceptional, d2, g);
}

Rat ramification_value(const QMValuation& v, const DualGraph& g, const std::vector<RfTerm>& r_f) {
    Rat total = 0;
    for (const auto& term : r_f) {
        std::vector<Rat> c = curve_pullback_coeffs(term.attach, g);
        Rat val;
        switch (v.where) {
            case Where::Vertex: val = v.r * c[v.index]; break;
            case Where::Edge: val = v.r * c[g.edge(v.index).u] + v.s * c[g.edge(v.index).v]; break;
            case Where::Ray:
                val = v.r * c[g.ray(v.index).base];
                if (g.ray(v.index).label == term.curve) val += v.s;
                break;
        }
        total += term.coeff * val;
    }
    return total;
}

Rat ramification_value(const QMValuation& v, const GermResolutionTable& tbl) {
    if (!tbl.r_f) throw Error("missing_data", "the table carries no ramification divisor");
    return ramification_value(v, tbl.source, *tbl.r_f);
}

JacobianResult jacobian_check(const QMValuation& v, const DualGraph& source, const DualGraph& target,
                              const std::vector<RfTerm>& r_f, const QMValuation& image, const Rat& rate) {
    QMValuation nv = normalize(v, source), ni = normalize(image, target);
    JacobianResult out;
    out.lhs = rate * log_discrepancy(ni, target, canonical_coeffs(target));
    out.rhs = log_discrepancy(nv, source, canonical_coeffs(source)) + ramification_value(nv, source, r_f);
    out.holds = out.lhs == out.rhs;
    return out;
}

JacobianResult jacobian_check(const QMValuation& v, const GermResolutionTable& tbl, const QMValuation& image,
                              const Rat& rate) {
    if (!tbl.r_f) throw Error("missing_data", "the table carries no ramification divisor");
    return jacobian_check(v, tbl.source, tbl.target, *tbl.r_f, image, rate);
}

JacobianResult jacobian_check(const QMValuation& v, const SkeletonMap& f, const std::vector<RfTerm>& r_f) {
    Step step = apply(v, f);
    return jacobian_check(normalize(v, f.graph()), f.graph(), f.graph(), r_f, step.image, step.rate);
}

}  // namespace valdyn
