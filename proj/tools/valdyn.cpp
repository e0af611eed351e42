// Command-line driver: loads TOML fixtures, runs one library operation and
// prints a JSON report on stdout.
#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include "valdyn/io.hpp"

using json = nlohmann::json;
using namespace valdyn;

namespace {

json rat(const Rat& x) { return to_string(x); }

json integer(const Int& x) {
    if (x >= std::numeric_limits<long long>::min() && x <= std::numeric_limits<long long>::max())
        return x.convert_to<long long>();
    return x.str();
}

// Floats appear only in approximation fields, at 12 significant digits.
json approx(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

json rats(const std::vector<Rat>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(rat(x));
    return out;
}

json ints(const std::vector<Int>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(integer(x));
    return out;
}

json by_prime(const std::vector<Rat>& v, const DualGraph& g) {
    json out = json::object();
    for (std::size_t i = 0; i < v.size(); ++i) out[g.prime(i).id] = rat(v[i]);
    return out;
}

json valuation(const QMValuation& v, const DualGraph& g) {
    json out = {{"literal", to_literal(v, g)}};
    if (v.where != Where::Vertex) out["t"] = rat(monomial_parameter(v, g));
    return out;
}

json quad(const QuadElem& x) { return x.str(); }

json degree_json(const QuadraticInteger& q) { return {{"minpoly", ints(q.minpoly)}, {"approx", approx(q.approx)}}; }

json fixed_json(const FixedSet& f, const SkeletonMap& m) {
    const DualGraph& g = m.graph();
    json out = {{"kind", to_string(f.kind)}};
    if (f.point) out["point"] = valuation(*f.point, g);
    if (f.kind == FixedKind::IrrationalPoint) {
        out["cell"] = cell_literal(f.cell, g);
        out["t"] = quad(*f.t);
        out["slope"] = quad(*f.slope);
        out["slope_minpoly"] = ints(f.slope_minpoly);
        out["skewness_minpoly"] = ints(f.skewness_minpoly);
        out["approx"] = approx(f.t->approx());
    }
    if (f.kind == FixedKind::End) out["ray"] = g.ray(f.ray).label;
    if (f.segment_lo) out["segment"] = {valuation(*f.segment_lo, g)};
    if (f.segment_hi) out["segment"].push_back(valuation(*f.segment_hi, g));
    if (f.rational) {
        out["rational"] = *f.rational;
        if (*f.rational) out["angle"] = integer(f.p).dump() + "/" + integer(f.q).dump();
    }
    if (f.beta) out["beta"] = approx(*f.beta);
    if (!f.diagnostics.empty()) out["diagnostics"] = f.diagnostics;
    return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int fail(const std::string& kind, const std::string& message) {
    emit({{"error", {{"kind", kind}, {"message", message}}}});
    return kind == "inconclusive" ? 3 : 2;
}

struct Options {
    std::string file;
    std::string nu, mu, image, prime, alpha, rate;
    std::string dot;
    int n = 8;
    int m_max = 6, n_max = 8;
    int samples = 100;
    std::uint64_t seed = 1;
};

const DualGraph& need_graph(const Fixture& fx) {
    if (!fx.graph) throw Error("missing_data", fx.path.string() + " describes no graph");
    return *fx.graph;
}

const SkeletonMap& need_germ(const Fixture& fx) {
    if (!fx.germ) throw Error("missing_data", fx.path.string() + " describes no germ");
    return *fx.germ;
}

const GermResolutionTable& need_table(const Fixture& fx) {
    if (!fx.table) throw Error("missing_data", fx.path.string() + " describes no transport table");
    return *fx.table;
}

const std::string& need(const std::string& value, const char* flag) {
    if (value.empty()) throw Error("missing_data", std::string("option ") + flag + " is required");
    return value;
}

json run_graph(const std::string& cmd, const Fixture& fx) {
    const DualGraph& g = need_graph(fx);
    if (cmd == "check") {
        GraphCheck c = check_graph(g);
        return {{"connected", c.connected},
                {"negative_definite", c.negative_definite},
                {"nef", c.nef},
                {"minors", rats(c.minors)},
                {"primes", g.size()},
                {"edges", g.edges().size()}};
    }
    if (cmd == "dualbasis") {
        json cols = json::object();
        const Mat& inv = g.dual_basis();
        for (std::size_t j = 0; j < g.size(); ++j) cols[g.prime(j).id] = by_prime(inv.column(j), g);
        return {{"dual_basis", cols}};
    }
    if (cmd == "discrepancy") {
        DiscrepancyTable t = canonical_coeffs(g);
        return {{"k", by_prime(t.k, g)}, {"a_div", by_prime(t.a_div, g)}, {"a_norm", by_prime(t.a_norm, g)}};
    }
    if (cmd == "skeleton") {
        Subgraph s = essential_skeleton(g);
        json primes = json::array(), edges = json::array();
        for (int p : s.primes) primes.push_back(g.prime(p).id);
        for (int e : s.edges) edges.push_back(cell_literal(Cell{Where::Edge, e}, g));
        return {{"primes", primes}, {"edges", edges}};
    }
    if (cmd == "classify") {
        Classification c = classify_singularity(g);
        return {{"class", to_string(c.cls)}, {"type", c.type}, {"min_a_norm", rat(c.min_a_norm)}};
    }
    throw Error("parse_error", "unknown graph command '" + cmd + "'");
}

json run_val(const std::string& cmd, const Fixture& fx, const Options& o) {
    const DualGraph& g = need_graph(fx);
    QMValuation nu = normalize(parse_valuation(need(o.nu, "--nu"), g), g);
    if (cmd == "skewness") return {{"valuation", valuation(nu, g)}, {"skewness", rat(skewness(nu, g))}};
    QMValuation mu = normalize(parse_valuation(need(o.mu, "--mu"), g), g);
    if (cmd == "beta") return {{"beta", rat(rel_skewness(nu, mu, g))}};
    if (cmd == "rho") {
        AngularDistance d = angular_distance(nu, mu, g);
        return {{"exp_rho", rat(d.exact_exp)}, {"approx", approx(d.log_value)}};
    }
    if (cmd == "leq") return {{"leq", leq(nu, mu, g)}};
    if (cmd == "metric") return {{"distance", rat(edge_metric(nu, mu, g))}};
    throw Error("parse_error", "unknown val command '" + cmd + "'");
}

json run_germ(const std::string& cmd, const Fixture& fx, const Options& o) {
    const SkeletonMap& f = need_germ(fx);
    const DualGraph& g = f.graph();
    if (cmd == "apply") {
        Step s = apply(parse_valuation(need(o.nu, "--nu"), g), f);
        return {{"image", valuation(s.image, g)}, {"rate", rat(s.rate)}};
    }
    if (cmd == "orbit" || cmd == "rates" || cmd == "recursion") {
        auto orb = orbit(parse_valuation(need(o.nu, "--nu"), g), f, o.n);
        std::vector<Rat> rates;
        for (const auto& p : orb) rates.push_back(p.rate);
        if (cmd == "rates") return {{"rates", rats(rates)}};
        if (cmd == "orbit") {
            json pts = json::array();
            for (const auto& p : orb) pts.push_back({{"point", valuation(p.point, g)}, {"rate", rat(p.rate)}});
            return {{"orbit", pts}};
        }
        auto rec = detect_recursion(rates, o.m_max, o.n_max);
        if (!rec) return {{"recursion", nullptr}, {"terms", rates.size()}};
        return {{"recursion", {{"m", rec->m}, {"a", integer(rec->a)}, {"b", integer(rec->b)}, {"n0", rec->n0}}},
                {"terms", rates.size()}};
    }
    if (cmd == "degree") return degree_json(dynamical_degree(f));
    if (cmd == "fixed") return fixed_json(find_fixed_set(f), f);
    if (cmd == "nonexpansion") {
        std::mt19937_64 rng(o.seed);
        std::vector<std::pair<QMValuation, QMValuation>> pairs;
        while (static_cast<int>(pairs.size()) < o.samples) {
            QMValuation a = random_point(f, rng), b = random_point(f, rng);
            if (!same_point(a, b, g)) pairs.emplace_back(a, b);
        }
        NonexpansionReport r = check_nonexpansion(f, pairs);
        return {{"samples", r.samples.size()},
                {"non_expanding", r.all_ok},
                {"strict", r.all_strict},
                {"isometry", r.all_equal},
                {"strictness_required", r.strictness_required},
                {"seed", o.seed}};
    }
    if (cmd == "stability") {
        FixedSet fs = find_fixed_set(f);
        StabilityReport r = stability_report(f, fs);
        json ends = json::array();
        for (const auto& e : r.endpoints) ends.push_back(valuation(e, g));
        json out = {{"verdict", r.verdict},
                    {"instruction", r.instruction},
                    {"endpoints", ends},
                    {"blowups", r.blowups},
                    {"cyclic_quotient", r.cyclic_quotient}};
        if (r.witness) out["witness"] = valuation(*r.witness, g);
        return out;
    }
    throw Error("parse_error", "unknown germ command '" + cmd + "'");
}

json run_transport(const std::string& cmd, const Fixture& fx, const Options& o) {
    const GermResolutionTable& t = need_table(fx);
    if (cmd == "push") {
        int p = t.source.index_of(need(o.prime, "--prime"));
        return {{"pushforward", by_prime(pushforward_dual(p, t), t.target)}};
    }
    if (cmd == "pull") {
        int p = t.target.index_of(need(o.prime, "--prime"));
        CurveDivisor d = pullback_dual(p, t);
        json curves = json::object();
        for (std::size_t c = 0; c < t.contracted.size(); ++c) curves[t.contracted[c].label] = rat(d.curves[c]);
        return {{"exceptional", by_prime(d.exceptional, t.source)}, {"curves", curves}};
    }
    if (cmd == "rate") {
        int p = t.source.index_of(need(o.prime, "--prime"));
        return {{"rate", rat(attraction_rate_from_table(p, t))}};
    }
    if (cmd == "jacobian") {
        QMValuation nu = parse_valuation(need(o.nu, "--nu"), t.source);
        QMValuation img = parse_valuation(need(o.image, "--image"), t.target);
        JacobianResult r = jacobian_check(nu, t, img, parse_rat(need(o.rate, "--rate")));
        return {{"holds", r.holds}, {"lhs", rat(r.lhs)}, {"rhs", rat(r.rhs)}};
    }
    throw Error("parse_error", "unknown transport command '" + cmd + "'");
}

json run_cusp(const std::string& cmd, const Fixture& fx, const Options& o) {
    if (!fx.cusp) throw Error("missing_data", fx.path.string() + " has no [cusp] block");
    const CuspData& c = fx.cusp->cusp;
    auto alpha = [&]() {
        if (!o.alpha.empty()) return QuadElem::parse(o.alpha, c.d());
        if (fx.cusp->alpha) return *fx.cusp->alpha;
        throw Error("missing_data", "no alpha given (use --alpha or the fixture's cusp.alpha)");
    };
    if (cmd == "build") {
        std::vector<int> cyc = c.cycle;
        return {{"cycle", cyc}, {"s", c.s}, {"omega", quad(c.omega)}, {"d", integer(c.d())},
                {"approx", approx(c.omega.approx())}};
    }
    if (cmd == "unit") return {{"eps_omega", quad(c.eps_omega)}, {"eps", quad(c.eps)}};
    if (cmd == "validate") {
        AlphaCheck a = validate_alpha(alpha(), c);
        json out = {{"ok", a.ok}, {"degree", integer(a.degree)}};
        if (!a.ok) out["reason"] = a.reason;
        return out;
    }
    if (cmd == "rotation") {
        Rotation r = rotation_number(alpha(), c);
        json out = {{"rational", r.rational}, {"beta", approx(r.beta)}};
        if (r.rational) out["angle"] = integer(r.p).dump() + "/" + integer(r.q).dump();
        return out;
    }
    if (cmd == "induce") {
        SkeletonMap f = induced_skeleton_map(alpha(), c);
        json secs = json::array();
        for (const auto& s : f.sectors())
            secs.push_back({{"src", cell_literal(s.src, f.graph())},
                            {"cone", {rat(s.lo), rat(*s.hi)}},
                            {"matrix", {{integer(s.m.a), integer(s.m.b)}, {integer(s.m.c), integer(s.m.d)}}},
                            {"dst", cell_literal(s.dst, f.graph())}});
        return {{"sectors", secs}};
    }
    if (cmd == "example") {
        QuadElem a = irrational_example(c);
        return {{"alpha", quad(a)}, {"degree", integer(validate_alpha(a, c).degree)}};
    }
    throw Error("parse_error", "unknown cusp command '" + cmd + "'");
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("valdyn");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("VALDYN_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"valdyn: valuation spaces of normal surface singularities and germ dynamics"};
    app.require_subcommand(1);
    Options o;
    std::string group, cmd;

    const std::map<std::string, std::vector<std::string>> commands = {
        {"graph", {"check", "dualbasis", "discrepancy", "skeleton", "classify"}},
        {"val", {"skewness", "beta", "rho", "leq", "metric"}},
        {"germ", {"apply", "orbit", "rates", "recursion", "degree", "fixed", "nonexpansion", "stability"}},
        {"transport", {"push", "pull", "rate", "jacobian"}},
        {"cusp", {"build", "unit", "validate", "rotation", "induce", "example"}},
    };
    for (const auto& [name, subs] : commands) {
        CLI::App* g = app.add_subcommand(name, name + " operations");
        g->require_subcommand(1);
        for (const auto& sub : subs) {
            CLI::App* c = g->add_subcommand(sub);
            c->add_option("file", o.file, "fixture file (TOML)")->required();
            c->add_option("--nu", o.nu, "valuation literal");
            c->add_option("--mu", o.mu, "second valuation literal");
            c->add_option("--image", o.image, "image valuation literal");
            c->add_option("--rate", o.rate, "attraction rate");
            c->add_option("--prime", o.prime, "prime id");
            c->add_option("--alpha", o.alpha, "cusp multiplier a+b*sqrt(d)");
            c->add_option("-n,--terms", o.n, "number of orbit terms");
            c->add_option("--m-max", o.m_max, "largest recursion step");
            c->add_option("--n-max", o.n_max, "largest recursion offset");
            c->add_option("--samples", o.samples, "number of random pairs");
            c->add_option("--seed", o.seed, "random seed");
            c->add_option("--dot", o.dot, "write the dual graph in DOT format");
            c->callback([&, name = name, sub = sub] {
                group = name;
                cmd = sub;
            });
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        spdlog::debug("loading {}", o.file);
        Fixture fx = load_fixture(o.file);
        spdlog::info("{} {} on {}", group, cmd, o.file);
        json out;
        if (group == "graph") out = run_graph(cmd, fx);
        else if (group == "val") out = run_val(cmd, fx, o);
        else if (group == "germ") out = run_germ(cmd, fx, o);
        else if (group == "transport") out = run_transport(cmd, fx, o);
        else out = run_cusp(cmd, fx, o);
        if (!o.dot.empty()) {
            const DualGraph* g = fx.graph ? &*fx.graph : (fx.germ ? &fx.germ->graph() : nullptr);
            if (!g && fx.table) g = &fx.table->source;
            if (!g) throw Error("missing_data", "no graph to export");
            std::ofstream(o.dot) << to_dot(*g);
        }
        emit(out);
        return 0;
    } catch (const Error& e) {
        spdlog::debug("error {}: {}", e.kind(), e.what());
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
}
