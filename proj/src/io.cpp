#include "valdyn/io.hpp"

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include <map>
#include <sstream>

namespace valdyn {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& what) { throw Error("parse_error", what); }

Rat read_rat(const toml::node& n, const std::string& what) {
    if (auto i = n.value<int64_t>(); i && n.is_integer()) return Rat(*i);
    if (auto s = n.value<std::string>()) return parse_rat(*s);
    fail(what + ": expected an integer or a \"p/q\" string");
}

int read_int(const toml::node& n, const std::string& what) {
    if (!n.is_integer()) fail(what + ": expected an integer");
    return static_cast<int>(*n.value<int64_t>());
}

std::string read_str(const toml::node& n, const std::string& what) {
    if (!n.is_string()) fail(what + ": expected a string");
    return *n.value<std::string>();
}

const toml::node& need(const toml::table& t, std::string_view key, const std::string& where) {
    const toml::node* n = t.get(key);
    if (!n) fail(where + ": missing key '" + std::string(key) + "'");
    return *n;
}

template <class F>
void each_table(const toml::table& root, std::string_view key, F&& f) {
    const toml::node* n = root.get(key);
    if (!n) return;
    const toml::array* arr = n->as_array();
    if (!arr) fail("'" + std::string(key) + "' must be an array of tables");
    int i = 0;
    for (const auto& item : *arr) {
        const toml::table* t = item.as_table();
        if (!t) fail("'" + std::string(key) + "' must be an array of tables");
        f(*t, std::string(key) + "[" + std::to_string(i++) + "]");
    }
}

toml::table parse_text(std::string_view text, const std::string& origin) {
    try {
        return toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << origin << ":" << e.source().begin.line << ": " << e.description();
        fail(msg.str());
    }
}

toml::table parse_path(const fs::path& path) {
    try {
        return toml::parse_file(path.string());
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << path.string() << ":" << e.source().begin.line << ": " << e.description();
        fail(msg.str());
    }
}

bool has_graph_tables(const toml::table& t) { return t.contains("prime"); }

DualGraph graph_from(const toml::table& t, bool validate = true) {
    std::vector<Prime> primes;
    each_table(t, "prime", [&](const toml::table& p, const std::string& where) {
        Prime pr;
        pr.id = read_str(need(p, "id", where), where + ".id");
        if (auto* g = p.get("genus")) pr.genus = read_int(*g, where + ".genus");
        pr.self_int = read_int(need(p, "self_int", where), where + ".self_int");
        if (auto* b = p.get("b")) pr.b = read_int(*b, where + ".b");
        primes.push_back(pr);
    });
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < primes.size(); ++i) index[primes[i].id] = static_cast<int>(i);
    auto lookup = [&](const std::string& id) {
        auto it = index.find(id);
        if (it == index.end()) throw Error("unknown_prime", "unknown prime '" + id + "'");
        return it->second;
    };
    std::vector<Edge> edges;
    each_table(t, "edge", [&](const toml::table& e, const std::string& where) {
        const toml::array* ends = need(e, "ends", where).as_array();
        if (!ends || ends->size() != 2) fail(where + ".ends: expected two prime ids");
        Edge ed{lookup(read_str(*ends->get(0), where)), lookup(read_str(*ends->get(1), where))};
        int count = 1;
        if (auto* c = e.get("count")) count = read_int(*c, where + ".count");
        for (int i = 0; i < count; ++i) edges.push_back(ed);
    });
    std::vector<Ray> rays;
    each_table(t, "ray", [&](const toml::table& r, const std::string& where) {
        rays.push_back(Ray{read_str(need(r, "label", where), where + ".label"),
                           lookup(read_str(need(r, "from", where), where + ".from"))});
    });
    return DualGraph(std::move(primes), std::move(edges), std::move(rays), validate);
}

// A graph given inline, or via `path = "..."` relative to the fixture.
DualGraph graph_ref(const toml::table& t, const fs::path& base, const std::string& where) {
    if (auto* p = t.get("path")) return load_graph(base / read_str(*p, where + ".path"));
    if (!has_graph_tables(t)) fail(where + ": expected inline [[prime]] tables or a path");
    return graph_from(t);
}

std::optional<Rat> read_bound(const toml::node& n, const std::string& what) {
    if (auto s = n.value<std::string>(); s && (*s == "inf" || *s == "infinity")) return std::nullopt;
    return read_rat(n, what);
}

Int read_entry(const toml::node& n, const std::string& what) {
    Rat x = read_rat(n, what);
    if (!is_integer(x)) fail(what + ": sector matrices have integer entries");
    return numerator(x);
}

std::vector<Sector> sectors_from(const toml::table& t, const DualGraph& g) {
    std::vector<Sector> out;
    const IntMat2 swap{0, 1, 1, 0};
    each_table(t, "sector", [&](const toml::table& s, const std::string& where) {
        CellRef src = parse_cell(read_str(need(s, "src", where), where + ".src"), g);
        CellRef dst = parse_cell(read_str(need(s, "dst", where), where + ".dst"), g);
        Sector sec;
        sec.src = src.cell;
        sec.dst = dst.cell;
        if (const toml::node* c = s.get("cone")) {
            const toml::array* cone = c->as_array();
            if (!cone || cone->size() != 2) fail(where + ".cone: expected [lo, hi]");
            auto lo = read_bound(*cone->get(0), where + ".cone");
            auto hi = read_bound(*cone->get(1), where + ".cone");
            if (!lo) fail(where + ".cone: the lower end must be finite");
            sec.lo = *lo;
            sec.hi = hi;
        } else {
            sec.lo = 0;
            sec.hi = src.cell.kind == Where::Edge ? std::optional<Rat>(1) : std::nullopt;
        }
        const toml::array* m = need(s, "matrix", where).as_array();
        if (!m || m->size() != 2) fail(where + ".matrix: expected [[a,b],[c,d]]");
        const toml::array* r0 = m->get(0)->as_array();
        const toml::array* r1 = m->get(1)->as_array();
        if (!r0 || !r1 || r0->size() != 2 || r1->size() != 2) fail(where + ".matrix: expected [[a,b],[c,d]]");
        sec.m = IntMat2{read_entry(*r0->get(0), where), read_entry(*r0->get(1), where),
                        read_entry(*r1->get(0), where), read_entry(*r1->get(1), where)};
        if (src.flipped) {
            Rat lo = sec.lo;
            sec.lo = 1 - *sec.hi;
            sec.hi = 1 - lo;
            sec.m = sec.m * swap;
        }
        if (dst.flipped) sec.m = swap * sec.m;
        out.push_back(sec);
    });
    return out;
}

std::vector<RayTail> tails_from(const toml::table& t, const DualGraph& g) {
    std::vector<RayTail> out;
    each_table(t, "ray", [&](const toml::table& r, const std::string& where) {
        const toml::node* a = r.get("affine");
        if (!a) return;
        const toml::array* arr = a->as_array();
        if (!arr || arr->size() != 2) fail(where + ".affine: expected [lambda, mu]");
        out.push_back(RayTail{g.ray_index(read_str(need(r, "label", where), where)), read_rat(*arr->get(0), where),
                              read_rat(*arr->get(1), where)});
    });
    return out;
}

CuspFixture cusp_from(const toml::table& c) {
    std::vector<int> cycle;
    const toml::array* arr = need(c, "cycle", "cusp").as_array();
    if (!arr) fail("cusp.cycle: expected an array of integers");
    for (const auto& k : *arr) cycle.push_back(read_int(k, "cusp.cycle"));
    int s = 1;
    if (auto* n = c.get("s")) s = read_int(*n, "cusp.s");
    CuspFixture out{make_cusp(cycle, s), std::nullopt};
    if (auto* a = c.get("alpha")) out.alpha = QuadElem::parse(read_str(*a, "cusp.alpha"), out.cusp.d());
    return out;
}

std::vector<int> attach_from(const toml::table& t, const DualGraph& g, const std::string& where) {
    std::vector<int> out(g.size(), 0);
    const toml::table* a = need(t, "attach", where).as_table();
    if (!a) fail(where + ".attach: expected an inline table {prime = count}");
    for (const auto& [key, val] : *a) out[g.index_of(std::string(key.str()))] = read_int(val, where + ".attach");
    return out;
}

GermResolutionTable table_from(const toml::table& t, const fs::path& base) {
    const toml::table* src = need(t, "source", "table").as_table();
    if (!src) fail("table: [source] must be a table");
    DualGraph source = graph_ref(*src, base, "source");
    DualGraph target = source;
    if (const toml::node* dn = t.get("target")) {
        const toml::table* dst = dn->as_table();
        if (!dst) fail("table: [target] must be a table");
        if (!dst->contains("same")) target = graph_ref(*dst, base, "target");
    }
    std::vector<PrimeMap> maps;
    each_table(t, "prime_map", [&](const toml::table& m, const std::string& where) {
        PrimeMap pm;
        pm.src = source.index_of(read_str(need(m, "src", where), where + ".src"));
        pm.dst = target.index_of(read_str(need(m, "dst", where), where + ".dst"));
        pm.k = read_int(need(m, "k", where), where + ".k");
        if (auto* e = m.get("e")) pm.e = read_int(*e, where + ".e");
        maps.push_back(pm);
    });
    std::vector<ContractedCurve> curves;
    each_table(t, "contracted", [&](const toml::table& c, const std::string& where) {
        ContractedCurve cc;
        cc.label = read_str(need(c, "curve", where), where + ".curve");
        cc.attach = attach_from(c, source, where);
        if (auto* m = c.get("m")) cc.m = read_int(*m, where + ".m");
        cc.dst = target.index_of(read_str(need(c, "dst", where), where + ".dst"));
        cc.k = read_int(need(c, "k", where), where + ".k");
        curves.push_back(cc);
    });
    std::optional<std::vector<RfTerm>> rf;
    if (t.contains("r_f")) {
        rf.emplace();
        each_table(t, "r_f", [&](const toml::table& r, const std::string& where) {
            rf->push_back(RfTerm{read_str(need(r, "curve", where), where + ".curve"),
                                 read_rat(need(r, "coeff", where), where + ".coeff"), attach_from(r, source, where)});
        });
    }
    return GermResolutionTable(std::move(source), std::move(target), std::move(maps), std::move(curves),
                               std::move(rf));
}

Fixture fixture_from(const toml::table& t, const fs::path& base) {
    Fixture fx;
    if (const toml::node* c = t.get("cusp")) {
        const toml::table* ct = c->as_table();
        if (!ct) fail("[cusp] must be a table");
        fx.cusp = cusp_from(*ct);
    }
    if (const toml::node* gp = t.get("graph"))
        fx.graph = load_graph(base / read_str(*gp, "graph"));
    else if (has_graph_tables(t))
        fx.graph = graph_from(t);
    else if (fx.cusp && fx.cusp->cusp.r() * fx.cusp->cusp.s >= 2)
        fx.graph = cusp_dual_graph(fx.cusp->cusp);
    if (t.contains("sector")) {
        if (fx.cusp && fx.cusp->alpha)
            throw Error("invalid_fixture", "a germ is given both by sectors and by a cusp alpha");
        if (!fx.graph) fail("sectors need a graph");
        bool finite = true;
        if (auto* f = t.get("finite")) {
            if (!f->is_boolean()) fail("finite: expected a boolean");
            finite = *f->value<bool>();
        }
        fx.germ = SkeletonMap(*fx.graph, sectors_from(t, *fx.graph), finite, tails_from(t, *fx.graph));
    } else if (fx.cusp && fx.cusp->alpha) {
        fx.germ = induced_skeleton_map(*fx.cusp->alpha, fx.cusp->cusp);
    }
    if (t.contains("source")) {
        fx.table = table_from(t, base);
        if (!fx.graph) fx.graph = fx.table->source;
    }
    return fx;
}

}  // namespace

Fixture parse_fixture(std::string_view text, const fs::path& base) {
    return fixture_from(parse_text(text, "<string>"), base);
}

Fixture load_fixture(const fs::path& path) {
    if (!fs::exists(path)) fail("cannot open '" + path.string() + "'");
    Fixture fx = fixture_from(parse_path(path), path.parent_path());
    fx.path = path;
    return fx;
}

DualGraph load_graph(const fs::path& path) {
    if (!fs::exists(path)) fail("cannot open '" + path.string() + "'");
    return graph_from(parse_path(path));
}

SkeletonMap load_germ(const fs::path& path) {
    Fixture fx = load_fixture(path);
    if (!fx.germ) throw Error("missing_data", path.string() + " describes no germ");
    return *fx.germ;
}

GermResolutionTable load_table(const fs::path& path) {
    Fixture fx = load_fixture(path);
    if (!fx.table) throw Error("missing_data", path.string() + " describes no transport table");
    return *fx.table;
}

CuspFixture load_cusp(const fs::path& path) {
    Fixture fx = load_fixture(path);
    if (!fx.cusp) throw Error("missing_data", path.string() + " has no [cusp] block");
    return *fx.cusp;
}

}  // namespace valdyn
