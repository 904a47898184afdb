#ifndef TGRAPH_IO_HPP
#define TGRAPH_IO_HPP

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cocycle.hpp"
#include "graph.hpp"
#include "module.hpp"
#include "toeplitz.hpp"

namespace tgraph::io
{

using json = nlohmann::json;

/// Malformed input file.  The message starts with the location.
class FormatError : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

namespace detail
{
[[noreturn]] inline void fail(const std::string& where, const std::string& what)
{
    throw FormatError((where.empty() ? std::string("/") : where) + ": " + what);
}

inline std::string at(const std::string& where, const std::string& key) { return where + "/" + key; }
inline std::string at(const std::string& where, Index i) { return where + "/" + std::to_string(i); }

inline const json& member(const json& j, const std::string& key, const std::string& where)
{
    if(!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if(it == j.end()) fail(where, "missing key \"" + key + "\"");
    return *it;
}

inline double number(const json& j, const std::string& where)
{
    if(!j.is_number()) fail(where, "expected a number");
    double x = j.get<double>();
    if(!std::isfinite(x)) fail(where, "number is not finite");
    return x;
}

inline std::int64_t integer(const json& j, const std::string& where)
{
    if(!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<std::int64_t>();
}

inline Index nonnegative(const json& j, const std::string& where)
{
    auto v = integer(j, where);
    if(v < 0) fail(where, "expected a nonnegative integer");
    return static_cast<Index>(v);
}

inline std::string string(const json& j, const std::string& where)
{
    if(j.is_string()) return j.get<std::string>();
    if(j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
    fail(where, "expected a string id");
}

inline const json& array(const json& j, const std::string& where)
{
    if(!j.is_array()) fail(where, "expected an array");
    return j;
}

/// line:column of a byte offset, both 1-based
inline std::string text_position(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for(std::size_t i = 0; i < byte && i < text.size(); ++i)
    {
        if(text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
        {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}
} // namespace detail

/// Parses JSON text; syntax errors report source, line and column.
inline json parse_text(const std::string& text, const std::string& source = "<input>")
{
    try
    {
        return json::parse(text);
    }
    catch(const json::parse_error& e)
    {
        std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw FormatError(source + ": " + detail::text_position(text, byte) + ": invalid JSON");
    }
}

/// Runs parse(j) and prefixes format errors with the file name.
template <class F>
auto parse_from(const std::string& source, F&& parse) -> decltype(parse())
{
    try
    {
        return parse();
    }
    catch(const FormatError& e)
    {
        throw FormatError(source + ": " + e.what());
    }
}

inline json load_file(const std::string& path)
{
    std::ifstream in(path);
    if(!in) throw FormatError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

/// Inline JSON when the text starts with '{', '[' or '"', a file path, or else a
/// bare name such as p_E, read as a JSON string.
inline json load_argument(const std::string& arg)
{
    auto first = arg.find_first_not_of(" \t\n");
    if(first != std::string::npos && (arg[first] == '{' || arg[first] == '[' || arg[first] == '"')) return parse_text(arg, "<argument>");
    if(std::ifstream(arg) || arg.find('/') != std::string::npos || arg.find(".json") != std::string::npos) return load_file(arg);
    return json(arg);
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// [re, im] or a plain real number.
inline Complex parse_complex(const json& j, const std::string& where)
{
    if(j.is_number()) return {detail::number(j, where), 0.0};
    if(!j.is_array() || j.size() != 2) detail::fail(where, "expected [re, im]");
    return {detail::number(j[0], detail::at(where, 0)), detail::number(j[1], detail::at(where, 1))};
}

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

using AnyGraph = std::variant<FiniteGraph, CircleCoveringGraph>;

inline FiniteGraph parse_finite_graph(const json& j, const std::string& where = "")
{
    const auto& vs = detail::array(detail::member(j, "vertices", where), detail::at(where, "vertices"));
    std::vector<std::string> ids;
    for(Index i = 0; i < vs.size(); ++i) ids.push_back(detail::string(vs[i], detail::at(detail::at(where, "vertices"), i)));
    std::vector<FiniteGraph::EdgeSpec> edges;
    const auto& es = detail::array(detail::member(j, "edges", where), detail::at(where, "edges"));
    for(Index i = 0; i < es.size(); ++i)
    {
        auto w = detail::at(detail::at(where, "edges"), i);
        edges.push_back({detail::string(detail::member(es[i], "id", w), detail::at(w, "id")),
                         detail::string(detail::member(es[i], "src", w), detail::at(w, "src")),
                         detail::string(detail::member(es[i], "rng", w), detail::at(w, "rng"))});
        for(const char* key : {"src", "rng"})
        {
            const auto& id = key[0] == 's' ? edges.back().source : edges.back().range;
            if(std::find(ids.begin(), ids.end(), id) == ids.end()) detail::fail(detail::at(w, key), "unknown vertex id '" + id + "'");
        }
    }
    try
    {
        return FiniteGraph(std::move(ids), edges);
    }
    catch(const InvalidInput& e)
    {
        detail::fail(where.empty() ? "/" : where, e.what());
    }
}

inline CircleCoveringGraph parse_circle_graph(const json& j, const std::string& where = "")
{
    const auto& cs = detail::array(detail::member(j, "components", where), detail::at(where, "components"));
    std::vector<EdgeComponent> comps;
    for(Index i = 0; i < cs.size(); ++i)
    {
        auto w = detail::at(detail::at(where, "components"), i);
        EdgeComponent c;
        c.source_degree = static_cast<int>(detail::integer(detail::member(cs[i], "d", w), detail::at(w, "d")));
        c.range_degree = static_cast<int>(detail::integer(detail::member(cs[i], "m", w), detail::at(w, "m")));
        c.source_offset = cs[i].contains("s_offset") ? detail::number(cs[i]["s_offset"], detail::at(w, "s_offset")) : 0.0;
        c.range_offset = cs[i].contains("r_offset") ? detail::number(cs[i]["r_offset"], detail::at(w, "r_offset")) : 0.0;
        if(c.source_degree < 1) detail::fail(detail::at(w, "d"), "source degree must be >= 1");
        if(c.range_degree == 0) detail::fail(detail::at(w, "m"), "range degree must be nonzero");
        comps.push_back(c);
    }
    return CircleCoveringGraph(std::move(comps));
}

inline AnyGraph parse_graph(const json& j, const std::string& where = "")
{
    const auto kind = detail::string(detail::member(j, "kind", where), detail::at(where, "kind"));
    if(kind == "finite") return parse_finite_graph(j, where);
    if(kind == "circle") return parse_circle_graph(j, where);
    detail::fail(detail::at(where, "kind"), "unknown graph kind \"" + kind + "\"");
}

inline FiniteGraph require_finite(const AnyGraph& g, const std::string& source)
{
    if(const auto* f = std::get_if<FiniteGraph>(&g)) return *f;
    throw FormatError(source + ": expected a finite graph");
}

inline CircleCoveringGraph require_circle(const AnyGraph& g, const std::string& source)
{
    if(const auto* c = std::get_if<CircleCoveringGraph>(&g)) return *c;
    throw FormatError(source + ": expected a circle graph");
}

inline json to_json(const FiniteGraph& g)
{
    json edges = json::array();
    for(Index e = 0; e < g.num_edges(); ++e)
        edges.push_back({{"id", g.edge_id(e)}, {"src", g.vertex_id(g.source(e))}, {"rng", g.vertex_id(g.range(e))}});
    return {{"kind", "finite"}, {"vertices", g.vertex_ids()}, {"edges", edges}};
}

inline json to_json(const CircleCoveringGraph& g)
{
    json comps = json::array();
    for(const auto& c : g.components())
        comps.push_back({{"d", c.source_degree}, {"s_offset", c.source_offset}, {"m", c.range_degree}, {"r_offset", c.range_offset}});
    return {{"kind", "circle"}, {"components", comps}};
}

// ---------------------------------------------------------------------------
// Module elements and coefficients
// ---------------------------------------------------------------------------

/// {"<edge id>": [re, im], ...}; missing edges are 0.
inline ModuleElement parse_module_element(const FiniteGraph& g, const json& j, const std::string& where = "")
{
    if(!j.is_object()) detail::fail(where, "expected an object keyed by edge id");
    auto x = ModuleElement::zero(g);
    for(auto it = j.begin(); it != j.end(); ++it)
    {
        Index e = 0;
        try
        {
            e = g.edge_index(it.key());
        }
        catch(const InvalidInput& err)
        {
            detail::fail(detail::at(where, it.key()), err.what());
        }
        x.values[static_cast<Eigen::Index>(e)] = parse_complex(it.value(), detail::at(where, it.key()));
    }
    return x;
}

inline json to_json(const FiniteGraph& g, const ModuleElement& x)
{
    json out = json::object();
    for(Index e = 0; e < g.num_edges(); ++e) out[g.edge_id(e)] = to_json(x(e));
    return out;
}

/// {"<vertex id>": [re, im], ...}; missing vertices are 0.  A bare number is a constant.
inline VertexFunction parse_vertex_function(const FiniteGraph& g, const json& j, const std::string& where = "")
{
    if(j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) return VertexFunction::constant(g, parse_complex(j, where));
    if(!j.is_object()) detail::fail(where, "expected an object keyed by vertex id");
    auto a = VertexFunction::constant(g, 0.0);
    for(auto it = j.begin(); it != j.end(); ++it)
    {
        Index v = 0;
        try
        {
            v = g.vertex_index(it.key());
        }
        catch(const InvalidInput& err)
        {
            detail::fail(detail::at(where, it.key()), err.what());
        }
        a.values[static_cast<Eigen::Index>(v)] = parse_complex(it.value(), detail::at(where, it.key()));
    }
    return a;
}

inline json to_json(const FiniteGraph& g, const VertexFunction& a)
{
    json out = json::object();
    for(Index v = 0; v < g.num_vertices(); ++v) out[g.vertex_id(v)] = to_json(a(v));
    return out;
}

/// {"grid": N, "components": [[[re, im], ...], ...]} with d_c N samples on component c.
inline CircleModuleElement parse_circle_element(const CircleCoveringGraph& g, const json& j, const std::string& where = "")
{
    CircleModuleElement x;
    x.grid = detail::nonnegative(detail::member(j, "grid", where), detail::at(where, "grid"));
    const auto& cs = detail::array(detail::member(j, "components", where), detail::at(where, "components"));
    if(cs.size() != g.num_components()) detail::fail(detail::at(where, "components"), "component count does not match the graph");
    for(Index c = 0; c < cs.size(); ++c)
    {
        auto w = detail::at(detail::at(where, "components"), c);
        const auto& vals = detail::array(cs[c], w);
        const Index want = x.grid * static_cast<Index>(g.component(c).source_degree);
        if(vals.size() != want) detail::fail(w, "expected " + std::to_string(want) + " samples");
        Eigen::VectorXcd v(static_cast<Eigen::Index>(want));
        for(Index k = 0; k < want; ++k) v[static_cast<Eigen::Index>(k)] = parse_complex(vals[k], detail::at(w, k));
        x.components.push_back(std::move(v));
    }
    return x;
}

inline json to_json(const CircleModuleElement& x)
{
    json comps = json::array();
    for(const auto& c : x.components)
    {
        json vals = json::array();
        for(Eigen::Index k = 0; k < c.size(); ++k) vals.push_back(to_json(c[k]));
        comps.push_back(vals);
    }
    return {{"grid", x.grid}, {"components", comps}};
}

/// {"<vertex id>": weight, ...} or an array indexed by vertex.
inline Eigen::VectorXd parse_measure(const FiniteGraph& g, const json& j, const std::string& where = "")
{
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_vertices()));
    if(j.is_array())
    {
        if(j.size() != g.num_vertices()) detail::fail(where, "measure length must equal the number of vertices");
        for(Index v = 0; v < j.size(); ++v) m[static_cast<Eigen::Index>(v)] = detail::number(j[v], detail::at(where, v));
        return m;
    }
    if(!j.is_object()) detail::fail(where, "expected an object keyed by vertex id or an array");
    for(auto it = j.begin(); it != j.end(); ++it)
    {
        Index v = 0;
        try
        {
            v = g.vertex_index(it.key());
        }
        catch(const InvalidInput& err)
        {
            detail::fail(detail::at(where, it.key()), err.what());
        }
        m[static_cast<Eigen::Index>(v)] = detail::number(it.value(), detail::at(where, it.key()));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Toeplitz words
// ---------------------------------------------------------------------------

/*
 * Word: {"coeff": [re, im], "left": [x_1, ..., x_m], "middle": a, "right": [y_1, ..., y_n]}
 * with every key optional (coeff 1, middle 1, no factors).  An element is a
 * word, the string "p_E", or an array of those, summed.
 */
inline ToeplitzWord parse_word(const FiniteGraph& g, const json& j, const std::string& where = "")
{
    if(!j.is_object()) detail::fail(where, "expected a word object");
    for(auto it = j.begin(); it != j.end(); ++it)
        if(it.key() != "coeff" && it.key() != "left" && it.key() != "middle" && it.key() != "right")
            detail::fail(detail::at(where, it.key()), "unknown key");
    Complex coeff = j.contains("coeff") ? parse_complex(j["coeff"], detail::at(where, "coeff")) : Complex(1.0);
    auto factors = [&](const char* key) {
        std::vector<ModuleElement> out;
        if(!j.contains(key)) return out;
        const auto& arr = detail::array(j[key], detail::at(where, key));
        for(Index i = 0; i < arr.size(); ++i) out.push_back(parse_module_element(g, arr[i], detail::at(detail::at(where, key), i)));
        return out;
    };
    auto left = factors("left");
    auto right = factors("right");
    VertexFunction middle = j.contains("middle") ? parse_vertex_function(g, j["middle"], detail::at(where, "middle")) : VertexFunction::constant(g, 1.0);
    return make_word(g, coeff, std::move(left), std::move(middle), std::move(right));
}

inline ToeplitzElement parse_element(const FiniteGraph& g, const json& j, const std::string& where = "")
{
    if(j.is_string())
    {
        if(j.get<std::string>() == "p_E") return vacuum_projection(g);
        detail::fail(where, "unknown element name \"" + j.get<std::string>() + "\"");
    }
    if(j.is_array())
    {
        ToeplitzElement sum;
        for(Index i = 0; i < j.size(); ++i) sum += parse_element(g, j[i], detail::at(where, i));
        return sum;
    }
    return element(parse_word(g, j, where));
}

inline json to_json(const FiniteGraph& g, const ToeplitzWord& w)
{
    json left = json::array(), right = json::array();
    for(const auto& x : w.left) left.push_back(to_json(g, x));
    for(const auto& y : w.right) right.push_back(to_json(g, y));
    return {{"coeff", to_json(w.coeff)}, {"left", left}, {"middle", to_json(g, w.middle)}, {"right", right}};
}

inline json to_json(const FiniteGraph& g, const ToeplitzElement& x)
{
    json out = json::array();
    for(const auto& w : x.words()) out.push_back(to_json(g, w));
    return out;
}

// ---------------------------------------------------------------------------
// Cocycles
// ---------------------------------------------------------------------------

/// {"rank": k, "arcs": [[a, b], ...], "transitions": [{"i", "j", "component", "perm"}, ...]}
inline PermCocycle parse_cocycle(const json& j, const std::string& where = "")
{
    PermCocycle c;
    c.rank = detail::nonnegative(detail::member(j, "rank", where), detail::at(where, "rank"));
    const auto& arcs = detail::array(detail::member(j, "arcs", where), detail::at(where, "arcs"));
    for(Index i = 0; i < arcs.size(); ++i)
    {
        auto w = detail::at(detail::at(where, "arcs"), i);
        if(!arcs[i].is_array() || arcs[i].size() != 2) detail::fail(w, "expected [start, end]");
        double a = detail::number(arcs[i][0], detail::at(w, 0)), b = detail::number(arcs[i][1], detail::at(w, 1));
        if(!(b > a)) detail::fail(w, "arc end must exceed its start");
        c.arcs.push_back(Arc::from_endpoints(a, b));
    }
    const auto& ts = detail::array(detail::member(j, "transitions", where), detail::at(where, "transitions"));
    for(Index t = 0; t < ts.size(); ++t)
    {
        auto w = detail::at(detail::at(where, "transitions"), t);
        TransitionEntry e;
        e.i = detail::nonnegative(detail::member(ts[t], "i", w), detail::at(w, "i"));
        e.j = detail::nonnegative(detail::member(ts[t], "j", w), detail::at(w, "j"));
        e.component = ts[t].contains("component") ? detail::nonnegative(ts[t]["component"], detail::at(w, "component")) : 0;
        const auto& p = detail::array(detail::member(ts[t], "perm", w), detail::at(w, "perm"));
        for(Index l = 0; l < p.size(); ++l) e.perm.push_back(detail::nonnegative(p[l], detail::at(detail::at(w, "perm"), l)));
        if(e.i >= c.arcs.size() || e.j >= c.arcs.size()) detail::fail(w, "arc index out of range");
        if(!is_permutation(e.perm, c.rank)) detail::fail(detail::at(w, "perm"), "not a permutation of 0..rank-1");
        c.entries.push_back(std::move(e));
    }
    return c;
}

inline json to_json(const PermCocycle& c)
{
    json arcs = json::array(), ts = json::array();
    for(const auto& a : c.arcs) arcs.push_back({a.start, a.end()});
    for(const auto& e : c.entries) ts.push_back({{"i", e.i}, {"j", e.j}, {"component", e.component}, {"perm", e.perm}});
    return {{"rank", c.rank}, {"arcs", arcs}, {"transitions", ts}};
}

} // namespace tgraph::io

#endif
