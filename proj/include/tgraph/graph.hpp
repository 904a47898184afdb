#ifndef TGRAPH_GRAPH_HPP
#define TGRAPH_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "angles.hpp"
#include "errors.hpp"

namespace tgraph
{

using Index = std::size_t;

/*
 * Finite topological graph: finite vertex and edge sets with range and source
 * maps.  Vertices and edges carry string identifiers for I/O; all algorithms
 * work with the dense indices 0..n-1.
 */
class FiniteGraph
{
public:
    struct EdgeSpec
    {
        std::string id;
        std::string source;
        std::string range;
    };

    FiniteGraph() = default;

    FiniteGraph(std::vector<std::string> vertex_ids, const std::vector<EdgeSpec>& edges)
        : m_vertex_ids(std::move(vertex_ids))
    {
        for(Index v = 0; v < m_vertex_ids.size(); ++v)
        {
            if(!m_vertex_lookup.emplace(m_vertex_ids[v], v).second)
            {
                throw InvalidInput("duplicate vertex id '" + m_vertex_ids[v] + "'");
            }
        }
        for(const auto& e : edges)
        {
            Index idx = m_edge_ids.size();
            if(!m_edge_lookup.emplace(e.id, idx).second) throw InvalidInput("duplicate edge id '" + e.id + "'");
            m_edge_ids.push_back(e.id);
            m_source.push_back(vertex_index(e.source));
            m_range.push_back(vertex_index(e.range));
        }
        build_incidence();
    }

    /// Index form: edge e goes from source[e] to range[e].  Ids are "v<i>" and "e<i>".
    static FiniteGraph from_indices(Index num_vertices, const std::vector<std::pair<Index, Index>>& source_range)
    {
        std::vector<std::string> vids;
        for(Index v = 0; v < num_vertices; ++v) vids.push_back("v" + std::to_string(v));
        std::vector<EdgeSpec> edges;
        for(Index e = 0; e < source_range.size(); ++e)
        {
            auto [s, r] = source_range[e];
            if(s >= num_vertices || r >= num_vertices) throw InvalidInput("edge endpoint out of range");
            edges.push_back({"e" + std::to_string(e), vids[s], vids[r]});
        }
        return FiniteGraph(std::move(vids), edges);
    }

    /// Graph whose adjacency matrix is A, A(w, v) = #{e : r(e) = w, s(e) = v}.
    static FiniteGraph from_adjacency(const std::vector<std::vector<int>>& adjacency)
    {
        std::vector<std::pair<Index, Index>> sr;
        for(Index w = 0; w < adjacency.size(); ++w)
        {
            if(adjacency[w].size() != adjacency.size()) throw InvalidInput("adjacency matrix must be square");
            for(Index v = 0; v < adjacency.size(); ++v)
            {
                if(adjacency[w][v] < 0) throw InvalidInput("negative edge multiplicity");
                for(int c = 0; c < adjacency[w][v]; ++c) sr.emplace_back(v, w);
            }
        }
        return from_indices(adjacency.size(), sr);
    }

    Index num_vertices() const { return m_vertex_ids.size(); }
    Index num_edges() const { return m_edge_ids.size(); }

    Index source(Index e) const { return m_source.at(e); }
    Index range(Index e) const { return m_range.at(e); }

    const std::string& vertex_id(Index v) const { return m_vertex_ids.at(v); }
    const std::string& edge_id(Index e) const { return m_edge_ids.at(e); }
    const std::vector<std::string>& vertex_ids() const { return m_vertex_ids; }
    const std::vector<std::string>& edge_ids() const { return m_edge_ids; }

    Index vertex_index(const std::string& id) const
    {
        auto it = m_vertex_lookup.find(id);
        if(it == m_vertex_lookup.end()) throw InvalidInput("unknown vertex id '" + id + "'");
        return it->second;
    }

    Index edge_index(const std::string& id) const
    {
        auto it = m_edge_lookup.find(id);
        if(it == m_edge_lookup.end()) throw InvalidInput("unknown edge id '" + id + "'");
        return it->second;
    }

    /// E^1 v, edges with source v, in increasing edge order.
    const std::vector<Index>& edges_from(Index v) const
    {
        check_vertex(v);
        return m_out[v];
    }

    /// v E^1, edges with range v.
    const std::vector<Index>& edges_into(Index v) const
    {
        check_vertex(v);
        return m_in[v];
    }

    void check_vertex(Index v) const
    {
        if(v >= num_vertices()) throw InvalidInput("unknown vertex index " + std::to_string(v));
    }

    void check_edge(Index e) const
    {
        if(e >= num_edges()) throw InvalidInput("unknown edge index " + std::to_string(e));
    }

private:
    void build_incidence()
    {
        m_out.assign(num_vertices(), {});
        m_in.assign(num_vertices(), {});
        for(Index e = 0; e < num_edges(); ++e)
        {
            m_out[m_source[e]].push_back(e);
            m_in[m_range[e]].push_back(e);
        }
    }

    std::vector<std::string> m_vertex_ids;
    std::vector<std::string> m_edge_ids;
    std::vector<Index> m_source;
    std::vector<Index> m_range;
    std::unordered_map<std::string, Index> m_vertex_lookup;
    std::unordered_map<std::string, Index> m_edge_lookup;
    std::vector<std::vector<Index>> m_out;
    std::vector<std::vector<Index>> m_in;
};

/*
 * A finite path mu = mu_1 mu_2 ... mu_n with s(mu_i) = r(mu_{i+1}).  Its range
 * is r(mu_1) and its source s(mu_n).  A path of length zero is a vertex.
 */
struct Path
{
    Index vertex = 0;          // the vertex, for length 0; otherwise s(mu)
    std::vector<Index> edges;  // mu_1 .. mu_n

    Index length() const { return edges.size(); }

    Index source(const FiniteGraph& g) const { return edges.empty() ? vertex : g.source(edges.back()); }
    Index range(const FiniteGraph& g) const { return edges.empty() ? vertex : g.range(edges.front()); }

    /// The path f mu, for an edge f with s(f) = r(mu).
    Path prepend(Index f) const
    {
        Path p;
        p.vertex = vertex;
        p.edges.reserve(edges.size() + 1);
        p.edges.push_back(f);
        p.edges.insert(p.edges.end(), edges.begin(), edges.end());
        return p;
    }

    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path& a, const Path& b)
    {
        if(a.edges.size() != b.edges.size()) return a.edges.size() <=> b.edges.size();
        if(a.edges.empty()) return a.vertex <=> b.vertex;
        return a.edges <=> b.edges;
    }
};

inline bool is_path(const FiniteGraph& g, const Path& p)
{
    for(Index i = 0; i + 1 < p.edges.size(); ++i)
    {
        if(g.source(p.edges[i]) != g.range(p.edges[i + 1])) return false;
    }
    return p.edges.empty() || g.source(p.edges.back()) == p.vertex;
}

/// A(w, v) = #{e : r(e) = w, s(e) = v}.
inline Eigen::MatrixXd adjacency_matrix(const FiniteGraph& g)
{
    const Index n = g.num_vertices();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for(Index e = 0; e < g.num_edges(); ++e)
    {
        a(static_cast<Eigen::Index>(g.range(e)), static_cast<Eigen::Index>(g.source(e))) += 1.0;
    }
    return a;
}

/// Multiplicity matrix |w E^1 v| as integers, indexed [w][v].
inline std::vector<std::vector<std::int64_t>> multiplicity_matrix(const FiniteGraph& g)
{
    std::vector<std::vector<std::int64_t>> m(g.num_vertices(), std::vector<std::int64_t>(g.num_vertices(), 0));
    for(Index e = 0; e < g.num_edges(); ++e) ++m[g.range(e)][g.source(e)];
    return m;
}

inline Index fiber_count(const FiniteGraph& g, Index v) { return g.edges_from(v).size(); }

/// Exact |E^n v| for every v, saturating at max uint64.
inline std::vector<std::uint64_t> path_counts(const FiniteGraph& g, Index n)
{
    constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
    const Index nv = g.num_vertices();
    std::vector<std::uint64_t> result(nv, 0);
    for(Index v = 0; v < nv; ++v)
    {
        std::vector<std::uint64_t> at_range(nv, 0); // paths in E^k v by range vertex
        at_range[v] = 1;
        for(Index k = 0; k < n; ++k)
        {
            std::vector<std::uint64_t> next(nv, 0);
            for(Index e = 0; e < g.num_edges(); ++e)
            {
                std::uint64_t add = at_range[g.source(e)];
                std::uint64_t& slot = next[g.range(e)];
                slot = (cap - slot < add) ? cap : slot + add;
            }
            at_range = std::move(next);
        }
        std::uint64_t total = 0;
        for(auto c : at_range) total = (cap - total < c) ? cap : total + c;
        result[v] = total;
    }
    return result;
}

inline constexpr std::uint64_t max_enumerated_paths = 1'000'000;

/// E^n v: all paths of length n with source v, in lexicographic edge order.
inline std::vector<Path> enumerate_paths(const FiniteGraph& g, Index v, Index n)
{
    g.check_vertex(v);
    if(path_counts(g, n)[v] > max_enumerated_paths)
    {
        throw SizeError("|E^" + std::to_string(n) + " v| exceeds " + std::to_string(max_enumerated_paths));
    }
    std::vector<Path> current{Path{v, {}}};
    for(Index k = 0; k < n; ++k)
    {
        std::vector<Path> next;
        for(const auto& p : current)
        {
            for(Index f : g.edges_from(p.range(g))) next.push_back(p.prepend(f));
        }
        current = std::move(next);
    }
    std::sort(current.begin(), current.end());
    return current;
}

/// E^{<=n} v ordered by length, then lexicographically.
inline std::vector<Path> enumerate_paths_up_to(const FiniteGraph& g, Index v, Index n)
{
    std::vector<Path> all;
    for(Index k = 0; k <= n; ++k)
    {
        auto level = enumerate_paths(g, v, k);
        all.insert(all.end(), level.begin(), level.end());
    }
    return all;
}

/// max_v |E^n v|^{1/n}; the sequence converges to the spectral radius.
inline double path_growth_rate(const FiniteGraph& g, Index n)
{
    if(n == 0) throw InvalidInput("path_growth_rate needs n >= 1");
    auto counts = path_counts(g, n);
    std::uint64_t m = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    return std::pow(static_cast<double>(m), 1.0 / static_cast<double>(n));
}

/// Largest modulus of an eigenvalue of A, by dense eigendecomposition.
inline double spectral_radius_dense(const FiniteGraph& g)
{
    if(g.num_vertices() == 0 || g.num_edges() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(adjacency_matrix(g), false);
    if(solver.info() != Eigen::Success) throw VerificationError("eigenvalue computation failed");
    double rho = 0.0;
    for(Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) rho = std::max(rho, std::abs(solver.eigenvalues()[i]));
    return rho;
}

/*
 * Power iteration on A + I.  The shift removes the peripheral spectrum that
 * would make iteration on a periodic A oscillate: for nonnegative A the Perron
 * root rho is an eigenvalue and every other eigenvalue l has |l + 1| <= rho + 1.
 * Returns nullopt if the Rayleigh quotient has not settled after max_iter steps.
 */
inline std::optional<double> spectral_radius_power(const FiniteGraph& g, double tol, Index max_iter = 200000)
{
    if(g.num_vertices() == 0 || g.num_edges() == 0) return 0.0;
    Eigen::MatrixXd b = adjacency_matrix(g);
    b += Eigen::MatrixXd::Identity(b.rows(), b.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Ones(b.rows()).normalized();
    double prev = 0.0;
    for(Index it = 0; it < max_iter; ++it)
    {
        Eigen::VectorXd y = b * x;
        double rq = x.dot(y);
        double ny = y.norm();
        if(ny == 0.0) return 0.0;
        x = y / ny;
        if(it > 0 && std::abs(rq - prev) <= tol * std::max(1.0, std::abs(rq))) return rq - 1.0;
        prev = rq;
    }
    return std::nullopt;
}

inline constexpr Index dense_spectral_limit = 64;

/// rho(A_E) to within tol.  Graphs with at most 64 vertices use the dense
/// eigenvalue route; larger graphs use shifted power iteration.
inline double spectral_radius(const FiniteGraph& g, double tol = 1e-10)
{
    if(!(tol > 0.0)) throw InvalidInput("tol must be positive");
    if(g.num_vertices() <= dense_spectral_limit) return spectral_radius_dense(g);
    auto p = spectral_radius_power(g, tol * 1e-3);
    if(!p) throw VerificationError("power iteration did not converge");
    return *p;
}

// ---------------------------------------------------------------------------
// Circle covering graphs
// ---------------------------------------------------------------------------

/// Half-open arc [start, start + length) of the circle, possibly wrapping.
struct Arc
{
    double start = 0.0;
    double length = 0.0;

    static Arc from_endpoints(double a, double b) { return Arc{wrap_angle(a), b - a}; }
    static Arc centered(double center, double half_width) { return Arc{wrap_angle(center - half_width), 2.0 * half_width}; }

    double end() const { return start + length; }
    double midpoint() const { return wrap_angle(start + 0.5 * length); }

    bool contains(double x) const
    {
        if(length >= two_pi) return true;
        return wrap_angle(x - start) < length;
    }

    /// Interior membership with margin tol from both ends.
    bool contains_interior(double x, double tol = angle_tol) const
    {
        if(length >= two_pi) return true;
        double off = wrap_angle(x - start);
        return off > tol && off < length - tol;
    }
};

/// One connected edge component: a circle with s(theta) = s_offset + d theta and
/// r(theta) = r_offset + m theta.
struct EdgeComponent
{
    int source_degree = 1;
    double source_offset = 0.0;
    int range_degree = 1;
    double range_offset = 0.0;

    double source(double theta) const { return wrap_angle(source_offset + source_degree * theta); }
    double range(double theta) const { return wrap_angle(range_offset + range_degree * theta); }
};

/// A point of the edge space: component index and angle on that component.
struct EdgePoint
{
    Index component = 0;
    double angle = 0.0;
};

class CircleCoveringGraph
{
public:
    CircleCoveringGraph() = default;

    explicit CircleCoveringGraph(std::vector<EdgeComponent> components) : m_components(std::move(components))
    {
        for(auto& c : m_components)
        {
            if(c.source_degree < 1) throw InvalidInput("source degree must be >= 1");
            if(c.range_degree == 0) throw InvalidInput("range degree must be nonzero");
            if(!std::isfinite(c.source_offset) || !std::isfinite(c.range_offset)) throw InvalidInput("non-finite offset");
            c.source_offset = wrap_angle(c.source_offset);
            c.range_offset = wrap_angle(c.range_offset);
        }
    }

    const std::vector<EdgeComponent>& components() const { return m_components; }
    const EdgeComponent& component(Index c) const { return m_components.at(c); }
    Index num_components() const { return m_components.size(); }

    /// Sum of source degrees, the size of every fiber s^{-1}(v).
    Index total_fiber_count() const
    {
        Index k = 0;
        for(const auto& c : m_components) k += static_cast<Index>(c.source_degree);
        return k;
    }

    double source(const EdgePoint& p) const { return component(p.component).source(p.angle); }
    double range(const EdgePoint& p) const { return component(p.component).range(p.angle); }

    /// s^{-1}(v) ordered by component, then branch j = 0..d-1.
    std::vector<EdgePoint> fiber(double v) const
    {
        std::vector<EdgePoint> out;
        for(Index c = 0; c < m_components.size(); ++c)
        {
            const auto& comp = m_components[c];
            for(int j = 0; j < comp.source_degree; ++j)
            {
                out.push_back({c, wrap_angle((wrap_angle(v - comp.source_offset) + two_pi * j) / comp.source_degree)});
            }
        }
        return out;
    }

private:
    std::vector<EdgeComponent> m_components;
};

inline Index fiber_count(const CircleCoveringGraph& g, double /*v*/) { return g.total_fiber_count(); }

/// Number of connected components of the edge space.
inline Index edge_space_components(const CircleCoveringGraph& g) { return g.num_components(); }

/*
 * An s-section through the fiber point (component, branch) over base_point: the
 * arc of half-width w/d around the fiber point, mapped by s homeomorphically
 * onto the base arc of half-width w.
 */
struct SSection
{
    Index component = 0;
    int branch = 0;
    int degree = 1;
    double center = 0.0;      // fiber point on the component
    double base_point = 0.0;  // s(center)
    Arc domain;
    EdgeComponent data;

    double source(double theta) const { return data.source(theta); }

    /// (s|_Z)^{-1}(w) for w in the base arc.
    double lift(double w) const { return wrap_angle(center + wrap_signed(w - base_point) / degree); }

    EdgePoint lift_point(double w) const { return {component, lift(w)}; }

    /// r o (s|_Z)^{-1}
    double range_of_lift(double w) const { return data.range(lift(w)); }
};

struct SSectionDecomposition
{
    double base_point = 0.0;
    Arc base;
    std::vector<SSection> sections;
};

/// Base arc W around v of the given half-width (< pi) with its s-sections
/// Z_e, e in E^1 v.  The Z_e are disjoint and their union is E^1 W.
inline SSectionDecomposition s_section_decomposition(const CircleCoveringGraph& g, double v,
                                                     double half_width = std::numbers::pi / 2.0)
{
    if(!(half_width > 0.0 && half_width < std::numbers::pi)) throw InvalidInput("half width must lie in (0, pi)");
    SSectionDecomposition out;
    out.base_point = wrap_angle(v);
    out.base = Arc::centered(v, half_width);
    auto fib = g.fiber(v);
    Index next_branch = 0;
    Index last_comp = static_cast<Index>(-1);
    for(const auto& p : fib)
    {
        if(p.component != last_comp)
        {
            next_branch = 0;
            last_comp = p.component;
        }
        const auto& comp = g.component(p.component);
        SSection s;
        s.component = p.component;
        s.branch = static_cast<int>(next_branch++);
        s.degree = comp.source_degree;
        s.center = p.angle;
        s.base_point = out.base_point;
        s.domain = Arc::centered(p.angle, half_width / comp.source_degree);
        s.data = comp;
        out.sections.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Isomorphisms of finite graphs
// ---------------------------------------------------------------------------

/// (phi0, phi1) with r_F o phi1 = phi0 o r_E and s_F o phi1 = phi0 o s_E.
struct GraphIsomorphism
{
    std::vector<Index> vertex_map;
    std::vector<Index> edge_map;
};

inline bool is_bijection(const std::vector<Index>& m, Index n)
{
    if(m.size() != n) return false;
    std::vector<bool> seen(n, false);
    for(Index x : m)
    {
        if(x >= n || seen[x]) return false;
        seen[x] = true;
    }
    return true;
}

inline bool is_graph_isomorphism(const GraphIsomorphism& iso, const FiniteGraph& e, const FiniteGraph& f)
{
    if(e.num_vertices() != f.num_vertices() || e.num_edges() != f.num_edges()) return false;
    if(!is_bijection(iso.vertex_map, e.num_vertices()) || !is_bijection(iso.edge_map, e.num_edges())) return false;
    for(Index x = 0; x < e.num_edges(); ++x)
    {
        Index y = iso.edge_map[x];
        if(f.range(y) != iso.vertex_map[e.range(x)] || f.source(y) != iso.vertex_map[e.source(x)]) return false;
    }
    return true;
}

inline std::vector<Index> invert_permutation(const std::vector<Index>& p)
{
    std::vector<Index> inv(p.size());
    for(Index i = 0; i < p.size(); ++i) inv.at(p[i]) = i;
    return inv;
}

/// The relabelled graph F with vertex phi0(v) and edge phi1(e).
inline FiniteGraph relabel(const FiniteGraph& g, const GraphIsomorphism& iso)
{
    if(!is_bijection(iso.vertex_map, g.num_vertices()) || !is_bijection(iso.edge_map, g.num_edges()))
    {
        throw InvalidInput("relabelling maps must be bijections");
    }
    std::vector<std::pair<Index, Index>> sr(g.num_edges());
    for(Index e = 0; e < g.num_edges(); ++e)
    {
        sr[iso.edge_map[e]] = {iso.vertex_map[g.source(e)], iso.vertex_map[g.range(e)]};
    }
    return FiniteGraph::from_indices(g.num_vertices(), sr);
}

} // namespace tgraph

#endif
