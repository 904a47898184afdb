#ifndef TGRAPH_MODULE_HPP
#define TGRAPH_MODULE_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "graph.hpp"

namespace tgraph
{

// ---------------------------------------------------------------------------
// Finite graphs: X(E) = C(E^1) with <x, y>(v) = sum_{s(e)=v} conj(x(e)) y(e)
// ---------------------------------------------------------------------------

/// Element of the graph correspondence X(E), indexed by edge.
struct ModuleElement
{
    Eigen::VectorXcd values;

    static ModuleElement zero(const FiniteGraph& g) { return {Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.num_edges()))}; }

    static ModuleElement delta(const FiniteGraph& g, Index e)
    {
        g.check_edge(e);
        auto x = zero(g);
        x.values[static_cast<Eigen::Index>(e)] = 1.0;
        return x;
    }

    Complex operator()(Index e) const { return values[static_cast<Eigen::Index>(e)]; }
    bool is_zero() const { return (values.array() == Complex(0.0)).all(); }

    friend bool operator==(const ModuleElement& a, const ModuleElement& b)
    {
        return a.values.size() == b.values.size() && (a.values.array() == b.values.array()).all();
    }
};

/// Element of C(E^0), indexed by vertex.
struct VertexFunction
{
    Eigen::VectorXcd values;

    static VertexFunction constant(const FiniteGraph& g, Complex c)
    {
        return {Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(g.num_vertices()), c)};
    }

    static VertexFunction indicator(const FiniteGraph& g, Index v)
    {
        g.check_vertex(v);
        auto a = constant(g, 0.0);
        a.values[static_cast<Eigen::Index>(v)] = 1.0;
        return a;
    }

    Complex operator()(Index v) const { return values[static_cast<Eigen::Index>(v)]; }
    bool is_zero() const { return (values.array() == Complex(0.0)).all(); }

    VertexFunction conj() const { return {values.conjugate()}; }

    friend VertexFunction operator*(const VertexFunction& a, const VertexFunction& b)
    {
        return {a.values.cwiseProduct(b.values)};
    }

    friend bool operator==(const VertexFunction& a, const VertexFunction& b)
    {
        return a.values.size() == b.values.size() && (a.values.array() == b.values.array()).all();
    }
};

namespace detail
{
inline void check_shape(const FiniteGraph& g, const ModuleElement& x)
{
    if(static_cast<Index>(x.values.size()) != g.num_edges()) throw InvalidInput("module element does not match graph edge count");
}
inline void check_shape(const FiniteGraph& g, const VertexFunction& a)
{
    if(static_cast<Index>(a.values.size()) != g.num_vertices()) throw InvalidInput("vertex function does not match graph vertex count");
}
} // namespace detail

/// <x, y>(v) = sum over s(e) = v of conj(x(e)) y(e); empty fibers give 0.
inline VertexFunction inner_product(const FiniteGraph& g, const ModuleElement& x, const ModuleElement& y)
{
    detail::check_shape(g, x);
    detail::check_shape(g, y);
    VertexFunction out = VertexFunction::constant(g, 0.0);
    for(Index e = 0; e < g.num_edges(); ++e)
    {
        out.values[static_cast<Eigen::Index>(g.source(e))] += std::conj(x(e)) * y(e);
    }
    return out;
}

/// (x . a)(e) = x(e) a(s(e))
inline ModuleElement right_action(const FiniteGraph& g, const ModuleElement& x, const VertexFunction& a)
{
    detail::check_shape(g, x);
    detail::check_shape(g, a);
    ModuleElement out = x;
    for(Index e = 0; e < g.num_edges(); ++e) out.values[static_cast<Eigen::Index>(e)] *= a(g.source(e));
    return out;
}

/// (a . x)(e) = a(r(e)) x(e)
inline ModuleElement left_action(const FiniteGraph& g, const VertexFunction& a, const ModuleElement& x)
{
    detail::check_shape(g, x);
    detail::check_shape(g, a);
    ModuleElement out = x;
    for(Index e = 0; e < g.num_edges(); ++e) out.values[static_cast<Eigen::Index>(e)] *= a(g.range(e));
    return out;
}

/// ||x||^2 = sup_v <x, x>(v)
inline double module_norm(const FiniteGraph& g, const ModuleElement& x)
{
    auto ip = inner_product(g, x, x);
    double m = 0.0;
    for(Eigen::Index v = 0; v < ip.values.size(); ++v) m = std::max(m, ip.values[v].real());
    return std::sqrt(m);
}

/*
 * Inner product on X^{(x)k} of elementary tensors.  With c_1 = <x_1, y_1> and
 * c_j = <x_j, c_{j-1} . y_j>, the result is c_k; it equals the path sum
 * sum over mu in E^k v of conj(prod x_i(mu_i)) prod y_i(mu_i).
 */
inline VertexFunction tensor_inner_product(const FiniteGraph& g, const std::vector<ModuleElement>& xs,
                                           const std::vector<ModuleElement>& ys)
{
    if(xs.size() != ys.size()) throw InvalidInput("tensor inner product needs equal lengths");
    if(xs.empty()) throw InvalidInput("tensor inner product needs at least one factor");
    VertexFunction c = inner_product(g, xs[0], ys[0]);
    for(Index j = 1; j < xs.size(); ++j) c = inner_product(g, xs[j], left_action(g, c, ys[j]));
    return c;
}

/// x restricted to the fiber s^{-1}(v), in edge order.
inline Eigen::VectorXcd fiber_evaluation(const FiniteGraph& g, const ModuleElement& x, Index v)
{
    detail::check_shape(g, x);
    const auto& fib = g.edges_from(v);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(fib.size()));
    for(Index i = 0; i < fib.size(); ++i) out[static_cast<Eigen::Index>(i)] = x(fib[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Circle covering graphs, sampled on grids
//
// With base grid size N, component c (source degree d) is sampled at the N d
// angles 2 pi k / (N d); then every preimage of a base grid point lands on the
// component grid, provided the source offset is itself a base grid angle.
// ---------------------------------------------------------------------------

/// Sampled element of C(T) for the vertex circle: values at 2 pi j / N.
struct CircleFunction
{
    Eigen::VectorXcd values;

    Index grid() const { return static_cast<Index>(values.size()); }
    Complex operator()(Index j) const { return values[static_cast<Eigen::Index>(j)]; }

    static CircleFunction sample(Index n, const std::function<Complex(double)>& f)
    {
        CircleFunction a{Eigen::VectorXcd(static_cast<Eigen::Index>(n))};
        for(Index j = 0; j < n; ++j)
        {
            a.values[static_cast<Eigen::Index>(j)] = f(grid_angle(static_cast<std::int64_t>(j), static_cast<std::int64_t>(n)));
        }
        return a;
    }
};

/// Sampled element of X(E) for a circle covering graph.
struct CircleModuleElement
{
    Index grid = 0; // base grid size N
    std::vector<Eigen::VectorXcd> components;

    static CircleModuleElement sample(const CircleCoveringGraph& g, Index n, const std::function<Complex(const EdgePoint&)>& f)
    {
        CircleModuleElement x;
        x.grid = n;
        for(Index c = 0; c < g.num_components(); ++c)
        {
            const auto d = static_cast<Index>(g.component(c).source_degree);
            Eigen::VectorXcd vals(static_cast<Eigen::Index>(n * d));
            for(Index k = 0; k < n * d; ++k)
            {
                vals[static_cast<Eigen::Index>(k)] = f({c, grid_angle(static_cast<std::int64_t>(k), static_cast<std::int64_t>(n * d))});
            }
            x.components.push_back(std::move(vals));
        }
        return x;
    }

    Complex at(Index c, Index k) const { return components.at(c)[static_cast<Eigen::Index>(k)]; }
};

namespace detail
{
inline Index source_offset_index(const EdgeComponent& comp, Index n)
{
    auto j = grid_index(comp.source_offset, static_cast<std::int64_t>(n));
    if(j < 0) throw InvalidInput("source offset is not on the sampling grid");
    return static_cast<Index>(j);
}

inline void check_shape(const CircleCoveringGraph& g, const CircleModuleElement& x)
{
    if(x.grid == 0 || x.components.size() != g.num_components()) throw InvalidInput("circle module element does not match graph");
    for(Index c = 0; c < g.num_components(); ++c)
    {
        if(static_cast<Index>(x.components[c].size()) != x.grid * static_cast<Index>(g.component(c).source_degree))
        {
            throw InvalidInput("component grid size mismatch");
        }
    }
}

inline void check_grid(const CircleModuleElement& x, const CircleFunction& a)
{
    if(a.grid() != x.grid) throw InvalidInput("grid mismatch between module element and coefficient");
}
} // namespace detail

/// Sample indices of the fiber over base grid point j: s(theta_k) = 2 pi j / N.
/// Ordered by component, then branch.
inline std::vector<std::pair<Index, Index>> fiber_sample_indices(const CircleCoveringGraph& g, Index n, Index j)
{
    std::vector<std::pair<Index, Index>> out;
    for(Index c = 0; c < g.num_components(); ++c)
    {
        const auto& comp = g.component(c);
        const auto d = static_cast<Index>(comp.source_degree);
        Index off = detail::source_offset_index(comp, n);
        Index base = (j + n - off) % n;
        for(Index l = 0; l < d; ++l) out.emplace_back(c, (base + n * l) % (n * d));
    }
    return out;
}

inline CircleFunction inner_product(const CircleCoveringGraph& g, const CircleModuleElement& x, const CircleModuleElement& y)
{
    detail::check_shape(g, x);
    detail::check_shape(g, y);
    if(x.grid != y.grid) throw InvalidInput("grid mismatch");
    CircleFunction out{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(x.grid))};
    for(Index j = 0; j < x.grid; ++j)
    {
        Complex acc = 0.0;
        for(auto [c, k] : fiber_sample_indices(g, x.grid, j)) acc += std::conj(x.at(c, k)) * y.at(c, k);
        out.values[static_cast<Eigen::Index>(j)] = acc;
    }
    return out;
}

/// (x . a)(theta) = x(theta) a(s(theta)); s maps sample k of a component to base index (off + k) mod N.
inline CircleModuleElement right_action(const CircleCoveringGraph& g, const CircleModuleElement& x, const CircleFunction& a)
{
    detail::check_shape(g, x);
    detail::check_grid(x, a);
    CircleModuleElement out = x;
    const Index n = x.grid;
    for(Index c = 0; c < g.num_components(); ++c)
    {
        Index off = detail::source_offset_index(g.component(c), n);
        for(Eigen::Index k = 0; k < out.components[c].size(); ++k) out.components[c][k] *= a((off + static_cast<Index>(k)) % n);
    }
    return out;
}

/// (a . x)(theta) = a(r(theta)) x(theta) with a given as a function of the angle.
inline CircleModuleElement left_action(const CircleCoveringGraph& g, const std::function<Complex(double)>& a,
                                       const CircleModuleElement& x)
{
    detail::check_shape(g, x);
    CircleModuleElement out = x;
    for(Index c = 0; c < g.num_components(); ++c)
    {
        const auto& comp = g.component(c);
        const auto nd = static_cast<std::int64_t>(out.components[c].size());
        for(Eigen::Index k = 0; k < out.components[c].size(); ++k)
        {
            out.components[c][k] *= a(comp.range(grid_angle(k, nd)));
        }
    }
    return out;
}

/// Sampled left action; requires r to carry component samples onto the base
/// grid (d divides m and the range offset is a grid angle).
inline CircleModuleElement left_action(const CircleCoveringGraph& g, const CircleFunction& a, const CircleModuleElement& x)
{
    detail::check_shape(g, x);
    detail::check_grid(x, a);
    const Index n = x.grid;
    CircleModuleElement out = x;
    for(Index c = 0; c < g.num_components(); ++c)
    {
        const auto& comp = g.component(c);
        if(comp.range_degree % comp.source_degree != 0) throw InvalidInput("range map does not preserve the sampling grid");
        auto roff = grid_index(comp.range_offset, static_cast<std::int64_t>(n));
        if(roff < 0) throw InvalidInput("range offset is not on the sampling grid");
        const std::int64_t ratio = comp.range_degree / comp.source_degree;
        for(Eigen::Index k = 0; k < out.components[c].size(); ++k)
        {
            std::int64_t idx = (roff + ratio * static_cast<std::int64_t>(k)) % static_cast<std::int64_t>(n);
            if(idx < 0) idx += static_cast<std::int64_t>(n);
            out.components[c][k] *= a(static_cast<Index>(idx));
        }
    }
    return out;
}

inline double module_norm(const CircleCoveringGraph& g, const CircleModuleElement& x)
{
    auto ip = inner_product(g, x, x);
    double m = 0.0;
    for(Eigen::Index j = 0; j < ip.values.size(); ++j) m = std::max(m, ip.values[j].real());
    return std::sqrt(m);
}

/// x restricted to the fiber over base grid point j.
inline Eigen::VectorXcd fiber_evaluation(const CircleCoveringGraph& g, const CircleModuleElement& x, Index j)
{
    detail::check_shape(g, x);
    if(j >= x.grid) throw InvalidInput("grid index out of range");
    auto idx = fiber_sample_indices(g, x.grid, j);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(idx.size()));
    for(Index i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x.at(idx[i].first, idx[i].second);
    return out;
}

} // namespace tgraph

#endif
