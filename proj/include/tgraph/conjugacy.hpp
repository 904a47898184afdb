#ifndef TGRAPH_CONJUGACY_HPP
#define TGRAPH_CONJUGACY_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "module.hpp"
#include "report.hpp"

namespace tgraph
{

// ---------------------------------------------------------------------------
// Bipartite matching
// ---------------------------------------------------------------------------

namespace detail
{
// Kuhn's augmenting paths; allowed[i][j] says row i may take column j.
inline bool kuhn_augment(Index i, const std::vector<std::vector<bool>>& allowed, std::vector<bool>& seen,
                         std::vector<std::optional<Index>>& col_owner)
{
    for(Index j = 0; j < allowed[i].size(); ++j)
    {
        if(!allowed[i][j] || seen[j]) continue;
        seen[j] = true;
        if(!col_owner[j] || kuhn_augment(*col_owner[j], allowed, seen, col_owner))
        {
            col_owner[j] = i;
            return true;
        }
    }
    return false;
}
} // namespace detail

/// Perfect matching row -> column on a square pattern, if one exists.
inline std::optional<std::vector<Index>> perfect_matching(const std::vector<std::vector<bool>>& allowed)
{
    const Index n = allowed.size();
    std::vector<std::optional<Index>> owner(n);
    for(Index i = 0; i < n; ++i)
    {
        std::vector<bool> seen(n, false);
        if(!detail::kuhn_augment(i, allowed, seen, owner)) return std::nullopt;
    }
    std::vector<Index> perm(n);
    for(Index j = 0; j < n; ++j) perm[*owner[j]] = j;
    return perm;
}

// ---------------------------------------------------------------------------
// Nonzero permutation of an invertible matrix
// ---------------------------------------------------------------------------

struct PermutationResult
{
    std::vector<Index> sigma;
    double margin = 0.0;    // min_i |B(i, sigma(i))|
    double threshold = 0.0;
    double condition = 0.0; // sigma_max / sigma_min
};

inline constexpr double nonzero_threshold = 1e-12;

/*
 * sigma with B(i, sigma(i)) != 0 for all i.  Among all such permutations the
 * one returned maximizes the smallest matched magnitude (bottleneck matching),
 * so the reported margin shows how far the choice is from the threshold.
 */
inline PermutationResult nonzero_permutation(const Eigen::MatrixXcd& b, double threshold = nonzero_threshold,
                                             double max_condition = 1e12)
{
    if(b.rows() != b.cols()) throw InvalidInput("matrix must be square");
    const Index n = static_cast<Index>(b.rows());
    PermutationResult out;
    out.threshold = threshold;
    if(n == 0) return out;

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b);
    const auto& sv = svd.singularValues();
    double smax = sv[0], smin = sv[sv.size() - 1];
    out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if(!(out.condition <= max_condition)) throw DomainError("matrix is singular or nearly singular (condition " + std::to_string(out.condition) + ")");

    std::vector<double> levels;
    for(Eigen::Index i = 0; i < b.rows(); ++i)
        for(Eigen::Index j = 0; j < b.cols(); ++j)
            if(std::abs(b(i, j)) > threshold) levels.push_back(std::abs(b(i, j)));
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    auto pattern = [&](double t) {
        std::vector<std::vector<bool>> a(n, std::vector<bool>(n));
        for(Index i = 0; i < n; ++i)
            for(Index j = 0; j < n; ++j) a[i][j] = std::abs(b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) >= t;
        return a;
    };

    if(levels.empty() || !perfect_matching(pattern(levels.front())))
    {
        throw VerificationError("no perfect matching on the nonzero pattern at threshold " + std::to_string(threshold));
    }
    // largest level that still admits a perfect matching
    Index lo = 0, hi = levels.size() - 1;
    while(lo < hi)
    {
        Index mid = (lo + hi + 1) / 2;
        if(perfect_matching(pattern(levels[mid])))
            lo = mid;
        else
            hi = mid - 1;
    }
    out.sigma = *perfect_matching(pattern(levels[lo]));
    out.margin = std::numeric_limits<double>::infinity();
    for(Index i = 0; i < n; ++i)
        out.margin = std::min(out.margin, std::abs(b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.sigma[i]))));
    return out;
}

// ---------------------------------------------------------------------------
// Color refinement with canonical color names
// ---------------------------------------------------------------------------

namespace detail
{
using Signature = std::vector<std::int64_t>;

// Per-vertex signature rounds on the multiplicity matrix.  Colors are ranks of
// sorted signatures, so identical graphs up to relabelling get identical colors.
inline std::vector<Index> stable_colors(const std::vector<std::vector<std::int64_t>>& m)
{
    const Index n = m.size();
    std::vector<Index> color(n, 0);
    Index classes = n == 0 ? 0 : 1;
    for(Index round = 0; round <= n; ++round)
    {
        std::vector<Signature> sig(n);
        for(Index v = 0; v < n; ++v)
        {
            Signature s{static_cast<std::int64_t>(color[v]), m[v][v]};
            std::vector<std::pair<std::int64_t, std::int64_t>> in, out;
            for(Index w = 0; w < n; ++w)
            {
                if(w == v) continue;
                if(m[w][v] != 0) in.push_back({static_cast<std::int64_t>(color[w]), m[w][v]});
                if(m[v][w] != 0) out.push_back({static_cast<std::int64_t>(color[w]), m[v][w]});
            }
            std::sort(in.begin(), in.end());
            std::sort(out.begin(), out.end());
            s.push_back(static_cast<std::int64_t>(in.size()));
            for(auto [c, k] : in) s.insert(s.end(), {c, k});
            s.push_back(static_cast<std::int64_t>(out.size()));
            for(auto [c, k] : out) s.insert(s.end(), {c, k});
            sig[v] = std::move(s);
        }
        std::vector<Signature> distinct = sig;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for(Index v = 0; v < n; ++v)
            color[v] = static_cast<Index>(std::lower_bound(distinct.begin(), distinct.end(), sig[v]) - distinct.begin());
        if(distinct.size() == classes && round > 0) break;
        classes = distinct.size();
    }
    return color;
}

// Joint refinement over the disjoint union keeps colors comparable between graphs.
inline std::pair<std::vector<Index>, std::vector<Index>> joint_colors(const std::vector<std::vector<std::int64_t>>& a,
                                                                      const std::vector<std::vector<std::int64_t>>& b)
{
    const Index n = a.size(), k = b.size();
    std::vector<std::vector<std::int64_t>> u(n + k, std::vector<std::int64_t>(n + k, 0));
    for(Index i = 0; i < n; ++i)
        for(Index j = 0; j < n; ++j) u[i][j] = a[i][j];
    for(Index i = 0; i < k; ++i)
        for(Index j = 0; j < k; ++j) u[n + i][n + j] = b[i][j];
    auto c = stable_colors(u);
    return {std::vector<Index>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n)),
            std::vector<Index>(c.begin() + static_cast<std::ptrdiff_t>(n), c.end())};
}
} // namespace detail

// ---------------------------------------------------------------------------
// Finite graph isomorphism
// ---------------------------------------------------------------------------

struct IsomorphismResult
{
    std::optional<GraphIsomorphism> iso;
    std::string refutation; // distinguishing invariant when iso is empty
    Index nodes_visited = 0;

    bool found() const { return iso.has_value(); }
};

namespace detail
{
struct IsoSearch
{
    const std::vector<std::vector<std::int64_t>>& a;
    const std::vector<std::vector<std::int64_t>>& b;
    const std::vector<Index>& ca;
    const std::vector<Index>& cb;
    std::vector<Index> order;
    std::vector<std::optional<Index>> map;
    std::vector<bool> used;
    Index visited = 0;

    bool consistent(Index u, Index x) const
    {
        if(a[u][u] != b[x][x]) return false;
        for(Index w = 0; w < map.size(); ++w)
        {
            if(!map[w]) continue;
            if(a[u][w] != b[x][*map[w]] || a[w][u] != b[*map[w]][x]) return false;
        }
        return true;
    }

    bool run(Index depth)
    {
        ++visited;
        if(depth == order.size()) return true;
        Index u = order[depth];
        for(Index x = 0; x < b.size(); ++x)
        {
            if(used[x] || ca[u] != cb[x] || !consistent(u, x)) continue;
            map[u] = x;
            used[x] = true;
            if(run(depth + 1)) return true;
            map[u].reset();
            used[x] = false;
        }
        return false;
    }
};

inline std::vector<std::int64_t> sorted_copy(std::vector<std::int64_t> v)
{
    std::sort(v.begin(), v.end());
    return v;
}
} // namespace detail

/// Pairs edges inside each (range, source) class once the vertex bijection is fixed.
inline GraphIsomorphism edge_map_from_vertices(const FiniteGraph& e, const FiniteGraph& f, const std::vector<Index>& phi0)
{
    std::map<std::pair<Index, Index>, std::vector<Index>> pool;
    for(Index y = 0; y < f.num_edges(); ++y) pool[{f.range(y), f.source(y)}].push_back(y);
    std::map<std::pair<Index, Index>, Index> next;
    GraphIsomorphism iso{phi0, std::vector<Index>(e.num_edges())};
    for(Index x = 0; x < e.num_edges(); ++x)
    {
        std::pair<Index, Index> key{phi0[e.range(x)], phi0[e.source(x)]};
        auto& k = next[key];
        iso.edge_map[x] = pool.at(key).at(k++);
    }
    return iso;
}

/*
 * Backtracking over vertex bijections that preserve colors from joint
 * refinement and the multiplicity matrix |w E^1 v|.  The search is exhaustive,
 * so a failure is a proof of non-isomorphism.
 */
inline IsomorphismResult finite_graph_isomorphism(const FiniteGraph& e, const FiniteGraph& f)
{
    IsomorphismResult out;
    if(e.num_vertices() != f.num_vertices())
    {
        out.refutation = "vertex counts differ (" + std::to_string(e.num_vertices()) + " vs " + std::to_string(f.num_vertices()) + ")";
        return out;
    }
    if(e.num_edges() != f.num_edges())
    {
        out.refutation = "edge counts differ (" + std::to_string(e.num_edges()) + " vs " + std::to_string(f.num_edges()) + ")";
        return out;
    }
    auto a = multiplicity_matrix(e);
    auto b = multiplicity_matrix(f);
    const Index n = a.size();

    std::vector<std::int64_t> ina(n, 0), inb(n, 0), outa(n, 0), outb(n, 0);
    for(Index i = 0; i < n; ++i)
        for(Index j = 0; j < n; ++j)
        {
            outa[j] += a[i][j]; // edges with source j
            ina[i] += a[i][j];  // edges with range i
            outb[j] += b[i][j];
            inb[i] += b[i][j];
        }
    if(detail::sorted_copy(outa) != detail::sorted_copy(outb))
    {
        out.refutation = "source degree sequences differ";
        return out;
    }
    if(detail::sorted_copy(ina) != detail::sorted_copy(inb))
    {
        out.refutation = "range degree sequences differ";
        return out;
    }

    auto [ca, cb] = detail::joint_colors(a, b);
    if(detail::sorted_copy(std::vector<std::int64_t>(ca.begin(), ca.end())) !=
       detail::sorted_copy(std::vector<std::int64_t>(cb.begin(), cb.end())))
    {
        out.refutation = "color refinement of the |wE^1v| matrix separates the graphs";
        return out;
    }

    detail::IsoSearch s{a, b, ca, cb, {}, std::vector<std::optional<Index>>(n), std::vector<bool>(n, false)};
    // rarest colors first
    std::map<Index, Index> freq;
    for(Index c : ca) ++freq[c];
    s.order.resize(n);
    std::iota(s.order.begin(), s.order.end(), Index{0});
    std::stable_sort(s.order.begin(), s.order.end(), [&](Index x, Index y) { return freq[ca[x]] < freq[ca[y]]; });

    bool ok = s.run(0);
    out.nodes_visited = s.visited;
    if(!ok)
    {
        out.refutation = "no vertex bijection preserves the |wE^1v| matrix";
        return out;
    }
    std::vector<Index> phi0(n);
    for(Index v = 0; v < n; ++v) phi0[v] = *s.map[v];
    auto iso = edge_map_from_vertices(e, f, phi0);
    if(!is_graph_isomorphism(iso, e, f)) throw VerificationError("constructed maps fail the isomorphism identities");
    out.iso = std::move(iso);
    return out;
}

// ---------------------------------------------------------------------------
// Bimodule invariants: canonical form of |w E^1 v|
// ---------------------------------------------------------------------------

struct BimoduleInvariant
{
    std::vector<std::vector<std::int64_t>> matrix; // canonically ordered multiplicities
    std::vector<Index> class_sizes;                // refinement cell sizes, in canonical order

    friend bool operator==(const BimoduleInvariant&, const BimoduleInvariant&) = default;
};

namespace detail
{
// Entries of the leading k x k block in the order the search fixes them.
inline void block_sequence(const std::vector<std::vector<std::int64_t>>& m, const std::vector<Index>& perm, Index k,
                           std::vector<std::int64_t>& out)
{
    // new row k restricted to 0..k, then new column k restricted to 0..k-1
    for(Index j = 0; j <= k; ++j) out.push_back(m[perm[k]][perm[j]]);
    for(Index i = 0; i < k; ++i) out.push_back(m[perm[i]][perm[k]]);
}

struct CanonSearch
{
    const std::vector<std::vector<std::int64_t>>& m;
    std::vector<Index> cell_of_position; // required color at each position
    const std::vector<Index>& color;
    std::vector<Index> perm;
    std::vector<bool> used;
    std::vector<std::int64_t> seq;
    std::vector<std::int64_t> best_seq;
    std::vector<Index> best_perm;
    bool have_best = false;

    void run(Index k)
    {
        const Index n = m.size();
        if(k == n)
        {
            if(!have_best || seq < best_seq)
            {
                best_seq = seq;
                best_perm = perm;
                have_best = true;
            }
            return;
        }
        for(Index v = 0; v < n; ++v)
        {
            if(used[v] || color[v] != cell_of_position[k]) continue;
            perm.push_back(v);
            used[v] = true;
            const Index before = seq.size();
            block_sequence(m, perm, k, seq);
            bool prune = false;
            if(have_best)
            {
                auto cmp = std::lexicographical_compare_three_way(seq.begin(), seq.end(), best_seq.begin(),
                                                                  best_seq.begin() + static_cast<std::ptrdiff_t>(seq.size()));
                prune = cmp > 0;
            }
            if(!prune) run(k + 1);
            seq.resize(before);
            used[v] = false;
            perm.pop_back();
        }
    }
};
} // namespace detail

/*
 * The multiplicity matrix up to simultaneous row/column permutation.  Vertices
 * are grouped by canonical refinement color; inside the cells, branch and bound
 * finds the ordering whose growing leading blocks are lexicographically least.
 */
inline BimoduleInvariant bimodule_invariants(const FiniteGraph& g)
{
    auto m = multiplicity_matrix(g);
    const Index n = m.size();
    auto color = detail::stable_colors(m);
    std::vector<Index> sorted_colors = color;
    std::sort(sorted_colors.begin(), sorted_colors.end());

    detail::CanonSearch s{m, sorted_colors, color, {}, std::vector<bool>(n, false), {}, {}, {}, false};
    s.run(0);

    BimoduleInvariant out;
    out.matrix.assign(n, std::vector<std::int64_t>(n, 0));
    for(Index i = 0; i < n; ++i)
        for(Index j = 0; j < n; ++j) out.matrix[i][j] = m[s.best_perm[i]][s.best_perm[j]];
    for(Index i = 0; i < n;)
    {
        Index j = i;
        while(j < n && sorted_colors[j] == sorted_colors[i]) ++j;
        out.class_sizes.push_back(j - i);
        i = j;
    }
    return out;
}

inline bool bimodules_isomorphic(const FiniteGraph& e, const FiniteGraph& f) { return bimodule_invariants(e) == bimodule_invariants(f); }

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// h, generators g_i and transfer maps alpha_i on supp(h), finite graphs.
struct FiniteFrameData
{
    VertexFunction h;
    std::vector<ModuleElement> generators;
    std::vector<std::vector<std::optional<Index>>> alpha; // alpha[i][v]
};

/// h, generators and transfer maps sampled on the base grid, circle graphs.
struct CircleFrameData
{
    CircleFunction h;
    std::vector<CircleModuleElement> generators;
    std::vector<std::vector<std::optional<double>>> alpha; // alpha[i][j], j on the base grid
};

struct FramePoint
{
    Index base_index = 0; // vertex, or base grid index
    std::vector<Index> sigma;
    double margin = 0.0;
};

struct FrameResult
{
    CheckList checks;
    std::vector<FramePoint> points;

    bool passed() const { return checks.passed(); }
};

namespace detail
{
inline Index numerical_rank(const Eigen::MatrixXcd& m, double rel_tol = 1e-10)
{
    if(m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    Index r = 0;
    for(Eigen::Index i = 0; i < sv.size(); ++i)
        if(sv[i] > rel_tol * std::max(1.0, sv[0])) ++r;
    return r;
}
} // namespace detail

/// Frame conditions with the delta-function test basis; W = {v}, Z_e = {e}.
inline FrameResult frame_verify(const FiniteGraph& g, const FiniteFrameData& fd, double tol)
{
    detail::check_shape(g, fd.h);
    if(fd.h.is_zero()) throw InvalidInput("h is identically zero");
    const Index k = fd.generators.size();
    if(fd.alpha.size() != k) throw InvalidInput("one transfer map per generator is required");
    FrameResult out;

    double c1 = 0.0;
    for(Index i = 0; i < k; ++i)
        for(Index j = 0; j < k; ++j)
        {
            auto ip = inner_product(g, fd.generators[i], fd.generators[j]);
            Eigen::VectorXcd target = i == j ? fd.h.values : Eigen::VectorXcd::Zero(fd.h.values.size());
            c1 = std::max(c1, (ip.values - target).cwiseAbs().maxCoeff());
        }
    out.checks.add_residual("condition1_orthogonality", c1, tol);

    bool span_ok = true;
    std::string span_detail;
    for(Index v = 0; v < g.num_vertices(); ++v)
    {
        if(std::abs(fd.h(v)) <= tol) continue;
        const auto& fib = g.edges_from(v);
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(fib.size()));
        for(Index i = 0; i < k; ++i) m.row(static_cast<Eigen::Index>(i)) = fiber_evaluation(g, fd.generators[i], v).transpose();
        if(detail::numerical_rank(m) != fib.size())
        {
            span_ok = false;
            span_detail = "fiber over " + g.vertex_id(v) + " not spanned";
        }
    }
    out.checks.add("condition2_fiber_span", span_ok, 0.0, span_detail);

    double c3 = 0.0;
    for(Index u = 0; u < g.num_vertices(); ++u)
    {
        auto a = VertexFunction::indicator(g, u);
        for(Index i = 0; i < k; ++i)
            for(Index e = 0; e < g.num_edges(); ++e)
            {
                Complex gi = fd.generators[i](e);
                if(gi == Complex(0.0)) continue;
                const auto& al = fd.alpha[i].at(g.source(e));
                double diff = al ? std::abs(a(g.range(e)) - a(*al)) : 1.0;
                c3 = std::max(c3, std::abs(gi) * diff);
            }
    }
    out.checks.add_residual("condition3_covariance", c3, tol);
    if(!out.checks.passed()) return out;

    bool alpha_ok = true;
    std::string alpha_detail;
    for(Index v = 0; v < g.num_vertices(); ++v)
    {
        if(std::abs(fd.h(v)) <= tol) continue;
        const auto& fib = g.edges_from(v);
        if(fib.size() != k)
        {
            alpha_ok = false;
            alpha_detail = "generator count differs from fiber size";
            continue;
        }
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        for(Index i = 0; i < k; ++i) m.row(static_cast<Eigen::Index>(i)) = fiber_evaluation(g, fd.generators[i], v).transpose();
        auto pr = nonzero_permutation(m);
        for(Index i = 0; i < k; ++i)
        {
            const auto& al = fd.alpha[i][v];
            if(!al || *al != g.range(fib[pr.sigma[i]]))
            {
                alpha_ok = false;
                alpha_detail = "alpha mismatch at " + g.vertex_id(v);
            }
        }
        out.points.push_back({v, pr.sigma, pr.margin});
    }
    out.checks.add("alpha_equals_r_of_section", alpha_ok, 0.0, alpha_detail);
    return out;
}

/// h = delta_v, g_i = delta_{e_i} over the fiber E^1 v, alpha_i(v) = r(e_i).
inline FiniteFrameData delta_frame(const FiniteGraph& g, Index v)
{
    FiniteFrameData fd;
    fd.h = VertexFunction::indicator(g, v);
    for(Index e : g.edges_from(v))
    {
        fd.generators.push_back(ModuleElement::delta(g, e));
        std::vector<std::optional<Index>> al(g.num_vertices());
        al[v] = g.range(e);
        fd.alpha.push_back(al);
    }
    return fd;
}

namespace detail
{
// Base grid points where h and both neighbours are nonzero.
inline std::vector<Index> interior_support(const CircleFunction& h, double tol)
{
    const Index n = h.grid();
    std::vector<Index> out;
    for(Index j = 0; j < n; ++j)
        if(std::abs(h(j)) > tol && std::abs(h((j + 1) % n)) > tol && std::abs(h((j + n - 1) % n)) > tol) out.push_back(j);
    return out;
}
} // namespace detail

/*
 * Circle version.  Condition (3) is tested on the Fourier modes e^{i q theta},
 * |q| <= fourier_modes, evaluated in closed form at r(theta) and alpha_i(s(theta)).
 * The extracted sigma is checked against alpha_i = r o (s|_Z)^{-1} on the part
 * of the interior support within section_half_width of each base point.
 */
inline FrameResult frame_verify(const CircleCoveringGraph& g, const CircleFrameData& fd, double tol, int fourier_modes = 4,
                                double section_half_width = std::numbers::pi / 2.0)
{
    const Index n = fd.h.grid();
    const Index k = fd.generators.size();
    if(fd.alpha.size() != k) throw InvalidInput("one transfer map per generator is required");
    if(fd.h.values.cwiseAbs().maxCoeff() == 0.0) throw InvalidInput("h is identically zero");
    for(const auto& x : fd.generators)
    {
        detail::check_shape(g, x);
        if(x.grid != n) throw InvalidInput("generator grid differs from h");
    }
    for(const auto& al : fd.alpha)
        if(al.size() != n) throw InvalidInput("transfer map grid differs from h");
    FrameResult out;

    double c1 = 0.0;
    for(Index i = 0; i < k; ++i)
        for(Index j = 0; j < k; ++j)
        {
            auto ip = inner_product(g, fd.generators[i], fd.generators[j]);
            Eigen::VectorXcd target = i == j ? fd.h.values : Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
            c1 = std::max(c1, (ip.values - target).cwiseAbs().maxCoeff());
        }
    out.checks.add_residual("condition1_orthogonality", c1, tol);

    const auto interior = detail::interior_support(fd.h, tol);
    const Index fib = g.total_fiber_count();
    bool span_ok = true;
    std::string span_detail;
    for(Index j : interior)
    {
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(fib));
        for(Index i = 0; i < k; ++i) m.row(static_cast<Eigen::Index>(i)) = fiber_evaluation(g, fd.generators[i], j).transpose();
        if(detail::numerical_rank(m) != fib)
        {
            span_ok = false;
            span_detail = "fiber over grid point " + std::to_string(j) + " not spanned";
            break;
        }
    }
    out.checks.add("condition2_fiber_span", span_ok, 0.0, span_detail);

    double c3 = 0.0;
    for(Index i = 0; i < k; ++i)
    {
        const auto& x = fd.generators[i];
        for(Index c = 0; c < g.num_components(); ++c)
        {
            const auto& comp = g.component(c);
            const Index off = detail::source_offset_index(comp, n);
            const auto nd = static_cast<std::int64_t>(x.components[c].size());
            for(std::int64_t s = 0; s < nd; ++s)
            {
                Complex gi = x.at(c, static_cast<Index>(s));
                if(gi == Complex(0.0)) continue;
                const auto& al = fd.alpha[i][(off + static_cast<Index>(s)) % n];
                if(!al)
                {
                    c3 = std::max(c3, std::abs(gi));
                    continue;
                }
                double r = comp.range(grid_angle(s, nd));
                for(int q = -fourier_modes; q <= fourier_modes; ++q)
                {
                    double diff = std::abs(std::polar(1.0, q * r) - std::polar(1.0, q * *al));
                    c3 = std::max(c3, std::abs(gi) * diff);
                }
            }
        }
    }
    out.checks.add_residual("condition3_covariance", c3, tol);
    if(!out.checks.passed()) return out;

    double alpha_res = 0.0;
    bool alpha_ok = k == fib;
    std::string alpha_detail = alpha_ok ? "" : "generator count differs from fiber size";
    std::vector<bool> in_interior(n, false);
    for(Index j : interior) in_interior[j] = true;
    for(Index j : alpha_ok ? interior : std::vector<Index>{})
    {
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        for(Index i = 0; i < k; ++i) m.row(static_cast<Eigen::Index>(i)) = fiber_evaluation(g, fd.generators[i], j).transpose();
        auto pr = nonzero_permutation(m);
        const double v = grid_angle(static_cast<std::int64_t>(j), static_cast<std::int64_t>(n));
        auto dec = s_section_decomposition(g, v, section_half_width);
        for(Index w = 0; w < n; ++w)
        {
            if(!in_interior[w]) continue;
            double wa = grid_angle(static_cast<std::int64_t>(w), static_cast<std::int64_t>(n));
            if(angle_distance(wa, v) >= section_half_width) continue;
            for(Index i = 0; i < k; ++i)
            {
                const auto& al = fd.alpha[i][w];
                double expect = dec.sections[pr.sigma[i]].range_of_lift(wa);
                double d = al ? angle_distance(*al, expect) : std::numbers::pi;
                alpha_res = std::max(alpha_res, d);
            }
        }
        out.points.push_back({j, pr.sigma, pr.margin});
    }
    if(alpha_res > tol && alpha_ok) alpha_detail = "alpha differs from r o (s|_Z)^{-1}";
    out.checks.add("alpha_equals_r_of_section", alpha_ok && alpha_res <= tol, alpha_res, alpha_detail);
    return out;
}

/*
 * Construction from the proof: bump h(w) = cos^2(pi D / (2 rho)) for
 * D = |w - center| < rho, and g_e = sqrt(h o s) on the s-section Z_e through
 * each fiber point over the center; alpha_e = r o (s|_{Z_e})^{-1} on supp(h).
 */
inline CircleFrameData bump_frame(const CircleCoveringGraph& g, Index grid, Index center_index, double radius = std::numbers::pi / 3.0)
{
    if(!(radius > 0.0 && radius < std::numbers::pi / 2.0)) throw InvalidInput("bump radius must lie in (0, pi/2)");
    const Index n = grid;
    const double center = grid_angle(static_cast<std::int64_t>(center_index), static_cast<std::int64_t>(n));
    CircleFrameData fd;
    fd.h = CircleFunction::sample(n, [&](double w) -> Complex {
        double d = angle_distance(w, center);
        if(d >= radius) return 0.0;
        double c = std::cos(std::numbers::pi * d / (2.0 * radius));
        return c * c;
    });
    auto dec = s_section_decomposition(g, center, std::numbers::pi / 2.0);
    for(const auto& sec : dec.sections)
    {
        CircleModuleElement x = CircleModuleElement::sample(g, n, [](const EdgePoint&) { return Complex(0.0); });
        const Index off = detail::source_offset_index(g.component(sec.component), n);
        auto& vals = x.components[sec.component];
        const auto nd = static_cast<std::int64_t>(vals.size());
        for(std::int64_t s = 0; s < nd; ++s)
        {
            if(!sec.domain.contains(grid_angle(s, nd))) continue;
            double hv = fd.h((off + static_cast<Index>(s)) % n).real();
            vals[static_cast<Eigen::Index>(s)] = std::sqrt(hv);
        }
        fd.generators.push_back(std::move(x));
        std::vector<std::optional<double>> al(n);
        for(Index j = 0; j < n; ++j)
            if(fd.h(j) != Complex(0.0)) al[j] = sec.range_of_lift(grid_angle(static_cast<std::int64_t>(j), static_cast<std::int64_t>(n)));
        fd.alpha.push_back(std::move(al));
    }
    return fd;
}

/// g_0 += eps g_1 (or g_0 scaled by 1 + eps when there is a single generator).
inline CircleFrameData perturb_frame(CircleFrameData fd, double eps)
{
    if(fd.generators.empty()) return fd;
    auto& g0 = fd.generators[0];
    for(Index c = 0; c < g0.components.size(); ++c)
    {
        if(fd.generators.size() > 1)
            g0.components[c] += eps * fd.generators[1].components[c];
        else
            g0.components[c] *= 1.0 + eps;
    }
    return fd;
}

// ---------------------------------------------------------------------------
// Local conjugacy of rigid circle graphs
// ---------------------------------------------------------------------------

/// phi0(theta) = offset + theta, or offset - theta when reflected.
struct RigidCircleMap
{
    double offset = 0.0;
    bool reflection = false;

    double operator()(double theta) const { return wrap_angle(reflection ? offset - theta : offset + theta); }
};

struct ArcMatching
{
    double base_point = 0.0;
    Arc neighbourhood;
    std::vector<Index> matching; // section i of E over U goes to section matching[i] of F over phi0(U)
};

struct LocalConjugacyCertificate
{
    RigidCircleMap vertex_map;
    std::vector<ArcMatching> arcs;
    double max_residual = 0.0;
};

enum class LocalConjugacyStatus
{
    certified,
    refuted,
    inconclusive
};

struct LocalConjugacyResult
{
    LocalConjugacyStatus status = LocalConjugacyStatus::inconclusive;
    std::optional<LocalConjugacyCertificate> certificate;
    std::string message;
    Index candidates_tried = 0;
};

inline std::string to_string(LocalConjugacyStatus s)
{
    switch(s)
    {
    case LocalConjugacyStatus::certified: return "certified";
    case LocalConjugacyStatus::refuted: return "refuted";
    default: return "inconclusive";
    }
}

namespace detail
{
inline std::optional<ArcMatching> match_over_arc(const CircleCoveringGraph& e, const CircleCoveringGraph& f, const RigidCircleMap& phi,
                                                 double v, double half_width, Index samples, double tol, double& residual)
{
    auto de = s_section_decomposition(e, v, half_width);
    auto df = s_section_decomposition(f, phi(v), half_width);
    const Index k = de.sections.size();
    std::vector<std::vector<bool>> allowed(k, std::vector<bool>(k, false));
    std::vector<std::vector<double>> res(k, std::vector<double>(k, 0.0));
    for(Index i = 0; i < k; ++i)
        for(Index j = 0; j < k; ++j)
        {
            double worst = 0.0;
            for(Index t = 0; t < samples; ++t)
            {
                // u sweeps the closed arc [v - half_width, v + half_width] shrunk slightly
                double frac = samples == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(t) / static_cast<double>(samples - 1);
                double u = wrap_angle(v + 0.999 * half_width * frac);
                double lhs = phi(de.sections[i].range_of_lift(u));
                double rhs = df.sections[j].range_of_lift(phi(u));
                worst = std::max(worst, angle_distance(lhs, rhs));
            }
            res[i][j] = worst;
            allowed[i][j] = worst <= tol;
        }
    auto m = perfect_matching(allowed);
    if(!m) return std::nullopt;
    for(Index i = 0; i < k; ++i) residual = std::max(residual, res[i][(*m)[i]]);
    return ArcMatching{wrap_angle(v), Arc::centered(v, half_width), *m};
}
} // namespace detail

/*
 * Searches rigid vertex maps phi0 (rotations and reflections, with offsets from
 * a grid plus exact candidates built from component offsets).  For each phi0 the
 * circle is covered by arcs U and the s-sections of E over U are matched to those
 * of F over phi0(U) so that phi0 o r_E = r_F o phi1_U at sampled points; the
 * source identity holds by construction of phi1_U = (s_F|)^{-1} o phi0 o s_E.
 * A fiber count mismatch refutes; a failed search is only inconclusive.
 */
inline LocalConjugacyResult local_conjugacy_check(const CircleCoveringGraph& e, const CircleCoveringGraph& f, double tol = 1e-9,
                                                  Index grid = 720, Index arcs = 16, Index samples = 9)
{
    LocalConjugacyResult out;
    if(e.total_fiber_count() != f.total_fiber_count())
    {
        out.status = LocalConjugacyStatus::refuted;
        out.message = "fiber counts differ (" + std::to_string(e.total_fiber_count()) + " vs " + std::to_string(f.total_fiber_count()) + ")";
        return out;
    }
    if(arcs < 3) throw InvalidInput("at least three arcs are needed");

    std::vector<double> offsets;
    std::vector<double> oe, of;
    for(const auto& c : e.components()) oe.insert(oe.end(), {c.source_offset, c.range_offset});
    for(const auto& c : f.components()) of.insert(of.end(), {c.source_offset, c.range_offset});
    offsets.push_back(0.0);
    for(double a : oe)
        for(double b : of)
        {
            offsets.push_back(wrap_angle(b - a));
            offsets.push_back(wrap_angle(b + a));
        }
    for(Index k = 0; k < grid; ++k) offsets.push_back(grid_angle(static_cast<std::int64_t>(k), static_cast<std::int64_t>(grid)));
    std::vector<double> uniq;
    for(double o : offsets)
    {
        bool dup = false;
        for(double u : uniq) dup = dup || angles_equal(o, u, 1e-12);
        if(!dup) uniq.push_back(o);
    }

    // arcs of half-width slightly over half the spacing cover the circle
    const double half_width = std::min(0.6 * two_pi / static_cast<double>(arcs), std::numbers::pi / 2.0);
    for(bool refl : {false, true})
    {
        for(double o : uniq)
        {
            ++out.candidates_tried;
            RigidCircleMap phi{o, refl};
            LocalConjugacyCertificate cert{phi, {}, 0.0};
            bool ok = true;
            for(Index a = 0; a < arcs && ok; ++a)
            {
                double v = grid_angle(static_cast<std::int64_t>(a), static_cast<std::int64_t>(arcs));
                auto m = detail::match_over_arc(e, f, phi, v, half_width, samples, tol, cert.max_residual);
                if(!m)
                    ok = false;
                else
                    cert.arcs.push_back(*m);
            }
            if(ok)
            {
                out.status = LocalConjugacyStatus::certified;
                out.certificate = std::move(cert);
                out.message = std::string(refl ? "reflection" : "rotation") + " with offset " + std::to_string(o);
                return out;
            }
        }
    }
    out.message = "no rigid certificate found (not a proof of non-local-conjugacy)";
    return out;
}

} // namespace tgraph

#endif
