#ifndef TGRAPH_COCYCLE_HPP
#define TGRAPH_COCYCLE_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graph.hpp"
#include "report.hpp"

namespace tgraph
{

// ---------------------------------------------------------------------------
// Permutations: p[l] is the image of l; (s o t)[l] = s[t[l]]
// ---------------------------------------------------------------------------

using Permutation = std::vector<Index>;

inline Permutation identity_permutation(Index k)
{
    Permutation p(k);
    for(Index i = 0; i < k; ++i) p[i] = i;
    return p;
}

inline bool is_permutation(const Permutation& p, Index k) { return is_bijection(p, k); }

inline Permutation compose(const Permutation& s, const Permutation& t)
{
    Permutation out(t.size());
    for(Index i = 0; i < t.size(); ++i) out[i] = s.at(t[i]);
    return out;
}

inline Permutation inverse(const Permutation& p) { return invert_permutation(p); }

/// Cycles in order of their smallest element, each starting there.
inline std::vector<std::vector<Index>> cycles(const Permutation& p)
{
    std::vector<std::vector<Index>> out;
    std::vector<bool> seen(p.size(), false);
    for(Index i = 0; i < p.size(); ++i)
    {
        if(seen[i]) continue;
        std::vector<Index> c;
        for(Index j = i; !seen[j]; j = p[j])
        {
            seen[j] = true;
            c.push_back(j);
        }
        out.push_back(std::move(c));
    }
    return out;
}

/// Cycle lengths, largest first.
inline std::vector<Index> cycle_type(const Permutation& p)
{
    std::vector<Index> t;
    for(const auto& c : cycles(p)) t.push_back(c.size());
    std::sort(t.rbegin(), t.rend());
    return t;
}

inline std::string cycle_type_string(const std::vector<Index>& t)
{
    std::string s;
    for(Index i = 0; i < t.size(); ++i) s += (i ? "+" : "") + std::to_string(t[i]);
    return s;
}

// ---------------------------------------------------------------------------
// Arc covers
// ---------------------------------------------------------------------------

/// Components of A_i cap A_j, ordered by their offset from the start of arc min(i, j).
inline std::vector<Arc> overlap_components(const std::vector<Arc>& arcs, Index i, Index j)
{
    const Arc& a = arcs.at(std::min(i, j));
    const Arc& b = arcs.at(std::max(i, j));
    if(i == j) return {a};
    const bool full_a = a.length >= two_pi, full_b = b.length >= two_pi;
    if(full_a && full_b) return {a};
    if(full_a) return {b};
    if(full_b) return {a};
    // b relative to the start of a, as [b0, b0 + L) and its shift by -2 pi
    const double b0 = wrap_angle(b.start - a.start);
    std::vector<std::pair<double, double>> pieces;
    for(double shift : {b0 - two_pi, b0})
    {
        double lo = std::max(0.0, shift), hi = std::min(a.length, shift + b.length);
        if(hi - lo > angle_tol) pieces.push_back({lo, hi});
    }
    std::sort(pieces.begin(), pieces.end());
    std::vector<Arc> out;
    for(auto [lo, hi] : pieces) out.push_back(Arc{wrap_angle(a.start + lo), hi - lo});
    return out;
}

/// Index of the overlap component of (i, j) containing x.
inline std::optional<Index> overlap_component_at(const std::vector<Arc>& arcs, Index i, Index j, double x)
{
    auto comps = overlap_components(arcs, i, j);
    for(Index c = 0; c < comps.size(); ++c)
        if(comps[c].contains(x)) return c;
    return std::nullopt;
}

/// 0 and the arc endpoints, sorted and distinct: boundaries of the elementary intervals.
inline std::vector<double> cover_breakpoints(const std::vector<Arc>& arcs)
{
    std::vector<double> pts{0.0};
    for(const auto& a : arcs)
    {
        if(a.length >= two_pi) continue;
        pts.push_back(wrap_angle(a.start));
        pts.push_back(wrap_angle(a.end()));
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for(double p : pts)
        if(out.empty() || p - out.back() > angle_tol) out.push_back(p);
    if(out.size() > 1 && two_pi - out.back() + out.front() <= angle_tol) out.pop_back();
    return out;
}

/// Midpoints of the elementary intervals [p_t, p_{t+1}), cyclically.
inline std::vector<double> elementary_midpoints(const std::vector<Arc>& arcs)
{
    auto p = cover_breakpoints(arcs);
    std::vector<double> mids;
    for(Index t = 0; t < p.size(); ++t)
    {
        double a = p[t], b = t + 1 < p.size() ? p[t + 1] : p.front() + two_pi;
        mids.push_back(wrap_angle(0.5 * (a + b)));
    }
    return mids;
}

// ---------------------------------------------------------------------------
// Permutation cocycles
// ---------------------------------------------------------------------------

/// sigma^{j,i} on one overlap component: label l of chart i is label perm[l] of chart j.
struct TransitionEntry
{
    Index i = 0;
    Index j = 0;
    Index component = 0;
    Permutation perm;
};

struct PermCocycle
{
    Index rank = 0;
    std::vector<Arc> arcs;
    std::vector<TransitionEntry> entries;

    /// sigma^{to,from} on the given component of the (from, to) overlap.
    std::optional<Permutation> transition(Index from, Index to, Index component) const
    {
        if(from == to) return identity_permutation(rank);
        for(const auto& t : entries)
        {
            if(t.i == from && t.j == to && t.component == component) return t.perm;
            if(t.i == to && t.j == from && t.component == component && is_permutation(t.perm, rank)) return inverse(t.perm);
        }
        return std::nullopt;
    }

    /// sigma^{to,from} on the overlap component containing x.
    std::optional<Permutation> transition_at(Index from, Index to, double x) const
    {
        auto c = overlap_component_at(arcs, from, to, x);
        if(!c) return std::nullopt;
        return transition(from, to, *c);
    }
};

/*
 * Verifies coverage, at most two components per double overlap, a valid
 * permutation on every overlap component, inverse consistency of duplicate
 * entries, and sigma^{l,j} o sigma^{j,i} = sigma^{l,i} on every triple overlap.
 */
inline CheckList cocycle_check(const PermCocycle& c)
{
    CheckList out;
    const Index n = c.arcs.size();
    if(n == 0 || c.rank == 0)
    {
        out.add("nonempty", false, 0.0, "cocycle needs at least one arc and positive rank");
        return out;
    }

    bool cover_ok = true;
    std::string cover_detail;
    for(double x : elementary_midpoints(c.arcs))
    {
        bool hit = false;
        for(const auto& a : c.arcs) hit = hit || a.contains(x);
        if(!hit)
        {
            cover_ok = false;
            cover_detail = "angle " + std::to_string(x) + " not covered";
        }
    }
    out.add("covers_circle", cover_ok, 0.0, cover_detail);

    bool shape_ok = true, perms_ok = true, entries_ok = true;
    std::string shape_detail, perm_detail, entry_detail;
    for(Index i = 0; i < n; ++i)
        for(Index j = i + 1; j < n; ++j)
        {
            auto comps = overlap_components(c.arcs, i, j);
            if(comps.size() > 2)
            {
                shape_ok = false;
                shape_detail = "arcs " + std::to_string(i) + "," + std::to_string(j) + " overlap in more than two components";
            }
            for(Index k = 0; k < comps.size(); ++k)
            {
                auto p = c.transition(i, j, k);
                if(!p || !is_permutation(*p, c.rank))
                {
                    perms_ok = false;
                    perm_detail = "missing or invalid transition (" + std::to_string(i) + "," + std::to_string(j) + ") component " + std::to_string(k);
                }
            }
        }
    for(const auto& t : c.entries)
    {
        if(t.i >= n || t.j >= n || t.component >= overlap_components(c.arcs, t.i, t.j).size())
        {
            entries_ok = false;
            entry_detail = "transition refers to a nonexistent overlap";
            continue;
        }
        if(!is_permutation(t.perm, c.rank))
        {
            perms_ok = false;
            perm_detail = "entry (" + std::to_string(t.i) + "," + std::to_string(t.j) + ") is not a permutation";
            continue;
        }
        if(t.i == t.j && t.perm != identity_permutation(c.rank))
        {
            entries_ok = false;
            entry_detail = "sigma^{i,i} is not the identity for arc " + std::to_string(t.i);
        }
        for(const auto& u : c.entries)
        {
            if(&u == &t || u.component != t.component || !is_permutation(u.perm, c.rank)) continue;
            if(u.i == t.j && u.j == t.i && compose(u.perm, t.perm) != identity_permutation(c.rank))
            {
                entries_ok = false;
                entry_detail = "entries (" + std::to_string(t.i) + "," + std::to_string(t.j) + ") and their reverse are not inverse";
            }
            if(u.i == t.i && u.j == t.j && u.perm != t.perm)
            {
                entries_ok = false;
                entry_detail = "conflicting duplicate entries for (" + std::to_string(t.i) + "," + std::to_string(t.j) + ")";
            }
        }
    }
    out.add("overlap_shape", shape_ok, 0.0, shape_detail);
    out.add("valid_permutations", perms_ok, 0.0, perm_detail);
    out.add("identity_and_inverse", entries_ok, 0.0, entry_detail);
    if(!perms_ok || !entries_ok) return out;

    bool triple_ok = true;
    std::string triple_detail;
    for(double x : elementary_midpoints(c.arcs))
    {
        std::vector<Index> containing;
        for(Index i = 0; i < n; ++i)
            if(c.arcs[i].contains(x)) containing.push_back(i);
        for(Index a = 0; a < containing.size(); ++a)
            for(Index b = a + 1; b < containing.size(); ++b)
                for(Index d = b + 1; d < containing.size(); ++d)
                {
                    Index i = containing[a], j = containing[b], l = containing[d];
                    auto sji = c.transition_at(i, j, x), slj = c.transition_at(j, l, x), sli = c.transition_at(i, l, x);
                    if(!sji || !slj || !sli || compose(*slj, *sji) != *sli)
                    {
                        triple_ok = false;
                        triple_detail = "triple overlap (" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(l) +
                                        ") at angle " + std::to_string(x);
                    }
                }
    }
    out.add("triple_overlaps", triple_ok, 0.0, triple_detail);
    return out;
}

inline void require_valid(const PermCocycle& c)
{
    auto chk = cocycle_check(c);
    if(const auto* f = chk.first_failure()) throw InvalidInput("invalid cocycle: " + f->name + (f->detail.empty() ? "" : " (" + f->detail + ")"));
}

// ---------------------------------------------------------------------------
// Monodromy
// ---------------------------------------------------------------------------

struct Monodromy
{
    Permutation perm;
    std::vector<Index> cycle_type;
    Index base_arc = 0;
};

namespace detail
{
// One positively oriented pass over the elementary intervals.  step(t) records
// the chart in use and the label map P (reference label -> current label) on
// interval t; P starts as the identity in the chart covering interval 0.
struct Traversal
{
    std::vector<double> midpoints;
    std::vector<Index> chart;
    std::vector<Permutation> labels;
    Index base_arc = 0;
    Permutation monodromy;
};

inline Traversal traverse(const PermCocycle& c)
{
    Traversal tr;
    tr.midpoints = elementary_midpoints(c.arcs);
    const Index m = tr.midpoints.size();
    auto first_containing = [&](double x) -> std::optional<Index> {
        for(Index i = 0; i < c.arcs.size(); ++i)
            if(c.arcs[i].contains(x)) return i;
        return std::nullopt;
    };
    auto a0 = first_containing(tr.midpoints[0]);
    if(!a0) throw InvalidInput("cover leaves a gap");
    tr.base_arc = *a0;
    Index cur = *a0;
    Permutation p = identity_permutation(c.rank);
    tr.chart.push_back(cur);
    tr.labels.push_back(p);
    for(Index t = 1; t <= m; ++t)
    {
        const double prev = tr.midpoints[t - 1];
        const double here = tr.midpoints[t % m];
        if(!c.arcs[cur].contains(here))
        {
            std::optional<Index> next;
            for(Index b = 0; b < c.arcs.size() && !next; ++b)
                if(b != cur && c.arcs[b].contains(prev) && c.arcs[b].contains(here)) next = b;
            if(!next) throw InvalidInput("no arc contains consecutive elementary intervals near angle " + std::to_string(here));
            auto s = c.transition_at(cur, *next, prev);
            if(!s) throw InvalidInput("missing transition");
            p = compose(*s, p);
            cur = *next;
        }
        if(t < m)
        {
            tr.chart.push_back(cur);
            tr.labels.push_back(p);
        }
    }
    // back over interval 0: express the labels in the starting chart
    if(cur != *a0)
    {
        auto s = c.transition_at(cur, *a0, tr.midpoints[0]);
        if(!s) throw InvalidInput("missing transition");
        p = compose(*s, p);
    }
    tr.monodromy = p;
    return tr;
}
} // namespace detail

/// Product of transitions along one positive loop, expressed in the chart covering angle 0+.
inline Monodromy monodromy(const PermCocycle& c)
{
    require_valid(c);
    auto tr = detail::traverse(c);
    return {tr.monodromy, cycle_type(tr.monodromy), tr.base_arc};
}

/*
 * Common refinement: each arc is replaced by `pieces` overlapping sub-arcs
 * that inherit its labels; transitions are restricted from the parent overlap.
 */
inline PermCocycle refine_cover(const PermCocycle& c, Index pieces = 2)
{
    if(pieces < 1) throw InvalidInput("pieces must be >= 1");
    PermCocycle out;
    out.rank = c.rank;
    std::vector<Index> parent;
    for(Index i = 0; i < c.arcs.size(); ++i)
    {
        const Arc& a = c.arcs[i];
        const double step = a.length / static_cast<double>(pieces);
        for(Index p = 0; p < pieces; ++p)
        {
            double lo = p == 0 ? 0.0 : step * (static_cast<double>(p) - 0.25);
            double hi = p + 1 == pieces ? a.length : step * (static_cast<double>(p) + 1.25);
            out.arcs.push_back(Arc{wrap_angle(a.start + lo), hi - lo});
            parent.push_back(i);
        }
    }
    for(Index i = 0; i < out.arcs.size(); ++i)
        for(Index j = i + 1; j < out.arcs.size(); ++j)
        {
            auto comps = overlap_components(out.arcs, i, j);
            for(Index k = 0; k < comps.size(); ++k)
            {
                auto s = c.transition_at(parent[i], parent[j], comps[k].midpoint());
                if(!s) throw InvalidInput("refinement overlap is not inside a parent overlap");
                out.entries.push_back({i, j, k, *s});
            }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Graphs and cocycles
// ---------------------------------------------------------------------------

/*
 * M arcs centred at 2 pi i / M with half-width 1.5 pi / M.  Chart i labels the
 * s-sections through the fiber over its centre; on an overlap, label l of chart
 * i continues as the label of chart j whose section passes through the same
 * lift of the overlap midpoint.
 */
inline PermCocycle cocycle_from_graph(const CircleCoveringGraph& g, Index num_arcs = 2)
{
    if(num_arcs < 2) throw InvalidInput("at least two arcs are needed");
    const double hw = 1.5 * std::numbers::pi / static_cast<double>(num_arcs);
    PermCocycle c;
    c.rank = g.total_fiber_count();
    std::vector<SSectionDecomposition> charts;
    for(Index i = 0; i < num_arcs; ++i)
    {
        double center = grid_angle(static_cast<std::int64_t>(i), static_cast<std::int64_t>(num_arcs));
        charts.push_back(s_section_decomposition(g, center, hw));
        c.arcs.push_back(charts.back().base);
    }
    for(Index i = 0; i < num_arcs; ++i)
        for(Index j = i + 1; j < num_arcs; ++j)
        {
            auto comps = overlap_components(c.arcs, i, j);
            for(Index k = 0; k < comps.size(); ++k)
            {
                double x = comps[k].midpoint();
                Permutation p(c.rank);
                for(Index l = 0; l < c.rank; ++l)
                {
                    auto pt = charts[i].sections[l].lift_point(x);
                    std::optional<Index> found;
                    for(Index m = 0; m < c.rank && !found; ++m)
                    {
                        const auto& sm = charts[j].sections[m];
                        if(sm.component == pt.component && angles_equal(sm.lift(x), pt.angle, 1e-9)) found = m;
                    }
                    if(!found) throw VerificationError("section continuation not found");
                    p[l] = *found;
                }
                c.entries.push_back({i, j, k, p});
            }
        }
    return c;
}

/// One loop component z -> z^d (r = s) per monodromy cycle of length d.
inline CircleCoveringGraph graph_from_cocycle(const PermCocycle& c)
{
    auto m = monodromy(c);
    std::vector<EdgeComponent> comps;
    for(Index d : m.cycle_type) comps.push_back({static_cast<int>(d), 0.0, static_cast<int>(d), 0.0});
    return CircleCoveringGraph(std::move(comps));
}

/// Multiset of source degrees, largest first.
inline std::vector<Index> component_degrees(const CircleCoveringGraph& g)
{
    std::vector<Index> d;
    for(const auto& c : g.components()) d.push_back(static_cast<Index>(c.source_degree));
    std::sort(d.rbegin(), d.rend());
    return d;
}

/// Two-arc cover [0, 3.5) and [3, 6.5) with the identity on the overlap near 0 and `twist` near 3.
inline PermCocycle two_arc_cocycle(const Permutation& twist)
{
    PermCocycle c;
    c.rank = twist.size();
    c.arcs = {Arc::from_endpoints(0.0, 3.5), Arc::from_endpoints(3.0, 6.5)};
    auto comps = overlap_components(c.arcs, 0, 1);
    for(Index k = 0; k < comps.size(); ++k)
    {
        bool near_three = comps[k].contains(3.25);
        c.entries.push_back({0, 1, k, near_three ? twist : identity_permutation(c.rank)});
    }
    return c;
}

/// Block permutation with the given cycle lengths, cycles on consecutive labels.
inline Permutation permutation_with_cycle_type(const std::vector<Index>& type)
{
    Permutation p;
    Index base = 0;
    for(Index d : type)
    {
        for(Index l = 0; l < d; ++l) p.push_back(base + (l + 1) % d);
        base += d;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Global frames
// ---------------------------------------------------------------------------

/// Frame matrix columns per grid point, in the chart used by the traversal.
struct GlobalFrame
{
    Index grid = 0;
    Index rank = 0;
    std::vector<Eigen::MatrixXcd> frame;    // frame[k] at t_k = 2 pi k / N, k = 0..N
    std::vector<Index> chart;               // chart of frame[k]
    CheckList checks;
};

/*
 * For a monodromy cycle (l_0, M l_0, ..., M^{d-1} l_0) the sheet M^q l_0 over t
 * sits at height tau = t + 2 pi q on a circle of length 2 pi d, and
 *   v_n(t) = d^{-1/2} sum_q e^{i n (t + 2 pi q) / d} e_{label of sheet q},
 * n = 0..d-1, is continuous there.  Together these give a pointwise unitary
 * frame.  Checked: unitarity, sigma-compatibility between all charts at each
 * grid point, continuity inside every chart, and exact closure at t = 2 pi.
 */
inline GlobalFrame global_frame_over_circle(const PermCocycle& c, Index n, double tol = 1e-12)
{
    auto mono = monodromy(c);
    if(n < 2 || n % 2 != 0) throw InvalidInput("grid size must be even");
    for(Index d : mono.cycle_type)
        if(n % d != 0) throw InvalidInput("grid size must be divisible by every cycle length");
    auto tr = detail::traverse(c);
    const Index k = c.rank;
    auto cyc = cycles(mono.perm);

    // interval index of each grid point
    auto bp = cover_breakpoints(c.arcs);
    auto interval_of = [&](double t) {
        Index idx = 0;
        for(Index i = 0; i < bp.size(); ++i)
            if(t >= bp[i]) idx = i;
        // a grid point within rounding of a breakpoint may belong to the previous interval
        if(!c.arcs[tr.chart[idx]].contains(t)) idx = idx == 0 ? bp.size() - 1 : idx - 1;
        if(!c.arcs[tr.chart[idx]].contains(t)) throw InvalidInput("grid point not covered by its traversal chart");
        return idx;
    };

    // values in chart `which` given the label map of that chart
    auto frame_in = [&](const Permutation& labels, std::int64_t kk) {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        Index col = 0;
        for(const auto& cy : cyc)
        {
            const auto d = static_cast<std::int64_t>(cy.size());
            const double norm = 1.0 / std::sqrt(static_cast<double>(d));
            for(std::int64_t m = 0; m < d; ++m, ++col)
                for(std::int64_t q = 0; q < d; ++q)
                {
                    Index row = labels[cy[static_cast<Index>(q)]];
                    v(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                        norm * unit_root(m * (kk + static_cast<std::int64_t>(n) * q), static_cast<std::int64_t>(n) * d);
                }
        }
        return v;
    };

    auto perm_matrix = [&](const Permutation& s) {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        for(Index l = 0; l < k; ++l) p(static_cast<Eigen::Index>(s[l]), static_cast<Eigen::Index>(l)) = 1.0;
        return p;
    };

    GlobalFrame out;
    out.grid = n;
    out.rank = k;
    double unit = 0.0, trans = 0.0, cont = 0.0;
    // Each chart fixes its label map at the first grid point of every run of
    // consecutive points it contains; labels are continuous inside an arc.
    std::vector<std::optional<Permutation>> run_labels(c.arcs.size());
    std::vector<std::optional<Eigen::MatrixXcd>> last(c.arcs.size());
    for(Index kk = 0; kk <= n; ++kk)
    {
        const double t = grid_angle(static_cast<std::int64_t>(kk % n), static_cast<std::int64_t>(n));
        const Index iv = interval_of(t);
        Index a = tr.chart[iv];
        Permutation pa = tr.labels[iv];
        if(kk == n)
        {
            // after one full turn the labels have moved by the monodromy
            a = tr.base_arc;
            pa = tr.monodromy;
        }
        Eigen::MatrixXcd v = frame_in(pa, static_cast<std::int64_t>(kk));
        out.frame.push_back(v);
        out.chart.push_back(a);
        unit = std::max(unit, (v.adjoint() * v - Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)))
                                  .cwiseAbs()
                                  .maxCoeff());

        for(Index b = 0; b < c.arcs.size(); ++b)
        {
            if(!c.arcs[b].contains(t))
            {
                run_labels[b].reset();
                last[b].reset();
                continue;
            }
            auto s = c.transition_at(a, b, t);
            if(!s) throw InvalidInput("missing transition");
            if(!run_labels[b]) run_labels[b] = compose(*s, pa);
            Eigen::MatrixXcd vb = frame_in(*run_labels[b], static_cast<std::int64_t>(kk));
            trans = std::max(trans, (vb - perm_matrix(*s) * v).cwiseAbs().maxCoeff());
            if(last[b]) cont = std::max(cont, (vb - *last[b]).cwiseAbs().maxCoeff());
            last[b] = vb;
        }
    }
    const double lipschitz = two_pi / static_cast<double>(n);
    out.checks.add_residual("pointwise_unitarity", unit, tol);
    out.checks.add_residual("transition_compatibility", trans, tol);
    out.checks.add("continuity_within_charts", cont <= lipschitz * (1.0 + 1e-9), cont, "step bound " + std::to_string(lipschitz));
    double closure = (out.frame.back() - out.frame.front()).cwiseAbs().maxCoeff();
    bool exact = out.chart.back() == out.chart.front() && closure == 0.0;
    out.checks.add("endpoint_closure_exact", exact, closure);
    return out;
}

} // namespace tgraph

#endif
