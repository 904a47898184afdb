#ifndef TGRAPH_SUITE_HPP
#define TGRAPH_SUITE_HPP

#include <string>
#include <vector>

#include "cocycle.hpp"
#include "conjugacy.hpp"
#include "example_s5.hpp"
#include "io.hpp"
#include "kms.hpp"
#include "reconstruct.hpp"

#ifndef TGRAPH_FIXTURE_DIR
#define TGRAPH_FIXTURE_DIR "fixtures"
#endif

namespace tgraph
{

inline const std::vector<std::string>& finite_fixture_names()
{
    static const std::vector<std::string> names{"single_loop", "k_loop", "fibonacci", "ten_edge"};
    return names;
}

inline const std::vector<std::string>& suite_sections()
{
    static const std::vector<std::string> names{"all", "graph", "module", "fock", "kms", "conjugacy", "example-s5", "bundle"};
    return names;
}

struct SuiteOptions
{
    std::string fixture_dir = TGRAPH_FIXTURE_DIR;
    std::uint64_t seed = 42;
    Index trials = 20;
    Index s5_grid = 256;
};

namespace detail
{
struct SuiteContext
{
    SuiteOptions opt;
    Rng rng;
    std::vector<std::pair<std::string, FiniteGraph>> finite;
    CircleCoveringGraph s5_e, s5_f;
    PermCocycle swap, three;

    explicit SuiteContext(SuiteOptions o) : opt(std::move(o)), rng(opt.seed)
    {
        auto path = [&](const std::string& n) { return opt.fixture_dir + "/" + n + ".json"; };
        for(const auto& n : finite_fixture_names()) finite.emplace_back(n, io::require_finite(io::parse_graph(io::load_file(path(n))), path(n)));
        s5_e = io::require_circle(io::parse_graph(io::load_file(path("s5_E"))), path("s5_E"));
        s5_f = io::require_circle(io::parse_graph(io::load_file(path("s5_F"))), path("s5_F"));
        swap = io::parse_cocycle(io::load_file(path("swap_cocycle")));
        three = io::parse_cocycle(io::load_file(path("three_cycle_cocycle")));
    }
};

inline void suite_graph(SuiteContext& s, CheckList& out)
{
    for(const auto& [name, g] : s.finite)
    {
        double dense = spectral_radius_dense(g);
        auto power = spectral_radius_power(g, 1e-12);
        double gap = power ? std::abs(*power - dense) : 0.0;
        out.add_residual("graph/" + name + "/spectral_radius_methods_agree", gap, 1e-8);
        bool counts = true;
        for(Index n = 0; n <= 6; ++n)
        {
            auto c = path_counts(g, n);
            for(Index v = 0; v < g.num_vertices(); ++v) counts = counts && c[v] == enumerate_paths(g, v, n).size();
        }
        out.add("graph/" + name + "/path_counts", counts);
    }
    double fib = spectral_radius(s.finite[2].second);
    out.add_residual("graph/fibonacci/golden_ratio", std::abs(fib - (1.0 + std::sqrt(5.0)) / 2.0), 1e-9);
    out.add_residual("graph/k_loop/radius_3", std::abs(spectral_radius(s.finite[1].second) - 3.0), 1e-12);
    out.add("graph/s5/fiber_counts", s.s5_e.total_fiber_count() == 2 && s.s5_f.total_fiber_count() == 2);
}

inline void suite_module(SuiteContext& s, CheckList& out)
{
    for(const auto& [name, g] : s.finite)
    {
        double sym = 0.0, lin = 0.0, fib = 0.0, adj = 0.0;
        bool positive = true;
        for(Index t = 0; t < s.opt.trials; ++t)
        {
            auto x = random_module_element(g, s.rng), y = random_module_element(g, s.rng);
            auto a = random_vertex_function(g, s.rng);
            auto xy = inner_product(g, x, y), yx = inner_product(g, y, x), xx = inner_product(g, x, x);
            sym = std::max(sym, (xy.values - yx.values.conjugate()).cwiseAbs().maxCoeff());
            lin = std::max(lin, (inner_product(g, x, right_action(g, y, a)).values - (xy * a).values).cwiseAbs().maxCoeff());
            adj = std::max(adj, (inner_product(g, left_action(g, a, y), x).values - inner_product(g, y, left_action(g, a.conj(), x)).values)
                                    .cwiseAbs()
                                    .maxCoeff());
            for(Index v = 0; v < g.num_vertices(); ++v)
            {
                positive = positive && xx(v).real() >= 0.0 && xx(v).imag() == 0.0;
                fib = std::max(fib, std::abs(fiber_evaluation(g, x, v).squaredNorm() - xx(v).real()));
            }
        }
        const std::string p = "module/" + name + "/";
        out.add(p + "positivity", positive);
        out.add_residual(p + "adjoint_symmetry", sym, 1e-12);
        out.add_residual(p + "right_linearity", lin, 1e-12);
        out.add_residual(p + "adjointability", adj, 1e-12);
        out.add_residual(p + "fiber_norm_identity", fib, 1e-12);
    }
    // X(F) inner product on the twisted pair: |f(e^{it/2})|^2 + |f(-e^{it/2})|^2
    const Index n = s.opt.s5_grid;
    auto f = random_F_element(s.rng, n, 8);
    auto ip = inner_product(s.s5_f, f, f);
    double r = 0.0;
    for(Index j = 0; j < n; ++j) r = std::max(r, std::abs(ip(j) - (std::norm(f.at(0, j)) + std::norm(f.at(0, j + n)))));
    out.add_residual("module/s5_F/inner_product_formula", r, 1e-12);
}

inline void suite_fock(SuiteContext& s, CheckList& out)
{
    for(const auto& [name, g] : s.finite)
    {
        out.append(vacuum_projection_check(g, 5), "fock/" + name + "/");
        out.append(reconstruct_module_check(g, s.opt.trials, 1e-12, s.rng, 4), "fock/" + name + "/");
    }
    const auto& ten = s.finite[3].second;
    for(Index t = 0; t < 3; ++t)
    {
        auto iso = random_relabelling(ten, s.rng);
        auto f = relabel(ten, iso);
        out.append(triple_iso_transport(iso, ten, f, 5, 1e-12, s.rng), "fock/ten_edge/relabel" + std::to_string(t) + "/");
    }
}

inline void suite_kms(SuiteContext& s, CheckList& out)
{
    const auto& loop = s.finite[0].second;
    for(double beta : {0.5, 1.0, 2.0})
    {
        auto st = KMSState::at_vertex(loop, beta, 0);
        auto d = ModuleElement::delta(loop, 0);
        std::string b = std::to_string(beta).substr(0, 3);
        out.add_residual("kms/single_loop/partition_beta" + b, std::abs(st.partition_sums()[0] - 1.0 / (1.0 - std::exp(-beta))), 1e-12);
        out.add_residual("kms/single_loop/projection_beta" + b, std::abs(st(spanning_word(loop, {d}, {d})) - std::exp(-beta)), 1e-12);
    }
    for(Index i = 1; i < s.finite.size(); ++i)
    {
        const auto& [name, g] = s.finite[i];
        KMSState st(g, 2.0, random_measure(g, s.rng));
        double worst = 0.0;
        for(Index t = 0; t < 5 * s.opt.trials; ++t)
        {
            std::uniform_int_distribution<int> deg(-2, 2);
            auto a = random_homogeneous(g, s.rng, deg(s.rng), 2, 2);
            auto b = random_homogeneous(g, s.rng, deg(s.rng), 2, 2);
            worst = std::max(worst, kms_condition_check(st, a, b, 1e-9).residual);
        }
        out.add_residual("kms/" + name + "/kms_condition", worst, 1e-9);
        out.append(extremal_separation_check(g, 2.0, s.rng, s.opt.trials), "kms/" + name + "/");
    }
    const auto& fib = s.finite[2].second;
    for(Index v = 0; v < fib.num_vertices(); ++v)
    {
        auto t = kms_limit_sweep(fib, v, standard_sweep_words(fib), beta_grid(1.0, 10.0, 1.0));
        for(const auto& sm : t.summaries) out.add("kms/fibonacci/sweep_" + fib.vertex_id(v) + "/" + sm.word_id, sm.monotone && sm.within_bound, sm.fitted_constant);
        out.add("kms/fibonacci/p_E_limit_" + fib.vertex_id(v), kms_infty_eval(fib, v, vacuum_projection(fib)) == Complex(1.0));
    }
}

inline void suite_conjugacy(SuiteContext& s, CheckList& out)
{
    for(const auto& [name, g] : s.finite)
    {
        auto iso = random_relabelling(g, s.rng);
        auto f = relabel(g, iso);
        auto r = finite_graph_isomorphism(g, f);
        out.add("conjugacy/" + name + "/isomorphism_found", r.found() && is_graph_isomorphism(*r.iso, g, f));
        out.add("conjugacy/" + name + "/bimodule_invariant_stable", bimodule_invariants(g) == bimodule_invariants(f));
        for(Index v = 0; v < g.num_vertices(); ++v)
        {
            auto fr = frame_verify(g, delta_frame(g, v), 1e-12);
            out.add("conjugacy/" + name + "/delta_frame_" + g.vertex_id(v), fr.passed(), fr.checks.max_residual());
        }
    }
    auto c6 = FiniteGraph::from_indices(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
    auto c33 = FiniteGraph::from_indices(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    out.add("conjugacy/cycles/refuted", !finite_graph_isomorphism(c6, c33).found() && !bimodules_isomorphic(c6, c33));

    auto lc = local_conjugacy_check(s.s5_e, s.s5_f, 1e-9, 360);
    out.add("conjugacy/s5/locally_conjugate", lc.status == LocalConjugacyStatus::certified, lc.certificate ? lc.certificate->max_residual : 0.0,
            to_string(lc.status));
    const Index n = s.opt.s5_grid;
    auto fd = bump_frame(s.s5_f, n, 0);
    auto fr = frame_verify(s.s5_f, fd, 1e-9);
    out.append(fr.checks, "conjugacy/s5_F/bump_frame/");
    auto bad = frame_verify(s.s5_f, perturb_frame(fd, 1e-3), 1e-9);
    out.add("conjugacy/s5_F/perturbed_frame_rejected", !bad.checks.checks.at(0).passed, bad.checks.checks.at(0).residual);
}

inline void suite_s5(SuiteContext& s, CheckList& out) { out.append(s5_verify(s.opt.s5_grid, s.opt.trials, 1e-9, s.rng), "example-s5/"); }

inline void suite_bundle(SuiteContext& s, CheckList& out)
{
    auto mf = monodromy(cocycle_from_graph(s.s5_f));
    out.add("bundle/s5_F/monodromy_type_2", mf.cycle_type == std::vector<Index>{2}, 0.0, cycle_type_string(mf.cycle_type));
    auto me = monodromy(cocycle_from_graph(s.s5_e));
    out.add("bundle/s5_E/monodromy_type_1+1", me.cycle_type == std::vector<Index>{1, 1}, 0.0, cycle_type_string(me.cycle_type));
    out.append(cocycle_check(s.swap), "bundle/swap/");
    out.append(cocycle_check(s.three), "bundle/three_cycle/");
    out.add("bundle/swap/to_graph_is_F", component_degrees(graph_from_cocycle(s.swap)) == component_degrees(s.s5_f));
    out.add("bundle/three_cycle/type_3", monodromy(s.three).cycle_type == std::vector<Index>{3});
    out.add("bundle/identity/disjoint_loops", component_degrees(graph_from_cocycle(two_arc_cocycle(identity_permutation(3)))) ==
                                                  std::vector<Index>{1, 1, 1});
    for(const auto& [name, c] : std::vector<std::pair<std::string, PermCocycle>>{
            {"swap", s.swap}, {"three_cycle", s.three}, {"type_2+1", two_arc_cocycle(permutation_with_cycle_type({2, 1}))}})
    {
        out.append(global_frame_over_circle(c, 60).checks, "bundle/" + name + "/frame/");
        out.add("bundle/" + name + "/refinement", cocycle_check(refine_cover(c, 3)).passed() && monodromy(refine_cover(c, 3)).cycle_type == monodromy(c).cycle_type);
    }
}
} // namespace detail

/// Runs one suite section (or "all") on the bundled fixtures.
inline CheckList run_suite(const std::string& section, const SuiteOptions& opt = {})
{
    if(std::find(suite_sections().begin(), suite_sections().end(), section) == suite_sections().end())
        throw InvalidInput("unknown suite section '" + section + "'");
    detail::SuiteContext ctx(opt);
    CheckList out;
    auto want = [&](const char* s) { return section == "all" || section == s; };
    if(want("graph")) detail::suite_graph(ctx, out);
    if(want("module")) detail::suite_module(ctx, out);
    if(want("fock")) detail::suite_fock(ctx, out);
    if(want("kms")) detail::suite_kms(ctx, out);
    if(want("conjugacy")) detail::suite_conjugacy(ctx, out);
    if(want("example-s5")) detail::suite_s5(ctx, out);
    if(want("bundle")) detail::suite_bundle(ctx, out);
    return out;
}

} // namespace tgraph

#endif
