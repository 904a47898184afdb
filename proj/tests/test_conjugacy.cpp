#include <gtest/gtest.h>

#include <tgraph/conjugacy.hpp>
#include <tgraph/random.hpp>

#include "oracles.hpp"

using namespace tgraph;

namespace
{

// max over S_n of min_i |B(i, sigma(i))|
double exhaustive_bottleneck(const Eigen::MatrixXcd& b)
{
    double best = 0.0;
    for(const auto& p : oracle::all_permutations(static_cast<Index>(b.rows())))
    {
        double m = std::numeric_limits<double>::infinity();
        for(Index i = 0; i < p.size(); ++i) m = std::min(m, std::abs(b(i, p[i])));
        best = std::max(best, m);
    }
    return best;
}

Eigen::MatrixXcd random_matrix(Rng& rng, Index n, double zero_fraction)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for(Index i = 0; i < n; ++i)
        for(Index j = 0; j < n; ++j) m(i, j) = u(rng) < zero_fraction ? Complex(0.0) : random_complex(rng);
    return m;
}

// disjoint union of directed cycles with the given lengths
FiniteGraph cycle_union(const std::vector<Index>& lengths)
{
    std::vector<std::pair<Index, Index>> sr;
    Index base = 0;
    for(Index l : lengths)
    {
        for(Index i = 0; i < l; ++i) sr.emplace_back(base + i, base + (i + 1) % l);
        base += l;
    }
    return FiniteGraph::from_indices(base, sr);
}

FiniteGraph shuffled(const FiniteGraph& g, Rng& rng) { return relabel(g, random_relabelling(g, rng)); }

} // namespace

TEST(Conjugacy, NonzeroPermutationIsBottleneckOptimal)
{
    Rng rng(41);
    int tested = 0;
    for(int t = 0; t < 80; ++t)
    {
        const Index n = 2 + t % 5;
        // plant a permutation so the sparse matrices stay invertible
        auto b = random_matrix(rng, n, t % 2 ? 0.5 : 0.0);
        auto p = random_permutation(rng, n);
        for(Index i = 0; i < n; ++i) b(i, p[i]) += 3.0;
        PermutationResult r;
        try
        {
            r = nonzero_permutation(b);
        }
        catch(const DomainError&)
        {
            continue;
        }
        ++tested;
        ASSERT_TRUE(is_bijection(r.sigma, n));
        double m = std::numeric_limits<double>::infinity();
        for(Index i = 0; i < n; ++i)
        {
            EXPECT_GT(std::abs(b(i, r.sigma[i])), r.threshold);
            m = std::min(m, std::abs(b(i, r.sigma[i])));
        }
        EXPECT_EQ(m, r.margin);
        EXPECT_EQ(r.margin, exhaustive_bottleneck(b));
        EXPECT_GE(r.condition, 1.0);
    }
    EXPECT_GT(tested, 70);
}

TEST(Conjugacy, NonzeroPermutationOnPermutationMatrix)
{
    Rng rng(42);
    auto p = random_permutation(rng, 6);
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(6, 6);
    for(Index i = 0; i < 6; ++i) b(i, p[i]) = std::polar(1.0, 0.3 * i);
    auto r = nonzero_permutation(b);
    EXPECT_EQ(r.sigma, p);
    EXPECT_NEAR(r.margin, 1.0, 1e-15);
}

TEST(Conjugacy, SingularMatrixRejected)
{
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Ones(3, 3);
    EXPECT_THROW(nonzero_permutation(s), DomainError);
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
    EXPECT_THROW(nonzero_permutation(z), DomainError);
    EXPECT_THROW(nonzero_permutation(Eigen::MatrixXcd::Ones(2, 3)), InvalidInput);
}

TEST(Conjugacy, IsomorphismFoundForRelabellings)
{
    Rng rng(43);
    std::vector<FiniteGraph> gs;
    for(const char* n : {"single_loop", "k_loop", "fibonacci", "ten_edge"}) gs.push_back(oracle::finite_fixture(n));
    for(int t = 0; t < 20; ++t) gs.push_back(oracle::random_graph(rng, 2 + t % 6, 3 + t % 10));
    for(const auto& g : gs)
    {
        for(int t = 0; t < 5; ++t)
        {
            auto f = shuffled(g, rng);
            auto r = finite_graph_isomorphism(g, f);
            ASSERT_TRUE(r.found());
            EXPECT_TRUE(is_graph_isomorphism(*r.iso, g, f));
            EXPECT_TRUE(r.refutation.empty());
        }
    }
}

TEST(Conjugacy, IsomorphismAgreesWithExhaustiveSearch)
{
    Rng rng(44);
    int iso = 0, non = 0;
    for(int t = 0; t < 150; ++t)
    {
        const Index n = 2 + t % 5;
        auto e = oracle::random_graph(rng, n, n + t % 4);
        auto f = t % 3 == 0 ? shuffled(e, rng) : oracle::random_graph(rng, n, n + t % 4);
        bool ref = oracle::brute_isomorphic(e, f);
        auto r = finite_graph_isomorphism(e, f);
        EXPECT_EQ(r.found(), ref);
        EXPECT_EQ(bimodules_isomorphic(e, f), ref);
        if(!ref)
        {
            EXPECT_FALSE(r.refutation.empty());
        }
        (ref ? iso : non) += 1;
    }
    EXPECT_GT(non, 50);
    EXPECT_GT(iso, 50);
}

TEST(Conjugacy, CycleUnionsRefuted)
{
    // every vertex has in- and out-degree one, so degree sequences agree
    const std::vector<std::vector<Index>> parts{{6}, {3, 3}, {4, 2}, {2, 2, 2}, {5, 1}, {1, 1, 1, 1, 1, 1}, {4, 1, 1}, {3, 2, 1}};
    for(Index i = 0; i < parts.size(); ++i)
        for(Index j = i + 1; j < parts.size(); ++j)
        {
            auto e = cycle_union(parts[i]), f = cycle_union(parts[j]);
            ASSERT_FALSE(oracle::brute_isomorphic(e, f));
            auto r = finite_graph_isomorphism(e, f);
            EXPECT_FALSE(r.found());
            EXPECT_FALSE(bimodules_isomorphic(e, f));
        }
    EXPECT_TRUE(finite_graph_isomorphism(cycle_union({2, 4}), cycle_union({4, 2})).found());
}

TEST(Conjugacy, RefutationReasons)
{
    auto a = FiniteGraph::from_indices(2, {{0, 1}});
    auto b = FiniteGraph::from_indices(3, {{0, 1}});
    auto c = FiniteGraph::from_indices(2, {{0, 1}, {1, 0}});
    auto d = FiniteGraph::from_indices(2, {{0, 0}, {0, 1}});
    EXPECT_NE(finite_graph_isomorphism(a, b).refutation.find("vertex counts"), std::string::npos);
    EXPECT_NE(finite_graph_isomorphism(a, c).refutation.find("edge counts"), std::string::npos);
    EXPECT_NE(finite_graph_isomorphism(c, d).refutation.find("degree"), std::string::npos);
}

TEST(Conjugacy, EdgeMapFromVertices)
{
    Rng rng(45);
    auto g = oracle::finite_fixture("ten_edge");
    auto iso = random_relabelling(g, rng);
    auto f = relabel(g, iso);
    auto rebuilt = edge_map_from_vertices(g, f, iso.vertex_map);
    EXPECT_TRUE(is_graph_isomorphism(rebuilt, g, f));
}

TEST(Conjugacy, InvariantsStableUnderRelabelling)
{
    Rng rng(46);
    for(const char* name : {"fibonacci", "ten_edge"})
    {
        auto g = oracle::finite_fixture(name);
        auto inv = bimodule_invariants(g);
        for(int t = 0; t < 100; ++t) EXPECT_EQ(bimodule_invariants(shuffled(g, rng)), inv);
    }
}

TEST(Conjugacy, DeltaFramesPass)
{
    for(const char* name : {"single_loop", "k_loop", "fibonacci", "ten_edge"})
    {
        auto g = oracle::finite_fixture(name);
        for(Index v = 0; v < g.num_vertices(); ++v)
        {
            auto r = frame_verify(g, delta_frame(g, v), 1e-12);
            EXPECT_TRUE(r.passed()) << name;
            ASSERT_EQ(r.points.size(), 1u);
            EXPECT_EQ(r.points[0].base_index, v);
        }
    }
}

TEST(Conjugacy, BrokenFiniteFramesFail)
{
    auto g = oracle::finite_fixture("ten_edge");
    auto fd = delta_frame(g, 0); // p has edges e0, e5, e6
    ASSERT_EQ(fd.generators.size(), 3u);

    auto wrong_alpha = fd;
    std::swap(wrong_alpha.alpha[0], wrong_alpha.alpha[1]);
    auto r = frame_verify(g, wrong_alpha, 1e-12);
    EXPECT_FALSE(r.passed());

    auto missing = fd;
    missing.generators.pop_back();
    missing.alpha.pop_back();
    auto r2 = frame_verify(g, missing, 1e-12);
    EXPECT_FALSE(r2.checks.checks.at(1).passed); // fiber no longer spanned

    auto scaled = fd;
    scaled.generators[0].values *= 1.001;
    EXPECT_FALSE(frame_verify(g, scaled, 1e-12).checks.checks.at(0).passed);

    auto zero = fd;
    zero.h = VertexFunction::constant(g, 0.0);
    EXPECT_THROW(frame_verify(g, zero, 1e-12), InvalidInput);
}

TEST(Conjugacy, BumpFrameOnTwistedPair)
{
    auto f = oracle::circle_fixture("s5_F");
    for(Index grid : {Index{64}, Index{256}})
    {
        for(Index c : {Index{0}, grid / 3})
        {
            auto fd = bump_frame(f, grid, c);
            auto r = frame_verify(f, fd, 1e-9);
            for(const auto& ch : r.checks.checks) EXPECT_TRUE(ch.passed) << ch.name << " " << ch.residual;
            EXPECT_FALSE(r.points.empty());
            auto bad = frame_verify(f, perturb_frame(fd, 1e-3), 1e-9);
            EXPECT_FALSE(bad.checks.checks.at(0).passed);
            EXPECT_GT(bad.checks.checks.at(0).residual, 1e-4);
        }
    }
    auto e = oracle::circle_fixture("s5_E");
    EXPECT_TRUE(frame_verify(e, bump_frame(e, 128, 5), 1e-9).passed());
}

TEST(Conjugacy, LocalConjugacyStatuses)
{
    auto e = oracle::circle_fixture("s5_E");
    auto f = oracle::circle_fixture("s5_F");
    auto lc = local_conjugacy_check(e, f, 1e-9, 360);
    ASSERT_EQ(lc.status, LocalConjugacyStatus::certified);
    ASSERT_TRUE(lc.certificate.has_value());
    EXPECT_LE(lc.certificate->max_residual, 1e-9);
    EXPECT_EQ(lc.certificate->arcs.size(), 16u);

    // covering check: the certificate arcs cover the circle
    for(int k = 0; k < 500; ++k)
    {
        double x = two_pi * k / 500.0;
        bool covered = false;
        for(const auto& a : lc.certificate->arcs) covered = covered || a.neighbourhood.contains(x);
        EXPECT_TRUE(covered);
    }

    auto single = CircleCoveringGraph({{1, 0.0, 1, 0.0}});
    EXPECT_EQ(local_conjugacy_check(e, single).status, LocalConjugacyStatus::refuted);

    // same fiber counts, but one range map is shifted on one component only
    auto shifted = CircleCoveringGraph({{1, 0.0, 1, 0.0}, {1, 0.0, 1, 0.5}});
    auto s = local_conjugacy_check(e, shifted, 1e-9, 90);
    EXPECT_EQ(s.status, LocalConjugacyStatus::inconclusive);
    EXPECT_FALSE(s.certificate.has_value());
    EXPECT_GT(s.candidates_tried, 90u);

    // rotating both the source and range maps
    auto rotated = CircleCoveringGraph({{2, 0.7, 2, 0.7}});
    auto base = CircleCoveringGraph({{2, 0.0, 2, 0.0}});
    EXPECT_EQ(local_conjugacy_check(base, rotated, 1e-9, 12).status, LocalConjugacyStatus::certified);
    EXPECT_THROW(local_conjugacy_check(e, f, 1e-9, 10, 2), InvalidInput);
}
