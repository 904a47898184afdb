#include <gtest/gtest.h>

#include <set>

#include <Eigen/Eigenvalues>

#include <tgraph/graph.hpp>

#include "oracles.hpp"

using namespace tgraph;

namespace
{

std::vector<FiniteGraph> sample_graphs()
{
    std::vector<FiniteGraph> out;
    for(const char* n : {"single_loop", "k_loop", "fibonacci", "ten_edge"}) out.push_back(oracle::finite_fixture(n));
    std::mt19937_64 rng(7);
    for(int t = 0; t < 10; ++t) out.push_back(oracle::random_graph(rng, 1 + t % 4, 1 + t % 6));
    return out;
}

} // namespace

TEST(Graph, FixtureShapes)
{
    auto fib = oracle::finite_fixture("fibonacci");
    EXPECT_EQ(fib.num_vertices(), 2u);
    EXPECT_EQ(fib.num_edges(), 3u);
    auto ten = oracle::finite_fixture("ten_edge");
    EXPECT_EQ(ten.num_edges(), 10u);
    EXPECT_EQ(ten.num_vertices(), 5u);
}

TEST(Graph, RejectsDuplicateIds)
{
    EXPECT_THROW(FiniteGraph({"a", "a"}, {}), InvalidInput);
    EXPECT_THROW(FiniteGraph({"a"}, {{"e", "a", "a"}, {"e", "a", "a"}}), InvalidInput);
    EXPECT_THROW(FiniteGraph({"a"}, {{"e", "a", "b"}}), InvalidInput);
}

TEST(Graph, PathCountsMatchAdjacencyPowers)
{
    for(const auto& g : sample_graphs())
    {
        auto r = oracle::raw(g);
        for(Index n = 0; n <= 8; ++n)
        {
            auto p = oracle::adjacency_power(r, n);
            auto c = path_counts(g, n);
            for(Index v = 0; v < g.num_vertices(); ++v) EXPECT_EQ(c[v], oracle::column_sum(p, v)) << "n=" << n << " v=" << v;
        }
    }
}

TEST(Graph, EnumerationMatchesDepthFirstSearch)
{
    for(const auto& g : sample_graphs())
    {
        auto r = oracle::raw(g);
        for(Index v = 0; v < g.num_vertices(); ++v)
        {
            for(Index n = 0; n <= 5; ++n)
            {
                auto paths = enumerate_paths(g, v, n);
                auto ref = oracle::dfs_paths(r, v, n);
                ASSERT_EQ(paths.size(), ref.size());
                std::set<std::vector<Index>> a, b(ref.begin(), ref.end());
                for(const auto& p : paths)
                {
                    EXPECT_TRUE(is_path(g, p));
                    EXPECT_EQ(p.length(), n);
                    EXPECT_EQ(p.source(g), v);
                    a.insert(p.edges);
                }
                EXPECT_EQ(a, b);
                EXPECT_TRUE(std::is_sorted(paths.begin(), paths.end()));
            }
        }
    }
}

TEST(Graph, EnumerationRefusesHugeLevels)
{
    auto k = oracle::finite_fixture("k_loop");
    EXPECT_EQ(enumerate_paths(k, 0, 12).size(), 531441u);
    EXPECT_THROW(enumerate_paths(k, 0, 13), SizeError);
    EXPECT_THROW(enumerate_paths(k, 5, 1), InvalidInput);
}

TEST(Graph, PathCountsSaturate)
{
    auto k = oracle::finite_fixture("k_loop");
    EXPECT_EQ(path_counts(k, 40)[0], 12157665459056928801ull);
    EXPECT_EQ(path_counts(k, 41)[0], std::numeric_limits<std::uint64_t>::max());
}

TEST(Graph, KLoopRadiusExact)
{
    for(int k = 1; k <= 5; ++k)
    {
        std::vector<std::pair<Index, Index>> loops(k, {0, 0});
        EXPECT_EQ(spectral_radius(FiniteGraph::from_indices(1, loops)), static_cast<double>(k));
    }
    EXPECT_EQ(spectral_radius(oracle::finite_fixture("k_loop")), 3.0);
}

TEST(Graph, FibonacciRadius)
{
    auto fib = oracle::finite_fixture("fibonacci");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    EXPECT_NEAR(spectral_radius(fib), phi, 1e-9);
    auto p = spectral_radius_power(fib, 1e-14);
    ASSERT_TRUE(p.has_value());
    EXPECT_NEAR(*p, phi, 1e-9);
    EXPECT_NEAR(path_growth_rate(fib, 20), phi, 0.02);
}

TEST(Graph, RadiusAgainstComplexEigenOracleAndSandwich)
{
    std::mt19937_64 rng(11);
    for(int t = 0; t < 40; ++t)
    {
        auto g = oracle::random_graph(rng, 1 + t % 6, 1 + t % 9);
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(g.num_vertices(), g.num_vertices());
        for(Index e = 0; e < g.num_edges(); ++e) a(g.range(e), g.source(e)) += 1.0;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
        double ref = es.eigenvalues().cwiseAbs().maxCoeff();
        double rho = spectral_radius(g);
        // random graphs can have defective eigenvalues, accurate only to ~eps^(1/k)
        EXPECT_NEAR(rho, ref, 1e-4 * std::max(1.0, ref));

        // (tr A^n / k)^{1/n} <= rho <= max_v |E^n v|^{1/n}
        auto r = oracle::raw(g);
        const Index n = 12;
        auto p = oracle::adjacency_power(r, n);
        double tr = 0.0;
        for(Index i = 0; i < r.n; ++i) tr += static_cast<double>(p[i][i]);
        double lower = std::pow(tr / static_cast<double>(r.n), 1.0 / n);
        EXPECT_LE(lower, rho + 1e-9);
        EXPECT_GE(path_growth_rate(g, n), rho - 1e-9);
    }
}

TEST(Graph, PowerIterationOnPeriodicGraph)
{
    // a 4-cycle has peripheral spectrum {1, i, -1, -i}
    auto c4 = FiniteGraph::from_indices(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    auto p = spectral_radius_power(c4, 1e-14);
    ASSERT_TRUE(p.has_value());
    EXPECT_NEAR(*p, 1.0, 1e-9);
    EXPECT_EQ(spectral_radius(FiniteGraph::from_indices(3, {})), 0.0);
}

TEST(Graph, LargeGraphUsesPowerIteration)
{
    // 100 disjoint copies of the Fibonacci graph, above the dense limit
    std::vector<std::pair<Index, Index>> sr;
    for(Index c = 0; c < 50; ++c)
    {
        Index a = 2 * c, b = 2 * c + 1;
        sr.insert(sr.end(), {{a, a}, {b, a}, {a, b}});
    }
    auto g = FiniteGraph::from_indices(100, sr);
    EXPECT_NEAR(spectral_radius(g, 1e-12), (1.0 + std::sqrt(5.0)) / 2.0, 1e-8);
}

TEST(Graph, AdjacencyAndMultiplicity)
{
    auto fib = oracle::finite_fixture("fibonacci");
    auto a = adjacency_matrix(fib);
    auto m = multiplicity_matrix(fib);
    for(Index w = 0; w < 2; ++w)
        for(Index v = 0; v < 2; ++v) EXPECT_EQ(a(w, v), static_cast<double>(m[w][v]));
    EXPECT_EQ(a.sum(), 3.0);
}

TEST(Graph, SSectionsInvertSource)
{
    for(const char* name : {"s5_E", "s5_F"})
    {
        auto g = oracle::circle_fixture(name);
        for(int k = 0; k < 256; ++k)
        {
            double v = two_pi * k / 256.0;
            auto dec = s_section_decomposition(g, v, 1.0);
            ASSERT_EQ(dec.sections.size(), g.total_fiber_count());
            for(int j = 0; j < 5; ++j)
            {
                double w = v - 1.0 + 0.4 * j + 0.05;
                ASSERT_TRUE(dec.base.contains(w));
                std::vector<double> lifts;
                for(const auto& z : dec.sections)
                {
                    double th = z.lift(w);
                    EXPECT_TRUE(z.domain.contains(th));
                    EXPECT_LE(angle_distance(z.source(th), w), 1e-12);
                    // the lift is the unique preimage inside the domain
                    for(const auto& p : g.fiber(w))
                    {
                        if(p.component == z.component && z.domain.contains(p.angle))
                        {
                            EXPECT_LE(angle_distance(p.angle, th), 1e-12);
                        }
                    }
                    if(z.component == 0) lifts.push_back(th);
                }
                for(Index a = 0; a < lifts.size(); ++a)
                    for(Index b = a + 1; b < lifts.size(); ++b) EXPECT_GT(angle_distance(lifts[a], lifts[b]), 1e-6);
            }
        }
    }
}

TEST(Graph, CircleFiberCounts)
{
    auto e = oracle::circle_fixture("s5_E");
    auto f = oracle::circle_fixture("s5_F");
    EXPECT_EQ(edge_space_components(e), 2u);
    EXPECT_EQ(edge_space_components(f), 1u);
    EXPECT_EQ(fiber_count(e, 0.3), 2u);
    EXPECT_EQ(fiber_count(f, 0.3), 2u);
    for(const auto& p : f.fiber(1.7)) EXPECT_LE(angle_distance(f.source(p), 1.7), 1e-12);
    EXPECT_THROW(CircleCoveringGraph({EdgeComponent{0, 0.0, 1, 0.0}}), InvalidInput);
    EXPECT_THROW(s_section_decomposition(f, 0.0, 4.0), InvalidInput);
}

TEST(Graph, RelabelIsIsomorphism)
{
    std::mt19937_64 rng(3);
    auto g = oracle::finite_fixture("ten_edge");
    for(int t = 0; t < 20; ++t)
    {
        GraphIsomorphism iso;
        iso.vertex_map.resize(g.num_vertices());
        iso.edge_map.resize(g.num_edges());
        std::iota(iso.vertex_map.begin(), iso.vertex_map.end(), Index{0});
        std::iota(iso.edge_map.begin(), iso.edge_map.end(), Index{0});
        std::shuffle(iso.vertex_map.begin(), iso.vertex_map.end(), rng);
        std::shuffle(iso.edge_map.begin(), iso.edge_map.end(), rng);
        auto f = relabel(g, iso);
        EXPECT_TRUE(is_graph_isomorphism(iso, g, f));
        EXPECT_TRUE(oracle::brute_isomorphic(g, f));
        auto back = relabel(f, {invert_permutation(iso.vertex_map), invert_permutation(iso.edge_map)});
        for(Index e = 0; e < g.num_edges(); ++e)
        {
            EXPECT_EQ(back.source(e), g.source(e));
            EXPECT_EQ(back.range(e), g.range(e));
        }
    }
    EXPECT_THROW(relabel(g, {{0, 0, 1, 2, 3}, {}}), InvalidInput);
}
