#include <gtest/gtest.h>

#include <tgraph/kms.hpp>

#include "oracles.hpp"

using namespace tgraph;

namespace
{

struct Case
{
    const char* name;
    double beta;
    Index depth; // DFS truncation with tail below 1e-13
};

const std::vector<Case> cases{{"single_loop", 0.5, 70}, {"single_loop", 2.0, 20}, {"fibonacci", 2.0, 22}, {"k_loop", 4.0, 10}, {"ten_edge", 3.0, 14}};

/*
 * Truncated Fock-trace oracle: phi_v(w) = (1/N_v) sum_mu e^{-beta |mu|} <w e_mu, e_mu>,
 * where for w = c iota(x_1..x_k) pi(a) iota(y_1..y_k)^* the diagonal entry is
 * c conj(prod y_i(mu_i)) prod x_i(mu_i) a(s(mu_k)) when |mu| >= k.
 */
struct TraceOracle
{
    const FiniteGraph& g;
    Index v;
    double beta;
    std::vector<std::vector<Index>> paths;
    double partition = 0.0;

    TraceOracle(const FiniteGraph& graph, Index vertex, double b, Index depth) : g(graph), v(vertex), beta(b)
    {
        auto r = oracle::raw(g);
        for(Index n = 0; n <= depth; ++n)
            for(auto& p : oracle::dfs_paths(r, v, n)) paths.push_back(std::move(p));
        for(const auto& p : paths) partition += std::exp(-beta * static_cast<double>(p.size()));
    }

    Complex operator()(const ToeplitzWord& w) const
    {
        const Index k = w.left.size();
        if(k != w.right.size()) return 0.0;
        Complex s = 0.0;
        for(const auto& mu : paths)
        {
            if(mu.size() < k) continue;
            Complex d = w.coeff * w.middle(k == 0 ? (mu.empty() ? v : g.range(mu.front())) : g.source(mu[k - 1]));
            for(Index i = 0; i < k; ++i) d *= std::conj(w.right[i](mu[i])) * w.left[i](mu[i]);
            s += std::exp(-beta * static_cast<double>(mu.size())) * d;
        }
        return s / partition;
    }

    Complex operator()(const ToeplitzElement& x) const
    {
        Complex s = 0.0;
        for(const auto& w : x.words()) s += (*this)(w);
        return s;
    }
};

} // namespace

TEST(KMS, SingleLoopClosedForms)
{
    auto g = oracle::finite_fixture("single_loop");
    auto d = ModuleElement::delta(g, 0);
    for(double beta : {0.5, 1.0, 2.0})
    {
        auto st = KMSState::at_vertex(g, beta, 0);
        EXPECT_NEAR(st.partition_sums()[0], 1.0 / (1.0 - std::exp(-beta)), 1e-12);
        EXPECT_NEAR(std::abs(st(spanning_word(g, {d}, {d})) - std::exp(-beta)), 0.0, 1e-12);
        for(Index k = 1; k <= 4; ++k)
        {
            std::vector<ModuleElement> ds(k, d);
            EXPECT_NEAR(std::abs(st(spanning_word(g, ds, ds)) - std::exp(-beta * static_cast<double>(k))), 0.0, 1e-12);
        }
    }
}

TEST(KMS, PartitionSumsMatchTruncation)
{
    for(const auto& c : cases)
    {
        auto g = oracle::finite_fixture(c.name);
        auto n = path_partition_sums(g, c.beta);
        for(Index v = 0; v < g.num_vertices(); ++v)
        {
            TraceOracle o(g, v, c.beta, c.depth);
            EXPECT_NEAR(n[v], o.partition, 1e-12 * o.partition) << c.name;
            EXPECT_NEAR(path_partition_sum_truncated(g, c.beta, v, c.depth), o.partition, 1e-12 * o.partition);
        }
    }
}

TEST(KMS, StateMatchesTruncatedTrace)
{
    Rng rng(31);
    for(const auto& c : cases)
    {
        auto g = oracle::finite_fixture(c.name);
        for(Index v = 0; v < g.num_vertices(); ++v)
        {
            TraceOracle o(g, v, c.beta, c.depth);
            auto st = KMSState::at_vertex(g, c.beta, v);
            for(int t = 0; t < 6; ++t)
            {
                auto x = random_homogeneous(g, rng, 0, 2, 2);
                Complex ref = o(x);
                EXPECT_LE(std::abs(st(x) - ref), 1e-12 * std::max(1.0, norm_bound(g, x))) << c.name << " v=" << v;
            }
        }
    }
}

TEST(KMS, StateAxioms)
{
    Rng rng(32);
    for(const char* name : {"fibonacci", "k_loop", "ten_edge"})
    {
        auto g = oracle::finite_fixture(name);
        KMSState st(g, critical_beta(g) + 1.0, random_measure(g, rng));
        EXPECT_NEAR(std::abs(st(unit(g)) - 1.0), 0.0, 1e-12);
        for(int t = 0; t < 20; ++t)
        {
            ToeplitzElement x;
            for(int d = -1; d <= 1; ++d) x += random_homogeneous(g, rng, d, 2, 1);
            Complex xx = st(multiply(g, adjoint(g, x), x));
            double scale = std::max(1.0, norm_bound(g, x) * norm_bound(g, x));
            EXPECT_GE(xx.real(), -1e-12 * scale);
            EXPECT_LE(std::abs(xx.imag()), 1e-12 * scale);
            EXPECT_LE(std::abs(st(adjoint(g, x)) - std::conj(st(x))), 1e-12 * scale);
            for(double th : {0.3, 1.9, 4.0}) EXPECT_LE(std::abs(st(gauge_action(x, std::polar(1.0, th))) - st(x)), 1e-12 * scale);
        }
    }
}

TEST(KMS, KMSConditionOnRandomPairs)
{
    Rng rng(33);
    for(const char* name : {"fibonacci", "k_loop", "ten_edge"})
    {
        auto g = oracle::finite_fixture(name);
        KMSState st(g, 2.0, random_measure(g, rng));
        for(int t = 0; t < 60; ++t)
        {
            std::uniform_int_distribution<int> deg(-2, 2);
            auto a = random_homogeneous(g, rng, deg(rng), 2, 2);
            auto b = random_homogeneous(g, rng, deg(rng), 2, 2);
            auto c = kms_condition_check(st, a, b, 1e-9);
            EXPECT_TRUE(c.passed) << name << " residual " << c.residual;
        }
    }
    auto g = oracle::finite_fixture("fibonacci");
    auto st = KMSState::at_vertex(g, 2.0, 0);
    auto x = random_homogeneous(g, rng, 1, 1, 1) + random_homogeneous(g, rng, 0, 1, 1);
    EXPECT_THROW(kms_condition_check(st, x, x, 1e-9), InvalidInput);
}

TEST(KMS, AffineInMeasure)
{
    Rng rng(34);
    for(const char* name : {"fibonacci", "ten_edge"})
    {
        auto g = oracle::finite_fixture(name);
        auto r = extremal_separation_check(g, critical_beta(g) + 0.5, rng, 30);
        EXPECT_TRUE(r.passed());
    }
}

TEST(KMS, CriticalBetaRejected)
{
    auto loop = oracle::finite_fixture("single_loop");
    EXPECT_THROW(KMSState::at_vertex(loop, 0.0, 0), DomainError);
    EXPECT_THROW(KMSState::at_vertex(loop, -1.0, 0), DomainError);
    auto k = oracle::finite_fixture("k_loop");
    EXPECT_THROW(KMSState::at_vertex(k, std::log(3.0), 0), DomainError);
    EXPECT_THROW(resolvent(k, 1.0), DomainError);
    EXPECT_NO_THROW(KMSState::at_vertex(k, std::log(3.0) + 1e-6, 0));
    auto fib = oracle::finite_fixture("fibonacci");
    EXPECT_THROW(KMSState::at_vertex(fib, 0.4, 0), DomainError);
    EXPECT_THROW(KMSState::at_vertex(fib, std::nan(""), 0), DomainError);
    // acyclic graphs admit every finite beta
    auto path = FiniteGraph::from_indices(3, {{0, 1}, {1, 2}});
    EXPECT_EQ(critical_beta(path), -std::numeric_limits<double>::infinity());
    EXPECT_NEAR(path_partition_sum(path, -5.0, 0), 1.0 + std::exp(5.0) + std::exp(10.0), 1e-9);
}

TEST(KMS, MeasureValidation)
{
    auto g = oracle::finite_fixture("fibonacci");
    EXPECT_THROW(KMSState(g, 2.0, Eigen::Vector3d(0.2, 0.3, 0.5)), InvalidInput);
    EXPECT_THROW(KMSState(g, 2.0, Eigen::Vector2d(1.5, -0.5)), InvalidInput);
    EXPECT_THROW(KMSState(g, 2.0, Eigen::Vector2d(0.5, 0.4)), InvalidInput);
    EXPECT_NO_THROW(KMSState(g, 2.0, Eigen::Vector2d(0.25, 0.75)));
    EXPECT_THROW(point_mass(g, 2), InvalidInput);
}

TEST(KMS, GroundStateLimit)
{
    auto fib = oracle::finite_fixture("fibonacci");
    for(Index v = 0; v < fib.num_vertices(); ++v)
    {
        EXPECT_EQ(kms_infty_eval(fib, v, vacuum_projection(fib)), Complex(1.0));
        auto t = kms_limit_sweep(fib, v, standard_sweep_words(fib), beta_grid(1.0, 10.0, 1.0));
        EXPECT_TRUE(t.passed());
        EXPECT_EQ(t.rows.size(), 10u * standard_sweep_words(fib).size());
        for(const auto& s : t.summaries)
        {
            EXPECT_TRUE(s.monotone) << s.word_id;
            EXPECT_TRUE(s.within_bound) << s.word_id;
        }
        // finite-beta values approach the vacuum expectation
        auto st = KMSState::at_vertex(fib, 30.0, v);
        EXPECT_NEAR(std::abs(st(vacuum_projection(fib)) - 1.0), 0.0, 1e-12);
    }
    EXPECT_THROW(kms_limit_sweep(fib, 0, standard_sweep_words(fib), {0.3}), DomainError);
}

TEST(KMS, VacuumExpectationAtFiniteBeta)
{
    // phi_v(p_E) = 1 / N_v since only the empty path sees the vacuum
    for(const char* name : {"single_loop", "fibonacci", "ten_edge"})
    {
        auto g = oracle::finite_fixture(name);
        double beta = critical_beta(g) + 1.0;
        for(Index v = 0; v < g.num_vertices(); ++v)
        {
            auto st = KMSState::at_vertex(g, beta, v);
            EXPECT_NEAR(st(vacuum_projection(g)).real(), 1.0 / st.partition_sums()[v], 1e-12);
        }
    }
}

TEST(KMS, BetaGrid)
{
    auto b = beta_grid(1.0, 2.0, 0.25);
    EXPECT_EQ(b, (std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0}));
    EXPECT_EQ(beta_grid(1.0, 10.0, 1.0).size(), 10u);
    EXPECT_THROW(beta_grid(2.0, 1.0, 0.1), InvalidInput);
    EXPECT_THROW(beta_grid(1.0, 2.0, 0.0), InvalidInput);
}

TEST(KMS, TailBound)
{
    auto fib = oracle::finite_fixture("fibonacci");
    for(Index depth : {2u, 5u, 10u})
    {
        double exact = path_partition_sum(fib, 2.0, 0);
        double trunc = path_partition_sum_truncated(fib, 2.0, 0, depth);
        EXPECT_LE(exact - trunc, truncation_tail_bound(fib, 2.0, depth) + 1e-15);
        EXPECT_GE(exact - trunc, 0.0);
    }
}
