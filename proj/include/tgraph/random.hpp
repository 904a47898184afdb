#ifndef TGRAPH_RANDOM_HPP
#define TGRAPH_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "toeplitz.hpp"

namespace tgraph
{

using Rng = std::mt19937_64;

inline Complex random_complex(Rng& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

inline Eigen::VectorXcd random_vector(Rng& rng, Index n)
{
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for(Index i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = random_complex(rng);
    return v;
}

inline ModuleElement random_module_element(const FiniteGraph& g, Rng& rng) { return {random_vector(rng, g.num_edges())}; }

inline VertexFunction random_vertex_function(const FiniteGraph& g, Rng& rng) { return {random_vector(rng, g.num_vertices())}; }

inline std::vector<ModuleElement> random_tensor(const FiniteGraph& g, Rng& rng, Index k)
{
    std::vector<ModuleElement> out;
    for(Index i = 0; i < k; ++i) out.push_back(random_module_element(g, rng));
    return out;
}

/// Random word with m creations and n annihilations.
inline ToeplitzWord random_word(const FiniteGraph& g, Rng& rng, Index m, Index n)
{
    return make_word(g, random_complex(rng), random_tensor(g, rng, m), random_vertex_function(g, rng), random_tensor(g, rng, n));
}

/// Random word of gauge degree `degree` with at most max_len factors on each side.
inline ToeplitzWord random_word_of_degree(const FiniteGraph& g, Rng& rng, int degree, Index max_len)
{
    const Index lo = degree < 0 ? static_cast<Index>(-degree) : 0;
    std::uniform_int_distribution<Index> pick(0, max_len >= lo ? max_len - lo : 0);
    Index n = lo + pick(rng);
    Index m = static_cast<Index>(static_cast<std::int64_t>(n) + degree);
    return random_word(g, rng, m, n);
}

/// Sum of `terms` random words with the same gauge degree.
inline ToeplitzElement random_homogeneous(const FiniteGraph& g, Rng& rng, int degree, Index max_len, Index terms)
{
    ToeplitzElement x;
    for(Index t = 0; t < terms; ++t) x.add(random_word_of_degree(g, rng, degree, max_len));
    return x;
}

/// Uniformly random permutation of 0..n-1.
inline std::vector<Index> random_permutation(Rng& rng, Index n)
{
    std::vector<Index> p(n);
    for(Index i = 0; i < n; ++i) p[i] = i;
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

/// Random bijective relabelling of a finite graph.
inline GraphIsomorphism random_relabelling(const FiniteGraph& g, Rng& rng)
{
    return {random_permutation(rng, g.num_vertices()), random_permutation(rng, g.num_edges())};
}

} // namespace tgraph

#endif
