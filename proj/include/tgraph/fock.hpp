#ifndef TGRAPH_FOCK_HPP
#define TGRAPH_FOCK_HPP

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "toeplitz.hpp"

namespace tgraph
{

/// Ordered basis {e_mu : mu in E^{<=L} v} of the truncated Fock space l^2(E* v).
class FockBasis
{
public:
    FockBasis(const FiniteGraph& g, Index v, Index depth) : m_vertex(v), m_depth(depth)
    {
        m_paths = enumerate_paths_up_to(g, v, depth);
        for(Index i = 0; i < m_paths.size(); ++i) m_index.emplace(m_paths[i], i);
    }

    Index vertex() const { return m_vertex; }
    Index depth() const { return m_depth; }
    Index size() const { return m_paths.size(); }
    const Path& path(Index i) const { return m_paths.at(i); }
    const std::vector<Path>& paths() const { return m_paths; }

    /// Index of mu, or size() if mu is longer than the depth.
    Index find(const Path& mu) const
    {
        auto it = m_index.find(mu);
        return it == m_index.end() ? size() : it->second;
    }

private:
    Index m_vertex;
    Index m_depth;
    std::vector<Path> m_paths;
    std::map<Path, Index> m_index;
};

/// Matrix on the truncated space together with the columns where it is exact.
struct FockMatrix
{
    Eigen::MatrixXcd matrix;
    std::vector<bool> exact_column;

    Index size() const { return static_cast<Index>(matrix.rows()); }
};

/// Compression of psi_v(x): e_mu -> sum over s(f) = r(mu) of x(f) e_{f mu}, dropping terms past the depth.
inline Eigen::MatrixXcd creation_matrix(const FiniteGraph& g, const FockBasis& b, const ModuleElement& x)
{
    detail::check_shape(g, x);
    const auto n = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for(Index j = 0; j < b.size(); ++j)
    {
        const Path& mu = b.path(j);
        if(mu.length() >= b.depth()) continue;
        for(Index f : g.edges_from(mu.range(g)))
        {
            Index i = b.find(mu.prepend(f));
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += x(f);
        }
    }
    return m;
}

/// pi_v(a) e_mu = a(r(mu)) e_mu
inline Eigen::MatrixXcd coefficient_matrix(const FiniteGraph& g, const FockBasis& b, const VertexFunction& a)
{
    detail::check_shape(g, a);
    Eigen::VectorXcd d(static_cast<Eigen::Index>(b.size()));
    for(Index j = 0; j < b.size(); ++j) d[static_cast<Eigen::Index>(j)] = a(b.path(j).range(g));
    return d.asDiagonal();
}

/// Product of the truncated factor matrices.  Column mu is exact when |mu| + m <= L.
inline FockMatrix fock_matrix(const FiniteGraph& g, const ToeplitzWord& w, Index v, Index depth)
{
    if(depth < w.creations()) throw InvalidInput("depth is smaller than the number of creations in the word");
    g.check_vertex(v);
    FockBasis b(g, v, depth);
    Eigen::MatrixXcd m = w.coeff * coefficient_matrix(g, b, w.middle);
    for(Index i = w.left.size(); i-- > 0;) m = creation_matrix(g, b, w.left[i]) * m;
    // (iota(y_1) ... iota(y_n))^* = iota(y_n)^* ... iota(y_1)^*
    for(Index i = w.right.size(); i-- > 0;) m = m * creation_matrix(g, b, w.right[i]).adjoint();
    FockMatrix out{std::move(m), std::vector<bool>(b.size())};
    for(Index j = 0; j < b.size(); ++j) out.exact_column[j] = b.path(j).length() + w.creations() <= depth;
    return out;
}

inline FockMatrix fock_matrix(const FiniteGraph& g, const ToeplitzElement& x, Index v, Index depth)
{
    g.check_vertex(v);
    FockBasis b(g, v, depth);
    const auto n = static_cast<Eigen::Index>(b.size());
    FockMatrix out{Eigen::MatrixXcd::Zero(n, n), std::vector<bool>(b.size(), true)};
    for(const auto& w : x.words())
    {
        auto fm = fock_matrix(g, w, v, depth);
        out.matrix += fm.matrix;
        for(Index j = 0; j < b.size(); ++j) out.exact_column[j] = out.exact_column[j] && fm.exact_column[j];
    }
    return out;
}

/// max |a - b| over the columns marked exact in the mask.
inline double window_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const std::vector<bool>& mask)
{
    double r = 0.0;
    for(Index j = 0; j < mask.size(); ++j)
    {
        if(!mask[j]) continue;
        r = std::max(r, (a.col(static_cast<Eigen::Index>(j)) - b.col(static_cast<Eigen::Index>(j))).cwiseAbs().maxCoeff());
    }
    return r;
}

inline std::vector<bool> mask_and(const std::vector<bool>& a, const std::vector<bool>& b)
{
    std::vector<bool> out(a.size());
    for(Index j = 0; j < a.size(); ++j) out[j] = a[j] && b[j];
    return out;
}

/// Columns of the basis with |mu| + m <= L.
inline std::vector<bool> window_mask(const FiniteGraph& g, Index v, Index depth, Index creations)
{
    FockBasis b(g, v, depth);
    std::vector<bool> out(b.size());
    for(Index j = 0; j < b.size(); ++j) out[j] = b.path(j).length() + creations <= depth;
    return out;
}

/// Largest window residual of fock(lhs) against fock(rhs) over all vertices; columns
/// are kept only where both sides are exact.
inline double fock_residual(const FiniteGraph& g, const ToeplitzElement& lhs, const ToeplitzElement& rhs, Index depth)
{
    double r = 0.0;
    for(Index v = 0; v < g.num_vertices(); ++v)
    {
        auto a = fock_matrix(g, lhs, v, depth);
        auto b = fock_matrix(g, rhs, v, depth);
        r = std::max(r, window_residual(a.matrix, b.matrix, mask_and(a.exact_column, b.exact_column)));
    }
    return r;
}

/// Rank-one projection onto e_v in the truncated basis.
inline Eigen::MatrixXcd vacuum_matrix(const FiniteGraph& g, Index v, Index depth)
{
    FockBasis b(g, v, depth);
    const auto n = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    m(0, 0) = 1.0;
    return m;
}

} // namespace tgraph

#endif
