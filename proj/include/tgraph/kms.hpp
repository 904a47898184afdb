#ifndef TGRAPH_KMS_HPP
#define TGRAPH_KMS_HPP

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "random.hpp"
#include "report.hpp"
#include "toeplitz.hpp"

namespace tgraph
{

/// log of the spectral radius; -inf for graphs without cycles of positive growth (rho = 0).
inline double critical_beta(const FiniteGraph& g)
{
    double rho = spectral_radius(g);
    return rho > 0.0 ? std::log(rho) : -std::numeric_limits<double>::infinity();
}

/// Rejects beta <= log rho(A); the states are only parametrized above that threshold.
inline void check_beta(const FiniteGraph& g, double beta)
{
    if(!std::isfinite(beta)) throw DomainError("beta must be finite");
    double crit = critical_beta(g);
    if(!(beta > crit)) throw DomainError("beta = " + std::to_string(beta) + " is not above log rho = " + std::to_string(crit));
}

/// R = (I - e^{-beta} A)^{-1} = sum_n e^{-beta n} A^n
inline Eigen::MatrixXd resolvent(const FiniteGraph& g, double beta)
{
    check_beta(g, beta);
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - std::exp(-beta) * adjacency_matrix(g);
    return m.fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
}

/// N_v = sum over mu in E* v of e^{-beta |mu|} = 1^T R delta_v, for all v.
inline Eigen::VectorXd path_partition_sums(const FiniteGraph& g, double beta) { return resolvent(g, beta).colwise().sum().transpose(); }

inline double path_partition_sum(const FiniteGraph& g, double beta, Index v)
{
    g.check_vertex(v);
    return path_partition_sums(g, beta)[static_cast<Eigen::Index>(v)];
}

/// Truncated sum over |mu| <= depth, accumulated from exact path counts.
inline double path_partition_sum_truncated(const FiniteGraph& g, double beta, Index v, Index depth)
{
    g.check_vertex(v);
    double q = std::exp(-beta);
    Eigen::VectorXd layer = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_vertices()));
    layer[static_cast<Eigen::Index>(v)] = 1.0; // layer(w) = |w E^n v| e^{-beta n}
    Eigen::MatrixXd a = adjacency_matrix(g);
    double total = 0.0;
    for(Index n = 0; n <= depth; ++n)
    {
        total += layer.sum();
        layer = q * (a * layer);
    }
    return total;
}

/// Bound on the tail sum_{n > depth} e^{-beta n} |E^n v| using |E^n v| <= maxdeg^n.
inline double truncation_tail_bound(const FiniteGraph& g, double beta, Index depth)
{
    Index maxdeg = 0;
    for(Index v = 0; v < g.num_vertices(); ++v) maxdeg = std::max(maxdeg, fiber_count(g, v));
    double q = std::exp(-beta) * static_cast<double>(maxdeg);
    if(q >= 1.0) return std::numeric_limits<double>::infinity();
    return std::pow(q, static_cast<double>(depth + 1)) / (1.0 - q);
}

/// Probability vector with all mass at v.
inline Eigen::VectorXd point_mass(const FiniteGraph& g, Index v)
{
    g.check_vertex(v);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_vertices()));
    m[static_cast<Eigen::Index>(v)] = 1.0;
    return m;
}

/*
 * KMS_beta state phi_Omega for a probability vector Omega on the vertices:
 *   phi(c iota(x) pi(a) iota(y)^*) = delta_{k,l} c e^{-beta k} sum_v Omega(v) / N_v (g^T R)_v
 * with g = <y, x . a> (g = a for k = l = 0).
 */
class KMSState
{
public:
    KMSState(const FiniteGraph& g, double beta, Eigen::VectorXd measure)
        : m_graph(&g), m_beta(beta), m_measure(std::move(measure)), m_resolvent(resolvent(g, beta))
    {
        if(static_cast<Index>(m_measure.size()) != g.num_vertices()) throw InvalidInput("measure does not match vertex count");
        if((m_measure.array() < 0.0).any()) throw InvalidInput("measure has negative mass");
        if(std::abs(m_measure.sum() - 1.0) > 1e-12) throw InvalidInput("measure is not a probability vector");
        m_partition = m_resolvent.colwise().sum().transpose();
        m_weights = m_measure.cwiseQuotient(m_partition);
        m_column = (m_resolvent * m_weights).cast<Complex>();
    }

    static KMSState at_vertex(const FiniteGraph& g, double beta, Index v) { return KMSState(g, beta, point_mass(g, v)); }

    double beta() const { return m_beta; }
    const FiniteGraph& graph() const { return *m_graph; }
    const Eigen::VectorXd& measure() const { return m_measure; }
    const Eigen::VectorXd& partition_sums() const { return m_partition; }
    const Eigen::MatrixXd& resolvent_matrix() const { return m_resolvent; }

    Complex operator()(const ToeplitzWord& w) const
    {
        const auto& g = *m_graph;
        const Index k = w.left.size();
        if(k != w.right.size()) return 0.0;
        VertexFunction gv = w.middle;
        if(k > 0)
        {
            auto xs = w.left;
            xs.back() = right_action(g, xs.back(), w.middle);
            gv = tensor_inner_product(g, w.right, xs);
        }
        // sum_v weight(v) sum_u g(u) R(u, v)
        Complex s = (gv.values.transpose() * m_column)(0, 0);
        return w.coeff * std::exp(-m_beta * static_cast<double>(k)) * s;
    }

    Complex operator()(const ToeplitzElement& x) const
    {
        Complex s = 0.0;
        for(const auto& w : x.words()) s += (*this)(w);
        return s;
    }

private:
    const FiniteGraph* m_graph;
    double m_beta;
    Eigen::VectorXd m_measure;
    Eigen::MatrixXd m_resolvent;
    Eigen::VectorXd m_partition;
    Eigen::VectorXd m_weights;
    Eigen::VectorXcd m_column;
};

inline Complex kms_eval(const KMSState& state, const ToeplitzElement& x) { return state(x); }

/*
 * phi(a sigma_{i beta}(b)) = phi(b a) for gauge-homogeneous a, b, where
 * sigma_{i beta} scales a word of degree n by e^{-beta n}.
 */
inline Check kms_condition_check(const KMSState& state, const ToeplitzElement& a, const ToeplitzElement& b, double tol)
{
    if(!a.is_homogeneous() || !b.is_homogeneous()) throw InvalidInput("KMS condition check needs gauge-homogeneous elements");
    const auto& g = state.graph();
    const int nb = b.empty() ? 0 : b.degrees().front();
    Complex lhs = std::exp(-state.beta() * nb) * state(multiply(g, a, b));
    Complex rhs = state(multiply(g, b, a));
    double r = std::abs(lhs - rhs);
    return {"kms_condition", r <= tol, r, {}};
}

/// phi_v(a) = <(psi_v x pi_v)(a) e_v, e_v>: only coefficient words contribute, with a(v).
inline Complex kms_infty_eval(const FiniteGraph& g, Index v, const ToeplitzElement& x)
{
    g.check_vertex(v);
    Complex s = 0.0;
    for(const auto& w : x.words())
        if(w.left.empty() && w.right.empty()) s += w.coeff * w.middle(v);
    return s;
}

// ---------------------------------------------------------------------------
// beta -> infinity sweep
// ---------------------------------------------------------------------------

struct NamedElement
{
    std::string id;
    ToeplitzElement element;
};

/// Vertex indicators, iota(delta_e) iota(delta_e)^* for every edge, and p_E.
inline std::vector<NamedElement> standard_sweep_words(const FiniteGraph& g)
{
    std::vector<NamedElement> out;
    for(Index v = 0; v < g.num_vertices(); ++v)
        out.push_back({"pi(1_" + g.vertex_id(v) + ")", coefficient(g, VertexFunction::indicator(g, v))});
    for(Index e = 0; e < g.num_edges(); ++e)
    {
        auto d = ModuleElement::delta(g, e);
        out.push_back({"iota(d_" + g.edge_id(e) + ")iota(d_" + g.edge_id(e) + ")*", spanning_word(g, {d}, {d})});
    }
    out.push_back({"p_E", vacuum_projection(g)});
    return out;
}

/// 1 for a nonzero projection (checked symbolically), otherwise the triangle-inequality bound.
inline double norm_estimate(const FiniteGraph& g, const ToeplitzElement& x)
{
    auto exp = path_expansion(g, x);
    bool nonzero = false;
    for(const auto& [k, c] : exp) nonzero = nonzero || c != Complex(0.0);
    if(!nonzero) return 0.0;
    if(symbolic_residual(g, adjoint(g, x), x) == 0.0 && symbolic_residual(g, multiply(g, x, x), x) == 0.0) return 1.0;
    return norm_bound(g, x);
}

struct SweepRow
{
    double beta;
    std::string word_id;
    Complex value;
    double residual;
};

struct SweepSummary
{
    std::string word_id;
    double norm = 0.0;
    double fitted_constant = 0.0; // max residual e^{beta}
    bool monotone = true;
    bool within_bound = true;     // residual <= bound_factor e^{-beta} norm
};

struct SweepTable
{
    Index vertex = 0;
    double bound_factor = 3.0;
    std::vector<SweepRow> rows;
    std::vector<SweepSummary> summaries;

    bool passed() const
    {
        for(const auto& s : summaries)
            if(!s.monotone || !s.within_bound) return false;
        return true;
    }
};

/// |phi_v^beta(w) - phi_v(w)| over a beta grid, with monotonicity and the e^{-beta} bound.
inline SweepTable kms_limit_sweep(const FiniteGraph& g, Index v, const std::vector<NamedElement>& words,
                                  const std::vector<double>& betas, double tol = 1e-12, double bound_factor = 3.0)
{
    g.check_vertex(v);
    for(double b : betas) check_beta(g, b);
    SweepTable t;
    t.vertex = v;
    t.bound_factor = bound_factor;
    std::vector<KMSState> states;
    for(double b : betas) states.push_back(KMSState::at_vertex(g, b, v));
    for(const auto& w : words)
    {
        SweepSummary s;
        s.word_id = w.id;
        s.norm = norm_estimate(g, w.element);
        const Complex limit = kms_infty_eval(g, v, w.element);
        double prev = std::numeric_limits<double>::infinity();
        for(Index i = 0; i < betas.size(); ++i)
        {
            Complex val = states[i](w.element);
            double r = std::abs(val - limit);
            t.rows.push_back({betas[i], w.id, val, r});
            s.monotone = s.monotone && r <= prev + tol;
            s.within_bound = s.within_bound && r <= bound_factor * std::exp(-betas[i]) * s.norm + tol;
            s.fitted_constant = std::max(s.fitted_constant, r * std::exp(betas[i]));
            prev = r;
        }
        t.summaries.push_back(s);
    }
    return t;
}

/// lo, lo + step, ..., up to hi inclusive (within half a step).
inline std::vector<double> beta_grid(double lo, double hi, double step)
{
    if(!(step > 0.0) || hi < lo) throw InvalidInput("beta grid needs lo <= hi and step > 0");
    std::vector<double> out;
    for(Index i = 0;; ++i)
    {
        double b = lo + step * static_cast<double>(i);
        if(b > hi + 0.5 * step * 1e-9) break;
        out.push_back(b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Extremal states
// ---------------------------------------------------------------------------

/// Random probability vector (normalized exponential weights).
inline Eigen::VectorXd random_measure(const FiniteGraph& g, Rng& rng)
{
    std::exponential_distribution<double> ex(1.0);
    Eigen::VectorXd m(static_cast<Eigen::Index>(g.num_vertices()));
    for(Eigen::Index i = 0; i < m.size(); ++i) m[i] = ex(rng);
    return m / m.sum();
}

/*
 * The point-mass states separate vertices (some vertex indicator tells them
 * apart) and phi_Omega = sum_v Omega(v) phi_v on random elements.
 */
inline CheckList extremal_separation_check(const FiniteGraph& g, double beta, Rng& rng, Index trials = 100, double tol = 1e-12)
{
    check_beta(g, beta);
    CheckList out;
    std::vector<KMSState> ext;
    for(Index v = 0; v < g.num_vertices(); ++v) ext.push_back(KMSState::at_vertex(g, beta, v));

    bool separated = true;
    std::string detail;
    for(Index v = 0; v < g.num_vertices(); ++v)
    {
        for(Index w = v + 1; w < g.num_vertices(); ++w)
        {
            bool found = false;
            for(Index u = 0; u < g.num_vertices() && !found; ++u)
            {
                auto a = coefficient(g, VertexFunction::indicator(g, u));
                found = std::abs(ext[v](a) - ext[w](a)) > 1e-9;
            }
            if(!found)
            {
                separated = false;
                detail = g.vertex_id(v) + " and " + g.vertex_id(w) + " not separated";
            }
        }
    }
    out.add("vertex_separation", separated, 0.0, detail);

    double aff = 0.0;
    for(Index t = 0; t < trials; ++t)
    {
        auto omega = random_measure(g, rng);
        KMSState st(g, beta, omega);
        auto x = random_homogeneous(g, rng, 0, 2, 3);
        Complex mix = 0.0;
        for(Index v = 0; v < g.num_vertices(); ++v) mix += omega[static_cast<Eigen::Index>(v)] * ext[v](x);
        aff = std::max(aff, std::abs(st(x) - mix) / std::max(1.0, std::abs(mix)));
    }
    out.add_residual("affinity", aff, tol);
    return out;
}

} // namespace tgraph

#endif
