#ifndef TGRAPH_RECONSTRUCT_HPP
#define TGRAPH_RECONSTRUCT_HPP

#include <string>

#include "fock.hpp"
#include "random.hpp"
#include "report.hpp"

namespace tgraph
{

/// p_E acts as the rank-one projection onto e_v in every vertex representation,
/// and is a projection in the word algebra.
inline CheckList vacuum_projection_check(const FiniteGraph& g, Index depth = 5)
{
    CheckList out;
    const auto p = vacuum_projection(g);
    double worst = 0.0;
    for(Index v = 0; v < g.num_vertices(); ++v)
    {
        auto m = fock_matrix(g, p, v, depth);
        worst = std::max(worst, (m.matrix - vacuum_matrix(g, v, depth)).cwiseAbs().maxCoeff());
    }
    out.add("fock_rank_one", worst == 0.0, worst, "depth " + std::to_string(depth));
    double idem = symbolic_residual(g, multiply(g, p, p), p);
    out.add("idempotent", idem == 0.0, idem);
    double sa = symbolic_residual(g, adjoint(g, p), p);
    out.add("self_adjoint", sa == 0.0, sa);
    return out;
}

namespace detail
{
struct ResidualPair
{
    double symbolic = 0.0;
    double fock = 0.0;

    void update(const FiniteGraph& g, const ToeplitzElement& lhs, const ToeplitzElement& rhs, Index depth)
    {
        symbolic = std::max(symbolic, symbolic_residual(g, lhs, rhs));
        fock = std::max(fock, fock_residual(g, lhs, rhs, depth));
    }
};
} // namespace detail

/*
 * Identities behind X(E) = T_1 p_E on random data: commutation of p_E with the
 * coefficients, the inner product p iota(xi)^* iota(eta) p = pi(<xi, eta>) p,
 * vanishing of higher creation-annihilation words against p_E, and both actions.
 */
inline CheckList reconstruct_module_check(const FiniteGraph& g, Index trials, double tol, Rng& rng, Index depth = 5)
{
    const auto p = vacuum_projection(g);
    detail::ResidualPair commute, inner, vanish1, vanish2, left, right;
    for(Index t = 0; t < trials; ++t)
    {
        auto xi = random_module_element(g, rng);
        auto eta = random_module_element(g, rng);
        auto a = random_vertex_function(g, rng);
        auto b = random_vertex_function(g, rng);
        auto pa = coefficient(g, a);

        commute.update(g, multiply(g, p, pa), multiply(g, pa, p), depth);

        auto lhs = multiply(g, {p, annihilation(g, {xi}), creation(g, {eta}), p});
        inner.update(g, lhs, multiply(g, coefficient(g, inner_product(g, xi, eta)), p), depth);

        auto zero = ToeplitzElement{};
        vanish1.update(g, multiply(g, spanning_word(g, random_tensor(g, rng, 2), random_tensor(g, rng, 1)), p), zero, depth);
        vanish2.update(g, multiply(g, spanning_word(g, random_tensor(g, rng, 3), random_tensor(g, rng, 2)), p), zero, depth);

        auto xp = multiply(g, creation(g, {xi}), p);
        left.update(g, multiply(g, pa, xp), multiply(g, creation(g, {left_action(g, a, xi)}), p), depth);
        right.update(g, multiply(g, xp, coefficient(g, b)), multiply(g, creation(g, {right_action(g, xi, b)}), p), depth);
    }

    CheckList out;
    auto emit = [&](const std::string& name, const detail::ResidualPair& r) {
        out.add_residual(name + "_symbolic", r.symbolic, tol);
        out.add_residual(name + "_fock", r.fock, tol);
    };
    emit("p_commutes_with_coefficients", commute);
    emit("inner_product", inner);
    emit("vanishing_degree1_n1", vanish1);
    emit("vanishing_degree1_n2", vanish2);
    emit("left_action", left);
    emit("right_action", right);
    return out;
}

// ---------------------------------------------------------------------------
// Transport along a graph isomorphism (phi0, phi1): E -> F
// ---------------------------------------------------------------------------

/// theta_X(xi) = xi o phi1^{-1}
inline ModuleElement transport(const GraphIsomorphism& iso, const ModuleElement& x)
{
    ModuleElement y{Eigen::VectorXcd(x.values.size())};
    for(Index e = 0; e < iso.edge_map.size(); ++e) y.values[static_cast<Eigen::Index>(iso.edge_map[e])] = x(e);
    return y;
}

/// theta_M(a) = a o phi0^{-1}
inline VertexFunction transport(const GraphIsomorphism& iso, const VertexFunction& a)
{
    VertexFunction b{Eigen::VectorXcd(a.values.size())};
    for(Index v = 0; v < iso.vertex_map.size(); ++v) b.values[static_cast<Eigen::Index>(iso.vertex_map[v])] = a(v);
    return b;
}

inline ToeplitzWord transport(const GraphIsomorphism& iso, const ToeplitzWord& w)
{
    ToeplitzWord out;
    out.coeff = w.coeff;
    for(const auto& x : w.left) out.left.push_back(transport(iso, x));
    out.middle = transport(iso, w.middle);
    for(const auto& y : w.right) out.right.push_back(transport(iso, y));
    return out;
}

inline ToeplitzElement transport(const GraphIsomorphism& iso, const ToeplitzElement& x)
{
    ToeplitzElement out;
    for(const auto& w : x.words()) out.add(transport(iso, w));
    return out;
}

/*
 * Verifies that relabelling along the isomorphism carries p_E to p_F, preserves
 * gauge degrees, and that theta_X is a bimodule map compatible with the
 * Toeplitz structure: theta(iota(xi) p_E) = iota(theta_X xi) p_F.
 */
inline CheckList triple_iso_transport(const GraphIsomorphism& iso, const FiniteGraph& e, const FiniteGraph& f, Index trials,
                                      double tol, Rng& rng)
{
    if(!is_graph_isomorphism(iso, e, f)) throw InvalidInput("maps do not form a graph isomorphism");
    CheckList out;

    const auto pe = vacuum_projection(e);
    const auto pf = vacuum_projection(f);
    double rp = symbolic_residual(f, transport(iso, pe), pf);
    out.add("theta_pE_equals_pF", rp == 0.0, rp);

    double ip = 0.0, la = 0.0, ra = 0.0, toe = 0.0, mul = 0.0;
    bool grading = true;
    for(Index t = 0; t < trials; ++t)
    {
        auto xi = random_module_element(e, rng);
        auto eta = random_module_element(e, rng);
        auto a = random_vertex_function(e, rng);

        auto lhs = inner_product(f, transport(iso, xi), transport(iso, eta));
        ip = std::max(ip, (lhs.values - transport(iso, inner_product(e, xi, eta)).values).cwiseAbs().maxCoeff());

        auto l1 = transport(iso, left_action(e, a, xi));
        auto l2 = left_action(f, transport(iso, a), transport(iso, xi));
        la = std::max(la, (l1.values - l2.values).cwiseAbs().maxCoeff());

        auto r1 = transport(iso, right_action(e, xi, a));
        auto r2 = right_action(f, transport(iso, xi), transport(iso, a));
        ra = std::max(ra, (r1.values - r2.values).cwiseAbs().maxCoeff());

        auto img = transport(iso, multiply(e, creation(e, {xi}), pe));
        toe = std::max(toe, symbolic_residual(f, img, multiply(f, creation(f, {transport(iso, xi)}), pf)));

        // theta is multiplicative and graded on random words
        auto w1 = random_homogeneous(e, rng, static_cast<int>(t % 3) - 1, 2, 2);
        auto w2 = random_homogeneous(e, rng, static_cast<int>((t + 1) % 3) - 1, 2, 2);
        auto prod = transport(iso, multiply(e, w1, w2));
        mul = std::max(mul, symbolic_residual(f, prod, multiply(f, transport(iso, w1), transport(iso, w2))));
        for(int n : w1.degrees())
            grading = grading && symbolic_residual(f, transport(iso, spectral_component(w1, n)), spectral_component(transport(iso, w1), n)) == 0.0;
    }
    out.add("gauge_grading", grading);
    out.add_residual("inner_product_intertwining", ip, tol);
    out.add_residual("left_action_intertwining", la, tol);
    out.add_residual("right_action_intertwining", ra, tol);
    out.add_residual("theta_iota_pE", toe, tol);
    out.add_residual("theta_multiplicative", mul, tol);
    return out;
}

} // namespace tgraph

#endif
