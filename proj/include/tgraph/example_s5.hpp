#ifndef TGRAPH_EXAMPLE_S5_HPP
#define TGRAPH_EXAMPLE_S5_HPP

#include <vector>

#include <Eigen/Dense>

#include "module.hpp"
#include "random.hpp"
#include "report.hpp"

namespace tgraph
{

/*
 * Two graphs over the circle with isomorphic modules: E has two loop
 * components with r = s = id, F has one component with r = s = z^2.  The
 * isomorphism X(F) -> C(T, C^2) = X(E) is
 *   rho(f)(e^{it}) = U_t (f(e^{it/2}), f(-e^{it/2}))^T
 * with U_t = [[e^{it/2} cos(t/4), -e^{it/2} sin(t/4)], [sin(t/4), cos(t/4)]].
 */
inline CircleCoveringGraph twisted_pair_E() { return CircleCoveringGraph({{1, 0.0, 1, 0.0}, {1, 0.0, 1, 0.0}}); }
inline CircleCoveringGraph twisted_pair_F() { return CircleCoveringGraph({{2, 0.0, 2, 0.0}}); }

/// U_t at t = 2 pi k / n, with quarter turns exact.
inline Eigen::Matrix2cd twist_matrix(std::int64_t k, std::int64_t n)
{
    const Complex half = unit_root(k, 2 * n);    // e^{it/2}
    const Complex quarter = unit_root(k, 4 * n); // cos(t/4) + i sin(t/4)
    const double c = quarter.real(), s = quarter.imag();
    Eigen::Matrix2cd u;
    u << half * c, -half * s, s, c;
    return u;
}

/// U_t at an arbitrary angle.
inline Eigen::Matrix2cd twist_matrix(double t)
{
    const Complex half = std::polar(1.0, t / 2.0);
    const double c = std::cos(t / 4.0), s = std::sin(t / 4.0);
    Eigen::Matrix2cd u;
    u << half * c, -half * s, s, c;
    return u;
}

inline Eigen::Matrix2cd swap_matrix()
{
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

/// U(t_k) for t_k = 2 pi k / N, k = 0..N (the last one at t = 2 pi).
struct TwistPath
{
    Index grid = 0;
    std::vector<Eigen::Matrix2cd> u;
};

inline double unitarity_residual(const Eigen::Matrix2cd& u) { return (u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(); }

inline TwistPath build_twist(Index n)
{
    if(n < 4 || n % 2 != 0) throw InvalidInput("grid size must be even and at least 4");
    TwistPath p{n, {}};
    for(Index k = 0; k <= n; ++k) p.u.push_back(twist_matrix(static_cast<std::int64_t>(k), static_cast<std::int64_t>(n)));
    for(const auto& u : p.u)
        if(unitarity_residual(u) > 1e-12) throw VerificationError("twist matrix is not unitary");
    if((p.u.front() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-14) throw VerificationError("U(0) is not the identity");
    if((p.u.back() - swap_matrix()).cwiseAbs().maxCoeff() > 1e-14) throw VerificationError("U(2 pi) is not the swap");
    return p;
}

/// rho(f) at t_0..t_N; f is an element of X(F) on base grid N (2N samples at pi j / N).
inline std::vector<Eigen::Vector2cd> rho_samples(const TwistPath& p, const CircleModuleElement& f)
{
    const Index n = p.grid;
    if(f.grid != n || f.components.size() != 1 || static_cast<Index>(f.components[0].size()) != 2 * n)
    {
        throw InvalidInput("input must be sampled at the 2N angles pi j / N");
    }
    std::vector<Eigen::Vector2cd> out;
    for(Index k = 0; k <= n; ++k)
    {
        // e^{it/2} has index k on the 2N grid, -e^{it/2} has index k + N
        Eigen::Vector2cd w(f.at(0, k % (2 * n)), f.at(0, (k + n) % (2 * n)));
        out.push_back(p.u[k] * w);
    }
    return out;
}

/// rho(f) as an element of X(E) = C(T, C^2).
inline CircleModuleElement rho_map(const TwistPath& p, const CircleModuleElement& f)
{
    auto s = rho_samples(p, f);
    const Index n = p.grid;
    CircleModuleElement out;
    out.grid = n;
    out.components.assign(2, Eigen::VectorXcd(static_cast<Eigen::Index>(n)));
    for(Index k = 0; k < n; ++k)
    {
        out.components[0][static_cast<Eigen::Index>(k)] = s[k][0];
        out.components[1][static_cast<Eigen::Index>(k)] = s[k][1];
    }
    return out;
}

/// Largest |rho(f)(0) - rho(f)(2 pi)|; exactly 0 when the boundary twist is exact.
inline double endpoint_residual(const TwistPath& p, const CircleModuleElement& f)
{
    auto s = rho_samples(p, f);
    return (s.front() - s.back()).cwiseAbs().maxCoeff();
}

inline bool endpoint_bitwise_equal(const TwistPath& p, const CircleModuleElement& f)
{
    auto s = rho_samples(p, f);
    return s.front()[0] == s.back()[0] && s.front()[1] == s.back()[1];
}

/// max_t |<rho f1, rho f2>(t) - <f1, f2>(t)|
inline double verify_isometry(const TwistPath& p, const CircleModuleElement& f1, const CircleModuleElement& f2)
{
    const auto e = twisted_pair_E();
    const auto f = twisted_pair_F();
    auto lhs = inner_product(e, rho_map(p, f1), rho_map(p, f2));
    auto rhs = inner_product(f, f1, f2);
    return (lhs.values - rhs.values).cwiseAbs().maxCoeff();
}

struct BimoduleResiduals
{
    double right = 0.0; // rho(f . a) - rho(f) . a
    double left = 0.0;  // rho(a . f) - a . rho(f)
};

inline BimoduleResiduals verify_bimodule(const TwistPath& p, const CircleModuleElement& x, const CircleFunction& a)
{
    const auto e = twisted_pair_E();
    const auto f = twisted_pair_F();
    BimoduleResiduals r;
    auto rr1 = rho_map(p, right_action(f, x, a));
    auto rr2 = right_action(e, rho_map(p, x), a);
    auto lr1 = rho_map(p, left_action(f, a, x));
    auto lr2 = left_action(e, a, rho_map(p, x));
    for(Index c = 0; c < 2; ++c)
    {
        r.right = std::max(r.right, (rr1.components[c] - rr2.components[c]).cwiseAbs().maxCoeff());
        r.left = std::max(r.left, (lr1.components[c] - lr2.components[c]).cwiseAbs().maxCoeff());
    }
    return r;
}

/// (x, y) = U_t^* h, the unique solution of U_t (x, y)^T = h.
inline Eigen::Vector2cd surjectivity_solve(const Eigen::Matrix2cd& u, const Eigen::Vector2cd& h) { return u.adjoint() * h; }

inline double surjectivity_residual(const Eigen::Matrix2cd& u, const Eigen::Vector2cd& h)
{
    return (u * surjectivity_solve(u, h) - h).cwiseAbs().maxCoeff();
}

struct NonisomorphismWitness
{
    Index components_E = 0;
    Index components_F = 0;
    bool graphs_distinct() const { return components_E != components_F; }
};

/// Edge spaces with different numbers of connected components cannot be homeomorphic.
inline NonisomorphismWitness nonisomorphism_witness()
{
    return {edge_space_components(twisted_pair_E()), edge_space_components(twisted_pair_F())};
}

// ---------------------------------------------------------------------------
// Trigonometric polynomial inputs
// ---------------------------------------------------------------------------

/// Coefficients c_q, q = -degree..degree.
inline std::vector<Complex> random_trig_poly(Rng& rng, int degree)
{
    std::vector<Complex> c;
    for(int q = -degree; q <= degree; ++q) c.push_back(random_complex(rng) / static_cast<double>(1 + std::abs(q)));
    return c;
}

/// sum_q c_q e^{2 pi i q j / points} at j = 0..points-1.
inline Eigen::VectorXcd sample_trig_poly(const std::vector<Complex>& c, Index points)
{
    const int degree = static_cast<int>(c.size() / 2);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(points));
    for(Index j = 0; j < points; ++j)
        for(int q = -degree; q <= degree; ++q)
            v[static_cast<Eigen::Index>(j)] += c[static_cast<Index>(q + degree)] *
                                              unit_root(static_cast<std::int64_t>(q) * static_cast<std::int64_t>(j), static_cast<std::int64_t>(points));
    return v;
}

inline CircleModuleElement random_F_element(Rng& rng, Index n, int degree)
{
    return CircleModuleElement{n, {sample_trig_poly(random_trig_poly(rng, degree), 2 * n)}};
}

inline CircleFunction random_base_function(Rng& rng, Index n, int degree) { return {sample_trig_poly(random_trig_poly(rng, degree), n)}; }

/// Full verification of the twisted pair on grid N with random inputs of degree <= degree.
inline CheckList s5_verify(Index n, Index trials, double tol, Rng& rng, int degree = 16)
{
    CheckList out;
    auto p = build_twist(n);
    double u0 = (p.u.front() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
    double u2 = (p.u.back() - swap_matrix()).cwiseAbs().maxCoeff();
    out.add_residual("U0_identity", u0, 1e-14);
    out.add_residual("U2pi_swap", u2, 1e-14);
    double unit = 0.0, det = 0.0;
    for(const auto& u : p.u)
    {
        unit = std::max(unit, unitarity_residual(u));
        det = std::max(det, std::abs(std::abs(u.determinant()) - 1.0));
    }
    out.add_residual("unitarity", unit, 1e-12);
    out.add_residual("abs_determinant", det, 1e-12);

    double iso = 0.0, right = 0.0, left = 0.0, endpoint = 0.0, surj = 0.0;
    bool bitwise = true;
    for(Index t = 0; t < trials; ++t)
    {
        auto f1 = random_F_element(rng, n, degree);
        auto f2 = random_F_element(rng, n, degree);
        auto a = random_base_function(rng, n, degree);
        iso = std::max(iso, verify_isometry(p, f1, f2));
        auto b = verify_bimodule(p, f1, a);
        right = std::max(right, b.right);
        left = std::max(left, b.left);
        endpoint = std::max(endpoint, endpoint_residual(p, f1));
        bitwise = bitwise && endpoint_bitwise_equal(p, f1);
    }
    for(Index k = 0; k <= n; ++k)
    {
        Eigen::Vector2cd h(random_complex(rng), random_complex(rng));
        surj = std::max(surj, surjectivity_residual(p.u[k], h));
    }
    out.add_residual("isometry", iso, tol);
    out.add_residual("right_action", right, tol);
    out.add_residual("left_action", left, tol);
    out.add("endpoint_exact", bitwise && endpoint == 0.0, endpoint);
    out.add_residual("surjectivity", surj, 1e-13);
    auto w = nonisomorphism_witness();
    out.add("component_counts", w.components_E == 2 && w.components_F == 1, 0.0,
            "E: " + std::to_string(w.components_E) + ", F: " + std::to_string(w.components_F));
    return out;
}

} // namespace tgraph

#endif
