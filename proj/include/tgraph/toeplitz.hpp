#ifndef TGRAPH_TOEPLITZ_HPP
#define TGRAPH_TOEPLITZ_HPP

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "module.hpp"

namespace tgraph
{

/*
 * coeff * iota(x_1) ... iota(x_m) pi(a) (iota(y_1) ... iota(y_n))^*
 *
 * Normal form: when m > 0 the middle coefficient is absorbed into the last
 * creation, iota(x_m) pi(a) = iota(x_m . a), and the middle is 1.  Words with
 * a zero factor are dropped from elements.
 */
struct ToeplitzWord
{
    Complex coeff = 1.0;
    std::vector<ModuleElement> left;
    VertexFunction middle;
    std::vector<ModuleElement> right;

    int degree() const { return static_cast<int>(left.size()) - static_cast<int>(right.size()); }
    Index creations() const { return left.size(); }
    Index annihilations() const { return right.size(); }

    bool is_zero() const
    {
        if(coeff == Complex(0.0) || middle.is_zero()) return true;
        for(const auto& x : left)
            if(x.is_zero()) return true;
        for(const auto& y : right)
            if(y.is_zero()) return true;
        return false;
    }

    bool same_structure(const ToeplitzWord& o) const
    {
        return left == o.left && middle == o.middle && right == o.right;
    }
};

/// Finite formal sum of normal-form words.
class ToeplitzElement
{
public:
    ToeplitzElement() = default;

    explicit ToeplitzElement(std::vector<ToeplitzWord> words)
    {
        for(auto& w : words) add(std::move(w));
    }

    const std::vector<ToeplitzWord>& words() const { return m_words; }
    bool empty() const { return m_words.empty(); }

    /// Adds a word, merging it with a word of identical structure.
    void add(ToeplitzWord w)
    {
        if(w.is_zero()) return;
        for(auto it = m_words.begin(); it != m_words.end(); ++it)
        {
            if(it->same_structure(w))
            {
                it->coeff += w.coeff;
                if(it->coeff == Complex(0.0)) m_words.erase(it);
                return;
            }
        }
        m_words.push_back(std::move(w));
    }

    ToeplitzElement& operator+=(const ToeplitzElement& o)
    {
        for(const auto& w : o.m_words) add(w);
        return *this;
    }

    friend ToeplitzElement operator+(ToeplitzElement a, const ToeplitzElement& b) { return a += b; }

    friend ToeplitzElement operator*(Complex c, ToeplitzElement a)
    {
        if(c == Complex(0.0)) return {};
        for(auto& w : a.m_words) w.coeff *= c;
        return a;
    }

    friend ToeplitzElement operator-(const ToeplitzElement& a, const ToeplitzElement& b) { return a + Complex(-1.0) * b; }

    /// Gauge degrees present, ascending.
    std::vector<int> degrees() const
    {
        std::vector<int> d;
        for(const auto& w : m_words) d.push_back(w.degree());
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        return d;
    }

    bool is_homogeneous() const { return degrees().size() <= 1; }

    Index max_creations() const
    {
        Index m = 0;
        for(const auto& w : m_words) m = std::max(m, w.creations());
        return m;
    }

private:
    std::vector<ToeplitzWord> m_words;
};

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline ToeplitzWord normalize(const FiniteGraph& g, ToeplitzWord w)
{
    if(!w.left.empty() && !(w.middle == VertexFunction::constant(g, 1.0)))
    {
        w.left.back() = right_action(g, w.left.back(), w.middle);
        w.middle = VertexFunction::constant(g, 1.0);
    }
    return w;
}

inline ToeplitzWord make_word(const FiniteGraph& g, Complex coeff, std::vector<ModuleElement> left, VertexFunction middle,
                              std::vector<ModuleElement> right)
{
    for(const auto& x : left) detail::check_shape(g, x);
    for(const auto& y : right) detail::check_shape(g, y);
    detail::check_shape(g, middle);
    return normalize(g, ToeplitzWord{coeff, std::move(left), std::move(middle), std::move(right)});
}

inline ToeplitzElement element(ToeplitzWord w) { return ToeplitzElement({std::move(w)}); }

/// pi(a)
inline ToeplitzElement coefficient(const FiniteGraph& g, const VertexFunction& a) { return element(make_word(g, 1.0, {}, a, {})); }

inline ToeplitzElement unit(const FiniteGraph& g) { return coefficient(g, VertexFunction::constant(g, 1.0)); }

/// iota(x_1) ... iota(x_m)
inline ToeplitzElement creation(const FiniteGraph& g, std::vector<ModuleElement> xs)
{
    return element(make_word(g, 1.0, std::move(xs), VertexFunction::constant(g, 1.0), {}));
}

/// (iota(y_1) ... iota(y_n))^*
inline ToeplitzElement annihilation(const FiniteGraph& g, std::vector<ModuleElement> ys)
{
    return element(make_word(g, 1.0, {}, VertexFunction::constant(g, 1.0), std::move(ys)));
}

/// iota^{(x)m}(x) iota^{(x)n}(y)^*
inline ToeplitzElement spanning_word(const FiniteGraph& g, std::vector<ModuleElement> xs, std::vector<ModuleElement> ys)
{
    return element(make_word(g, 1.0, std::move(xs), VertexFunction::constant(g, 1.0), std::move(ys)));
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

/*
 * Reduces w1 * w2 using iota(y)^* iota(z) = pi(<y, z>), pi(c) iota(z) =
 * iota(c . z) and iota(z) pi(c) = iota(z . c).  The product of two normal-form
 * words is a single word (possibly zero).
 */
inline ToeplitzWord word_product(const FiniteGraph& g, const ToeplitzWord& w1, const ToeplitzWord& w2)
{
    const Index n = w1.right.size();
    const Index p = w2.left.size();
    const Index k = std::min(n, p);
    const VertexFunction one = VertexFunction::constant(g, 1.0);

    // (iota(y_1)..iota(y_k))^* iota(x'_1)..iota(x'_k) = pi(c)
    VertexFunction c = one;
    if(k > 0)
    {
        std::vector<ModuleElement> ys(w1.right.begin(), w1.right.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<ModuleElement> xs(w2.left.begin(), w2.left.begin() + static_cast<std::ptrdiff_t>(k));
        c = tensor_inner_product(g, ys, xs);
    }

    ToeplitzWord out;
    out.coeff = w1.coeff * w2.coeff;
    out.left = w1.left;
    if(n <= p)
    {
        // X1 pi(a1 c) iota(x'_{n+1}) .. iota(x'_p) pi(a2) Y2^*
        VertexFunction mid = w1.middle * c;
        if(n < p)
        {
            std::vector<ModuleElement> rest(w2.left.begin() + static_cast<std::ptrdiff_t>(n), w2.left.end());
            rest.front() = left_action(g, mid, rest.front());
            out.left.insert(out.left.end(), rest.begin(), rest.end());
            out.middle = w2.middle;
        }
        else
        {
            out.middle = mid * w2.middle;
        }
        out.right = w2.right;
    }
    else
    {
        // X1 pi(a1) (iota(conj(c) . y_{p+1}) .. iota(y_n))^* pi(a2) Y2^*
        std::vector<ModuleElement> rest(w1.right.begin() + static_cast<std::ptrdiff_t>(p), w1.right.end());
        rest.front() = left_action(g, c.conj(), rest.front());
        // (iota(y'_1)..)^* pi(a2) = (iota(conj(a2) . y'_1) ..)^*
        rest.front() = left_action(g, w2.middle.conj(), rest.front());
        out.middle = w1.middle;
        out.right = w2.right;
        out.right.insert(out.right.end(), rest.begin(), rest.end());
    }
    return normalize(g, std::move(out));
}

inline ToeplitzElement word_multiply(const FiniteGraph& g, const ToeplitzWord& w1, const ToeplitzWord& w2)
{
    return element(word_product(g, w1, w2));
}

inline ToeplitzElement multiply(const FiniteGraph& g, const ToeplitzElement& a, const ToeplitzElement& b)
{
    ToeplitzElement out;
    for(const auto& w1 : a.words())
        for(const auto& w2 : b.words()) out.add(word_product(g, w1, w2));
    return out;
}

inline ToeplitzElement multiply(const FiniteGraph& g, std::initializer_list<ToeplitzElement> factors)
{
    if(factors.size() == 0) return unit(g);
    auto it = factors.begin();
    ToeplitzElement acc = *it++;
    for(; it != factors.end(); ++it) acc = multiply(g, acc, *it);
    return acc;
}

/// (c X pi(a) Y^*)^* = conj(c) Y pi(conj a) X^*
inline ToeplitzWord adjoint(const FiniteGraph& g, const ToeplitzWord& w)
{
    return normalize(g, ToeplitzWord{std::conj(w.coeff), w.right, w.middle.conj(), w.left});
}

inline ToeplitzElement adjoint(const FiniteGraph& g, const ToeplitzElement& x)
{
    ToeplitzElement out;
    for(const auto& w : x.words()) out.add(adjoint(g, w));
    return out;
}

/// gamma_z acts on a word of degree d by z^d.
inline ToeplitzElement gauge_action(const ToeplitzElement& x, Complex z)
{
    ToeplitzElement out;
    for(auto w : x.words())
    {
        w.coeff *= std::pow(z, w.degree());
        out.add(std::move(w));
    }
    return out;
}

/// Degree-n part of x.
inline ToeplitzElement spectral_component(const ToeplitzElement& x, int n)
{
    ToeplitzElement out;
    for(const auto& w : x.words())
        if(w.degree() == n) out.add(w);
    return out;
}

/// p_E = 1 - sum_e iota(delta_e) iota(delta_e)^*, from the partition of unity by edge indicators.
inline ToeplitzElement vacuum_projection(const FiniteGraph& g)
{
    ToeplitzElement p = unit(g);
    for(Index e = 0; e < g.num_edges(); ++e)
    {
        auto d = ModuleElement::delta(g, e);
        p.add(make_word(g, -1.0, {d}, VertexFunction::constant(g, 1.0), {d}));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Expansion in the path basis s_mu s_nu^*, s(mu) = s(nu)
// ---------------------------------------------------------------------------

using PathPair = std::pair<Path, Path>;
using PathExpansion = std::map<PathPair, Complex>;

namespace detail
{
// All paths of length m (any source) with the weight prod x_i(mu_i).
inline std::vector<std::pair<Path, Complex>> weighted_paths(const FiniteGraph& g, const std::vector<ModuleElement>& xs)
{
    std::vector<std::pair<Path, Complex>> current;
    if(xs.empty())
    {
        for(Index v = 0; v < g.num_vertices(); ++v) current.push_back({Path{v, {}}, 1.0});
        return current;
    }
    // build from the last factor (source side) towards the first
    for(Index e = 0; e < g.num_edges(); ++e)
    {
        Complex wgt = xs.back()(e);
        if(wgt != Complex(0.0)) current.push_back({Path{g.source(e), {e}}, wgt});
    }
    for(Index i = xs.size() - 1; i-- > 0;)
    {
        std::vector<std::pair<Path, Complex>> next;
        for(const auto& [p, wgt] : current)
        {
            for(Index f : g.edges_from(p.range(g)))
            {
                Complex x = xs[i](f);
                if(x != Complex(0.0)) next.push_back({p.prepend(f), wgt * x});
            }
        }
        current = std::move(next);
    }
    return current;
}
} // namespace detail

/// Coefficients of x in the linearly independent family {s_mu s_nu^*}.
inline PathExpansion path_expansion(const FiniteGraph& g, const ToeplitzElement& x)
{
    PathExpansion out;
    for(const auto& w : x.words())
    {
        auto lw = detail::weighted_paths(g, w.left);
        auto rw = detail::weighted_paths(g, w.right);
        std::multimap<Index, const std::pair<Path, Complex>*> right_by_source;
        for(const auto& r : rw) right_by_source.emplace(r.first.source(g), &r);
        for(const auto& [mu, xw] : lw)
        {
            Index v = mu.source(g);
            Complex mid = w.middle(v);
            if(mid == Complex(0.0)) continue;
            auto [lo, hi] = right_by_source.equal_range(v);
            for(auto it = lo; it != hi; ++it)
            {
                out[{mu, it->second->first}] += w.coeff * xw * mid * std::conj(it->second->second);
            }
        }
    }
    return out;
}

/// max |coefficient| of a - b in the path basis; zero iff a = b.
inline double symbolic_residual(const FiniteGraph& g, const ToeplitzElement& a, const ToeplitzElement& b)
{
    double r = 0.0;
    for(const auto& [k, c] : path_expansion(g, a - b)) r = std::max(r, std::abs(c));
    return r;
}

/// Upper bound on the C*-norm from the triangle inequality and ||iota(x)|| = ||x||.
inline double norm_bound(const FiniteGraph& g, const ToeplitzElement& x)
{
    double total = 0.0;
    for(const auto& w : x.words())
    {
        double t = std::abs(w.coeff) * w.middle.values.cwiseAbs().maxCoeff();
        for(const auto& v : w.left) t *= module_norm(g, v);
        for(const auto& v : w.right) t *= module_norm(g, v);
        total += t;
    }
    return total;
}

} // namespace tgraph

#endif
