#ifndef TGRAPH_ANGLES_HPP
#define TGRAPH_ANGLES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace tgraph
{

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Equality tolerance for angles.
inline constexpr double angle_tol = 1e-9;

/// Reduces an angle to [0, 2pi).
inline double wrap_angle(double x)
{
    double r = std::fmod(x, two_pi);
    if(r < 0.0) r += two_pi;
    if(r >= two_pi) r -= two_pi;
    return r;
}

/// Reduces an angle to [-pi, pi).
inline double wrap_signed(double x)
{
    double r = wrap_angle(x + std::numbers::pi) - std::numbers::pi;
    return r;
}

inline double angle_distance(double a, double b) { return std::abs(wrap_signed(a - b)); }

inline bool angles_equal(double a, double b, double tol = angle_tol) { return angle_distance(a, b) <= tol; }

/// e^{2 pi i p / q}, evaluated after reducing p modulo q and folding into the
/// first quadrant so that multiples of a quarter turn come out exact.
inline Complex unit_root(std::int64_t p, std::int64_t q)
{
    p %= q;
    if(p < 0) p += q;
    const std::int64_t quadrant = (4 * p) / q;
    const std::int64_t rem = (4 * p) % q; // remaining angle is (pi/2) * rem / q
    const double half_pi = std::numbers::pi / 2.0;
    double c, s;
    if(2 * rem <= q)
    {
        const double x = half_pi * static_cast<double>(rem) / static_cast<double>(q);
        c = std::cos(x);
        s = std::sin(x);
    }
    else
    {
        const double y = half_pi * static_cast<double>(q - rem) / static_cast<double>(q);
        c = std::sin(y);
        s = std::cos(y);
    }
    switch(quadrant)
    {
    case 0: return {c, s};
    case 1: return {-s, c};
    case 2: return {-c, -s};
    default: return {s, -c};
    }
}

/// Angle 2 pi k / n as a double.
inline double grid_angle(std::int64_t k, std::int64_t n) { return two_pi * static_cast<double>(k) / static_cast<double>(n); }

/// Returns the grid index of an angle on the n-point grid, or -1 if the angle
/// is not on the grid to within angle_tol.
inline std::int64_t grid_index(double angle, std::int64_t n)
{
    double pos = wrap_angle(angle) * static_cast<double>(n) / two_pi;
    double r = std::round(pos);
    if(std::abs(pos - r) * two_pi / static_cast<double>(n) > angle_tol) return -1;
    std::int64_t k = static_cast<std::int64_t>(r) % n;
    return k;
}

} // namespace tgraph

#endif
