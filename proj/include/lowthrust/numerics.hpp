#ifndef LOWTHRUST_NUMERICS_HPP
#define LOWTHRUST_NUMERICS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "lowthrust/errors.hpp"

namespace lowthrust::numerics {

/// Composite Simpson rule on [a, b] with `intervals` sub-intervals (rounded
/// up to even).
template <class F>
double simpson(F&& f, double a, double b, int intervals)
{
    if (intervals < 2) {
        intervals = 2;
    }
    if (intervals % 2 != 0) {
        ++intervals;
    }
    if (a == b) {
        return 0.0;
    }
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    }
    return sum * h / 3.0;
}

namespace detail {

template <class F>
double adaptive_simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                             double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40)
{
    if (a == b) {
        return 0.0;
    }
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, const Vec<N>& k)
{
    Vec<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h * k[i];
    }
    return out;
}

/// One classical fourth-order Runge-Kutta step of dy/dt = rhs(y).
template <std::size_t N, class Rhs>
Vec<N> rk4_step(Rhs&& rhs, const Vec<N>& y, double h)
{
    const Vec<N> k1 = rhs(y);
    const Vec<N> k2 = rhs(axpy(y, 0.5 * h, k1));
    const Vec<N> k3 = rhs(axpy(y, 0.5 * h, k2));
    const Vec<N> k4 = rhs(axpy(y, h, k3));
    Vec<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

template <std::size_t N>
bool all_finite(const Vec<N>& y)
{
    for (double v : y) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

/// Root of f on [a, b] given a sign change (TOMS 748). Returns the midpoint
/// of the final bracket.
template <class F>
double find_root(F&& f, double a, double b, double x_tol, const char* what = "find_root",
                 std::uintmax_t max_iter = 200)
{
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) {
        return a;
    }
    if (fb == 0.0) {
        return b;
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        throw NoBracket(std::string(what) + ": no sign change on the bracket");
    }
    auto tol = [x_tol](double lo, double hi) { return std::abs(hi - lo) <= x_tol; };
    std::uintmax_t iters = max_iter;
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (r.first + r.second);
}

/// Bounded scalar minimisation (Brent). Returns {x, f(x)}.
template <class F>
std::pair<double, double> minimize_bounded(F&& f, double a, double b,
                                           int bits = std::numeric_limits<double>::digits / 2,
                                           std::uintmax_t max_iter = 500)
{
    std::uintmax_t iters = max_iter;
    return boost::math::tools::brent_find_minima(f, a, b, bits, iters);
}

} // namespace lowthrust::numerics

#endif // LOWTHRUST_NUMERICS_HPP
