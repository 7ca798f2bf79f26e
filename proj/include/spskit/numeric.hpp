#pragma once

#include <cmath>
#include <numbers>
#include <utility>

// Scalar search helpers shared by the optics, emitter and qkd modules.
namespace spskit::numeric {

struct Extremum
{
    double x = 0.0;
    double value = 0.0;
};

// Golden-section maximization of a unimodal f on [lo, hi], stopping when the
// bracket is narrower than tol.
template <class F>
Extremum golden_section_max(F&& f, double lo, double hi, double tol)
{
    const double inv_phi = 1.0 / std::numbers::phi;
    double a = lo;
    double b = hi;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

// Bisection for a sign change of f on [lo, hi]. Caller guarantees
// f(lo) and f(hi) have opposite signs.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200)
{
    double f_lo = f(lo);
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace spskit::numeric
