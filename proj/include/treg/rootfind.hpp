#pragma once

// Scalar root bracketing (Brent) and bisection helpers.

#include <cmath>
#include <utility>

#include "treg/errors.hpp"

namespace treg {

// Brent's method on [a, b] with f(a), f(b) of opposite sign.
// Stops when the bracket shrinks below tol_abs (plus machine slack).
template <class F>
double brent_root(F f, double a, double b, double tol_abs = 1e-12, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw InternalError("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) +
                           0.5 * tol_abs;
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0) return b;

        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            // Inverse quadratic interpolation, falling back to secant.
            const double s = fb / fa;
            double pnum, q;
            if (a == c) {
                pnum = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double r1 = fa / fc;
                const double r2 = fb / fc;
                pnum = s * (2.0 * m * r1 * (r1 - r2) - (b - a) * (r2 - 1.0));
                q = (r1 - 1.0) * (r2 - 1.0) * (s - 1.0);
            }
            if (pnum > 0.0) q = -q;
            pnum = std::fabs(pnum);
            if (2.0 * pnum < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = pnum / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return b;
}

// Bisection for a monotone f with f(a) <= 0 <= f(b); used as a slow
// reference path.
template <class F>
double bisect_root(F f, double a, double b, int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b);
        if (f(m) <= 0.0)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace treg
