#pragma once

#include <cmath>
#include <utility>

#include "ndekit/errors.hpp"

namespace ndekit {

// Root of f on a sign-changing bracket [a, b]. A few bisections first, then
// Illinois-modified regula falsi (a safeguarded secant). No starting guess is
// involved, so the result depends only on f and the bracket.
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb, double xtol, double ftol = 0.0,
                      int max_iter = 300) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw NumericError("bracketed_root: interval does not bracket a root");
    for (int i = 0; i < 4; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    int side = 0;
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(b - a) <= xtol) break;
        double c = (a * fb - b * fa) / (fb - fa);
        // Fall back to bisection when the secant point is unusable.
        if (!(c > std::fmin(a, b) && c < std::fmax(a, b))) c = 0.5 * (a + b);
        const double fc = f(c);
        if (fc == 0.0 || std::fabs(fc) <= ftol) return c;
        if ((fc > 0.0) == (fb > 0.0)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
        if (a == c && b == c) break;
    }
    return std::fabs(fa) < std::fabs(fb) ? a : b;
}

template <class F>
double bracketed_root(F&& f, double a, double b, double xtol, double ftol = 0.0) {
    return bracketed_root(f, a, b, f(a), f(b), xtol, ftol);
}

// Minimum of a unimodal function on [a, b] by golden-section search.
template <class F>
std::pair<double, double> golden_minimum(F&& f, double a, double b, double xtol) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && std::fabs(b - a) > xtol; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace ndekit
