#pragma once

#include <cmath>
#include <cstdint>

#include "core/errors.hpp"

namespace lagedge {

// Adaptive Simpson with Richardson extrapolation; tolerance halves per split.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 52) {
    auto simpson = [](double fa, double fm, double fb, double h) {
        return h / 6.0 * (fa + 4.0 * fm + fb);
    };
    struct Rec {
        double a, b, fa, fm, fb, whole, tol;
        int depth;
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double result = 0.0;
    Rec stack[128];
    int top = 0;
    stack[top++] = {a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0};
    while (top > 0) {
        const Rec r = stack[--top];
        const double m = 0.5 * (r.a + r.b);
        const double lm = 0.5 * (r.a + m), rm = 0.5 * (m + r.b);
        const double flm = f(lm), frm = f(rm);
        const double left = simpson(r.fa, flm, r.fm, m - r.a);
        const double right = simpson(r.fm, frm, r.fb, r.b - m);
        const double delta = left + right - r.whole;
        if (std::abs(delta) <= 15.0 * r.tol ||
            (r.b - r.a) < 1e-14 * (std::abs(a) + std::abs(b) + 1e-30)) {
            result += left + right + delta / 15.0;
        } else if (r.depth >= max_depth) {
            throw NumericalError("adaptive_simpson: max depth exceeded");
        } else {
            stack[top++] = {r.a, m, r.fa, flm, r.fm, left, 0.5 * r.tol, r.depth + 1};
            stack[top++] = {m, r.b, r.fm, frm, r.fb, right, 0.5 * r.tol, r.depth + 1};
        }
    }
    return result;
}

}  // namespace lagedge
