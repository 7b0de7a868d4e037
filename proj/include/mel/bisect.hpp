#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "mel/common.hpp"

namespace mel {

// Bracketed bisection. Requires f(lo) and f(hi) of opposite (weak) sign;
// converges unconditionally for the piecewise-monotone functions used here.
template <typename Fn>
double bisect(Fn&& f, double lo, double hi, double ftol = kRootTol, int max_iter = kRootMaxIter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    bool lo_neg = flo < 0.0;
    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (std::fabs(fm) <= ftol || 0.5 * (hi - lo) <= 1e-15) return mid;
        if ((fm < 0.0) == lo_neg)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Sign-change scan on a uniform grid followed by bisection; returns all roots
// found, in ascending order. Grid points that are exact zeros count as roots.
template <typename Fn>
std::vector<double> scan_roots(Fn&& f, double lo, double hi, int grid_n = kScanGrid,
                               double ftol = kRootTol) {
    std::vector<double> roots;
    if (!(hi > lo)) return roots;
    double step = (hi - lo) / grid_n;
    double x_prev = lo;
    double f_prev = f(lo);
    for (int i = 1; i <= grid_n; ++i) {
        double x = (i == grid_n) ? hi : lo + i * step;
        double fx = f(x);
        if (f_prev == 0.0) {
            if (roots.empty() || std::fabs(roots.back() - x_prev) > 4.0 * step)
                roots.push_back(x_prev);
        } else if (std::isfinite(f_prev) && std::isfinite(fx) && f_prev * fx < 0.0) {
            roots.push_back(bisect(f, x_prev, x, ftol));
        }
        x_prev = x;
        f_prev = fx;
    }
    if (f_prev == 0.0 && (roots.empty() || std::fabs(roots.back() - hi) > 4.0 * step))
        roots.push_back(hi);
    return roots;
}

}  // namespace mel
