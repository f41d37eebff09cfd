#pragma once

#include <cmath>

namespace cheaptalk::roots {

/// Bisection for a sign change of f on [lo, hi], run until the bracket can no
/// longer be split in floating point. Requires f(lo) and f(hi) to have
/// opposite signs (or one of them to be zero). Returns the bracket end with
/// the smaller |f|.
template <class F>
double bisect(const F& f, double lo, double hi, int max_iterations = 2000) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    for (int i = 0; i < max_iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

}  // namespace cheaptalk::roots
