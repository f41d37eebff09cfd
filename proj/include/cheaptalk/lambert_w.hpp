#pragma once

#include "cheaptalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cheaptalk {

enum class LambertBranch { W0, Wm1 };

namespace detail {

inline double lambert_branch_point_series(double p, double sign) {
    // w = -1 + s p - p^2/3 + s 11/72 p^3 - 43/540 p^4, p = sqrt(2(e x + 1)), s = +1 (W0) or -1 (W-1).
    return -1.0 + sign * p - p * p / 3.0 + sign * 11.0 / 72.0 * p * p * p - 43.0 / 540.0 * p * p * p * p;
}

}  // namespace detail

/// Real Lambert W: the solution w of w e^w = x on the requested branch.
/// W0 is defined for x >= -1/e and returns w >= -1; W-1 for -1/e <= x < 0
/// and returns w <= -1. Halley iteration from branch-specific starts.
inline double lambert_w(LambertBranch branch, double x) {
    constexpr double inv_e = 1.0 / std::numbers::e;
    // Allow a few ulps of slack so that -1/e computed in floating point is accepted.
    constexpr double slack = 4e-16;
    if (std::isnan(x) || x < -inv_e - slack) throw DomainError("lambert_w: x < -1/e");
    if (branch == LambertBranch::Wm1 && x >= 0.0) throw DomainError("lambert_w: W-1 requires x < 0");
    if (x == 0.0) return 0.0;

    const double sign = branch == LambertBranch::W0 ? 1.0 : -1.0;
    const double q = std::max(0.0, 2.0 * (std::numbers::e * x + 1.0));
    const double p = std::sqrt(q);
    if (p < 1e-3) return detail::lambert_branch_point_series(p, sign);

    double w = 0.0;
    if (branch == LambertBranch::W0) {
        if (x < -0.25) w = detail::lambert_branch_point_series(p, sign);
        else if (x < 3.0) w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
        else {
            const double l1 = std::log(x);
            const double l2 = std::log(l1);
            w = l1 - l2 + l2 / l1;
        }
    } else {
        if (x < -0.25) w = detail::lambert_branch_point_series(p, sign);
        else {
            const double l1 = std::log(-x);
            const double l2 = std::log(-l1);
            w = l1 - l2 + l2 / l1;
        }
    }

    for (int i = 0; i < 50; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
    }
    if (branch == LambertBranch::W0 && w < -1.0) w = -1.0;
    if (branch == LambertBranch::Wm1 && w > -1.0) w = -1.0;
    return w;
}

}  // namespace cheaptalk
