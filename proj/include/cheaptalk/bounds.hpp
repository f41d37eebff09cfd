#pragma once

// Bin-count bounds and non-informativeness thresholds.

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/exponential.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace cheaptalk::bounds {

namespace detail {

// floor() that treats values within a few ulps below an integer as that
// integer, so that e.g. 2/0.2 lands on 10.
inline int robust_floor(double v) { return static_cast<int>(std::floor(v + 1e-12 * std::max(1.0, std::abs(v)))); }

inline int robust_ceil(double v) { return static_cast<int>(std::ceil(v - 1e-12 * std::max(1.0, std::abs(v)))); }

}  // namespace detail

/// Tail constants for a source supported on [a, inf): E[M | M >= t] <= t + eta
/// for all t >= K. The optional lower pair (S, nu) states the mirrored
/// condition E[M | M <= t] >= t - nu for t <= S on a two-sided support.
struct TailAssumptions {
    double support_lower = 0.0;
    double tail_threshold = 0.0;
    double centroid_gap = 0.0;
    std::optional<double> lower_threshold;
    std::optional<double> lower_gap;

    void validate() const {
        if (!(tail_threshold >= support_lower)) throw DomainError("TailAssumptions: need K >= a");
        if (!(centroid_gap >= 0.0)) throw DomainError("TailAssumptions: need eta >= 0");
        if (lower_threshold.has_value() != lower_gap.has_value()) {
            throw DomainError("TailAssumptions: lower threshold and lower gap go together");
        }
        if (lower_threshold && !(*lower_threshold <= tail_threshold)) throw DomainError("TailAssumptions: need S <= K");
        if (lower_gap && !(*lower_gap >= 0.0)) throw DomainError("TailAssumptions: need nu >= 0");
    }
};

/// Largest bin count of a uniform source on an interval of the given width:
/// ceil(-1/2 + sqrt(1 + 2 w/|b|)/2).
inline int nmax_uniform(double bias, double width = 1.0) {
    if (bias == 0.0) throw DomainError("nmax_uniform: unbounded for b = 0");
    if (!(width > 0.0)) throw DomainError("nmax_uniform: width must be positive");
    return detail::robust_ceil(-0.5 + 0.5 * std::sqrt(1.0 + 2.0 * width / std::abs(bias)));
}

enum class Side { Lower, Upper };

inline const char* to_string(Side s) { return s == Side::Lower ? "lower" : "upper"; }

/// For a source bounded on one side only: true when every equilibrium is
/// babbling. Lower-bounded support [m_L, inf): 2b <= -(mu - m_L).
/// Upper-bounded support (-inf, m_U]: 2b >= m_U - mu.
inline bool noninformative_semi_unbounded(double mean, double endpoint, Side side, double bias) {
    return side == Side::Lower ? 2.0 * bias <= -(mean - endpoint) : 2.0 * bias >= endpoint - mean;
}

struct HalflineBound {
    int count = 0;
    /// Upper: bins inside [mu, inf) (b < 0). Lower: bins inside (-inf, mu] (b > 0).
    Side side = Side::Upper;
};

/// Bins of a Gaussian equilibrium lying in the half-line the bias points away
/// from: at most floor(sigma / (2|b|)).
inline HalflineBound gaussian_halfline_bound(double stddev, double bias) {
    if (bias == 0.0) throw DomainError("gaussian_halfline_bound: unbounded for b = 0");
    if (!(stddev > 0.0)) throw DomainError("gaussian_halfline_bound: sigma must be positive");
    return {detail::robust_floor(stddev / (2.0 * std::abs(bias))), bias < 0.0 ? Side::Upper : Side::Lower};
}

/// Bin-count bound floor((eta + K - a)/(2|b|) + 2) for b < 0.
inline int general_semi_unbounded_bound(const TailAssumptions& t, double bias) {
    t.validate();
    if (!(bias < 0.0)) throw DomainError("general_semi_unbounded_bound requires b < 0");
    return detail::robust_floor((t.centroid_gap + (t.tail_threshold - t.support_lower)) / (2.0 * std::abs(bias)) + 2.0);
}

/// True when b <= -(K + eta - a)/2, in which case no informative equilibrium exists.
inline bool general_noninformative(const TailAssumptions& t, double bias) {
    t.validate();
    return bias <= -(t.tail_threshold + t.centroid_gap - t.support_lower) / 2.0;
}

struct ExponentialThresholds {
    /// Two-bin equilibria exist iff b > two_bin.
    double two_bin = 0.0;
    /// Three-bin equilibria exist iff b > three_bin.
    double three_bin = 0.0;
};

inline ExponentialThresholds exponential_thresholds(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential_thresholds: rate must be positive");
    constexpr double e = std::numbers::e;
    return {-1.0 / (2.0 * rate), -(1.0 / (2.0 * rate)) * (e - 2.0) / (e - 1.0)};
}

/// Tail constants certified for an exponential source: a = 0, K = 0, eta = 1/lambda
/// (memorylessness gives E[M | M >= t] = t + 1/lambda exactly).
inline TailAssumptions exponential_tail(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential_tail: rate must be positive");
    return TailAssumptions{0.0, 0.0, 1.0 / rate, std::nullopt, std::nullopt};
}

struct EmpiricalNmax {
    /// Largest N for which solve_shooting found an equilibrium (1 if none).
    int value = 1;
    /// True when equilibria were found up to the search cap, so value is only
    /// a lower bound.
    bool capped = false;
    int solves = 0;
};

/// Largest solvable bin count found numerically: grows N geometrically until
/// solve_shooting stops converging, then bisects the bracket. Assumes the set
/// of solvable N is an initial segment {1, ..., N_max}.
inline EmpiricalNmax empirical_nmax(const SourceDistribution& d, double bias, int cap = 256) {
    if (cap < 1) throw DomainError("empirical_nmax: cap must be >= 1");
    EmpiricalNmax out;
    auto solvable = [&](int n) {
        ++out.solves;
        GameConfig cfg;
        cfg.bias = bias;
        cfg.bins = n;
        return solve_shooting(d, cfg).converged();
    };
    int good = 1;
    int bad = 0;
    for (int n = 2; bad == 0; n = std::min(cap, 2 * n)) {
        if (solvable(n)) {
            good = n;
            if (n == cap) break;
        } else {
            bad = n;
        }
    }
    if (bad == 0) {
        out.value = good;
        out.capped = true;
        return out;
    }
    while (bad - good > 1) {
        const int mid = good + (bad - good) / 2;
        (solvable(mid) ? good : bad) = mid;
    }
    out.value = good;
    return out;
}

}  // namespace cheaptalk::bounds
