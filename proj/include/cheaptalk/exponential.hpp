#pragma once

// Closed-form machinery for an exponential source with rate lambda.
//
// At an N-bin equilibrium the finite bin lengths l_1 < ... < l_{N-1} satisfy
//   g(l_{N-1}) = 2/lambda + 2b,
//   g(l_k)     = 2/lambda + 2b - h(l_{k+1}),   k = 1..N-2,
// with g(x) = x e^{lx} / (e^{lx} - 1) and h(x) = x / (e^{lx} - 1); the last
// bin is [m_{N-1}, inf). For b > 0 the infinite-bin equilibrium has every
// length equal to l*, the root of (c - s) e^{lambda s} = c + s, c = 2/lambda + 2b.

#include "cheaptalk/errors.hpp"
#include "cheaptalk/lambert_w.hpp"
#include "cheaptalk/roots.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace cheaptalk::exponential {

namespace detail {

inline void require_rate(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential rate must be positive");
}

}  // namespace detail

inline double h(double x, double rate) {
    const double y = rate * x;
    if (y < 1e-6) return (1.0 - 0.5 * y + y * y / 12.0) / rate;
    return x / std::expm1(y);
}

inline double g(double x, double rate) { return h(x, rate) + x; }

/// Solves g(l) = target for l > 0. g increases from 1/rate (at 0+) without
/// bound, so no solution exists when target <= 1/rate.
inline std::optional<double> invert_g(double target, double rate) {
    if (!(target > 1.0 / rate)) return std::nullopt;
    double hi = 10.0 / rate;
    while (g(hi, rate) < target) hi *= 2.0;
    return roots::bisect([&](double x) { return g(x, rate) - target; }, 0.0, hi);
}

/// Solves h(l) = target for l > 0. h decreases from 1/rate to 0.
inline std::optional<double> invert_h(double target, double rate) {
    if (!(target > 0.0) || !(target < 1.0 / rate)) return std::nullopt;
    double hi = 10.0 / rate;
    while (h(hi, rate) > target) hi *= 2.0;
    return roots::bisect([&](double x) { return h(x, rate) - target; }, 0.0, hi);
}

/// Edge of the two-bin equilibrium, m_1 = W0(-(2+2 lambda b) e^{-(2+2 lambda b)})/lambda + 2(1/lambda + b).
/// Only the informative root is returned; none exists for b <= -1/(2 lambda).
inline std::optional<double> two_bin_edge(double rate, double bias) {
    detail::require_rate(rate);
    if (bias <= -0.5 / rate) return std::nullopt;
    const double k = 2.0 + 2.0 * rate * bias;
    const double w = lambert_w(LambertBranch::W0, -k * std::exp(-k));
    const double edge = w / rate + 2.0 * (1.0 / rate + bias);
    if (!(edge > 0.0)) return std::nullopt;
    return edge;
}

struct RecursionState {
    double rate = 1.0;
    double bias = 0.0;
    /// Finite bin lengths l_1..l_{N-1}; the last bin is unbounded.
    std::vector<double> lengths;

    std::vector<double> edges() const {
        std::vector<double> out;
        out.reserve(lengths.size());
        double m = 0.0;
        for (double l : lengths) out.push_back(m += l);
        return out;
    }
};

/// Solves the length recursion from the last finite bin downwards.
inline std::optional<RecursionState> backward_recursion(double rate, double bias, int bins) {
    detail::require_rate(rate);
    if (bins < 2) throw DomainError("backward_recursion requires at least two bins");
    const double c = 2.0 / rate + 2.0 * bias;
    RecursionState state{rate, bias, std::vector<double>(static_cast<std::size_t>(bins - 1))};
    auto last = invert_g(c, rate);
    if (!last) return std::nullopt;
    state.lengths.back() = *last;
    for (int k = bins - 3; k >= 0; --k) {
        const auto len = invert_g(c - h(state.lengths[static_cast<std::size_t>(k + 1)], rate), rate);
        if (!len) return std::nullopt;
        state.lengths[static_cast<std::size_t>(k)] = *len;
    }
    return state;
}

/// Runs the recursion forwards from a given first length, l_{k+1} = h^{-1}(c - g(l_k)).
/// Stops after max_steps lengths, or as soon as a length leaves (2b, 2/lambda + 2b)
/// or no next length exists. The offending length, if any, is included.
inline std::vector<double> forward_recursion(double rate, double bias, double first_length, int max_steps) {
    detail::require_rate(rate);
    const double c = 2.0 / rate + 2.0 * bias;
    std::vector<double> lengths{first_length};
    while (static_cast<int>(lengths.size()) < max_steps) {
        const double l = lengths.back();
        if (!(l > 2.0 * bias && l < c)) break;
        const auto next = invert_h(c - g(l, rate), rate);
        if (!next) break;
        lengths.push_back(*next);
    }
    return lengths;
}

inline double psi(double s, double rate, double bias) {
    const double c = 2.0 / rate + 2.0 * bias;
    return (c - s) * std::exp(rate * s) - (c + s);
}

/// Common bin length l* of the infinite-bin equilibrium (b > 0).
inline double infinite_bin_length(double rate, double bias) {
    detail::require_rate(rate);
    if (!(bias > 0.0)) throw DomainError("infinite-bin equilibrium requires b > 0");
    return roots::bisect([&](double s) { return psi(s, rate, bias); }, 2.0 * bias, 2.0 / rate + 2.0 * bias);
}

/// Upper bound floor(-1/(2 b lambda) + 1) on the number of bins for b < 0.
inline int nmax_exponential(double rate, double bias) {
    detail::require_rate(rate);
    if (!(bias < 0.0)) throw DomainError("nmax_exponential requires b < 0");
    const double v = -1.0 / (2.0 * bias * rate) + 1.0;
    // Absorb representation error so that e.g. b = -0.1 gives exactly 6.
    return static_cast<int>(std::floor(v + 1e-12 * std::abs(v)));
}

/// Conditional variance of an exponential bin of the given length.
inline double bin_variance(double length, double rate) {
    if (std::isinf(length)) return 1.0 / (rate * rate);
    const double y = rate * length;
    if (y < 1e-3) return length * length * (1.0 / 12.0 - y * y / 240.0);
    return 1.0 / (rate * rate) - length * length / (std::exp(y) + std::exp(-y) - 2.0);
}

/// Decoder cost of the infinite-bin equilibrium, 1/lambda^2 - l*^2/(e^{lambda l*} + e^{-lambda l*} - 2).
inline double infinite_cost(double rate, double bias) {
    const double ls = infinite_bin_length(rate, bias);
    return bin_variance(ls, rate);
}

/// Decoder cost of the partition with the given finite lengths and an unbounded last bin.
inline double finite_cost(double rate, const std::vector<double>& lengths) {
    double total = 0.0;
    double m = 0.0;
    for (double l : lengths) {
        total += bin_variance(l, rate) * std::exp(-rate * m) * -std::expm1(-rate * l);
        m += l;
    }
    return total + std::exp(-rate * m) / (rate * rate);
}

}  // namespace cheaptalk::exponential
