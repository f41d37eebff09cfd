#pragma once

// Brute-force equilibrium finders used to cross-check the solvers. They share
// only the distribution primitives with equilibrium.hpp: the edge propagation,
// centroid inversion and root bracketing are written separately here, and
// positive bias is handled by propagating downward from the last edge rather
// than by mirroring the source.

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/errors.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cheaptalk::oracle {

struct GridSearchSpec {
    double lower = 0.0;
    double upper = 1.0;
    int resolution = 4001;
    int refine_passes = 200;

    void validate() const {
        if (!(lower < upper)) throw std::invalid_argument("GridSearchSpec: empty bracket");
        if (resolution < 3) throw std::invalid_argument("GridSearchSpec: resolution must be >= 3");
        if (refine_passes < 0) throw std::invalid_argument("GridSearchSpec: refine_passes must be >= 0");
    }
};

/// Bracket covering the source between its 1e-9 and 1 - 1e-9 quantiles,
/// pulled strictly inside the support.
inline GridSearchSpec default_grid(const SourceDistribution& d, int resolution = 4001) {
    GridSearchSpec spec;
    spec.lower = d.quantile(1e-9);
    spec.upper = d.quantile(1.0 - 1e-9);
    spec.resolution = resolution;
    return spec;
}

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double centroid(const SourceDistribution& d, double a, double b) { return d.truncated_mean(a, b); }

// Illinois false position for f(t) = 0 on [a, b] with f(a) < 0 < f(b).
template <class F>
double illinois(const F& f, double a, double b) {
    double fa = f(a);
    double fb = f(b);
    int side = 0;
    for (int i = 0; i < 400; ++i) {
        const double t = (a * fb - b * fa) / (fb - fa);
        if (!(t > a && t < b)) break;
        const double ft = f(t);
        if (ft == 0.0) return t;
        if (ft < 0.0) {
            a = t;
            fa = ft;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = t;
            fb = ft;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        if (b - a <= 1e-15 * std::max(1.0, std::abs(a))) break;
    }
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

// Upper edge t > from with centroid(from, t) = target.
inline std::optional<double> upper_edge_for(const SourceDistribution& d, double from, double target) {
    const double top = d.support().upper;
    if (!(target > from) || !(target < centroid(d, from, top))) return std::nullopt;
    double hi = top;
    if (std::isinf(hi)) {
        // Step out until the target is passed.
        double width = 2.0 * (target - from);
        for (hi = from + width; centroid(d, from, hi) < target; hi = from + width) width *= 2.0;
    }
    auto f = [&](double t) { return (t > from ? centroid(d, from, t) : from) - target; };
    return illinois(f, from, hi);
}

// Lower edge t < to with centroid(t, to) = target.
inline std::optional<double> lower_edge_for(const SourceDistribution& d, double to, double target) {
    const double bottom = d.support().lower;
    if (!(target < to) || !(target > centroid(d, bottom, to))) return std::nullopt;
    double lo = bottom;
    if (std::isinf(lo)) {
        double width = 2.0 * (to - target);
        for (lo = to - width; centroid(d, lo, to) > target; lo = to - width) width *= 2.0;
    }
    auto f = [&](double t) { return (t < to ? centroid(d, t, to) : to) - target; };
    return illinois(f, lo, to);
}

struct Propagation {
    bool complete = false;
    double residual = 0.0;
    std::vector<double> edges;
};

// b <= 0: x is m_1; residual is (wanted - actual) centroid of the last bin.
inline Propagation propagate_up(const SourceDistribution& d, double b, int bins, double x) {
    Propagation p;
    std::vector<double> m{x};
    double u = centroid(d, d.support().lower, x);
    for (int i = 1; i + 1 < bins; ++i) {
        const double next_u = 2.0 * m.back() - u - 2.0 * b;
        const auto next_m = upper_edge_for(d, m.back(), next_u);
        if (!next_m) {
            p.residual = kInf;
            return p;
        }
        m.push_back(*next_m);
        u = next_u;
    }
    p.residual = (2.0 * m.back() - u - 2.0 * b) - centroid(d, m.back(), d.support().upper);
    p.complete = true;
    p.edges = std::move(m);
    return p;
}

// b > 0: y is m_{N-1}; residual is (actual - wanted) centroid of the first bin.
inline Propagation propagate_down(const SourceDistribution& d, double b, int bins, double y) {
    Propagation p;
    std::vector<double> m{y};
    double u = centroid(d, y, d.support().upper);
    for (int i = 1; i + 1 < bins; ++i) {
        const double next_u = 2.0 * (m.back() - b) - u;
        const auto next_m = lower_edge_for(d, m.back(), next_u);
        if (!next_m) {
            p.residual = kInf;
            return p;
        }
        m.push_back(*next_m);
        u = next_u;
    }
    p.residual = centroid(d, d.support().lower, m.back()) - (2.0 * (m.back() - b) - u);
    p.complete = true;
    p.edges.assign(m.rbegin(), m.rend());
    return p;
}

inline Propagation propagate(const SourceDistribution& d, double b, int bins, double x) {
    try {
        return b > 0.0 ? propagate_down(d, b, bins, x) : propagate_up(d, b, bins, x);
    } catch (const ZeroMassInterval&) {
        Propagation p;
        p.residual = kInf;
        return p;
    }
}

inline bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

}  // namespace detail

/// Edges for bins = 1..4 from a uniform scan of the free edge over the grid
/// bracket, followed by bisection at each sign change of the propagation
/// residual. Only candidates that pass verify_fixed_point at 1e-7 are
/// returned; nullopt means no equilibrium was found.
inline std::optional<std::vector<double>> brute_force_equilibrium(const SourceDistribution& d, double b, int bins,
                                                                  const GridSearchSpec& spec) {
    spec.validate();
    if (bins < 1 || bins > 4) throw std::invalid_argument("brute_force_equilibrium supports 1 <= N <= 4");
    if (bins == 1) return std::vector<double>{};

    const double lo = std::max(spec.lower, std::nextafter(d.support().lower, detail::kInf));
    const double hi = std::min(spec.upper, std::nextafter(d.support().upper, -detail::kInf));
    if (!(lo < hi)) return std::nullopt;
    const double h = (hi - lo) / (spec.resolution - 1);

    double x_prev = lo;
    double r_prev = detail::propagate(d, b, bins, lo).residual;
    for (int j = 1; j < spec.resolution; ++j) {
        const double x = j + 1 == spec.resolution ? hi : lo + j * h;
        const double r = detail::propagate(d, b, bins, x).residual;
        if (detail::opposite(r_prev, r) || r == 0.0) {
            double a = x_prev;
            double c = x;
            double ra = r_prev;
            for (int pass = 0; pass < spec.refine_passes; ++pass) {
                const double mid = 0.5 * (a + c);
                if (!(mid > a && mid < c)) break;
                const double rm = detail::propagate(d, b, bins, mid).residual;
                if (rm == 0.0) {
                    a = c = mid;
                    break;
                }
                if (detail::opposite(ra, rm)) {
                    c = mid;
                } else {
                    a = mid;
                    ra = rm;
                }
            }
            const auto cand = detail::propagate(d, b, bins, std::abs(ra) < detail::kInf ? a : c);
            if (cand.complete) {
                try {
                    const auto q = make_quantizer(d, cand.edges);
                    if (verify_fixed_point(d, q, b).worst() <= 1e-7) return cand.edges;
                } catch (const BinCollapse&) {
                }
            }
        }
        x_prev = x;
        r_prev = r;
    }
    return std::nullopt;
}

/// Two-bin equilibrium edge from a scan of m~(m) - m, m~(m) = (u_1(m) + u_2(m))/2 + b.
inline std::optional<double> brute_force_two_bin(const SourceDistribution& d, double b, const GridSearchSpec& spec) {
    spec.validate();
    const double lo = std::max(spec.lower, std::nextafter(d.support().lower, detail::kInf));
    const double hi = std::min(spec.upper, std::nextafter(d.support().upper, -detail::kInf));
    if (!(lo < hi)) return std::nullopt;
    auto gap = [&](double m) {
        const double u1 = detail::centroid(d, d.support().lower, m);
        const double u2 = detail::centroid(d, m, d.support().upper);
        return 0.5 * (u1 + u2) + b - m;
    };
    const double h = (hi - lo) / (spec.resolution - 1);
    double x_prev = lo;
    double g_prev = gap(lo);
    for (int j = 1; j < spec.resolution; ++j) {
        const double x = j + 1 == spec.resolution ? hi : lo + j * h;
        const double g = gap(x);
        if (g == 0.0) return x;
        if (detail::opposite(g_prev, g)) {
            double a = x_prev;
            double c = x;
            double ga = g_prev;
            for (int pass = 0; pass < spec.refine_passes; ++pass) {
                const double mid = 0.5 * (a + c);
                if (!(mid > a && mid < c)) break;
                const double gm = gap(mid);
                if (gm == 0.0) return mid;
                if (detail::opposite(ga, gm)) {
                    c = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            return 0.5 * (a + c);
        }
        x_prev = x;
        g_prev = g;
    }
    return std::nullopt;
}

/// Uniform source on [lower, upper]: m_k = lower + w k/N + 2 b k (N - k).
/// nullopt when the edges fail to increase, i.e. when 2|b| N (N - 1) >= w.
inline std::optional<std::vector<double>> uniform_closed_form(double b, int bins, double lower = 0.0,
                                                              double upper = 1.0) {
    if (bins < 1) throw std::invalid_argument("uniform_closed_form requires N >= 1");
    if (!(lower < upper)) throw std::invalid_argument("uniform_closed_form requires lower < upper");
    const double w = upper - lower;
    std::vector<double> edges;
    double previous = lower;
    for (int k = 1; k < bins; ++k) {
        const double m = lower + w * k / bins + 2.0 * b * k * (bins - k);
        if (!(m > previous)) return std::nullopt;
        edges.push_back(m);
        previous = m;
    }
    if (!(upper > previous)) return std::nullopt;
    return edges;
}

}  // namespace cheaptalk::oracle
