#pragma once

// Equilibria of the quadratic cheap-talk game. The decoder best response puts
// each action at its bin centroid; the encoder best response puts each edge
// where the sender is indifferent between neighbouring actions,
// m_k = (u_k + u_{k+1}) / 2 + b. An equilibrium quantizer satisfies both.
//
// Two independent solvers:
//  * solve_lloyd_max iterates T = encoder o decoder from an initial partition.
//  * solve_shooting picks the first edge, propagates edges forward through
//    u_{i+1} = 2 m_i - u_i - 2b and centroid inversion, and bisects on the
//    mismatch of the last centroid, which is monotone in the first edge for
//    log-concave sources. For b > 0 the construction runs from the top edge
//    down (on the mirrored source, where the bias changes sign).

#include "cheaptalk/costs.hpp"
#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/parallel.hpp"
#include "cheaptalk/quantizer.hpp"
#include "cheaptalk/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cheaptalk {

/// Two edges closer than this are treated as a merged (collapsed) bin.
inline constexpr double kMergeDistance = 1e-9;

inline void require_valid_edges(const SourceDistribution& d, std::span<const double> edges) {
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!std::isfinite(edges[k]) || !d.support().interior(edges[k])) {
            throw BinCollapse("edge " + std::to_string(k + 1) + " lies outside the support interior");
        }
        if (k > 0 && !(edges[k] > edges[k - 1])) {
            throw BinCollapse("edges are not strictly increasing at index " + std::to_string(k + 1));
        }
    }
}

/// Centroid of every bin, u_k = E[M | m_{k-1} <= M < m_k].
inline std::vector<double> decoder_best_response(const SourceDistribution& d, std::span<const double> edges) {
    require_valid_edges(d, edges);
    std::vector<double> centroids;
    centroids.reserve(edges.size() + 1);
    double lower = d.support().lower;
    for (std::size_t k = 0; k <= edges.size(); ++k) {
        const double upper = k < edges.size() ? edges[k] : d.support().upper;
        try {
            centroids.push_back(d.truncated_mean(lower, upper));
        } catch (const ZeroMassInterval& e) {
            throw BinCollapse(std::string("bin ") + std::to_string(k + 1) + " has no mass: " + e.what());
        }
        lower = upper;
    }
    return centroids;
}

/// Nearest-neighbour edges for the given actions, m_k = (u_k + u_{k+1})/2 + b.
inline std::vector<double> encoder_best_response(std::span<const double> centroids, double bias) {
    std::vector<double> edges;
    if (centroids.size() < 2) return edges;
    edges.reserve(centroids.size() - 1);
    for (std::size_t k = 0; k + 1 < centroids.size(); ++k) {
        if (!(centroids[k + 1] > centroids[k])) {
            throw std::invalid_argument("encoder_best_response: centroids must be strictly increasing");
        }
        edges.push_back(0.5 * (centroids[k] + centroids[k + 1]) + bias);
    }
    return edges;
}

inline Quantizer make_quantizer(const SourceDistribution& d, std::vector<double> edges) {
    auto centroids = decoder_best_response(d, edges);
    return Quantizer{std::move(edges), std::move(centroids), d.support()};
}

/// The Lloyd-Max map T on edge vectors. Throws BinCollapse when an image edge
/// leaves the support or two image edges come within kMergeDistance.
inline std::vector<double> lloyd_max_map(const SourceDistribution& d, std::span<const double> edges, double bias) {
    const auto centroids = decoder_best_response(d, edges);
    auto next = encoder_best_response(centroids, bias);
    for (std::size_t k = 0; k < next.size(); ++k) {
        if (!d.support().interior(next[k])) {
            throw BinCollapse("edge " + std::to_string(k + 1) + " driven outside the support");
        }
        if (k > 0 && next[k] - next[k - 1] < kMergeDistance) {
            throw BinCollapse("edges " + std::to_string(k) + " and " + std::to_string(k + 1) + " merged");
        }
    }
    return next;
}

/// One best-response round: encoder reply to q's actions, then decoder reply.
inline Quantizer lloyd_max_step(const SourceDistribution& d, const Quantizer& q, double bias) {
    return make_quantizer(d, lloyd_max_map(d, q.edges, bias));
}

/// Edges at the k/N quantiles of the source.
inline std::vector<double> default_initial_edges(const SourceDistribution& d, int bins) {
    std::vector<double> edges;
    for (int k = 1; k < bins; ++k) edges.push_back(d.quantile(static_cast<double>(k) / bins));
    return edges;
}

inline EquilibriumResult finalize_result(const SourceDistribution& d, Quantizer q, double bias, SolveStatus status,
                                         int iterations, double residual, std::string message = {}) {
    EquilibriumResult r;
    r.bias = bias;
    r.status = status;
    r.iterations = iterations;
    r.residual = residual;
    r.message = std::move(message);
    try {
        const auto report = decoder_cost(d, q, bias);
        r.decoder_cost = report.decoder_cost;
        r.encoder_cost = report.encoder_cost;
    } catch (const BinCollapse&) {
        r.decoder_cost = std::numeric_limits<double>::quiet_NaN();
        r.encoder_cost = std::numeric_limits<double>::quiet_NaN();
    }
    r.quantizer = std::move(q);
    return r;
}

/// Non-informative equilibrium: a single bin whose action is the prior mean.
inline EquilibriumResult babbling_equilibrium(const SourceDistribution& d, double bias = 0.0) {
    Quantizer q{{}, {d.mean()}, d.support()};
    EquilibriumResult r;
    r.quantizer = std::move(q);
    r.bias = bias;
    r.decoder_cost = d.variance();
    r.encoder_cost = r.decoder_cost + bias * bias;
    r.status = SolveStatus::Converged;
    return r;
}

namespace detail {

inline double sup_distance(std::span<const double> a, std::span<const double> b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

// Raw encoder reply restricted to edges that stay inside the support and do
// not merge; used when the sender is allowed to shed bins.
inline std::vector<double> surviving_edges(const SourceDistribution& d, std::span<const double> edges, double bias) {
    const auto centroids = decoder_best_response(d, edges);
    const auto raw = encoder_best_response(centroids, bias);
    std::vector<double> kept;
    for (double m : raw) {
        if (!d.support().interior(m)) continue;
        if (!kept.empty() && m - kept.back() < kMergeDistance) continue;
        kept.push_back(m);
    }
    return kept;
}

// True when an edge sits within kMergeDistance of a support end or of its
// neighbour. Lloyd iteration can creep toward such a limit in steps below the
// tolerance, which is a collapsing bin rather than an equilibrium.
inline bool degenerate_edges(const SourceDistribution& d, std::span<const double> edges) {
    const auto& s = d.support();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (s.bounded_below() && edges[i] - s.lower < kMergeDistance) return true;
        if (s.bounded_above() && s.upper - edges[i] < kMergeDistance) return true;
        if (i > 0 && edges[i] - edges[i - 1] < kMergeDistance) return true;
    }
    return false;
}

}  // namespace detail

/// Best-response (Lloyd-Max) iteration. Stops when the sup-norm edge change
/// is at most cfg.edge_tolerance. With cfg.reduce_on_collapse set, edges
/// pushed out of the support are dropped and iteration continues.
inline EquilibriumResult solve_lloyd_max(const SourceDistribution& d, const GameConfig& cfg,
                                         std::optional<std::vector<double>> init = std::nullopt) {
    if (cfg.bins < 1) throw std::invalid_argument("solve_lloyd_max: bins must be >= 1");
    if (!(cfg.edge_tolerance > 0.0) || cfg.max_iterations < 1) {
        throw std::invalid_argument("solve_lloyd_max: need edge_tolerance > 0 and max_iterations >= 1");
    }
    if (cfg.bins == 1) return babbling_equilibrium(d, cfg.bias);
    std::vector<double> edges = init ? *init : default_initial_edges(d, cfg.bins);
    if (static_cast<int>(edges.size()) != cfg.bins - 1) {
        throw std::invalid_argument("solve_lloyd_max: initial edge count must be bins - 1");
    }
    require_valid_edges(d, edges);

    double step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        std::vector<double> next;
        try {
            next = lloyd_max_map(d, edges, cfg.bias);
        } catch (const BinCollapse& e) {
            if (!cfg.reduce_on_collapse) {
                return finalize_result(d, make_quantizer(d, edges), cfg.bias, SolveStatus::Collapsed, it, step,
                                       e.what());
            }
            next = detail::surviving_edges(d, edges, cfg.bias);
            if (next.empty()) {
                auto r = babbling_equilibrium(d, cfg.bias);
                r.iterations = it;
                r.message = "all edges shed; reduced to the babbling equilibrium";
                return r;
            }
            edges = std::move(next);
            step = std::numeric_limits<double>::infinity();
            continue;
        }
        step = detail::sup_distance(next, edges);
        edges = std::move(next);
        if (step <= cfg.edge_tolerance) {
            if (detail::degenerate_edges(d, edges)) {
                return finalize_result(d, make_quantizer(d, edges), cfg.bias, SolveStatus::Collapsed, it, step,
                                       "edges converged onto a bin of vanishing width");
            }
            return finalize_result(d, make_quantizer(d, edges), cfg.bias, SolveStatus::Converged, it, step);
        }
    }
    return finalize_result(d, make_quantizer(d, edges), cfg.bias, SolveStatus::MaxIterations, cfg.max_iterations,
                           step);
}

namespace detail {

// The source seen through x -> sign * x. Shooting always runs in the
// ascending direction on this view with bias sign * b <= 0.
struct OrientedSource {
    const SourceDistribution& d;
    double sign;

    double lower() const { return sign > 0 ? d.support().lower : -d.support().upper; }
    double upper() const { return sign > 0 ? d.support().upper : -d.support().lower; }
    double mean(double a, double b) const {
        return sign > 0 ? d.truncated_mean(a, b) : -d.truncated_mean(-b, -a);
    }
    double quantile(double p) const { return sign > 0 ? d.quantile(p) : -d.quantile(1.0 - p); }
};

struct ShootingTrace {
    enum class Outcome { Complete, Overshoot, Underflow } outcome = Outcome::Complete;
    double residual = 0.0;
    std::vector<double> edges;
};

// Smallest t > from with mean(from, t) = target, or nullopt when even the
// unbounded bin [from, upper) has a centroid at or below target.
inline std::optional<double> invert_centroid(const OrientedSource& src, double from, double target) {
    const double sup = src.mean(from, src.upper());
    if (!(target < sup)) return std::nullopt;
    double width = std::max(2.0 * (target - from), 1e-300);
    double hi = from + width;
    for (int i = 0; i < 4000; ++i) {
        if (hi >= src.upper()) {
            hi = src.upper();
            break;
        }
        if (src.mean(from, hi) >= target) break;
        width *= 2.0;
        hi = from + width;
    }
    // A degenerate bin [from, from) has its centroid at from.
    return roots::bisect([&](double t) { return (t > from ? src.mean(from, t) : from) - target; }, from, hi);
}

inline ShootingTrace shoot(const OrientedSource& src, double bias, int bins, double first_edge) {
    ShootingTrace trace;
    constexpr double inf = std::numeric_limits<double>::infinity();
    double u = 0.0;
    try {
        u = src.mean(src.lower(), first_edge);
    } catch (const ZeroMassInterval&) {
        trace.outcome = ShootingTrace::Outcome::Underflow;
        trace.residual = -inf;
        return trace;
    }
    double m = first_edge;
    trace.edges.push_back(m);
    try {
        for (int i = 1; i + 1 < bins; ++i) {
            const double target = 2.0 * m - u - 2.0 * bias;
            const auto next = target > m ? invert_centroid(src, m, target) : std::nullopt;
            if (!next || !(*next > m)) {
                trace.outcome = ShootingTrace::Outcome::Overshoot;
                trace.residual = inf;
                return trace;
            }
            m = *next;
            u = target;
            trace.edges.push_back(m);
        }
        const double wanted = 2.0 * m - u - 2.0 * bias;
        trace.residual = wanted - src.mean(m, src.upper());
    } catch (const ZeroMassInterval&) {
        trace.outcome = ShootingTrace::Outcome::Overshoot;
        trace.residual = inf;
    }
    return trace;
}

}  // namespace detail

/// Forward-shooting solver. Returns NoEquilibrium when the last-centroid
/// mismatch has no sign change over the admissible first-edge bracket.
inline EquilibriumResult solve_shooting(const SourceDistribution& d, const GameConfig& cfg) {
    if (cfg.bins < 1) throw std::invalid_argument("solve_shooting: bins must be >= 1");
    if (cfg.bins == 1) return babbling_equilibrium(d, cfg.bias);

    const double sign = cfg.bias > 0.0 ? -1.0 : 1.0;
    const detail::OrientedSource src{d, sign};
    const double bias = sign * cfg.bias;
    const int bins = cfg.bins;
    int evaluations = 0;
    auto residual = [&](double x) {
        ++evaluations;
        return detail::shoot(src, bias, bins, x).residual;
    };

    const double scale = std::max(src.quantile(0.75) - src.quantile(0.25), 1e-300);
    const double eps = 1e-12 * scale;

    double lo = 0.0;
    if (std::isfinite(src.lower())) {
        lo = src.lower() + std::max(eps, std::abs(src.lower()) * 4e-16);
    } else {
        lo = src.quantile(1e-10);
        double step = scale;
        for (int i = 0; i < 200 && residual(lo) > 0.0; ++i) {
            lo -= step;
            step *= 2.0;
        }
    }
    double hi = 0.0;
    if (std::isfinite(src.upper())) {
        hi = src.upper() - std::max(eps, std::abs(src.upper()) * 4e-16);
    } else {
        hi = src.quantile(1.0 - 1e-10);
        double step = scale;
        for (int i = 0; i < 200 && residual(hi) < 0.0; ++i) {
            hi += step;
            step *= 2.0;
        }
    }

    auto degenerate = [&](SolveStatus status, std::string why) {
        EquilibriumResult r;
        r.quantizer.support = d.support();
        r.bias = cfg.bias;
        r.status = status;
        r.iterations = evaluations;
        r.decoder_cost = r.encoder_cost = r.residual = std::numeric_limits<double>::quiet_NaN();
        r.message = std::move(why);
        return r;
    };

    const double r_lo = residual(lo);
    if (r_lo > 0.0) {
        return degenerate(SolveStatus::NoEquilibrium,
                          "last-centroid mismatch is positive over the whole first-edge bracket");
    }
    const double r_hi = residual(hi);
    if (r_hi < 0.0) {
        return degenerate(SolveStatus::PropagationFailure, "no sign change found at the upper end of the bracket");
    }

    const double root = roots::bisect(residual, lo, hi);
    const auto trace = detail::shoot(src, bias, bins, root);
    const double tolerance = 1e-7 * std::max(1.0, scale);
    if (trace.outcome != detail::ShootingTrace::Outcome::Complete || !(std::abs(trace.residual) <= tolerance)) {
        return degenerate(SolveStatus::PropagationFailure,
                          "bisection ended on a discontinuity of the last-centroid mismatch");
    }

    std::vector<double> edges = trace.edges;
    if (sign < 0.0) {
        std::reverse(edges.begin(), edges.end());
        for (double& m : edges) m = -m;
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!d.support().interior(edges[k]) || (k > 0 && !(edges[k] > edges[k - 1]))) {
            return degenerate(SolveStatus::PropagationFailure, "propagated edges are not an ordered partition");
        }
    }
    return finalize_result(d, make_quantizer(d, std::move(edges)), cfg.bias, SolveStatus::Converged, evaluations,
                           std::abs(trace.residual));
}

struct FixedPointCheck {
    /// max_k |m_k - (u_k + u_{k+1})/2 - b|
    double encoder_error = 0.0;
    /// max_k |u_k - E[M | bin k]|
    double decoder_error = 0.0;
    /// max_k |(m_k - b - u_k)^2 - (m_k - b - u_{k+1})^2|
    double indifference_error = 0.0;

    double worst() const { return std::max({encoder_error, decoder_error, indifference_error}); }
};

inline FixedPointCheck verify_fixed_point(const SourceDistribution& d, const Quantizer& q, double bias) {
    FixedPointCheck c;
    const auto means = decoder_best_response(d, q.edges);
    for (std::size_t k = 0; k < means.size(); ++k) {
        c.decoder_error = std::max(c.decoder_error, std::abs(q.centroids[k] - means[k]));
    }
    for (std::size_t k = 0; k < q.edges.size(); ++k) {
        const double m = q.edges[k];
        const double lo = q.centroids[k];
        const double hi = q.centroids[k + 1];
        c.encoder_error = std::max(c.encoder_error, std::abs(m - 0.5 * (lo + hi) - bias));
        const double left = (m - bias - lo) * (m - bias - lo);
        const double right = (m - bias - hi) * (m - bias - hi);
        c.indifference_error = std::max(c.indifference_error, std::abs(left - right));
    }
    return c;
}

struct UniquenessReport {
    int distinct_fixed_points = 0;
    double max_pairwise_distance = 0.0;
    int converged_runs = 0;
    int collapsed_runs = 0;
    int unfinished_runs = 0;
    std::vector<std::vector<double>> fixed_points;
};

/// Random initial partition for trial `trial`: sorted quantiles at uniform
/// levels in [0.01, 0.99], seeded from (seed, trial) only.
inline std::vector<double> random_initial_edges(const SourceDistribution& d, int bins, std::uint64_t seed,
                                                std::uint64_t trial) {
    std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(sequence);
    std::uniform_real_distribution<double> level(0.01, 0.99);
    for (;;) {
        std::vector<double> levels(static_cast<std::size_t>(bins - 1));
        for (double& p : levels) p = level(rng);
        std::sort(levels.begin(), levels.end());
        std::vector<double> edges;
        for (double p : levels) edges.push_back(d.quantile(p));
        bool ok = true;
        for (std::size_t k = 1; k < edges.size(); ++k) ok = ok && edges[k] - edges[k - 1] > 1e-6;
        if (ok) return edges;
    }
}

/// Runs solve_lloyd_max from `trials` random starts and clusters the
/// converged edge vectors at sup-norm radius `radius`.
inline UniquenessReport uniqueness_probe(const SourceDistribution& d, const GameConfig& cfg, int trials,
                                         std::uint64_t seed, double radius = 1e-6) {
    if (cfg.bins < 2) throw std::invalid_argument("uniqueness_probe requires bins >= 2");
    std::vector<EquilibriumResult> runs(static_cast<std::size_t>(std::max(0, trials)));
    parallel_for(runs.size(), [&](std::size_t i) {
        runs[i] = solve_lloyd_max(d, cfg, random_initial_edges(d, cfg.bins, seed, i));
    });

    UniquenessReport report;
    std::vector<const std::vector<double>*> converged;
    for (const auto& r : runs) {
        switch (r.status) {
            case SolveStatus::Converged: ++report.converged_runs; converged.push_back(&r.quantizer.edges); break;
            case SolveStatus::Collapsed: ++report.collapsed_runs; break;
            default: ++report.unfinished_runs; break;
        }
    }
    for (const auto* edges : converged) {
        bool known = false;
        for (const auto& rep : report.fixed_points) {
            known = known || detail::sup_distance(rep, *edges) <= radius;
        }
        if (!known) report.fixed_points.push_back(*edges);
    }
    for (std::size_t i = 0; i < converged.size(); ++i) {
        for (std::size_t j = i + 1; j < converged.size(); ++j) {
            report.max_pairwise_distance =
                std::max(report.max_pairwise_distance, detail::sup_distance(*converged[i], *converged[j]));
        }
    }
    report.distinct_fixed_points = static_cast<int>(report.fixed_points.size());
    return report;
}

}  // namespace cheaptalk
