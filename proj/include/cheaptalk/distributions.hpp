#pragma once

#include "cheaptalk/errors.hpp"
#include "cheaptalk/normal.hpp"
#include "cheaptalk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cheaptalk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Probability below which a quadrature-evaluated interval is treated as empty.
inline constexpr double kMassFloor = 1e-13;

struct SupportSpec {
    double lower = -kInf;
    double upper = kInf;

    SupportSpec() = default;
    SupportSpec(double lo, double hi) : lower(lo), upper(hi) {
        if (!(lo < hi)) throw DomainError("support requires lower < upper");
    }

    bool bounded_below() const { return std::isfinite(lower); }
    bool bounded_above() const { return std::isfinite(upper); }
    bool contains(double x) const { return x >= lower && x <= upper; }
    bool interior(double x) const { return x > lower && x < upper; }
    bool operator==(const SupportSpec&) const = default;
};

struct TruncatedMoment {
    double mean = 0.0;
    double variance = 0.0;
    double mass = 0.0;
};

struct Exponential {
    double rate = 1.0;
};

struct Gaussian {
    double mean = 0.0;
    double stddev = 1.0;
};

struct Uniform {
    double lower = 0.0;
    double upper = 1.0;
};

/// User-supplied density on a support. The callable may be unnormalised;
/// it is rescaled to unit mass over its quadrature window at construction.
/// Infinite support ends are replaced by the 1e-14 / 1 - 1e-14 quantiles.
class CustomDensity {
public:
    using Pdf = std::function<double(double)>;

    CustomDensity(std::string name, Pdf pdf, SupportSpec support, std::vector<double> breakpoints = {})
        : name_(std::move(name)), raw_(std::move(pdf)), support_(support) {
        for (double x : breakpoints) {
            if (support_.interior(x)) breaks_.push_back(x);
        }
        std::sort(breaks_.begin(), breaks_.end());
        breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
        window_lo_ = support_.lower;
        window_hi_ = support_.upper;
        if (!support_.bounded_below() || !support_.bounded_above()) locate_window();
        normalizer_ = raw_integral(window_lo_, window_hi_, [](double) { return 1.0; });
        if (!(normalizer_ > 0.0) || !std::isfinite(normalizer_)) {
            throw ConfigError("custom density '" + name_ + "' has no positive finite mass");
        }
        if (!support_.bounded_below() || !support_.bounded_above()) {
            const double lo = support_.bounded_below() ? window_lo_ : quantile(1e-14);
            const double hi = support_.bounded_above() ? window_hi_ : quantile(1.0 - 1e-14);
            window_lo_ = lo;
            window_hi_ = hi;
            normalizer_ = raw_integral(window_lo_, window_hi_, [](double) { return 1.0; });
        }
    }

    const std::string& name() const { return name_; }
    const SupportSpec& support() const { return support_; }
    double window_lower() const { return window_lo_; }
    double window_upper() const { return window_hi_; }

    double pdf(double x) const {
        if (!support_.contains(x)) return 0.0;
        return std::max(0.0, raw_(x)) / normalizer_;
    }

    double cdf(double x) const {
        if (x <= window_lo_) return 0.0;
        if (x >= window_hi_) return 1.0;
        return std::clamp(raw_integral(window_lo_, x, [](double) { return 1.0; }) / normalizer_, 0.0, 1.0);
    }

    double quantile(double p) const {
        double lo = window_lo_;
        double hi = window_hi_;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (cdf(mid) < p) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    TruncatedMoment truncated(double a, double b) const {
        const double lo = std::max(a, window_lo_);
        const double hi = std::min(b, window_hi_);
        if (!(lo < hi)) throw ZeroMassInterval("interval outside the support of " + name_);
        const double m0 = raw_integral(lo, hi, [](double) { return 1.0; });
        const double mass = m0 / normalizer_;
        if (!(mass >= kMassFloor)) throw ZeroMassInterval("interval mass below floor for " + name_);
        const double mean = std::clamp(raw_integral(lo, hi, [](double x) { return x; }) / m0, lo, hi);
        const double var = raw_integral(lo, hi, [mean](double x) { return (x - mean) * (x - mean); }) / m0;
        return {mean, std::max(0.0, var), std::min(1.0, mass)};
    }

    /// Integral of fn(x) f(x) over [a, b] intersected with the window.
    template <class Fn>
    double partial_expectation(double a, double b, const Fn& fn) const {
        const double lo = std::max(a, window_lo_);
        const double hi = std::min(b, window_hi_);
        if (!(lo < hi)) return 0.0;
        return raw_integral(lo, hi, fn) / normalizer_;
    }

private:
    template <class Fn>
    double raw_integral(double a, double b, const Fn& fn) const {
        auto integrand = [&](double x) { return fn(x) * std::max(0.0, raw_(x)); };
        quadrature::Options opts;
        double total = 0.0;
        double left = a;
        for (double cut : breaks_) {
            if (cut <= left) continue;
            if (cut >= b) break;
            total += quadrature::integrate(integrand, left, cut, opts);
            left = cut;
        }
        total += quadrature::integrate(integrand, left, b, opts);
        return total;
    }

    // Expands outward from a finite anchor until the per-segment mass is negligible.
    void locate_window() {
        double anchor = 0.0;
        if (support_.bounded_below()) anchor = support_.lower;
        else if (support_.bounded_above()) anchor = support_.upper;
        else if (!breaks_.empty()) anchor = breaks_[breaks_.size() / 2];
        auto mass = [&](double a, double b) {
            return quadrature::integrate([&](double x) { return std::max(0.0, raw_(x)); }, a, b);
        };
        double core = 0.0;
        double lo = anchor;
        double hi = anchor;
        double step = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double next_lo = support_.bounded_below() ? lo : lo - step;
            const double next_hi = support_.bounded_above() ? hi : hi + step;
            const double gained = (next_lo < lo ? mass(next_lo, lo) : 0.0) +
                                  (next_hi > hi ? mass(hi, next_hi) : 0.0);
            lo = next_lo;
            hi = next_hi;
            core += gained;
            if (core > 0.0 && gained <= 1e-18 * core && i >= 3) break;
            step *= 1.6;
        }
        window_lo_ = support_.bounded_below() ? support_.lower : lo;
        window_hi_ = support_.bounded_above() ? support_.upper : hi;
    }

    std::string name_;
    Pdf raw_;
    SupportSpec support_;
    std::vector<double> breaks_;
    double window_lo_ = 0.0;
    double window_hi_ = 0.0;
    double normalizer_ = 1.0;
};

enum class DistributionKind { Exponential, Gaussian, Uniform, Custom };

inline const char* to_string(DistributionKind k) {
    switch (k) {
        case DistributionKind::Exponential: return "exponential";
        case DistributionKind::Gaussian: return "gaussian";
        case DistributionKind::Uniform: return "uniform";
        case DistributionKind::Custom: return "custom";
    }
    return "unknown";
}

/// The law of the source M. Immutable value type; copies share custom state.
class SourceDistribution {
public:
    static SourceDistribution exponential(double rate) {
        if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential rate must be positive");
        return SourceDistribution(Exponential{rate}, SupportSpec(0.0, kInf));
    }
    static SourceDistribution gaussian(double mean, double stddev) {
        if (!(stddev > 0.0) || !std::isfinite(stddev) || !std::isfinite(mean)) {
            throw DomainError("gaussian requires finite mean and stddev > 0");
        }
        return SourceDistribution(Gaussian{mean, stddev}, SupportSpec(-kInf, kInf));
    }
    static SourceDistribution uniform(double lower, double upper) {
        if (!std::isfinite(lower) || !std::isfinite(upper)) throw DomainError("uniform bounds must be finite");
        return SourceDistribution(Uniform{lower, upper}, SupportSpec(lower, upper));
    }
    static SourceDistribution custom(std::string name, CustomDensity::Pdf pdf, SupportSpec support,
                                     std::vector<double> breakpoints = {}) {
        auto density = std::make_shared<const CustomDensity>(std::move(name), std::move(pdf), support,
                                                             std::move(breakpoints));
        return SourceDistribution(density, support);
    }

    DistributionKind kind() const { return static_cast<DistributionKind>(law_.index()); }
    const SupportSpec& support() const { return support_; }

    template <class T>
    const T& as() const { return std::get<T>(law_); }
    const CustomDensity& custom_density() const { return *std::get<std::shared_ptr<const CustomDensity>>(law_); }

    double pdf(double x) const {
        if (!support_.contains(x)) return 0.0;
        return std::visit(
            [x](const auto& law) -> double {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return law.rate * std::exp(-law.rate * x);
                } else if constexpr (std::is_same_v<T, Gaussian>) {
                    return normal::pdf((x - law.mean) / law.stddev) / law.stddev;
                } else if constexpr (std::is_same_v<T, Uniform>) {
                    return 1.0 / (law.upper - law.lower);
                } else {
                    return law->pdf(x);
                }
            },
            law_);
    }

    double cdf(double x) const {
        return std::visit(
            [x](const auto& law) -> double {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return x <= 0.0 ? 0.0 : -std::expm1(-law.rate * x);
                } else if constexpr (std::is_same_v<T, Gaussian>) {
                    return normal::cdf((x - law.mean) / law.stddev);
                } else if constexpr (std::is_same_v<T, Uniform>) {
                    return std::clamp((x - law.lower) / (law.upper - law.lower), 0.0, 1.0);
                } else {
                    return law->cdf(x);
                }
            },
            law_);
    }

    double quantile(double p) const {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
        return std::visit(
            [p](const auto& law) -> double {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    return p >= 1.0 ? kInf : -std::log1p(-p) / law.rate;
                } else if constexpr (std::is_same_v<T, Gaussian>) {
                    return law.mean + law.stddev * normal::quantile(p);
                } else if constexpr (std::is_same_v<T, Uniform>) {
                    return law.lower + p * (law.upper - law.lower);
                } else {
                    return law->quantile(p);
                }
            },
            law_);
    }

    double mean() const {
        switch (kind()) {
            case DistributionKind::Exponential: return 1.0 / as<Exponential>().rate;
            case DistributionKind::Gaussian: return as<Gaussian>().mean;
            case DistributionKind::Uniform: return 0.5 * (as<Uniform>().lower + as<Uniform>().upper);
            case DistributionKind::Custom: break;
        }
        return truncated_moment(support_.lower, support_.upper).mean;
    }

    double variance() const {
        switch (kind()) {
            case DistributionKind::Exponential: return 1.0 / (as<Exponential>().rate * as<Exponential>().rate);
            case DistributionKind::Gaussian: return as<Gaussian>().stddev * as<Gaussian>().stddev;
            case DistributionKind::Uniform: {
                const double w = as<Uniform>().upper - as<Uniform>().lower;
                return w * w / 12.0;
            }
            case DistributionKind::Custom: break;
        }
        return truncated_moment(support_.lower, support_.upper).variance;
    }

    /// E[M | a < M < b]. Closed form for the parametric families; this is the
    /// hot path of both solvers.
    double truncated_mean(double a, double b) const {
        const auto [lo, hi] = clip(a, b);
        switch (kind()) {
            case DistributionKind::Exponential: {
                const double rate = as<Exponential>().rate;
                if (std::isinf(hi)) return lo + 1.0 / rate;
                const double len = hi - lo;
                const double y = rate * len;
                // Narrow bins: 1/rate - len/expm1(y) = len (1/2 - y/12 + y^3/720 - ...).
                const double mean = y < 1e-2 ? lo + len * (0.5 - y / 12.0 + y * y * y / 720.0)
                                             : lo + 1.0 / rate - len / std::expm1(y);
                return std::clamp(mean, lo, hi);
            }
            case DistributionKind::Gaussian: {
                const auto& g = as<Gaussian>();
                const double za = (lo - g.mean) / g.stddev;
                const double zb = (hi - g.mean) / g.stddev;
                const double mean = g.mean + g.stddev * normal::truncated_mean(za, zb);
                return std::clamp(mean, lo, hi);
            }
            case DistributionKind::Uniform: return 0.5 * (lo + hi);
            case DistributionKind::Custom: break;
        }
        return custom_density().truncated(lo, hi).mean;
    }

    TruncatedMoment truncated_moment(double a, double b) const {
        const auto [lo, hi] = clip(a, b);
        switch (kind()) {
            case DistributionKind::Exponential: return exponential_moment(lo, hi);
            case DistributionKind::Gaussian: return gaussian_moment(lo, hi);
            case DistributionKind::Uniform: {
                const auto& u = as<Uniform>();
                const double len = hi - lo;
                return {0.5 * (lo + hi), len * len / 12.0, len / (u.upper - u.lower)};
            }
            case DistributionKind::Custom: break;
        }
        return custom_density().truncated(lo, hi);
    }

    /// Integral of fn(x) f(x) over (a, b) by adaptive quadrature, regardless of family.
    template <class Fn>
    double partial_expectation(double a, double b, const Fn& fn) const {
        if (kind() == DistributionKind::Custom) return custom_density().partial_expectation(a, b, fn);
        double lo = std::max(a, support_.lower);
        double hi = std::min(b, support_.upper);
        if (!(lo < hi)) return 0.0;
        // Beyond these cutoffs the density is below 1e-300 of its peak.
        if (kind() == DistributionKind::Gaussian) {
            const auto& g = as<Gaussian>();
            lo = std::max(lo, g.mean - 38.0 * g.stddev);
            hi = std::min(hi, g.mean + 38.0 * g.stddev);
        } else if (kind() == DistributionKind::Exponential) {
            hi = std::min(hi, lo + 700.0 / as<Exponential>().rate);
        }
        if (!(lo < hi)) return 0.0;
        return quadrature::integrate([&](double x) { return fn(x) * pdf(x); }, lo, hi);
    }

    /// Short family name plus parameters, e.g. {"rate", 1.0} for exponential.
    std::vector<std::pair<std::string, double>> parameters() const {
        switch (kind()) {
            case DistributionKind::Exponential: return {{"lambda", as<Exponential>().rate}};
            case DistributionKind::Gaussian: return {{"mu", as<Gaussian>().mean}, {"sigma", as<Gaussian>().stddev}};
            case DistributionKind::Uniform: return {{"lower", as<Uniform>().lower}, {"upper", as<Uniform>().upper}};
            case DistributionKind::Custom: break;
        }
        return {{"lower", support_.lower}, {"upper", support_.upper}};
    }

    std::string name() const {
        return kind() == DistributionKind::Custom ? custom_density().name() : to_string(kind());
    }

private:
    using Law = std::variant<Exponential, Gaussian, Uniform, std::shared_ptr<const CustomDensity>>;

    SourceDistribution(Law law, SupportSpec support) : law_(std::move(law)), support_(support) {}

    std::pair<double, double> clip(double a, double b) const {
        const double lo = std::max(a, support_.lower);
        const double hi = std::min(b, support_.upper);
        if (!(lo < hi)) throw ZeroMassInterval("interval does not intersect the support");
        return {lo, hi};
    }

    TruncatedMoment exponential_moment(double lo, double hi) const {
        const double rate = as<Exponential>().rate;
        const double tail = std::exp(-rate * lo);
        if (std::isinf(hi)) {
            if (tail == 0.0) throw ZeroMassInterval("exponential tail mass underflows");
            return {lo + 1.0 / rate, 1.0 / (rate * rate), tail};
        }
        const double len = hi - lo;
        const double y = rate * len;
        const double mass = tail * -std::expm1(-y);
        if (!(mass > 0.0)) throw ZeroMassInterval("exponential interval mass underflows");
        double variance = 0.0;
        if (y < 1e-3) {
            variance = len * len * (1.0 / 12.0 - y * y / 240.0);
        } else {
            variance = 1.0 / (rate * rate) - len * len / (std::exp(y) + std::exp(-y) - 2.0);
        }
        return {truncated_mean(lo, hi), std::max(0.0, variance), std::min(1.0, mass)};
    }

    // The variance is obtained by quadrature of the second central moment,
    // with the weight rescaled by the density at the point nearest the mode.
    TruncatedMoment gaussian_moment(double lo, double hi) const {
        const auto& g = as<Gaussian>();
        const double za = (lo - g.mean) / g.stddev;
        const double zb = (hi - g.mean) / g.stddev;
        const double zmean = normal::truncated_mean(za, zb);
        const double mass = normal::interval_mass(za, zb);
        if (!(mass > 0.0)) throw ZeroMassInterval("gaussian interval mass underflows");
        const double anchor = std::clamp(0.0, za, zb);
        const double reach = std::sqrt(anchor * anchor + 100.0);
        const double qa = std::max(za, -reach);
        const double qb = std::min(zb, reach);
        auto weight = [anchor](double z) { return std::exp(-0.5 * (z - anchor) * (z + anchor)); };
        const quadrature::Options opts;
        const double w0 = quadrature::integrate(weight, qa, qb, opts);
        const double w2 = quadrature::integrate(
            [&](double z) { return (z - zmean) * (z - zmean) * weight(z); }, qa, qb, opts);
        const double variance = g.stddev * g.stddev * std::max(0.0, w2 / w0);
        return {std::clamp(g.mean + g.stddev * zmean, lo, hi), variance, std::min(1.0, mass)};
    }

    Law law_;
    SupportSpec support_;
};

struct LogConcavityReport {
    bool is_log_concave = false;
    /// Largest second difference of log f on the grid; > 0 means convexity.
    double worst_violation = 0.0;
};

/// Samples log f on an interior grid (limited to the 1e-9 quantile window on
/// unbounded sides) and checks that every second difference is <= 0 up to
/// rounding.
inline LogConcavityReport log_concavity_check(const SourceDistribution& d, int grid_size) {
    if (grid_size < 3) throw DomainError("log-concavity grid needs at least 3 points");
    const double lo = d.support().bounded_below() ? d.support().lower : d.quantile(1e-9);
    const double hi = d.support().bounded_above() ? d.support().upper : d.quantile(1.0 - 1e-9);
    const double h = (hi - lo) / grid_size;
    std::vector<double> logf(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        const double x = lo + (i + 0.5) * h;
        const double f = d.pdf(x);
        if (!(f > 0.0)) throw NonPositiveDensity("density is not positive at x = " + std::to_string(x));
        logf[static_cast<std::size_t>(i)] = std::log(f);
    }
    LogConcavityReport report{true, -kInf};
    for (std::size_t i = 1; i + 1 < logf.size(); ++i) {
        const double second = logf[i - 1] - 2.0 * logf[i] + logf[i + 1];
        const double tol = 1e-9 * (1.0 + std::abs(logf[i]));
        report.worst_violation = std::max(report.worst_violation, second);
        if (second > tol) report.is_log_concave = false;
    }
    return report;
}

}  // namespace cheaptalk
