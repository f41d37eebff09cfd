#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cheaptalk;

namespace {

const auto kExp = SourceDistribution::exponential(1.0);
const auto kGauss = SourceDistribution::gaussian(0.0, 1.0);
const auto kUnif = SourceDistribution::uniform(0.0, 1.0);

// Same density routed through the generic quadrature code path.
SourceDistribution as_custom(const SourceDistribution& d) {
    return SourceDistribution::custom("copy", [d](double x) { return d.pdf(x); }, d.support());
}

}  // namespace

TEST(SupportSpec, RejectsEmpty) {
    EXPECT_THROW(SupportSpec(1.0, 1.0), DomainError);
    EXPECT_THROW(SupportSpec(2.0, 1.0), DomainError);
    const SupportSpec s(0.0, kInf);
    EXPECT_TRUE(s.bounded_below());
    EXPECT_FALSE(s.bounded_above());
    EXPECT_FALSE(s.interior(0.0));
    EXPECT_TRUE(s.contains(0.0));
}

TEST(Distributions, FactoryValidation) {
    EXPECT_THROW(SourceDistribution::exponential(0.0), DomainError);
    EXPECT_THROW(SourceDistribution::gaussian(0.0, -1.0), DomainError);
    EXPECT_THROW(SourceDistribution::uniform(1.0, 0.0), DomainError);
}

TEST(Distributions, PdfExamples) {
    EXPECT_DOUBLE_EQ(kExp.pdf(0.0), 1.0);
    EXPECT_NEAR(kGauss.pdf(0.0), 0.3989422804014327, 1e-15);
    EXPECT_EQ(kUnif.pdf(2.0), 0.0);
    EXPECT_EQ(kExp.pdf(-0.5), 0.0);
}

TEST(Distributions, CdfExamples) {
    EXPECT_DOUBLE_EQ(kGauss.cdf(0.0), 0.5);
    EXPECT_DOUBLE_EQ(kExp.cdf(kInf), 1.0);
    EXPECT_NEAR(kExp.cdf(1e3), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(kUnif.cdf(0.25), 0.25);
}

TEST(Distributions, CdfMonotone) {
    for (const auto* d : {&kExp, &kGauss, &kUnif}) {
        double prev = 0.0;
        for (double x = -5.0; x <= 5.0; x += 0.01) {
            const double c = d->cdf(x);
            EXPECT_GE(c, prev);
            EXPECT_GE(c, 0.0);
            EXPECT_LE(c, 1.0);
            prev = c;
        }
    }
}

TEST(Distributions, QuantileInvertsCdf) {
    for (const auto* d : {&kExp, &kGauss, &kUnif}) {
        for (double p : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999}) EXPECT_NEAR(d->cdf(d->quantile(p)), p, 1e-12);
    }
}

TEST(TruncatedMoment, Examples) {
    EXPECT_DOUBLE_EQ(kExp.truncated_moment(0.0, kInf).mean, 1.0);
    // 1/lambda + a - (b - a)/(e^{lambda (b - a)} - 1) on [0, 1]
    EXPECT_NEAR(kExp.truncated_moment(0.0, 1.0).mean, 1.0 - 1.0 / (std::numbers::e - 1.0), 1e-15);
    EXPECT_NEAR(kExp.truncated_moment(0.0, 1.0).mean, 0.41802, 5e-6);
    // phi(0)/(1 - Phi(0)) = sqrt(2/pi)
    EXPECT_NEAR(kGauss.truncated_moment(0.0, kInf).mean, std::sqrt(2.0 / std::numbers::pi), 1e-14);
    EXPECT_NEAR(kGauss.truncated_moment(0.0, kInf).mean, 0.79788, 5e-6);
}

TEST(TruncatedMoment, FullSupportMatchesMoments) {
    for (const auto* d : {&kExp, &kGauss, &kUnif}) {
        const auto tm = d->truncated_moment(-kInf, kInf);
        EXPECT_NEAR(tm.mean, d->mean(), 1e-12);
        EXPECT_NEAR(tm.variance, d->variance(), 1e-10);
        EXPECT_NEAR(tm.mass, 1.0, 1e-15);
    }
}

TEST(TruncatedMoment, ZeroMassInterval) {
    EXPECT_THROW(kExp.truncated_moment(-2.0, -1.0), ZeroMassInterval);
    EXPECT_THROW(kUnif.truncated_moment(0.5, 0.5), ZeroMassInterval);
    EXPECT_THROW(kExp.truncated_moment(800.0, kInf), ZeroMassInterval);
    const auto custom = as_custom(kGauss);
    EXPECT_THROW(custom.truncated_moment(30.0, 31.0), ZeroMassInterval);
}

TEST(TruncatedMoment, TailStableGaussianMean) {
    // Far-tail bins keep their mean inside the bin; E[Z | Z > a] ~ a + 1/a.
    const double a = 30.0;
    const double m = kGauss.truncated_mean(a, kInf);
    EXPECT_GT(m, a);
    EXPECT_NEAR(m, a + 1.0 / a - 2.0 / (a * a * a), 1e-5);
    EXPECT_NEAR(kGauss.truncated_mean(-kInf, -a), -m, 1e-12);
}

TEST(TruncatedMoment, MeanStrictlyInside) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(0.0, 8.0);
    std::uniform_real_distribution<double> any(-6.0, 6.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        auto pick = [&](auto& dist, const SourceDistribution& d) {
            double a = dist(rng), b = dist(rng);
            if (a > b) std::swap(a, b);
            if (b - a < 1e-3) b = a + 1e-3;
            const auto tm = d.truncated_moment(a, b);
            EXPECT_GT(tm.mean, a);
            EXPECT_LT(tm.mean, b);
            EXPECT_GE(tm.variance, 0.0);
            EXPECT_GT(tm.mass, 0.0);
            EXPECT_LE(tm.mass, 1.0);
        };
        pick(pos, kExp);
        pick(any, kGauss);
        pick(unit, kUnif);
    }
}

TEST(TruncatedMoment, ClosedFormMatchesQuadrature) {
    const auto exp_q = as_custom(kExp);
    const auto gauss_q = as_custom(kGauss);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(0.0, 6.0);
    std::uniform_real_distribution<double> any(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        double a = pos(rng), b = pos(rng);
        if (a > b) std::swap(a, b);
        b = std::max(b, a + 1e-2);
        const auto c = kExp.truncated_moment(a, b);
        const auto q = exp_q.truncated_moment(a, b);
        EXPECT_NEAR(c.mean, q.mean, 1e-9);
        EXPECT_NEAR(c.variance, q.variance, 1e-9);
        EXPECT_NEAR(c.mass, q.mass, 1e-9);

        double x = any(rng), y = any(rng);
        if (x > y) std::swap(x, y);
        y = std::max(y, x + 1e-2);
        const auto gc = kGauss.truncated_moment(x, y);
        const auto gq = gauss_q.truncated_moment(x, y);
        EXPECT_NEAR(gc.mean, gq.mean, 1e-9);
        EXPECT_NEAR(gc.variance, gq.variance, 1e-9);
        EXPECT_NEAR(gc.mass, gq.mass, 1e-9);
    }
}

TEST(TruncatedMoment, ExponentialSecondMomentIdentity) {
    // Var + (mean - a)^2 equals E[(M - a)^2 | bin] from quadrature.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(0.0, 5.0);
    for (double rate : {0.5, 1.0, 3.0}) {
        const auto d = SourceDistribution::exponential(rate);
        for (int i = 0; i < 30; ++i) {
            double a = pos(rng), b = pos(rng);
            if (a > b) std::swap(a, b);
            b = std::max(b, a + 1e-2);
            const auto tm = d.truncated_moment(a, b);
            const double second =
                d.partial_expectation(a, b, [a](double m) { return (m - a) * (m - a); }) / tm.mass;
            EXPECT_NEAR(tm.variance + (tm.mean - a) * (tm.mean - a), second, 1e-9);
        }
    }
}

TEST(TruncatedMoment, NarrowExponentialBin) {
    // Centroid of a tiny bin is its midpoint to high relative precision.
    const double a = 0.3;
    for (double len : {1e-6, 1e-5, 1e-4, 1e-3}) {
        const double m = kExp.truncated_mean(a, a + len);
        EXPECT_NEAR((m - a) / len, 0.5 - len / 12.0, 1e-6);
    }
}

TEST(Distributions, CdfDifferenceMatchesQuadrature) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> any(-3.0, 3.0);
    for (const auto* d : {&kExp, &kGauss, &kUnif}) {
        for (int i = 0; i < 50; ++i) {
            double a = any(rng), b = any(rng);
            if (a > b) std::swap(a, b);
            // Clip to the support so the integrand has no jumps.
            a = std::max(a, d->support().lower);
            b = std::max(a, std::min(b, d->support().upper));
            const double q = quadrature::integrate([&](double x) { return d->pdf(x); }, a, b);
            EXPECT_NEAR(d->cdf(b) - d->cdf(a), q, 1e-9);
        }
    }
}

TEST(CustomDensity, NormalisesAndIntegrates) {
    // Unnormalised triangle on [0, 2].
    const auto d = SourceDistribution::custom("tri", [](double x) { return x < 1.0 ? x : 2.0 - x; },
                                              SupportSpec(0.0, 2.0), {1.0});
    EXPECT_NEAR(d.cdf(1.0), 0.5, 1e-12);
    EXPECT_NEAR(d.mean(), 1.0, 1e-12);
    EXPECT_NEAR(d.variance(), 1.0 / 6.0, 1e-10);
    EXPECT_NEAR(d.pdf(1.0), 1.0, 1e-12);
    EXPECT_NEAR(d.quantile(0.125), 0.5, 1e-9);
}

TEST(CustomDensity, UnboundedSupportWindow) {
    const auto d = SourceDistribution::custom("laplace", [](double x) { return std::exp(-std::abs(x)); },
                                              SupportSpec(-kInf, kInf), {0.0});
    EXPECT_NEAR(d.mean(), 0.0, 1e-10);
    EXPECT_NEAR(d.variance(), 2.0, 1e-8);
    EXPECT_NEAR(d.truncated_moment(0.0, kInf).mean, 1.0, 1e-8);
}

TEST(CustomDensity, RejectsMasslessDensity) {
    EXPECT_THROW(SourceDistribution::custom("zero", [](double) { return 0.0; }, SupportSpec(0.0, 1.0)), ConfigError);
}

TEST(LogConcavity, Examples) {
    EXPECT_TRUE(log_concavity_check(kGauss, 400).is_log_concave);
    EXPECT_TRUE(log_concavity_check(kExp, 400).is_log_concave);
    EXPECT_TRUE(log_concavity_check(kUnif, 400).is_log_concave);
    const auto convex = SourceDistribution::custom("expsq", [](double x) { return std::exp(x * x); },
                                                   SupportSpec(-1.0, 1.0));
    const auto r = log_concavity_check(convex, 400);
    EXPECT_FALSE(r.is_log_concave);
    EXPECT_GT(r.worst_violation, 0.0);
}

TEST(LogConcavity, NonPositiveDensity) {
    const auto gap = SourceDistribution::custom("gap", [](double x) { return std::abs(x) < 0.25 ? 0.0 : 1.0; },
                                                SupportSpec(-1.0, 1.0), {-0.25, 0.25});
    EXPECT_THROW(log_concavity_check(gap, 101), NonPositiveDensity);
    EXPECT_THROW(log_concavity_check(kGauss, 2), DomainError);
}
