#include "cheaptalk/costs.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/exponential.hpp"
#include "cheaptalk/informativeness.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cheaptalk;

namespace {

const auto kExp = SourceDistribution::exponential(1.0);
const auto kGauss = SourceDistribution::gaussian(0.0, 1.0);
const auto kUnif = SourceDistribution::uniform(0.0, 1.0);

double mass_sum(const CostReport& r) {
    double s = 0.0;
    for (const auto& bin : r.per_bin) s += bin.mass;
    return s;
}

}  // namespace

TEST(DecoderCost, Examples) {
    const auto g = decoder_cost(kGauss, babbling_equilibrium(kGauss).quantizer);
    EXPECT_NEAR(g.decoder_cost, 1.0, 1e-14);
    EXPECT_EQ(g.bins, 1);

    const auto rec = exponential::backward_recursion(1.0, 0.1, 2);
    ASSERT_TRUE(rec.has_value());
    const auto e = decoder_cost(kExp, make_quantizer(kExp, rec->edges()), 0.1);
    EXPECT_LT(e.decoder_cost, 1.0);

    const auto u = decoder_cost(kUnif, make_quantizer(kUnif, {0.5}));
    EXPECT_NEAR(u.decoder_cost, 1.0 / 48.0, 1e-15);
    EXPECT_NEAR(u.per_bin[0].conditional_variance, 1.0 / 48.0, 1e-15);
}

TEST(DecoderCost, OffCentroidActionsCostMore) {
    Quantizer q = make_quantizer(kUnif, {0.5});
    q.centroids = {0.3, 0.75};
    // Extra mass * offset^2 = 0.5 * 0.05^2.
    EXPECT_NEAR(decoder_cost(kUnif, q).decoder_cost, 1.0 / 48.0 + 0.5 * 0.0025, 1e-15);
}

TEST(DecoderCost, ZeroMassBin) {
    Quantizer q;
    q.support = kExp.support();
    q.edges = {800.0};
    q.centroids = {1.0, 801.0};
    EXPECT_THROW(decoder_cost(kExp, q), BinCollapse);
}

TEST(DecoderCost, IdentityAndQuadratureAcrossGrid) {
    int checked = 0;
    for (const auto* d : {&kExp, &kGauss, &kUnif}) {
        for (double b : {-0.2, -0.05, 0.0, 0.1, 0.3}) {
            for (int n : {1, 2, 3, 5}) {
                GameConfig cfg;
                cfg.bias = b;
                cfg.bins = n;
                const auto r = solve_shooting(*d, cfg);
                if (!r.converged()) continue;
                const auto report = decoder_cost(*d, r.quantizer, b);
                EXPECT_NEAR(report.encoder_cost - report.decoder_cost, b * b, 1e-10);
                EXPECT_NEAR(mass_sum(report), 1.0, 1e-12);
                double weighted = 0.0;
                for (const auto& bin : report.per_bin) weighted += bin.mass * bin.conditional_variance;
                EXPECT_NEAR(report.decoder_cost, weighted, 1e-10);
                EXPECT_NEAR(encoder_cost_direct(*d, r.quantizer, b), report.encoder_cost, 1e-8);
                EXPECT_NEAR(decoder_cost_direct(*d, r.quantizer), report.decoder_cost, 1e-8);
                ++checked;
            }
        }
    }
    EXPECT_GE(checked, 30);
}

TEST(Informativeness, GaussianStrictlyDecreasing) {
    const auto rows = informativeness_table(kGauss, 0.2, 1, 6);
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& row : rows) EXPECT_EQ(row.status, SolveStatus::Converged) << row.bins;
    EXPECT_NEAR(rows[0].report.decoder_cost, 1.0, 1e-12);
    EXPECT_TRUE(strictly_more_informative(rows));
}

TEST(Informativeness, ExponentialApproachesInfiniteCost) {
    const double limit = exponential::infinite_cost(1.0, 0.1);
    EXPECT_NEAR(limit, 0.0961, 5e-5);
    const auto rows = informativeness_table(kExp, 0.1, 1, 8);
    EXPECT_TRUE(strictly_more_informative(rows));
    double prev_gap = 1.0;
    for (const auto& row : rows) {
        ASSERT_EQ(row.status, SolveStatus::Converged);
        const double gap = row.report.decoder_cost - limit;
        EXPECT_GT(gap, 0.0);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
}

TEST(Informativeness, UniformFlagsUnsolvableRow) {
    const auto rows = informativeness_table(kUnif, 0.05, 1, 4);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(rows[i].status, SolveStatus::Converged);
    EXPECT_EQ(rows[3].status, SolveStatus::NoEquilibrium);
    EXPECT_TRUE(rows[3].edges.empty());
    EXPECT_TRUE(strictly_more_informative(rows));
}

TEST(Informativeness, MoreBinsAlwaysBetterOnGrid) {
    for (const auto* d : {&kExp, &kGauss}) {
        for (double b : {-0.15, -0.05, 0.0, 0.05, 0.25}) {
            EXPECT_TRUE(strictly_more_informative(informativeness_table(*d, b, 1, 7)))
                << to_string(d->kind()) << " " << b;
        }
    }
}

TEST(Informativeness, RejectsBadRange) {
    EXPECT_THROW(informativeness_table(kGauss, 0.1, 0, 3), std::invalid_argument);
    EXPECT_THROW(informativeness_table(kGauss, 0.1, 4, 3), std::invalid_argument);
}
