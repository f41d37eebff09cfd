#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cheaptalk;
using namespace cheaptalk::oracle;

namespace {

const auto kExp = SourceDistribution::exponential(1.0);
const auto kGauss = SourceDistribution::gaussian(0.0, 1.0);
const auto kUnif = SourceDistribution::uniform(0.0, 1.0);

}  // namespace

TEST(GridSearchSpec, Validation) {
    EXPECT_THROW((GridSearchSpec{0.0, 1.0, 2, 10}.validate()), std::invalid_argument);
    EXPECT_THROW((GridSearchSpec{1.0, 1.0, 11, 10}.validate()), std::invalid_argument);
    const auto g = default_grid(kExp);
    EXPECT_GT(g.lower, 0.0);
    EXPECT_GT(g.upper, 15.0);
}

TEST(BruteForceTwoBin, Examples) {
    const auto e = brute_force_two_bin(kExp, 0.0, default_grid(kExp));
    ASSERT_TRUE(e.has_value());
    EXPECT_NEAR(*e, 1.59362, 5e-6);
    const auto g = brute_force_two_bin(kGauss, 0.0, default_grid(kGauss));
    ASSERT_TRUE(g.has_value());
    EXPECT_NEAR(*g, 0.0, 1e-12);
    EXPECT_FALSE(brute_force_two_bin(kExp, -0.5, default_grid(kExp)).has_value());
}

TEST(BruteForceTwoBin, AgreesWithShooting) {
    for (const auto* d : {&kExp, &kGauss, &kUnif}) {
        for (double b : {-0.3, -0.1, 0.0, 0.2}) {
            const auto o = brute_force_two_bin(*d, b, default_grid(*d));
            GameConfig cfg;
            cfg.bias = b;
            cfg.bins = 2;
            const auto s = solve_shooting(*d, cfg);
            ASSERT_EQ(o.has_value(), s.converged()) << to_string(d->kind()) << " " << b;
            if (o) {
                EXPECT_NEAR(*o, s.quantizer.edges[0], 1e-7);
            }
        }
    }
}

TEST(BruteForceEquilibrium, Examples) {
    const auto u = brute_force_equilibrium(kUnif, -0.05, 3, default_grid(kUnif));
    ASSERT_TRUE(u.has_value());
    EXPECT_NEAR((*u)[0], 0.13333, 5e-6);
    EXPECT_NEAR((*u)[1], 0.46667, 5e-6);

    const auto g = brute_force_equilibrium(kGauss, 0.2, 3, default_grid(kGauss));
    ASSERT_TRUE(g.has_value());
    GameConfig cfg;
    cfg.bias = 0.2;
    cfg.bins = 3;
    const auto l = solve_lloyd_max(kGauss, cfg);
    ASSERT_TRUE(l.converged());
    EXPECT_LE(cheaptalk::detail::sup_distance(*g, l.quantizer.edges), 1e-7);

    EXPECT_FALSE(brute_force_equilibrium(kExp, -0.21, 3, default_grid(kExp)).has_value());
    EXPECT_THROW(brute_force_equilibrium(kExp, 0.0, 5, default_grid(kExp)), std::invalid_argument);
    EXPECT_TRUE(brute_force_equilibrium(kExp, 0.0, 1, default_grid(kExp))->empty());
}

TEST(BruteForceEquilibrium, SolverEquivalenceGrid) {
    int instances = 0;
    int both = 0;
    for (const auto* d : {&kExp, &kGauss, &kUnif}) {
        for (double b : {-0.3, -0.15, -0.05, 0.0, 0.1, 0.2}) {
            for (int n : {2, 3, 4}) {
                const auto o = brute_force_equilibrium(*d, b, n, default_grid(*d));
                GameConfig cfg;
                cfg.bias = b;
                cfg.bins = n;
                const auto s = solve_shooting(*d, cfg);
                ++instances;
                ASSERT_EQ(o.has_value(), s.converged()) << to_string(d->kind()) << " b=" << b << " N=" << n;
                if (!o) continue;
                ++both;
                EXPECT_LE(cheaptalk::detail::sup_distance(*o, s.quantizer.edges), 1e-7);
                EXPECT_LE(verify_fixed_point(*d, make_quantizer(*d, *o), b).worst(), 1e-7);
            }
        }
    }
    EXPECT_GE(instances, 30);
    EXPECT_GE(both, 15);
}

TEST(UniformClosedForm, Examples) {
    const auto two = uniform_closed_form(-0.05, 2);
    ASSERT_TRUE(two.has_value());
    EXPECT_NEAR((*two)[0], 0.4, 1e-15);
    EXPECT_NEAR((*uniform_closed_form(0.05, 2))[0], 0.6, 1e-15);
    const auto four = uniform_closed_form(0.0, 4);
    ASSERT_TRUE(four.has_value());
    EXPECT_EQ(*four, (std::vector<double>{0.25, 0.5, 0.75}));
    EXPECT_FALSE(uniform_closed_form(0.05, 4).has_value());
    EXPECT_FALSE(uniform_closed_form(-0.05, 4).has_value());
    EXPECT_TRUE(uniform_closed_form(0.3, 1)->empty());
}

TEST(UniformClosedForm, IsFixedPoint) {
    for (double b : {-0.12, -0.05, -0.01, 0.0, 0.003, 0.04, 0.08}) {
        for (int n = 1; n <= 12; ++n) {
            const auto e = uniform_closed_form(b, n);
            if (!e) continue;
            EXPECT_LE(verify_fixed_point(kUnif, make_quantizer(kUnif, *e), b).worst(), 1e-12) << b << " " << n;
        }
    }
    const auto d = SourceDistribution::uniform(-2.0, 3.0);
    const auto e = uniform_closed_form(0.1, 4, -2.0, 3.0);
    ASSERT_TRUE(e.has_value());
    EXPECT_LE(verify_fixed_point(d, make_quantizer(d, *e), 0.1).worst(), 1e-12);
}

TEST(UniformClosedForm, FeasibilityMatchesNmax) {
    for (double b : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        int largest = 1;
        for (int n = 1; n < 50; ++n) {
            if (uniform_closed_form(b, n)) largest = n;
        }
        EXPECT_EQ(largest, static_cast<int>(std::ceil(-0.5 + 0.5 * std::sqrt(1.0 + 2.0 / b)))) << b;
    }
}
