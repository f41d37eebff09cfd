#include "cheaptalk/density_file.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/json_writer.hpp"
#include "cheaptalk/parallel.hpp"
#include "cheaptalk/serialize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace cheaptalk;

namespace {

std::string data_file(const char* name) { return std::string(CHEAPTALK_TEST_DATA) + "/" + name; }

}  // namespace

TEST(JsonWriter, RealsRoundTrip) {
    EXPECT_EQ(io::format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(io::format_real(1.0), "1");
    EXPECT_EQ(std::stod(io::format_real(1.5936242600400401)), 1.5936242600400401);
    io::Json j;
    j["x"] = std::nan("");
    j["y"] = std::numeric_limits<double>::infinity();
    j["z"] = 0.25;
    j["n"] = 3;
    EXPECT_EQ(io::dump(j), "{\n  \"x\": null,\n  \"y\": null,\n  \"z\": 0.25,\n  \"n\": 3\n}\n");
}

TEST(JsonWriter, NestedAndEscaped) {
    io::Json j;
    j["name"] = "a\"b";
    j["list"] = io::Json::array({1.0, 2});
    j["empty"] = io::Json::array();
    j["obj"] = io::Json::object();
    const auto parsed = nlohmann::json::parse(io::dump(j));
    EXPECT_EQ(parsed["name"], "a\"b");
    EXPECT_EQ(parsed["list"].size(), 2u);
    EXPECT_TRUE(parsed["empty"].empty());
    EXPECT_TRUE(parsed["obj"].is_object());
}

TEST(Serialize, ResultJson) {
    const auto d = SourceDistribution::exponential(1.0);
    GameConfig cfg;
    const auto r = solve_shooting(d, cfg);
    const auto j = io::to_json(d, r, 2);
    EXPECT_EQ(j["status"], "Converged");
    EXPECT_EQ(j["bins"], 2);
    EXPECT_EQ(j["dist"]["family"], "exponential");
    EXPECT_EQ(j["edges"].size(), 1u);
    EXPECT_EQ(j["centroids"].size(), 2u);

    cfg.bias = -0.6;
    const auto none = io::to_json(d, solve_shooting(d, cfg), 2);
    EXPECT_EQ(none["status"], "NoEquilibrium");
    EXPECT_EQ(none["bins"], 2);
    EXPECT_NE(io::dump(none).find("\"decoder_cost\": null"), std::string::npos);
}

TEST(DensityFile, PiecewisePolynomialTriangle) {
    const auto d = io::load_density(data_file("triangle.json"));
    EXPECT_EQ(d.name(), "triangle");
    EXPECT_NEAR(d.mean(), 1.0, 1e-12);
    EXPECT_NEAR(d.variance(), 1.0 / 6.0, 1e-10);
    EXPECT_NEAR(d.cdf(0.5), 0.125, 1e-12);
}

TEST(DensityFile, TabulatedIsRenormalised) {
    const auto d = io::load_density(data_file("bump_tabulated.json"));
    EXPECT_EQ(d.name(), "bump");
    EXPECT_NEAR(d.cdf(1.0), 1.0, 1e-12);
    EXPECT_NEAR(d.mean(), 0.0, 1e-9);
    EXPECT_NEAR(d.variance(), 0.2, 1e-3);
    EXPECT_NEAR(d.pdf(0.0), 0.75, 2e-3);
}

TEST(DensityFile, CustomSourceSolves) {
    const auto d = io::load_density(data_file("triangle.json"));
    GameConfig cfg;
    cfg.bias = 0.05;
    cfg.bins = 3;
    const auto s = solve_shooting(d, cfg);
    const auto l = solve_lloyd_max(d, cfg);
    ASSERT_TRUE(s.converged());
    ASSERT_TRUE(l.converged());
    EXPECT_LE(cheaptalk::detail::sup_distance(s.quantizer.edges, l.quantizer.edges), 1e-8);
    EXPECT_LE(verify_fixed_point(d, s.quantizer, 0.05).worst(), 1e-9);
}

TEST(DensityFile, Errors) {
    for (const char* f : {"bad_mass.json", "bad_version.json", "bad_support.json", "bad_negative.json", "bad_gap.json"}) {
        EXPECT_THROW(io::load_density(data_file(f)), ConfigError) << f;
    }
    EXPECT_THROW(io::load_density(data_file("missing.json")), ConfigError);
    EXPECT_THROW(io::parse_density("{not json"), ConfigError);
    EXPECT_THROW(io::parse_density("[]"), ConfigError);
    EXPECT_THROW(io::parse_density(R"({"format":"cheaptalk-density","version":1,"name":"x","support":[0,1]})"),
                 ConfigError);
}

TEST(DensityFile, PolynomialPiece) {
    const io::PolynomialPiece p{1.0, 3.0, {1.0, 0.0, 3.0}};
    EXPECT_DOUBLE_EQ(p(2.0), 13.0);
    EXPECT_NEAR(p.integral(), 2.0 + 26.0, 1e-12);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
    auto run = [](int threads) {
        std::vector<double> out(40);
        parallel_for(out.size(), [&](std::size_t i) { out[i] = std::sin(static_cast<double>(i)) * i; }, threads);
        return out;
    };
    EXPECT_EQ(run(1), run(4));
    EXPECT_EQ(run(1), run(64));
    EXPECT_THROW(parallel_for(5, [](std::size_t i) { if (i == 3) throw std::runtime_error("x"); }, 3),
                 std::runtime_error);
}
