// Two-bin equilibrium of an exponential source, three ways: the Lambert-W
// closed form, Lloyd-Max iteration and forward shooting.

#include "cheaptalk/cheaptalk.hpp"

#include <cstdio>

int main() {
    using namespace cheaptalk;
    const auto d = SourceDistribution::exponential(1.0);
    for (double b : {-0.4, -0.1, 0.0, 0.1, 0.5}) {
        GameConfig cfg;
        cfg.bias = b;
        cfg.bins = 2;
        const auto closed = exponential::two_bin_edge(1.0, b);
        const auto lloyd = solve_lloyd_max(d, cfg);
        const auto shot = solve_shooting(d, cfg);
        std::printf("b=%+.2f  closed=%.12f  lloyd=%.12f (%d it)  shooting=%.12f  J^d=%.10f\n", b,
                    closed ? *closed : 0.0, lloyd.quantizer.edges.at(0), lloyd.iterations,
                    shot.quantizer.edges.at(0), shot.decoder_cost);
    }
}
