// Decoder cost of Gaussian equilibria as the number of bins grows.

#include "cheaptalk/cheaptalk.hpp"

#include <cstdio>

int main() {
    using namespace cheaptalk;
    const auto d = SourceDistribution::gaussian(0.0, 1.0);
    for (double b : {0.0, 0.2, 0.5}) {
        std::printf("b = %.2f\n", b);
        for (const auto& row : informativeness_table(d, b, 1, 10)) {
            std::printf("  N=%2d  %-10s  J^d=%.12f\n", row.bins, to_string(row.status), row.report.decoder_cost);
        }
    }
}
