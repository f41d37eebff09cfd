#pragma once

#include "cheaptalk/costs.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/parallel.hpp"

#include <vector>

namespace cheaptalk {

struct InformativenessRow {
    int bins = 0;
    SolveStatus status = SolveStatus::Converged;
    /// Only meaningful when status is Converged.
    CostReport report;
    std::vector<double> edges;
};

/// One equilibrium per N in [first_bins, last_bins], solved by shooting.
/// Rows with no equilibrium keep their status and an empty report.
inline std::vector<InformativenessRow> informativeness_table(const SourceDistribution& d, double bias, int first_bins,
                                                             int last_bins) {
    if (first_bins < 1 || last_bins < first_bins) throw std::invalid_argument("informativeness_table: bad N range");
    std::vector<InformativenessRow> rows(static_cast<std::size_t>(last_bins - first_bins + 1));
    parallel_for(rows.size(), [&](std::size_t i) {
        GameConfig cfg;
        cfg.bias = bias;
        cfg.bins = first_bins + static_cast<int>(i);
        const auto r = solve_shooting(d, cfg);
        auto& row = rows[i];
        row.bins = cfg.bins;
        row.status = r.status;
        if (r.converged()) {
            row.report = decoder_cost(d, r.quantizer, bias);
            row.edges = r.quantizer.edges;
        }
    });
    return rows;
}

/// True when decoder cost strictly decreases across consecutive solvable rows.
inline bool strictly_more_informative(const std::vector<InformativenessRow>& rows) {
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        if (row.status != SolveStatus::Converged) continue;
        if (!(row.report.decoder_cost < previous)) return false;
        previous = row.report.decoder_cost;
    }
    return true;
}

}  // namespace cheaptalk
