#pragma once

#include "cheaptalk/distributions.hpp"

#include <string>
#include <vector>

namespace cheaptalk {

struct GameConfig {
    double bias = 0.0;
    int bins = 2;
    double edge_tolerance = 1e-11;
    int max_iterations = 200000;
    /// On collapse, drop the offending edges and keep iterating with fewer bins.
    bool reduce_on_collapse = false;
};

/// N-cell quantizer: bins [lower, m_1), [m_1, m_2), ..., [m_{N-1}, upper)
/// with one reconstruction point (decoder action) per bin.
struct Quantizer {
    std::vector<double> edges;
    std::vector<double> centroids;
    SupportSpec support;

    int bins() const { return static_cast<int>(centroids.size()); }
    double bin_lower(std::size_t k) const { return k == 0 ? support.lower : edges[k - 1]; }
    double bin_upper(std::size_t k) const { return k == edges.size() ? support.upper : edges[k]; }

    /// Index of the bin containing x; an edge belongs to the bin on its right.
    std::size_t bin_of(double x) const {
        std::size_t k = 0;
        while (k < edges.size() && x >= edges[k]) ++k;
        return k;
    }
};

enum class SolveStatus { Converged, Collapsed, MaxIterations, NoEquilibrium, PropagationFailure };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::Collapsed: return "Collapsed";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::NoEquilibrium: return "NoEquilibrium";
        case SolveStatus::PropagationFailure: return "PropagationFailure";
    }
    return "Unknown";
}

struct EquilibriumResult {
    Quantizer quantizer;
    double decoder_cost = 0.0;
    double encoder_cost = 0.0;
    int iterations = 0;
    double residual = 0.0;
    SolveStatus status = SolveStatus::Converged;
    double bias = 0.0;
    std::string message;

    bool converged() const { return status == SolveStatus::Converged; }
};

}  // namespace cheaptalk
