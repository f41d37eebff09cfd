#pragma once

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/quantizer.hpp"

#include <vector>

namespace cheaptalk {

struct BinCost {
    double mass = 0.0;
    double conditional_variance = 0.0;
    double conditional_mean = 0.0;
};

struct CostReport {
    int bins = 0;
    double decoder_cost = 0.0;
    double encoder_cost = 0.0;
    std::vector<BinCost> per_bin;
};

/// J^d = sum_k P(bin k) E[(M - u_k)^2 | bin k]. When the centroids are the
/// bin means this is sum_k mass * conditional variance; off-centroid actions
/// add mass * (mean - u_k)^2. The encoder cost is reported as J^d + b^2.
inline CostReport decoder_cost(const SourceDistribution& d, const Quantizer& q, double bias = 0.0) {
    CostReport report;
    report.bins = q.bins();
    report.per_bin.reserve(q.centroids.size());
    for (std::size_t k = 0; k < q.centroids.size(); ++k) {
        TruncatedMoment tm;
        try {
            tm = d.truncated_moment(q.bin_lower(k), q.bin_upper(k));
        } catch (const ZeroMassInterval& e) {
            throw BinCollapse(std::string("zero-mass bin in cost evaluation: ") + e.what());
        }
        const double offset = tm.mean - q.centroids[k];
        report.decoder_cost += tm.mass * (tm.variance + offset * offset);
        report.per_bin.push_back({tm.mass, tm.variance, tm.mean});
    }
    report.encoder_cost = report.decoder_cost + bias * bias;
    return report;
}

/// J^e by direct quadrature of (m - u_k - b)^2 against the density, bin by bin.
/// Independent of the cost identity; used to validate it.
inline double encoder_cost_direct(const SourceDistribution& d, const Quantizer& q, double bias) {
    double total = 0.0;
    for (std::size_t k = 0; k < q.centroids.size(); ++k) {
        const double u = q.centroids[k];
        total += d.partial_expectation(q.bin_lower(k), q.bin_upper(k), [u, bias](double m) {
            const double e = m - u - bias;
            return e * e;
        });
    }
    return total;
}

/// J^d by direct quadrature of (m - u_k)^2.
inline double decoder_cost_direct(const SourceDistribution& d, const Quantizer& q) {
    return encoder_cost_direct(d, q, 0.0);
}

}  // namespace cheaptalk
