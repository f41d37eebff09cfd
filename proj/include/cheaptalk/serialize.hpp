#pragma once

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/json_writer.hpp"
#include "cheaptalk/quantizer.hpp"

#include <span>
#include <string>

namespace cheaptalk::io {

inline Json real_array(std::span<const double> xs) {
    Json out = Json::array();
    for (double x : xs) out.push_back(x);
    return out;
}

inline Json to_json(const SourceDistribution& d) {
    Json j = Json::object();
    j["family"] = d.kind() == DistributionKind::Custom ? std::string("custom") : std::string(to_string(d.kind()));
    if (d.kind() == DistributionKind::Custom) j["name"] = d.name();
    for (const auto& [key, value] : d.parameters()) j[key] = value;
    return j;
}

/// {dist, bias, bins, edges, centroids, decoder_cost, encoder_cost, iterations, residual, status}.
/// `bins` is the quantizer's bin count, or `requested_bins` when no quantizer was produced.
inline Json to_json(const SourceDistribution& d, const EquilibriumResult& r, int requested_bins) {
    Json j = Json::object();
    j["dist"] = to_json(d);
    j["bias"] = r.bias;
    j["bins"] = r.quantizer.centroids.empty() ? requested_bins : r.quantizer.bins();
    j["edges"] = real_array(r.quantizer.edges);
    j["centroids"] = real_array(r.quantizer.centroids);
    j["decoder_cost"] = r.decoder_cost;
    j["encoder_cost"] = r.encoder_cost;
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["status"] = to_string(r.status);
    return j;
}

}  // namespace cheaptalk::io
