#pragma once

// Custom source densities loaded from a JSON file:
//
//   {
//     "format": "cheaptalk-density", "version": 1, "name": "...",
//     "support": [lo, hi],
//     "tabulated": {"x": [...], "pdf": [...]}
//   }
//
// or, in place of "tabulated",
//
//   "piecewise_polynomial": [{"from": a, "to": b, "coefficients": [c0, c1, ...]}, ...]
//
// where each piece is sum_i c_i x^i on [from, to). Tables are interpolated
// with a monotone cubic (PCHIP) and renormalised; polynomial pieces must
// tile the support and carry unit mass to within 1e-6.

#include "cheaptalk/distributions.hpp"
#include "cheaptalk/errors.hpp"

#include <boost/math/interpolators/pchip.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace cheaptalk::io {

inline constexpr const char* kDensityFormat = "cheaptalk-density";
inline constexpr int kDensityVersion = 1;

struct PolynomialPiece {
    double from = 0.0;
    double to = 0.0;
    std::vector<double> coefficients;

    double operator()(double x) const {
        double v = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * x + *it;
        return v;
    }

    double integral() const {
        double lo = 0.0;
        double hi = 0.0;
        for (std::size_t i = coefficients.size(); i-- > 0;) {
            lo = lo * from + coefficients[i] / static_cast<double>(i + 1);
            hi = hi * to + coefficients[i] / static_cast<double>(i + 1);
        }
        return hi * to - lo * from;
    }
};

namespace detail {

inline double number_field(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::vector<double> number_array(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(where + ": '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline SourceDistribution tabulated(const std::string& name, SupportSpec support, const nlohmann::json& table) {
    auto x = number_array(table, "x", "tabulated");
    auto y = number_array(table, "pdf", "tabulated");
    if (x.size() != y.size()) throw ConfigError("tabulated: 'x' and 'pdf' differ in length");
    if (x.size() < 4) throw ConfigError("tabulated: need at least 4 points");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ConfigError("tabulated: non-finite entry");
        if (y[i] < 0.0) throw ConfigError("tabulated: pdf must be non-negative");
        if (i > 0 && !(x[i] > x[i - 1])) throw ConfigError("tabulated: 'x' must be strictly increasing");
    }
    if (std::abs(x.front() - support.lower) > 1e-12 * std::max(1.0, std::abs(support.lower)) ||
        std::abs(x.back() - support.upper) > 1e-12 * std::max(1.0, std::abs(support.upper))) {
        throw ConfigError("tabulated: 'x' must start and end at the support bounds");
    }
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x), std::move(y));
    auto pdf = [spline, support](double t) {
        return std::max(0.0, (*spline)(std::clamp(t, support.lower, support.upper)));
    };
    return SourceDistribution::custom(name, pdf, support);
}

inline SourceDistribution polynomial(const std::string& name, SupportSpec support, const nlohmann::json& list) {
    if (!list.is_array() || list.empty()) throw ConfigError("piecewise_polynomial: need a non-empty array");
    std::vector<PolynomialPiece> pieces;
    for (const auto& item : list) {
        PolynomialPiece p{number_field(item, "from", "piece"), number_field(item, "to", "piece"),
                          number_array(item, "coefficients", "piece")};
        if (!(p.from < p.to)) throw ConfigError("piecewise_polynomial: piece with from >= to");
        if (p.coefficients.empty()) throw ConfigError("piecewise_polynomial: piece without coefficients");
        if (!pieces.empty() && std::abs(p.from - pieces.back().to) > 1e-12 * std::max(1.0, std::abs(p.from))) {
            throw ConfigError("piecewise_polynomial: pieces must be contiguous and ordered");
        }
        pieces.push_back(std::move(p));
    }
    if (std::abs(pieces.front().from - support.lower) > 1e-12 * std::max(1.0, std::abs(support.lower)) ||
        std::abs(pieces.back().to - support.upper) > 1e-12 * std::max(1.0, std::abs(support.upper))) {
        throw ConfigError("piecewise_polynomial: pieces must cover exactly the support");
    }
    double mass = 0.0;
    for (const auto& p : pieces) {
        mass += p.integral();
        for (int i = 0; i <= 1000; ++i) {
            const double t = p.from + (p.to - p.from) * i / 1000.0;
            if (p(t) < -1e-12) throw ConfigError("piecewise_polynomial: density is negative on a piece");
        }
    }
    if (std::abs(mass - 1.0) > 1e-6) throw ConfigError("piecewise_polynomial: total mass differs from 1 by more than 1e-6");

    std::vector<double> breaks;
    for (std::size_t i = 1; i < pieces.size(); ++i) breaks.push_back(pieces[i].from);
    auto shared = std::make_shared<std::vector<PolynomialPiece>>(std::move(pieces));
    auto pdf = [shared](double t) {
        const auto& ps = *shared;
        std::size_t k = 0;
        while (k + 1 < ps.size() && t >= ps[k + 1].from) ++k;
        return ps[k](t);
    };
    return SourceDistribution::custom(name, pdf, support, std::move(breaks));
}

}  // namespace detail

inline SourceDistribution parse_density(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("density file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("density file must hold a JSON object");
    if (j.value("format", std::string()) != kDensityFormat) {
        throw ConfigError(std::string("density file: 'format' must be \"") + kDensityFormat + "\"");
    }
    if (!j.contains("version") || !j.at("version").is_number_integer() || j.at("version").get<int>() != kDensityVersion) {
        throw ConfigError("density file: unsupported 'version' (expected 1)");
    }
    if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError("density file: 'name' must be a string");
    const auto name = j.at("name").get<std::string>();
    const auto bounds = detail::number_array(j, "support", "density file");
    if (bounds.size() != 2 || !std::isfinite(bounds[0]) || !std::isfinite(bounds[1]) || !(bounds[0] < bounds[1])) {
        throw ConfigError("density file: 'support' must be [lower, upper] with finite lower < upper");
    }
    const SupportSpec support(bounds[0], bounds[1]);
    const bool has_table = j.contains("tabulated");
    const bool has_poly = j.contains("piecewise_polynomial");
    if (has_table == has_poly) {
        throw ConfigError("density file: give exactly one of 'tabulated' or 'piecewise_polynomial'");
    }
    return has_table ? detail::tabulated(name, support, j.at("tabulated"))
                     : detail::polynomial(name, support, j.at("piecewise_polynomial"));
}

inline SourceDistribution load_density(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open density file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_density(buffer.str());
}

}  // namespace cheaptalk::io
