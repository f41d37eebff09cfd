#pragma once

// Deterministic text output. JSON structure is held in nlohmann::ordered_json
// (insertion order is the field order); reals are printed with 17
// significant digits and non-finite reals become null.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>

namespace cheaptalk::io {

using Json = nlohmann::ordered_json;

inline std::string format_real(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write(std::string& out, const Json& j, int indent, int depth) {
    const auto newline = [&](int d) {
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(key).dump();
                out += ": ";
                write(out, value, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                write(out, value, indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? format_real(x) : "null";
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace detail

/// Pretty-printed JSON with a trailing newline.
inline std::string dump(const Json& j, int indent = 2) {
    std::string out;
    detail::write(out, j, indent, 0);
    out += '\n';
    return out;
}

}  // namespace cheaptalk::io
