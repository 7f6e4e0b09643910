#pragma once

// JSON network files:
//   { "n": 2,
//     "A": [[0, 0.5], [0.5, 0]],   // A[i][j] = share of input i in sector j
//     "alpha0": [0.5, 0.5],
//     "kappa": [0.5, 0.5],
//     "names": ["farm", "factory"] }  // optional

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "domarnet/network.hpp"

namespace domarnet {

namespace detail {

inline double json_number(const nlohmann::json& v, const std::string& field) {
    if (!v.is_number()) throw Error(ErrorCode::ParseError, "field `" + field + "` must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "field `" + field + "` is not finite");
    return x;
}

inline std::vector<double> json_vector(const nlohmann::json& v, const std::string& field) {
    if (!v.is_array()) throw Error(ErrorCode::ParseError, "field `" + field + "` must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(json_number(v[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace detail

/// Parses network JSON without validating share invariants (see validate_network).
inline NetworkData parse_network_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "network file must hold a JSON object");
    for (const char* key : {"n", "A", "alpha0", "kappa"}) {
        if (!doc.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field `") + key + "`");
    }

    NetworkData data;
    const auto& n = doc["n"];
    if (!n.is_number_integer() || n.get<long long>() < 1) {
        throw Error(ErrorCode::ParseError, "field `n` must be a positive integer");
    }
    data.n = n.get<std::size_t>();

    const auto& A = doc["A"];
    if (!A.is_array()) throw Error(ErrorCode::ParseError, "field `A` must be an array of rows");
    for (std::size_t i = 0; i < A.size(); ++i) {
        data.A.push_back(detail::json_vector(A[i], "A[" + std::to_string(i) + "]"));
    }
    data.alpha0 = detail::json_vector(doc["alpha0"], "alpha0");
    data.kappa = detail::json_vector(doc["kappa"], "kappa");

    if (doc.contains("names")) {
        const auto& names = doc["names"];
        if (!names.is_array()) throw Error(ErrorCode::ParseError, "field `names` must be an array");
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (!names[i].is_string()) {
                throw Error(ErrorCode::ParseError, "field `names[" + std::to_string(i) + "]` must be a string");
            }
            data.names.push_back(names[i].get<std::string>());
        }
    }
    return data;
}

inline ProductionNetwork load_network(const std::string& path, ValidationOptions options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open network file `" + path + "`");
    std::ostringstream buf;
    buf << in.rdbuf();
    return validate_network(parse_network_json(buf.str()), options);
}

inline nlohmann::ordered_json to_json(const ProductionNetwork& net) {
    const NetworkData d = net.data();
    nlohmann::ordered_json j;
    j["n"] = d.n;
    j["A"] = d.A;
    j["alpha0"] = d.alpha0;
    j["kappa"] = d.kappa;
    if (!d.names.empty()) j["names"] = d.names;
    return j;
}

}  // namespace domarnet
