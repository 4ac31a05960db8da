#pragma once

// Instance files are JSON:
//
//   {
//     "name": "example1_boolean",              (optional)
//     "q": 2,
//     "n_datasets": 3,
//     "pmf": "uniform" | [w_000, w_001, ...],  (weights: numbers, "0.125" or "1/8")
//     "users": [ {"side": [1], "demand": "X1 & X2 & X3"},
//                {"side": [2], "demand_table": [0, 1, ...]} ]
//   }

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "demand_expr.hpp"
#include "instance.hpp"

namespace cbcast {

namespace detail {

inline double parse_weight(const nlohmann::json& w) {
    if (w.is_number()) return w.get<double>();
    if (!w.is_string()) throw std::invalid_argument("weight must be a number or a string");
    const auto s = w.get<std::string>();
    const auto slash = s.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad weight '" + s + "'");
        return v;
    }
    const auto num = s.substr(0, slash);
    const auto den = s.substr(slash + 1);
    const double a = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument("bad weight '" + s + "'");
    const double b = std::stod(den, &used);
    if (used != den.size() || b == 0.0) throw std::invalid_argument("bad weight '" + s + "'");
    return a / b;
}

} // namespace detail

/// Builds an Instance from parsed JSON. Structural problems that prevent
/// building the instance at all (missing fields, unparsable demands) are
/// raised as a ValidationError; content problems are left for
/// validate_instance() to report.
inline Instance instance_from_json(const nlohmann::json& j) {
    std::vector<Violation> vs;
    Instance inst;
    if (!j.is_object()) throw ValidationError(std::vector<Violation>{{"malformed-file", "top level must be a JSON object"}});
    inst.name = j.value("name", std::string{});
    if (!j.contains("q") || !j["q"].is_number_integer()) vs.push_back({"missing-field", "integer field 'q' is required"});
    if (!j.contains("n_datasets") || !j["n_datasets"].is_number_integer())
        vs.push_back({"missing-field", "integer field 'n_datasets' is required"});
    if (!j.contains("users") || !j["users"].is_array()) vs.push_back({"missing-field", "array field 'users' is required"});
    if (!vs.empty()) throw ValidationError(std::move(vs));

    inst.q = j["q"].get<int>();
    inst.n_datasets = j["n_datasets"].get<int>();
    if (inst.q < 2 || inst.n_datasets < 1) {
        // Defer to validate_instance for the precise message.
        auto own = validate_instance(inst);
        throw ValidationError(std::move(own));
    }
    const auto space = inst.space();
    try {
        (void)space.size();
    } catch (const std::length_error&) {
        throw ValidationError(std::vector<Violation>{{"too-many-tuples", "q^N exceeds the dense-table limit"}});
    }

    const auto& pmf = j.contains("pmf") ? j["pmf"] : nlohmann::json("uniform");
    if (pmf.is_string() && pmf.get<std::string>() == "uniform") {
        inst.pmf = uniform_pmf(inst.q, inst.n_datasets);
    } else if (pmf.is_array()) {
        for (const auto& w : pmf) {
            try {
                inst.pmf.push_back(detail::parse_weight(w));
            } catch (const std::exception& e) {
                vs.push_back({"pmf-weight", e.what()});
            }
        }
    } else {
        vs.push_back({"pmf-format", "'pmf' must be \"uniform\" or an array of weights"});
    }

    std::size_t i = 0;
    for (const auto& ju : j["users"]) {
        ++i;
        if (!ju.is_object()) {
            vs.push_back({"user-format", "user " + std::to_string(i) + " must be an object"});
            continue;
        }
        const auto who = "user " + std::to_string(i);
        UserSpec u;
        if (ju.contains("side")) {
            if (!ju["side"].is_array()) {
                vs.push_back({"side-format", who + " 'side' must be an array of indices"});
            } else {
                for (const auto& c : ju["side"]) {
                    if (c.is_number_integer()) u.side_coords.push_back(c.get<int>());
                    else vs.push_back({"side-format", who + " side index is not an integer"});
                }
            }
        }
        if (ju.contains("side_function"))
            vs.push_back({"side-function-unsupported",
                           who + " side information must be a subset of datasets, not a function of them"});
        if (ju.contains("demand") && !ju["demand"].is_string()) {
            vs.push_back({"demand-format", who + " 'demand' must be an expression string"});
        } else if (ju.contains("demand")) {
            u.expression = ju["demand"].get<std::string>();
            try {
                u.demand = expand_demand(u.expression, space);
            } catch (const ParseError& e) {
                vs.push_back({"demand-parse-error", who + ": " + e.what()});
            }
        } else if (ju.contains("demand_table") && ju["demand_table"].is_array()) {
            for (const auto& v : ju["demand_table"]) {
                if (v.is_number_integer()) u.demand.values.push_back(v.get<int>());
                else vs.push_back({"demand-format", who + " demand_table entry is not an integer"});
            }
        } else {
            vs.push_back({"missing-field", who + " needs 'demand' or 'demand_table'"});
        }
        inst.users.push_back(std::move(u));
    }
    if (!vs.empty()) throw ValidationError(std::move(vs));
    return inst;
}

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(std::vector<Violation>{{"file-not-found", "cannot open '" + path + "'"}});
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::vector<Violation>{{"malformed-file", e.what()}});
    }
    return instance_from_json(j);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    if (!inst.name.empty()) j["name"] = inst.name;
    j["q"] = inst.q;
    j["n_datasets"] = inst.n_datasets;
    j["pmf"] = inst.pmf;
    j["users"] = nlohmann::json::array();
    for (const auto& u : inst.users) {
        nlohmann::json ju;
        ju["side"] = u.side_coords;
        if (!u.expression.empty()) ju["demand"] = u.expression;
        else ju["demand_table"] = u.demand.values;
        j["users"].push_back(ju);
    }
    return j;
}

} // namespace cbcast
