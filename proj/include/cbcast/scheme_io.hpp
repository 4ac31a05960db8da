#pragma once

// JSON forms of covers and vector schemes.
//
// Cover: {"cover": {"010": "001 010 011 100", ...}}; a vertex may instead
// map to [["<set>", weight], ...] for a probabilistic row. Sets are written
// as space-separated tuples and must be members of the family.
//
// Vector scheme: {"coordinate": 2, "cells": [{"values": [0], "message":
// ["X1 + X3"]}, ...]}.
//
// Both may carry "instance": a path relative to the file itself.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "graph.hpp"
#include "instance_io.hpp"
#include "mis.hpp"
#include "schemes.hpp"

namespace cbcast {

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(std::vector<Violation>{{"file-not-found", "cannot open '" + path + "'"}});
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::vector<Violation>{{"malformed-file", e.what()}});
    }
}

/// Path of the instance referenced by a cover or scheme file, if any.
inline std::string referenced_instance(const nlohmann::json& j, const std::string& file_path) {
    if (!j.is_object() || !j.contains("instance") || !j["instance"].is_string()) return {};
    std::filesystem::path p = j["instance"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(file_path).parent_path() / p;
    return p.string();
}

namespace detail {

inline std::size_t set_index(const CharGraph& g, const MISFamily& fam, const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> names;
    std::string tok;
    while (in >> tok) names.push_back(tok);
    const auto vs = vertices_by_name(g, names);
    const auto it = std::lower_bound(fam.sets.begin(), fam.sets.end(), vs);
    if (it == fam.sets.end() || *it != vs) throw std::invalid_argument("{" + text + "} is not a set of the family");
    return static_cast<std::size_t>(it - fam.sets.begin());
}

} // namespace detail

inline CoverDistribution cover_from_json(const nlohmann::json& j, const CharGraph& g, const MISFamily& fam) {
    if (!j.is_object() || !j.contains("cover") || !j["cover"].is_object())
        throw ValidationError(std::vector<Violation>{{"missing-field", "object field 'cover' is required"}});
    CoverDistribution c;
    c.rows.assign(fam.vertex_count, std::vector<double>(fam.sets.size(), 0.0));
    std::vector<bool> seen(fam.vertex_count, false);
    std::vector<Violation> vs;
    for (const auto& [name, value] : j["cover"].items()) {
        try {
            const auto v = vertices_by_name(g, {name}).front();
            seen[v] = true;
            if (value.is_string()) {
                c.rows[v][detail::set_index(g, fam, value.get<std::string>())] += 1.0;
            } else if (value.is_array()) {
                for (const auto& e : value) {
                    if (!e.is_array() || e.size() != 2 || !e[0].is_string())
                        throw std::invalid_argument("entry must be [\"<set>\", weight]");
                    c.rows[v][detail::set_index(g, fam, e[0].get<std::string>())] += detail::parse_weight(e[1]);
                }
            } else {
                throw std::invalid_argument("value must be a set or a list of [set, weight]");
            }
        } catch (const std::exception& e) {
            vs.push_back({"cover-entry", name + ": " + e.what()});
        }
    }
    for (VertexId v = 0; v < fam.vertex_count; ++v)
        if (!seen[v]) vs.push_back({"cover-missing-vertex", g.vertex_name(v)});
    if (!vs.empty()) throw ValidationError(std::move(vs));
    auto rep = validate_cover(fam, c);
    if (!rep.ok()) throw ValidationError(rep.violations);
    return c;
}

inline nlohmann::json cover_to_json(const CoverDistribution& c, const CharGraph& g, const MISFamily& fam) {
    auto set_text = [&](std::size_t w) {
        std::string s;
        for (VertexId v : fam.sets[w]) {
            if (!s.empty()) s += ' ';
            s += g.vertex_name(v);
        }
        return s;
    };
    nlohmann::json cover = nlohmann::json::object();
    for (VertexId v = 0; v < c.rows.size(); ++v) {
        std::vector<std::pair<std::size_t, double>> used;
        for (std::size_t w = 0; w < c.rows[v].size(); ++w)
            if (c.rows[v][w] > 0.0) used.emplace_back(w, c.rows[v][w]);
        if (used.size() == 1 && used[0].second == 1.0) {
            cover[g.vertex_name(v)] = set_text(used[0].first);
        } else {
            auto arr = nlohmann::json::array();
            for (const auto& [w, p] : used) arr.push_back({set_text(w), p});
            cover[g.vertex_name(v)] = arr;
        }
    }
    return {{"cover", cover}};
}

inline VectorScheme vector_scheme_from_json(const nlohmann::json& j, const Instance& inst) {
    if (!j.is_object() || !j.contains("coordinate") || !j["coordinate"].is_number_integer() || !j.contains("cells") ||
        !j["cells"].is_array())
        throw ValidationError(std::vector<Violation>{{"missing-field", "'coordinate' and 'cells' are required"}});
    VectorScheme s;
    s.coordinate = j["coordinate"].get<int>();
    for (const auto& jc : j["cells"]) {
        VectorCell c;
        try {
            c.values = jc.at("values").get<std::vector<int>>();
            c.message = jc.at("message").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::vector<Violation>{{"cell-format", e.what()}});
        }
        s.cells.push_back(std::move(c));
    }
    try {
        expand_vector_scheme(s, inst);
    } catch (const ParseError& e) {
        throw ValidationError(std::vector<Violation>{{"demand-parse-error", e.what()}});
    }
    return s;
}

} // namespace cbcast
