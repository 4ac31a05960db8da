#pragma once

// CSV output for rate reports and simulation traces. Numbers use 6 decimals;
// list-valued fields are ';'-separated inside one cell; cells containing
// commas, quotes or newlines are quoted.

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coding_sim.hpp"
#include "rates.hpp"

namespace cbcast {

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

/// "1.500000 bits"
inline std::string format_value(const RateReport& r) { return fixed6(r.value) + " " + r.unit; }

namespace csv {

inline std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out += ',';
        out += quote(cells[k]);
    }
    return out + '\n';
}

/// Parses RFC-4180 style text into rows of cells.
inline std::vector<std::vector<std::string>> parse(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false, any = false;
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    cell += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n') {
            row.push_back(std::move(cell));
            cell.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            cell += c;
            any = true;
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quoted CSV cell");
    if (any) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ';';
        out += fixed6(v[k]);
    }
    return out;
}

inline std::string join_list(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ';';
        out += v[k];
    }
    return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::string cur;
    for (char c : s) {
        if (c == ';') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

} // namespace csv

inline const std::vector<std::string>& report_csv_header() {
    static const std::vector<std::string> h{"name", "value", "unit", "base", "value_bits", "per_user", "terms",
                                            "witness", "method", "notes"};
    return h;
}

inline std::string report_csv_row(const RateReport& r) {
    return csv::join_row({r.name, fixed6(r.value), r.unit, fixed6(r.base), fixed6(r.value_bits),
                          csv::join_list(r.per_user), csv::join_list(r.terms), r.witness, r.method,
                          csv::join_list(r.notes)});
}

inline std::string reports_to_csv(const std::vector<RateReport>& reports) {
    std::string out = csv::join_row(report_csv_header());
    for (const auto& r : reports) out += report_csv_row(r);
    return out;
}

inline std::vector<RateReport> reports_from_csv(const std::string& text) {
    const auto rows = csv::parse(text);
    if (rows.empty() || rows[0] != report_csv_header()) throw std::invalid_argument("missing report CSV header");
    std::vector<RateReport> out;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& c = rows[k];
        if (c.size() != report_csv_header().size())
            throw std::invalid_argument("report CSV row " + std::to_string(k) + " has " + std::to_string(c.size()) +
                                        " cells");
        RateReport r;
        r.name = c[0];
        r.value = std::stod(c[1]);
        r.unit = c[2];
        r.base = std::stod(c[3]);
        r.value_bits = std::stod(c[4]);
        for (const auto& s : csv::split_list(c[5])) r.per_user.push_back(std::stod(s));
        for (const auto& s : csv::split_list(c[6])) r.terms.push_back(std::stod(s));
        r.witness = c[7];
        r.method = c[8];
        r.notes = csv::split_list(c[9]);
        out.push_back(std::move(r));
    }
    return out;
}

inline const char* to_string(ErrorClass e) {
    switch (e) {
    case ErrorClass::er1: return "Er1";
    case ErrorClass::er2: return "Er2";
    case ErrorClass::er3: return "Er3";
    case ErrorClass::none: break;
    }
    return "ok";
}

/// One row per kept trial, then a summary row (trial column "summary")
/// holding per-user error frequencies as "er1/er2/er3".
inline std::string simulation_to_csv(const SimSummary& s, std::size_t users) {
    std::vector<std::string> header{"trial", "n", "R_prime", "R", "l_star", "m_star", "typical_codewords"};
    for (std::size_t i = 0; i < users; ++i) header.push_back("user" + std::to_string(i + 1));
    header.push_back("source");
    std::string out = csv::join_row(header);
    const auto& c = s.config;
    for (const auto& tr : s.traces) {
        std::vector<std::string> row{std::to_string(tr.trial), std::to_string(c.n), fixed6(c.R_prime), fixed6(c.R),
                                     std::to_string(tr.l_star), std::to_string(tr.m_star),
                                     std::to_string(tr.typical_codewords)};
        for (auto e : tr.error) row.push_back(to_string(e));
        row.push_back(tr.source);
        out += csv::join_row(row);
    }
    std::vector<std::string> row{"summary", std::to_string(c.n), fixed6(c.R_prime), fixed6(c.R), "", "", ""};
    for (const auto& u : s.per_user)
        row.push_back(fixed6(s.rate(u.er1)) + "/" + fixed6(s.rate(u.er2)) + "/" + fixed6(s.rate(u.er3)));
    row.push_back("total_error=" + fixed6(s.total_error_rate()) + " trials=" + std::to_string(s.trials));
    out += csv::join_row(row);
    return out;
}

} // namespace cbcast
