#pragma once

// Hand-built single-letter schemes evaluated on tables: compatible functions
// for user pairs, the three-message split construction, and vector schemes
// that condition the message on one dataset coordinate.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "demand_expr.hpp"
#include "entropy.hpp"
#include "errors.hpp"
#include "instance.hpp"
#include "rates.hpp"

namespace cbcast {

namespace detail {

struct Conflict {
    TupleId a = 0;
    TupleId b = 0;
};

// First pair of support tuples with equal key but different value.
template <typename KeyFn, typename ValueFn>
std::optional<Conflict> first_conflict(const std::vector<TupleId>& verts, KeyFn key, ValueFn value) {
    std::unordered_map<std::uint64_t, std::pair<int, TupleId>> seen;
    for (TupleId t : verts) {
        const auto k = key(t);
        const int v = value(t);
        auto [it, fresh] = seen.try_emplace(k, v, t);
        if (!fresh && it->second.first != v) return Conflict{it->second.second, t};
    }
    return std::nullopt;
}

inline double table_entropy(const Instance& inst, const DemandTable& z, double base) {
    std::vector<double> hist(static_cast<std::size_t>(inst.q), 0.0);
    for (TupleId t : support(inst)) hist.at(static_cast<std::size_t>(z(t))) += inst.pmf[t];
    return entropy_of_weights(hist, base);
}

} // namespace detail

/// Decode table of one user: (message value, side key) -> demand value.
using DecodeTable = std::map<std::pair<int, std::uint64_t>, int>;

/// Decode table for user `i` from message z, or nullopt when (z, S_i) does
/// not determine f_i on the support.
inline std::optional<DecodeTable> compatible_decoder(const Instance& inst, const DemandTable& z, std::size_t i) {
    DecodeTable table;
    const auto& f = inst.users.at(i).demand;
    for (TupleId t : support(inst)) {
        const auto key = std::make_pair(z(t), side_key(inst, i, t));
        auto [it, fresh] = table.try_emplace(key, f(t));
        if (!fresh && it->second != f(t)) return std::nullopt;
    }
    return table;
}

inline bool is_compatible(const Instance& inst, const DemandTable& z, std::size_t i) {
    return compatible_decoder(inst, z, i).has_value();
}

enum class CompatSearch { linear, exhaustive };

inline constexpr double compat_exhaustive_guard = 1e7;

struct CompatibleFunction {
    std::size_t user_a = 0, user_b = 0;     // 0-based
    DemandTable z;
    std::vector<int> coefficients;          // linear mode only
    std::string description;
    double entropy = 0.0;
    DecodeTable decoder_a, decoder_b;
};

inline std::string linear_form(const std::vector<int>& c) {
    std::string s;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0) continue;
        if (!s.empty()) s += " + ";
        if (c[j] != 1) s += std::to_string(c[j]);
        s += "X" + std::to_string(j + 1);
    }
    return s.empty() ? "0" : s;
}

inline DemandTable linear_table(const TupleSpace& sp, const std::vector<int>& c) {
    DemandTable z;
    z.values.resize(static_cast<std::size_t>(sp.size()));
    for (TupleId t = 0; t < z.values.size(); ++t) {
        int acc = 0;
        for (int j = 1; j <= sp.n; ++j) acc = (acc + c[j - 1] * sp.digit(t, j)) % sp.q;
        z.values[t] = acc;
    }
    return z;
}

/// Smallest-entropy Z with both users able to recover their demands from
/// (Z, own side information). Ties keep the first candidate in enumeration
/// order (coefficient vectors or tables in lexicographic order).
inline std::optional<CompatibleFunction> find_compatible_function(const Instance& inst, std::size_t a, std::size_t b,
                                                                  CompatSearch mode, double base) {
    require_valid(inst);
    if (a == b || a >= inst.users.size() || b >= inst.users.size())
        throw std::invalid_argument("compatible-function search needs two distinct users");
    const auto sp = inst.space();
    std::optional<CompatibleFunction> best;
    auto consider = [&](DemandTable z, std::vector<int> coeffs, std::string desc) {
        auto da = compatible_decoder(inst, z, a);
        if (!da) return;
        auto db = compatible_decoder(inst, z, b);
        if (!db) return;
        const double h = detail::table_entropy(inst, z, base);
        if (best && h >= best->entropy - 1e-12) return;
        best = CompatibleFunction{a, b, std::move(z), std::move(coeffs), std::move(desc), h, std::move(*da), std::move(*db)};
    };

    if (mode == CompatSearch::linear) {
        std::vector<int> c(static_cast<std::size_t>(inst.n_datasets), 0);
        for (;;) {
            consider(linear_table(sp, c), c, linear_form(c));
            std::size_t k = c.size();
            while (k > 0 && ++c[k - 1] == inst.q) c[--k] = 0;
            if (k == 0) break;
        }
    } else {
        const double space = std::pow(static_cast<double>(inst.q), static_cast<double>(sp.size()));
        if (space > compat_exhaustive_guard)
            throw GuardError("exhaustive compatible-function search needs q^(q^N) <= 1e7");
        DemandTable z;
        z.values.assign(static_cast<std::size_t>(sp.size()), 0);
        for (;;) {
            consider(z, {}, "table");
            std::size_t k = z.values.size();
            while (k > 0 && ++z.values[k - 1] == inst.q) z.values[--k] = 0;
            if (k == 0) break;
        }
        if (best) {
            std::string s;
            for (int v : best->z.values) s += std::to_string(v);
            best->description = "table " + s;
        }
    }
    return best;
}

/// Sum of the entropies of several messages sent one after another.
inline RateReport separate_messages_rate(const Instance& inst, const std::vector<DemandTable>& messages, double base) {
    double total = 0.0;
    std::vector<double> terms;
    for (const auto& z : messages) {
        terms.push_back(detail::table_entropy(inst, z, base));
        total += terms.back();
    }
    auto r = make_report("separate-messages", total, base, inst.q);
    r.terms = std::move(terms);
    r.method = "sum of full-length message entropies";
    return r;
}

/// Three-user split construction from pairwise compatible functions
/// z12 (users 1,2), z23 (users 2,3), z13 (users 1,3). The block is cut in
/// two halves: z12 on the first half, z23 on the second, and the sum of z13
/// over both halves. User 1 gets z13 on the first half from (z12, S_1);
/// user 3 gets z13 on the second half from (z23, S_3).
inline RateReport split_scheme_rate(const Instance& inst, const DemandTable& z12, const DemandTable& z23,
                                    const DemandTable& z13, double base) {
    require_valid(inst);
    if (inst.users.size() != 3) throw std::invalid_argument("split scheme needs exactly three users");
    const auto verts = support(inst);
    std::vector<Violation> vs;
    auto need = [&](const DemandTable& z, std::size_t user, const char* what) {
        if (!is_compatible(inst, z, user))
            vs.push_back({"not-compatible", std::string(what) + " does not serve user " + std::to_string(user + 1)});
    };
    need(z12, 0, "z12");
    need(z12, 1, "z12");
    need(z23, 1, "z23");
    need(z23, 2, "z23");
    need(z13, 0, "z13");
    need(z13, 2, "z13");
    const auto sp = inst.space();
    auto derive = [&](const DemandTable& from, std::size_t user, const char* what) {
        const auto classes = side_class_count(inst, user);
        auto c = detail::first_conflict(
            verts, [&](TupleId t) { return static_cast<std::uint64_t>(from(t)) * classes + side_key(inst, user, t); },
            [&](TupleId t) { return z13(t); });
        if (c)
            vs.push_back({"not-derivable", std::string("z13 is not a function of (") + what + ", S_" +
                                               std::to_string(user + 1) + "): " + sp.format(c->a) + " vs " +
                                               sp.format(c->b)});
    };
    derive(z12, 0, "z12");
    derive(z23, 2, "z23");
    if (!vs.empty()) throw ValidationError(std::move(vs));

    std::vector<double> p(static_cast<std::size_t>(inst.q), 0.0);
    for (TupleId t : verts) p[static_cast<std::size_t>(z13(t))] += inst.pmf[t];
    std::vector<double> sum(p.size(), 0.0);
    for (std::size_t u = 0; u < p.size(); ++u)
        for (std::size_t v = 0; v < p.size(); ++v) sum[(u + v) % p.size()] += p[u] * p[v];

    const std::vector<double> terms{0.5 * detail::table_entropy(inst, z12, base),
                                    0.5 * detail::table_entropy(inst, z23, base), 0.5 * entropy_of_weights(sum, base)};
    auto r = make_report("split", terms[0] + terms[1] + terms[2], base, inst.q);
    r.terms = terms;
    r.method = "half-length z12, half-length z23, half-length sum of z13 over both halves";
    return r;
}

struct VectorCell {
    std::vector<int> values;                  // values of the conditioning coordinate
    std::vector<std::string> message;         // component expressions
    std::vector<DemandTable> tables;          // expanded components
};

struct VectorScheme {
    int coordinate = 1;                       // 1-based
    std::vector<VectorCell> cells;
};

/// Cell index of each value of the conditioning coordinate; throws unless
/// the cells partition F_q.
inline std::vector<int> vector_cell_of_value(const VectorScheme& s, int q) {
    std::vector<int> cell(static_cast<std::size_t>(q), -1);
    for (std::size_t k = 0; k < s.cells.size(); ++k)
        for (int v : s.cells[k].values) {
            if (v < 0 || v >= q) throw std::invalid_argument("cell value " + std::to_string(v) + " outside F_q");
            if (cell[v] >= 0) throw std::invalid_argument("cells overlap on value " + std::to_string(v));
            cell[v] = static_cast<int>(k);
        }
    for (int v = 0; v < q; ++v)
        if (cell[v] < 0) throw std::invalid_argument("value " + std::to_string(v) + " is in no cell");
    return cell;
}

/// Expands the message expressions of every cell.
inline void expand_vector_scheme(VectorScheme& s, const Instance& inst) {
    const auto sp = inst.space();
    for (auto& c : s.cells) {
        c.tables.clear();
        for (const auto& m : c.message) c.tables.push_back(expand_demand(m, sp));
    }
}

namespace detail {

inline std::uint64_t message_code(const VectorCell& c, TupleId t, int q) {
    std::uint64_t code = 0;
    for (const auto& tab : c.tables) code = code * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(tab(t));
    return code;
}

} // namespace detail

/// Per-cell decodability: within each cell, every user's demand is a
/// function of (cell message, own side information).
inline std::vector<Violation> vector_scheme_violations(const Instance& inst, const VectorScheme& s) {
    std::vector<Violation> vs;
    if (s.coordinate < 1 || s.coordinate > inst.n_datasets) {
        vs.push_back({"coord-out-of-range", "conditioning coordinate " + std::to_string(s.coordinate)});
        return vs;
    }
    std::vector<int> cell_of;
    try {
        cell_of = vector_cell_of_value(s, inst.q);
    } catch (const std::invalid_argument& e) {
        vs.push_back({"cells", e.what()});
        return vs;
    }
    const auto sp = inst.space();
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
        std::vector<TupleId> verts;
        for (TupleId t : support(inst))
            if (cell_of[sp.digit(t, s.coordinate)] == static_cast<int>(k)) verts.push_back(t);
        for (std::size_t i = 0; i < inst.users.size(); ++i) {
            const auto classes = side_class_count(inst, i);
            auto c = detail::first_conflict(
                verts,
                [&](TupleId t) { return detail::message_code(s.cells[k], t, inst.q) * classes + side_key(inst, i, t); },
                [&](TupleId t) { return inst.users[i].demand(t); });
            if (c)
                vs.push_back({"cell-not-decodable", "user " + std::to_string(i + 1) + ", cell " + std::to_string(k) +
                                                        ": " + sp.format(c->a) + " vs " + sp.format(c->b)});
        }
    }
    return vs;
}

/// sum_cells P(cell) H(message | cell). The cost of telling users which
/// cell is active is not included.
inline RateReport vector_scheme_rate(const Instance& inst, const VectorScheme& s, double base) {
    require_valid(inst);
    auto vs = vector_scheme_violations(inst, s);
    if (!vs.empty()) throw ValidationError(std::move(vs));
    const auto cell_of = vector_cell_of_value(s, inst.q);
    const auto sp = inst.space();
    double total = 0.0;
    std::vector<double> terms;
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
        std::map<std::uint64_t, double> hist;
        double pc = 0.0;
        for (TupleId t : support(inst)) {
            if (cell_of[sp.digit(t, s.coordinate)] != static_cast<int>(k)) continue;
            hist[detail::message_code(s.cells[k], t, inst.q)] += inst.pmf[t];
            pc += inst.pmf[t];
        }
        std::vector<double> w;
        for (const auto& [code, p] : hist) w.push_back(p);
        const double h = entropy_of_weights(w, base);
        terms.push_back(h);
        total += pc * h;
    }
    auto r = make_report("vector", total, base, inst.q);
    r.terms = std::move(terms);
    r.method = "sum over cells of P(cell) * H(message | cell); terms are per-cell entropies";
    r.notes.push_back("cell identity is not charged");
    return r;
}

/// Message partition of the support induced by a vector scheme: tuples share
/// a part iff they are in the same cell with the same message value.
inline std::vector<std::vector<TupleId>> vector_scheme_partition(const Instance& inst, const VectorScheme& s) {
    const auto cell_of = vector_cell_of_value(s, inst.q);
    const auto sp = inst.space();
    std::map<std::pair<int, std::uint64_t>, std::vector<TupleId>> parts;
    for (TupleId t : support(inst)) {
        const int k = cell_of[sp.digit(t, s.coordinate)];
        parts[{k, detail::message_code(s.cells[k], t, inst.q)}].push_back(t);
    }
    std::vector<std::vector<TupleId>> out;
    for (auto& [key, cell] : parts) out.push_back(std::move(cell));
    return out;
}

} // namespace cbcast
