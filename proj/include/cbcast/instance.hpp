#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tuple_space.hpp"

namespace cbcast {

/// Tolerance on the total mass of a source PMF.
inline constexpr double pmf_sum_tolerance = 1e-12;

/// Extensional demand f_i: F_q^N -> F_q, one entry per tuple in lexicographic order.
struct DemandTable {
    std::vector<int> values;

    int operator()(TupleId t) const { return values[t]; }
    bool operator==(const DemandTable&) const = default;
};

struct UserSpec {
    std::vector<int> side_coords;   // 1-based dataset indices forming S_i
    DemandTable demand;
    std::string expression;         // source text when the demand came from an expression
};

/// Complete problem description. Plain aggregate so malformed instances can
/// be represented and reported on by validate_instance().
struct Instance {
    std::string name;
    int q = 2;
    int n_datasets = 1;
    std::vector<double> pmf;        // q^N weights, lexicographic tuple order
    std::vector<UserSpec> users;

    TupleSpace space() const { return TupleSpace{q, n_datasets}; }
    std::size_t user_count() const { return users.size(); }
    std::size_t tuple_count() const { return static_cast<std::size_t>(space().size()); }
};

inline bool is_prime(int q) {
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

/// Checks every structural invariant of an instance. Never throws on bad
/// content; each problem becomes one Violation.
inline std::vector<Violation> validate_instance(const Instance& inst) {
    std::vector<Violation> out;
    if (inst.q < 2) {
        out.push_back({"field-order-too-small", "q must be at least 2, got " + std::to_string(inst.q)});
        return out;
    }
    if (!is_prime(inst.q))
        out.push_back({"field-order-not-prime",
                       "modular arithmetic over q=" + std::to_string(inst.q) + " is not a field"});
    if (inst.n_datasets < 1) {
        out.push_back({"no-datasets", "N must be at least 1"});
        return out;
    }
    std::size_t count = 0;
    try {
        count = inst.tuple_count();
    } catch (const std::length_error&) {
        out.push_back({"too-many-tuples", "q^N exceeds the dense-table limit"});
        return out;
    }

    if (inst.pmf.size() != count) {
        out.push_back({"pmf-size", "expected " + std::to_string(count) + " weights, got " +
                                       std::to_string(inst.pmf.size())});
    } else {
        double sum = 0.0;
        bool negative = false;
        for (double p : inst.pmf) {
            if (!(p >= 0.0) || !std::isfinite(p)) negative = true;
            sum += p;
        }
        if (negative) out.push_back({"pmf-negative", "weights must be finite and non-negative"});
        if (!(std::abs(sum - 1.0) <= pmf_sum_tolerance))
            out.push_back({"pmf-not-normalized", "weights sum to " + std::to_string(sum)});
    }

    if (inst.users.empty()) out.push_back({"no-users", "K must be at least 1"});
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        const auto& u = inst.users[i];
        const auto who = "user " + std::to_string(i + 1);
        std::set<int> seen;
        for (int c : u.side_coords) {
            if (c < 1 || c > inst.n_datasets)
                out.push_back({"coord-out-of-range", who + " side coordinate " + std::to_string(c) +
                                                         " not in [1, " + std::to_string(inst.n_datasets) + "]"});
            if (!seen.insert(c).second)
                out.push_back({"coord-duplicate", who + " repeats side coordinate " + std::to_string(c)});
        }
        if (u.demand.values.size() != count) {
            out.push_back({"demand-size", who + " demand has " + std::to_string(u.demand.values.size()) +
                                              " entries, expected " + std::to_string(count)});
        } else {
            for (int v : u.demand.values) {
                if (v < 0 || v >= inst.q) {
                    out.push_back({"demand-out-of-range", who + " demand value " + std::to_string(v) +
                                                              " outside F_" + std::to_string(inst.q)});
                    break;
                }
            }
        }
    }
    return out;
}

inline void require_valid(const Instance& inst) {
    auto vs = validate_instance(inst);
    if (!vs.empty()) throw ValidationError(std::move(vs));
}

/// Tuples with strictly positive probability, in lexicographic order.
inline std::vector<TupleId> support(const Instance& inst) {
    std::vector<TupleId> out;
    for (std::size_t t = 0; t < inst.pmf.size(); ++t)
        if (inst.pmf[t] > 0.0) out.push_back(static_cast<TupleId>(t));
    return out;
}

/// Mixed-radix key of the side-information coordinates of `t` for user `i`.
/// Two tuples share a key iff they agree on every coordinate of S_i.
inline std::uint64_t side_key(const Instance& inst, std::size_t i, TupleId t) {
    const auto sp = inst.space();
    std::uint64_t key = 0;
    for (int c : inst.users[i].side_coords) key = key * static_cast<std::uint64_t>(inst.q) + sp.digit(t, c);
    return key;
}

inline std::uint64_t side_class_count(const Instance& inst, std::size_t i) {
    std::uint64_t c = 1;
    for (std::size_t k = 0; k < inst.users[i].side_coords.size(); ++k) c *= static_cast<std::uint64_t>(inst.q);
    return c;
}

/// Dense class id (0..m-1, by first appearance along `vertices`) of each
/// vertex's side-information value for user `i`.
inline std::vector<std::uint32_t> side_classes(const Instance& inst, std::size_t i,
                                               const std::vector<TupleId>& vertices,
                                               std::uint32_t* class_count = nullptr) {
    std::vector<std::uint64_t> keys(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v) keys[v] = side_key(inst, i, vertices[v]);
    std::vector<std::uint64_t> uniq = keys;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<std::uint32_t> out(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v)
        out[v] = static_cast<std::uint32_t>(std::lower_bound(uniq.begin(), uniq.end(), keys[v]) - uniq.begin());
    if (class_count) *class_count = static_cast<std::uint32_t>(uniq.size());
    return out;
}

inline std::vector<double> uniform_pmf(int q, int n) {
    const auto size = TupleSpace{q, n}.size();
    return std::vector<double>(static_cast<std::size_t>(size), 1.0 / static_cast<double>(size));
}

} // namespace cbcast
