#pragma once

// Exhaustive search over deterministic single-shot messages, i.e. partitions
// of the support whose cells are independent in the union graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "entropy.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "rates.hpp"

namespace cbcast {

/// Cells of source tuples, each sorted; cells ordered by first tuple.
struct Partition {
    std::vector<std::vector<TupleId>> cells;

    void normalize() {
        for (auto& c : cells) std::sort(c.begin(), c.end());
        cells.erase(std::remove_if(cells.begin(), cells.end(), [](const auto& c) { return c.empty(); }), cells.end());
        std::sort(cells.begin(), cells.end());
    }
};

inline std::string format_partition(const Partition& p, const TupleSpace& sp) {
    std::string out;
    for (const auto& c : p.cells) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (k) out += ' ';
            out += sp.format(c[k]);
        }
        out += '\n';
    }
    return out;
}

inline Partition parse_partition(const std::string& text, const TupleSpace& sp) {
    Partition p;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<TupleId> cell;
        std::string tok;
        while (ls >> tok) cell.push_back(sp.parse(tok));
        if (!cell.empty()) p.cells.push_back(std::move(cell));
    }
    p.normalize();
    return p;
}

/// Problems that keep a partition from covering the support exactly once.
inline std::vector<Violation> partition_structure_violations(const Instance& inst, const Partition& p) {
    std::vector<Violation> vs;
    const auto sp = inst.space();
    std::vector<int> hits(inst.tuple_count(), 0);
    for (const auto& c : p.cells)
        for (TupleId t : c) {
            if (t >= hits.size()) {
                vs.push_back({"tuple-out-of-range", std::to_string(t)});
                continue;
            }
            if (inst.pmf[t] <= 0.0) vs.push_back({"not-in-support", sp.format(t)});
            if (++hits[t] == 2) vs.push_back({"duplicate-tuple", sp.format(t)});
        }
    for (TupleId t : support(inst))
        if (hits[t] == 0) vs.push_back({"uncovered-tuple", sp.format(t)});
    return vs;
}

struct DecodeCheck {
    bool ok = true;
    std::size_t user = 0;      // 0-based
    std::size_t cell = 0;
    TupleId a = 0, b = 0;
    std::string message;
};

/// Every user can recover its demand from (cell, own side information):
/// f_i is constant on each cell intersected with each side class.
inline DecodeCheck decode_check(const Instance& inst, const Partition& p) {
    auto vs = partition_structure_violations(inst, p);
    if (!vs.empty()) throw ValidationError(std::move(vs));
    const auto sp = inst.space();
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        const auto& f = inst.users[i].demand;
        for (std::size_t k = 0; k < p.cells.size(); ++k) {
            const auto& cell = p.cells[k];
            for (std::size_t x = 0; x < cell.size(); ++x)
                for (std::size_t y = x + 1; y < cell.size(); ++y) {
                    const TupleId a = cell[x], b = cell[y];
                    if (side_key(inst, i, a) == side_key(inst, i, b) && f(a) != f(b)) {
                        DecodeCheck r{false, i, k, a, b, {}};
                        r.message = "user " + std::to_string(i + 1) + " cannot separate " + sp.format(a) + " and " +
                                    sp.format(b) + " in cell " + std::to_string(k);
                        return r;
                    }
                }
        }
    }
    return {};
}

inline bool cells_independent(const CharGraph& g, const Partition& p) {
    for (const auto& c : p.cells) {
        std::vector<VertexId> vs;
        for (TupleId t : c) {
            auto v = g.find(t);
            if (!v) throw std::out_of_range("tuple is not a vertex of " + g.label());
            vs.push_back(*v);
        }
        if (!is_independent(g, vs)) return false;
    }
    return true;
}

enum class OracleObjective { message_entropy, max_conditional };

inline const char* to_string(OracleObjective o) {
    return o == OracleObjective::message_entropy ? "H(M)" : "max_i H(M|S_i)";
}

/// Objective value of a partition through the entropy kit.
inline double evaluate_partition(const Instance& inst, const Partition& p, OracleObjective obj, double base) {
    auto vs = partition_structure_violations(inst, p);
    if (!vs.empty()) throw ValidationError(std::move(vs));
    const auto verts = support(inst);
    std::vector<std::vector<double>> channel(verts.size(), std::vector<double>(p.cells.size(), 0.0));
    for (std::size_t k = 0; k < p.cells.size(); ++k)
        for (TupleId t : p.cells[k])
            channel[static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), t) - verts.begin())][k] = 1.0;
    const auto joint = push_channel(source_pmf(inst), channel, "M");
    if (obj == OracleObjective::message_entropy) return entropy(joint, {"M"}, base);
    double worst = 0.0;
    for (const auto& u : inst.users)
        worst = std::max(worst, conditional_entropy(joint, {"M"}, dataset_axes(u.side_coords), base));
    return worst;
}

inline constexpr std::size_t oracle_support_guard = 12;

struct OracleResult {
    RateReport report;
    Partition best;
    std::uint64_t valid_partitions = 0;
};

using PartitionVisitor = std::function<void(const Partition&, double)>;

/// Exact minimum of the objective over partitions of the support into
/// independent sets of `g` (the union graph). Partitions are generated as
/// restricted growth strings; a vertex may only join a cell it has no edge
/// into. `visit` sees every valid partition with its value.
inline OracleResult oracle_search(const Instance& inst, const CharGraph& g, OracleObjective obj, double base,
                                  const PartitionVisitor& visit = {}) {
    require_valid(inst);
    check_base(base);
    const auto verts = support(inst);
    if (g.block_length() != 1 || g.tuples() != verts)
        throw std::invalid_argument("oracle needs the union graph on the instance support");
    const std::size_t nv = verts.size();
    if (nv > oracle_support_guard)
        throw GuardError("oracle search is limited to " + std::to_string(oracle_support_guard) + " support tuples (got " +
                         std::to_string(nv) + ")");

    const double inv_log = 1.0 / std::log(base);
    std::vector<double> prob(nv);
    for (std::size_t v = 0; v < nv; ++v) prob[v] = inst.pmf[verts[v]];
    std::vector<std::vector<std::uint32_t>> cls;
    std::vector<std::uint32_t> ncls;
    std::vector<std::vector<double>> class_prob;
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        std::uint32_t c = 0;
        cls.push_back(side_classes(inst, i, verts, &c));
        ncls.push_back(c);
        class_prob.emplace_back(c, 0.0);
        for (std::size_t v = 0; v < nv; ++v) class_prob.back()[cls.back()[v]] += prob[v];
    }

    std::vector<std::uint32_t> label(nv, 0);
    std::vector<std::vector<VertexId>> members;
    std::vector<double> scratch;
    auto value = [&](std::size_t cells) {
        if (obj == OracleObjective::message_entropy) {
            scratch.assign(cells, 0.0);
            for (std::size_t v = 0; v < nv; ++v) scratch[label[v]] += prob[v];
            double h = 0.0;
            for (double p : scratch)
                if (p > 0.0) h -= p * std::log(p);
            return std::max(0.0, h * inv_log);
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < cls.size(); ++i) {
            scratch.assign(cells * ncls[i], 0.0);
            for (std::size_t v = 0; v < nv; ++v) scratch[label[v] * ncls[i] + cls[i][v]] += prob[v];
            double h = 0.0;
            for (std::size_t k = 0; k < scratch.size(); ++k)
                if (scratch[k] > 0.0) h -= scratch[k] * std::log(scratch[k] / class_prob[i][k % ncls[i]]);
            worst = std::max(worst, h * inv_log);
        }
        return std::max(0.0, worst);
    };
    auto to_partition = [&] {
        Partition p;
        p.cells.resize(members.size());
        for (std::size_t k = 0; k < members.size(); ++k)
            for (VertexId v : members[k]) p.cells[k].push_back(verts[v]);
        return p;
    };

    OracleResult res;
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t)> place = [&](std::size_t v) {
        if (v == nv) {
            ++res.valid_partitions;
            const double val = value(members.size());
            if (visit) visit(to_partition(), val);
            if (val < best - 1e-12) {
                best = val;
                res.best = to_partition();
            }
            return;
        }
        for (std::size_t k = 0; k < members.size(); ++k) {
            bool free = true;
            for (VertexId u : members[k])
                if (g.adjacent(u, static_cast<VertexId>(v))) {
                    free = false;
                    break;
                }
            if (!free) continue;
            label[v] = static_cast<std::uint32_t>(k);
            members[k].push_back(static_cast<VertexId>(v));
            place(v + 1);
            members[k].pop_back();
        }
        label[v] = static_cast<std::uint32_t>(members.size());
        members.push_back({static_cast<VertexId>(v)});
        place(v + 1);
        members.pop_back();
    };
    if (nv == 0) throw std::invalid_argument("empty support");
    place(0);

    res.best.normalize();
    auto r = make_report(obj == OracleObjective::message_entropy ? "oracle-H(M)" : "oracle-max-conditional",
                         evaluate_partition(inst, res.best, obj, base), base, inst.q);
    r.method = std::string("exhaustive search over independent-set partitions, objective ") + to_string(obj);
    r.witness = format_partition(res.best, inst.space());
    r.notes.push_back(std::to_string(res.valid_partitions) + " valid partitions evaluated");
    res.report = std::move(r);
    return res;
}

} // namespace cbcast
