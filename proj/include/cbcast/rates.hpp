#pragma once

// Achievable broadcast rates from MIS covers of the union graph, the
// Slepian-Wolf style baseline, and the two lower bounds (joint demand
// entropy and the genie-aided sum).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "entropy.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "mis.hpp"
#include "parallel.hpp"

namespace cbcast {

struct RateReport {
    std::string name;
    double value = 0.0;
    std::string unit;
    double base = 2.0;
    double value_bits = 0.0;
    std::vector<double> per_user;   // value == max(per_user) when non-empty
    std::vector<double> terms;      // additive components, when the value is a sum
    std::string witness;
    std::string method;
    std::vector<std::string> notes;
};

inline RateReport make_report(std::string name, double value, double base, int q) {
    RateReport r;
    r.name = std::move(name);
    r.value = value;
    r.base = base;
    r.unit = unit_name(base, q);
    r.value_bits = value * std::log2(base);
    return r;
}

/// Text form of a cover: one "x -> {set}" line per vertex; probabilistic
/// rows list each set with its weight.
inline std::string describe_cover(const CharGraph& g, const MISFamily& fam, const CoverDistribution& cover) {
    std::string out;
    for (VertexId v = 0; v < cover.rows.size(); ++v) {
        out += g.vertex_name(v) + " ->";
        for (std::size_t w = 0; w < cover.rows[v].size(); ++w) {
            const double p = cover.rows[v][w];
            if (p <= 0.0) continue;
            out += " " + format_set(g, fam.sets[w]);
            if (p < 1.0) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "@%.6f", p);
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

/// Cells of a deterministic cover: the vertices mapped to each used set.
inline std::string describe_partition_of_cover(const CharGraph& g, const MISFamily& fam, const CoverDistribution& cover) {
    std::string out;
    for (std::size_t w = 0; w < fam.sets.size(); ++w) {
        std::vector<VertexId> cell;
        for (VertexId v = 0; v < cover.rows.size(); ++v)
            if (cover.rows[v][w] > 0.0) cell.push_back(v);
        if (cell.empty()) continue;
        out += format_set(g, cell) + " in " + format_set(g, fam.sets[w]) + "\n";
    }
    return out;
}

/// Checks that every set used by the cover lets every user decode: on each
/// side-information class, f_i is constant over the set. Returns an empty
/// string on success, else a description of the first violation.
inline std::string cover_decodability_violation(const Instance& inst, const MISFamily& family,
                                                const CoverDistribution& cover) {
    const auto verts = support(inst);
    const auto sp = inst.space();
    std::vector<bool> used(family.sets.size(), false);
    for (const auto& row : cover.rows)
        for (std::size_t w = 0; w < row.size(); ++w)
            if (row[w] > 0.0) used[w] = true;
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        std::uint32_t classes = 0;
        const auto cls = side_classes(inst, i, verts, &classes);
        for (std::size_t w = 0; w < family.sets.size(); ++w) {
            if (!used[w]) continue;
            std::vector<int> seen(classes, -1);
            std::vector<VertexId> first(classes, 0);
            for (VertexId v : family.sets[w]) {
                const int val = inst.users[i].demand(verts[v]);
                auto& s = seen[cls[v]];
                if (s < 0) {
                    s = val;
                    first[cls[v]] = v;
                } else if (s != val) {
                    return "user " + std::to_string(i + 1) + " cannot separate " + sp.format(verts[first[cls[v]]]) +
                           " and " + sp.format(verts[v]) + " in set " + std::to_string(w);
                }
            }
        }
    }
    return {};
}

/// max_i H(W | S_i) for covers of the union graph's vertices (the support),
/// computed through the entropy kit.
inline RateReport evaluate_cover_rate(const Instance& inst, const MISFamily& family, const CoverDistribution& cover,
                                      double base) {
    auto rep = validate_cover(family, cover);
    if (!rep.ok()) throw ValidationError(rep.violations);
    const auto src = source_pmf(inst);
    if (src.outcomes().size() != family.vertex_count)
        throw std::invalid_argument("cover family does not match the instance support");
    const auto joint = push_channel(src, cover.rows, "W");
    RateReport r;
    double worst = 0.0;
    std::vector<double> per_user;
    for (const auto& u : inst.users) {
        const double h = conditional_entropy(joint, {"W"}, dataset_axes(u.side_coords), base);
        per_user.push_back(h);
        worst = std::max(worst, h);
    }
    r = make_report("cover-rate", worst, base, inst.q);
    r.per_user = std::move(per_user);
    r.method = "max_i H(W|S_i) of the supplied cover";
    return r;
}

namespace detail {

// Fast max_i H(W | S_i) for repeated evaluation inside the optimizer. Works
// on sparse rows (set index, weight) and dense (class, set) accumulators.
class CoverObjective {
public:
    CoverObjective(const Instance& inst, const MISFamily& fam, double base)
        : family_size_(fam.sets.size()), inv_log_base_(1.0 / std::log(base)) {
        const auto verts = support(inst);
        prob_.reserve(verts.size());
        for (auto t : verts) prob_.push_back(inst.pmf[t]);
        for (std::size_t i = 0; i < inst.users.size(); ++i) {
            std::uint32_t count = 0;
            classes_.push_back(side_classes(inst, i, verts, &count));
            class_counts_.push_back(count);
            class_prob_.emplace_back(count, 0.0);
            for (std::size_t v = 0; v < verts.size(); ++v) class_prob_.back()[classes_.back()[v]] += prob_[v];
            acc_.emplace_back(static_cast<std::size_t>(count) * family_size_, 0.0);
        }
    }

    using Row = std::vector<std::pair<std::uint32_t, double>>;

    std::size_t users() const { return classes_.size(); }

    double per_user(std::size_t i, const std::vector<Row>& rows) {
        auto& acc = acc_[i];
        touched_.clear();
        for (std::size_t v = 0; v < rows.size(); ++v) {
            const std::size_t base = static_cast<std::size_t>(classes_[i][v]) * family_size_;
            for (const auto& [w, p] : rows[v]) {
                const std::size_t cell = base + w;
                if (acc[cell] == 0.0) touched_.push_back(cell);
                acc[cell] += prob_[v] * p;
            }
        }
        double h = 0.0;
        for (auto cell : touched_) {
            const double pws = acc[cell];
            const double ps = class_prob_[i][cell / family_size_];
            if (pws > 0.0) h -= pws * std::log(pws / ps);
            acc[cell] = 0.0;
        }
        return std::max(0.0, h * inv_log_base_);
    }

    double operator()(const std::vector<Row>& rows) {
        ++evaluations;
        double worst = 0.0;
        for (std::size_t i = 0; i < users(); ++i) worst = std::max(worst, per_user(i, rows));
        return worst;
    }

    // (max, sum) over users; the sum breaks ties on plateaus of the max.
    struct Score {
        double max = std::numeric_limits<double>::infinity();
        double sum = std::numeric_limits<double>::infinity();
        bool better_than(const Score& o) const {
            return max < o.max - 1e-9 || (max <= o.max + 1e-9 && sum < o.sum - 1e-9);
        }
    };

    Score score(const std::vector<Row>& rows) {
        ++evaluations;
        Score s{0.0, 0.0};
        for (std::size_t i = 0; i < users(); ++i) {
            const double h = per_user(i, rows);
            s.max = std::max(s.max, h);
            s.sum += h;
        }
        return s;
    }

    std::uint64_t evaluations = 0;

private:
    std::size_t family_size_;
    double inv_log_base_;
    std::vector<double> prob_;
    std::vector<std::vector<std::uint32_t>> classes_;
    std::vector<std::uint32_t> class_counts_;
    std::vector<std::vector<double>> class_prob_;
    std::vector<std::vector<double>> acc_;
    std::vector<std::size_t> touched_;
};

inline std::vector<CoverObjective::Row> rows_from_assignment(const std::vector<std::uint32_t>& a) {
    std::vector<CoverObjective::Row> rows(a.size());
    for (std::size_t v = 0; v < a.size(); ++v) rows[v] = {{a[v], 1.0}};
    return rows;
}

inline CoverDistribution cover_from_rows(const std::vector<CoverObjective::Row>& rows, std::size_t family_size) {
    CoverDistribution c;
    c.rows.assign(rows.size(), std::vector<double>(family_size, 0.0));
    for (std::size_t v = 0; v < rows.size(); ++v)
        for (const auto& [w, p] : rows[v]) c.rows[v][w] += p;
    return c;
}

} // namespace detail

enum class SearchMode { automatic, exhaustive, heuristic };

struct OptimizerBudget {
    SearchMode mode = SearchMode::automatic;
    double exhaustive_limit = 1e6;          // product over vertices of #MISs containing the vertex
    double hard_exhaustive_limit = 1e9;     // forced exhaustive search refuses beyond this
    std::size_t restarts = 32;
    std::uint64_t max_evaluations = 5'000'000;
    std::chrono::milliseconds time_limit{60'000};
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool refine = true;
    double refine_step = 1.0 / 32.0;
};

struct AchievableResult {
    RateReport report;
    CoverDistribution witness;
    double deterministic_value = 0.0;       // best deterministic cover found
    CoverDistribution deterministic_witness;
    bool exhaustive = false;                // deterministic space fully searched
    bool refinement_improved = false;
    bool certified = false;
    bool budget_exhausted = false;
    std::uint64_t evaluations = 0;
};

/// Number of deterministic assignments x -> MIS containing x.
inline double deterministic_assignment_count(const MISFamily& fam) {
    double product = 1.0;
    for (VertexId v = 0; v < fam.vertex_count; ++v) product *= static_cast<double>(fam.sets_containing(v).size());
    return product;
}

/// Searches covers of the support by the family's sets for the smallest
/// max_i H(W | S_i). Exhaustive over deterministic assignments when their
/// number is within budget, multi-start local search otherwise, followed by
/// coordinate-wise probabilistic refinement on a 1/32 grid.
inline AchievableResult optimize_achievable(const Instance& inst, const MISFamily& family, double base,
                                            const OptimizerBudget& budget = {}) {
    require_valid(inst);
    check_base(base);
    const std::size_t nv = family.vertex_count;
    const std::size_t fs = family.sets.size();
    if (support(inst).size() != nv) throw std::invalid_argument("family does not match the instance support");
    std::vector<std::vector<std::uint32_t>> cand(nv);
    for (VertexId v = 0; v < nv; ++v) {
        cand[v] = family.sets_containing(v);
        if (cand[v].empty()) throw std::invalid_argument("vertex " + std::to_string(v) + " is in no set of the family");
    }

    const auto start = std::chrono::steady_clock::now();
    auto out_of_time = [&] { return std::chrono::steady_clock::now() - start > budget.time_limit; };

    AchievableResult res;
    detail::CoverObjective objective(inst, family, base);
    const double space = deterministic_assignment_count(family);
    bool exhaustive = budget.mode == SearchMode::exhaustive ||
                      (budget.mode == SearchMode::automatic && space <= budget.exhaustive_limit);
    if (exhaustive && space > budget.hard_exhaustive_limit)
        throw GuardError("deterministic assignment space has " + std::to_string(space) + " points (limit " +
                         std::to_string(budget.hard_exhaustive_limit) + ")");

    std::vector<std::uint32_t> best_assign(nv);
    double best = std::numeric_limits<double>::infinity();

    if (exhaustive) {
        std::vector<std::size_t> digit(nv, 0);
        std::vector<std::uint32_t> assign(nv);
        for (VertexId v = 0; v < nv; ++v) assign[v] = cand[v][0];
        auto rows = detail::rows_from_assignment(assign);
        bool complete = true;
        for (;;) {
            const double val = objective(rows);
            if (val < best - 1e-12) {
                best = val;
                best_assign = assign;
            }
            if (objective.evaluations >= budget.max_evaluations ||
                ((objective.evaluations & 4095) == 0 && out_of_time())) {
                complete = false;
                break;
            }
            std::size_t k = nv;
            while (k > 0) {
                --k;
                if (++digit[k] < cand[k].size()) {
                    assign[k] = cand[k][digit[k]];
                    rows[k] = {{assign[k], 1.0}};
                    break;
                }
                digit[k] = 0;
                assign[k] = cand[k][0];
                rows[k] = {{assign[k], 1.0}};
                if (k == 0) {
                    k = nv + 1;
                    break;
                }
            }
            if (nv == 0 || k == nv + 1) break;
        }
        res.exhaustive = complete;
        res.budget_exhausted = !complete;
    } else {
        // Restarts are independent; each derives its RNG from (seed, restart).
        // Each runs iterated local search: single-vertex moves to a local
        // optimum, then random kicks of a few vertices, keeping improvements.
        using Score = detail::CoverObjective::Score;
        struct Local {
            Score score;
            std::vector<std::uint32_t> assign;
            std::uint64_t evaluations = 0;
            bool timed_out = false;
        };
        std::vector<Local> results(budget.restarts);
        const std::uint64_t per_restart =
            std::max<std::uint64_t>(1, budget.max_evaluations / std::max<std::size_t>(1, budget.restarts));
        parallel_for(budget.restarts, budget.threads, [&](std::size_t r) {
            detail::CoverObjective obj(inst, family, base);
            std::mt19937_64 rng(stream_seed(budget.seed, r));
            bool stop = false, timed_out = false;
            auto spent = [&] {
                if (obj.evaluations >= per_restart) stop = true;
                if ((obj.evaluations & 255) == 0 && out_of_time()) stop = timed_out = true;
                return stop;
            };
            auto descend = [&](std::vector<std::uint32_t>& assign, std::vector<detail::CoverObjective::Row>& rows,
                               Score cur) {
                bool improved = true;
                while (improved && !stop) {
                    improved = false;
                    for (VertexId v = 0; v < nv && !stop; ++v) {
                        for (auto w : cand[v]) {
                            if (w == assign[v]) continue;
                            const auto keep = assign[v];
                            rows[v] = {{w, 1.0}};
                            const auto val = obj.score(rows);
                            if (val.better_than(cur)) {
                                cur = val;
                                assign[v] = w;
                                improved = true;
                            } else {
                                rows[v] = {{keep, 1.0}};
                            }
                            if (spent()) break;
                        }
                    }
                }
                return cur;
            };

            std::vector<std::uint32_t> assign(nv);
            for (VertexId v = 0; v < nv; ++v) assign[v] = cand[v][uniform_index(rng, cand[v].size())];
            auto rows = detail::rows_from_assignment(assign);
            Score best_score = descend(assign, rows, obj.score(rows));
            auto best_local = assign;
            const std::size_t kick = std::max<std::size_t>(2, nv / 8);
            while (!stop && nv > 0) {
                assign = best_local;
                for (std::size_t k = 0; k < kick; ++k) {
                    const auto v = uniform_index(rng, nv);
                    assign[v] = cand[v][uniform_index(rng, cand[v].size())];
                }
                rows = detail::rows_from_assignment(assign);
                const auto start_score = obj.score(rows);
                spent();
                const auto val = descend(assign, rows, start_score);
                if (val.better_than(best_score)) {
                    best_score = val;
                    best_local = assign;
                }
            }
            results[r] = {best_score, best_local, obj.evaluations, timed_out};
        });
        Score best_score;
        for (const auto& l : results) {
            res.budget_exhausted = res.budget_exhausted || l.timed_out;
            objective.evaluations += l.evaluations;
            if (l.score.better_than(best_score) ||
                (!best_score.better_than(l.score) && l.assign < best_assign)) {
                best_score = l.score;
                best_assign = l.assign;
            }
        }
        best = objective(detail::rows_from_assignment(best_assign));
    }

    res.deterministic_value = best;
    res.deterministic_witness = CoverDistribution::deterministic(best_assign, fs);

    // Probabilistic refinement: move one grid step of mass between two sets
    // in a vertex's row; keep strict improvements.
    auto rows = detail::rows_from_assignment(best_assign);
    double cur = best;
    if (budget.refine) {
        const double step = budget.refine_step;
        std::vector<std::vector<double>> mass(nv);
        for (VertexId v = 0; v < nv; ++v) {
            mass[v].assign(cand[v].size(), 0.0);
            for (std::size_t k = 0; k < cand[v].size(); ++k)
                if (cand[v][k] == best_assign[v]) mass[v][k] = 1.0;
        }
        auto build_row = [&](VertexId v) {
            detail::CoverObjective::Row row;
            for (std::size_t k = 0; k < cand[v].size(); ++k)
                if (mass[v][k] > 1e-15) row.emplace_back(cand[v][k], mass[v][k]);
            return row;
        };
        bool improved = true;
        while (improved && !res.budget_exhausted) {
            improved = false;
            for (VertexId v = 0; v < nv && !res.budget_exhausted; ++v) {
                const auto c = cand[v].size();
                if (c < 2) continue;
                for (std::size_t from = 0; from < c; ++from) {
                    for (std::size_t to = 0; to < c; ++to) {
                        if (from == to || mass[v][from] < step - 1e-12) continue;
                        mass[v][from] -= step;
                        mass[v][to] += step;
                        rows[v] = build_row(v);
                        const double val = objective(rows);
                        if (val < cur - 1e-9) {
                            cur = val;
                            improved = true;
                            res.refinement_improved = true;
                        } else {
                            mass[v][from] += step;
                            mass[v][to] -= step;
                            rows[v] = build_row(v);
                        }
                        if (objective.evaluations >= budget.max_evaluations + budget.max_evaluations / 2 || out_of_time()) {
                            res.budget_exhausted = true;
                            break;
                        }
                    }
                    if (res.budget_exhausted) break;
                }
            }
        }
    }

    res.witness = detail::cover_from_rows(rows, fs);
    res.evaluations = objective.evaluations;
    res.certified = res.exhaustive && budget.refine && !res.refinement_improved && !res.budget_exhausted;

    // Report through the entropy-kit path so the reported number never
    // depends on the optimizer's internal evaluator.
    auto rep = evaluate_cover_rate(inst, family, res.witness, base);
    rep.name = "achievable";
    if (res.certified)
        rep.method = "exhaustive deterministic search; no 1/32-grid probabilistic improvement";
    else if (res.exhaustive)
        rep.method = "exhaustive deterministic search + probabilistic refinement (upper bound)";
    else
        rep.method = "heuristic upper bound (multi-start local search + probabilistic refinement)";
    if (res.budget_exhausted) rep.notes.push_back("budget exhausted; best-so-far returned");
    rep.notes.push_back("covers are not time-shared (no convexification)");
    res.report = std::move(rep);
    return res;
}

/// max_i H(X_[N] | S_i): the rate at which every user can recover every dataset.
inline RateReport slepian_wolf_baseline(const Instance& inst, double base) {
    require_valid(inst);
    const auto src = source_pmf(inst);
    const auto all = all_dataset_axes(inst.n_datasets);
    std::vector<double> per_user;
    double worst = 0.0;
    for (const auto& u : inst.users) {
        const double h = conditional_entropy(src, all, dataset_axes(u.side_coords), base);
        per_user.push_back(h);
        worst = std::max(worst, h);
    }
    auto r = make_report("slepian-wolf", worst, base, inst.q);
    r.per_user = std::move(per_user);
    r.method = "max_i H(X_[N] | S_i)";
    return r;
}

/// Entropy of an explicit message given as a tuple of functions of x (for
/// example the pair of linear combinations of a Slepian-Wolf code). Notes
/// record, per user, the residual H(X_[N] | M, S_i).
inline RateReport explicit_message_rate(const Instance& inst, const std::vector<DemandTable>& components,
                                        double base, std::string description = {}) {
    require_valid(inst);
    const auto sp = inst.space();
    auto pmf = source_pmf(inst);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < components.size(); ++k) {
        if (components[k].values.size() != inst.tuple_count())
            throw std::invalid_argument("message component has the wrong table size");
        names.push_back("M" + std::to_string(k + 1));
        const auto& tab = components[k];
        pmf = pmf.with_axis(names.back(), static_cast<std::size_t>(inst.q), [&](const std::vector<std::uint32_t>& v) {
            std::vector<int> d(v.begin(), v.begin() + inst.n_datasets);
            return static_cast<std::uint32_t>(tab(sp.encode(d)));
        });
    }
    auto r = make_report("explicit-message", entropy(pmf, names, base), base, inst.q);
    r.witness = description;
    r.method = "H(M)";
    const auto all = all_dataset_axes(inst.n_datasets);
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        auto given = names;
        for (const auto& s : dataset_axes(inst.users[i].side_coords)) given.push_back(s);
        const double residual = conditional_entropy(pmf, all, given, base);
        char buf[96];
        std::snprintf(buf, sizeof buf, "user %zu residual H(X|M,S)=%.6f", i + 1, residual);
        r.notes.push_back(buf);
    }
    return r;
}

enum class Prop1Interpretation { joint_demand, residual_with_erasure };

inline const char* to_string(Prop1Interpretation p) {
    return p == Prop1Interpretation::joint_demand ? "joint-demand" : "residual-with-erasure";
}

/// Joint entropy of the per-user demand symbols. joint-demand uses f_i(x);
/// residual-with-erasure replaces f_i(x) with an erasure mark (value q)
/// whenever f_i is constant on the side-information class of x.
inline RateReport prop1_lower_bound(const Instance& inst, Prop1Interpretation interp, double base) {
    require_valid(inst);
    const auto verts = support(inst);
    std::vector<std::vector<int>> symbol(inst.users.size(), std::vector<int>(verts.size()));
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        const auto& f = inst.users[i].demand;
        std::uint32_t classes = 0;
        const auto cls = side_classes(inst, i, verts, &classes);
        std::vector<int> first(classes, -1);
        std::vector<bool> constant(classes, true);
        for (std::size_t v = 0; v < verts.size(); ++v) {
            const int val = f(verts[v]);
            if (first[cls[v]] < 0) first[cls[v]] = val;
            else if (first[cls[v]] != val) constant[cls[v]] = false;
        }
        for (std::size_t v = 0; v < verts.size(); ++v) {
            const bool erase = interp == Prop1Interpretation::residual_with_erasure && constant[cls[v]];
            symbol[i][v] = erase ? inst.q : f(verts[v]);
        }
    }
    std::vector<Axis> axes;
    for (std::size_t i = 0; i < inst.users.size(); ++i)
        axes.push_back({"F" + std::to_string(i + 1), static_cast<std::size_t>(inst.q + 1)});
    std::vector<Outcome> outs;
    for (std::size_t v = 0; v < verts.size(); ++v) {
        Outcome o;
        for (std::size_t i = 0; i < inst.users.size(); ++i) o.values.push_back(static_cast<std::uint32_t>(symbol[i][v]));
        o.weight = inst.pmf[verts[v]];
        outs.push_back(std::move(o));
    }
    auto r = make_report(std::string("prop1-") + to_string(interp), entropy(JointPMF(axes, outs), base), base, inst.q);
    r.method = std::string("joint entropy of demand symbols, interpretation ") + to_string(interp);
    return r;
}

/// Genie-aided sum: sum_k H(f_{p(k)} | S_{p(1)},...,S_{p(k)}, f_{p(1)},...,f_{p(k-1)}).
/// `ordering` holds 0-based user indices.
inline RateReport genie_lower_bound(const Instance& inst, const std::vector<std::size_t>& ordering, double base) {
    require_valid(inst);
    auto sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k)
        if (sorted[k] != k || sorted.size() != inst.users.size())
            throw std::invalid_argument("ordering must be a permutation of the users");
    const auto pmf = with_demands(inst, source_pmf(inst));
    std::vector<std::string> given;
    std::vector<double> terms;
    double total = 0.0;
    std::string order_text;
    for (auto i : ordering) {
        for (const auto& s : dataset_axes(inst.users[i].side_coords))
            if (std::find(given.begin(), given.end(), s) == given.end()) given.push_back(s);
        const auto fi = "F" + std::to_string(i + 1);
        const double h = conditional_entropy(pmf, {fi}, given, base);
        terms.push_back(h);
        total += h;
        given.push_back(fi);
        if (!order_text.empty()) order_text += ",";
        order_text += std::to_string(i + 1);
    }
    auto r = make_report("genie", total, base, inst.q);
    r.terms = std::move(terms);
    r.witness = "ordering " + order_text;
    r.method = "genie-aided sum of conditional entropies";
    return r;
}

/// Largest genie sum over all K! orderings (K <= 6); ties keep the
/// lexicographically first ordering.
inline RateReport genie_lower_bound_best(const Instance& inst, double base) {
    require_valid(inst);
    const auto k = inst.users.size();
    if (k > 6) throw GuardError("ordering sweep is limited to K <= 6");
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<RateReport> best;
    do {
        auto r = genie_lower_bound(inst, perm, base);
        if (!best || r.value > best->value + 1e-12) best = std::move(r);
    } while (std::next_permutation(perm.begin(), perm.end()));
    best->name = "genie-best";
    best->method = "genie-aided sum, maximized over all orderings";
    return *best;
}

} // namespace cbcast
