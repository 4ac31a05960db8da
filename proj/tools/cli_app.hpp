#pragma once

// Command-line front end. run() takes the arguments after the program name
// and writes to the given streams so tests can drive it in-process.
//
// Exit codes: 0 success, 1 validation failure, 2 usage error, 3 guard or
// timeout.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cbcast/cbcast.hpp>

namespace cbcast::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_guard = 3;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void print_report(std::ostream& out, const RateReport& r) {
    out << r.name << ": " << format_value(r);
    if (r.unit != "bits") out << " (" << fixed6(r.value_bits) << " bits)";
    out << '\n';
    if (!r.per_user.empty()) {
        out << "  per user:";
        for (double v : r.per_user) out << ' ' << fixed6(v);
        out << '\n';
    }
    if (!r.terms.empty()) {
        out << "  terms:";
        for (double v : r.terms) out << ' ' << fixed6(v);
        out << '\n';
    }
    if (!r.method.empty()) out << "  method: " << r.method << '\n';
    for (const auto& n : r.notes) out << "  note: " << n << '\n';
    if (!r.witness.empty()) {
        out << "  witness:";
        if (r.witness.find('\n') == std::string::npos) {
            out << ' ' << r.witness << '\n';
        } else {
            out << '\n';
            std::istringstream in(r.witness);
            std::string line;
            while (std::getline(in, line)) out << "    " << line << '\n';
        }
    }
}

inline std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) {
                std::size_t used = 0;
                int v = 0;
                try {
                    v = std::stoi(cur, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != cur.size()) throw UsageError("'" + text + "' is not a comma-separated list of integers");
                out.push_back(v);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    return out;
}

inline std::size_t user_index(const Instance& inst, int one_based) {
    if (one_based < 1 || one_based > static_cast<int>(inst.users.size()))
        throw UsageError("user " + std::to_string(one_based) + " does not exist (K = " +
                         std::to_string(inst.users.size()) + ")");
    return static_cast<std::size_t>(one_based - 1);
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

struct Common {
    std::string instance;
    double base = 0.0;   // 0: use q
    unsigned threads = 0;
    std::uint64_t seed = 1;

    double resolved_base(const Instance& inst) const { return base > 0.0 ? base : static_cast<double>(inst.q); }
    unsigned resolved_threads() const { return threads > 0 ? threads : default_threads(); }
};

inline OptimizerBudget budget_from(const Common& c, bool exhaustive, bool heuristic, std::uint64_t max_evals) {
    OptimizerBudget b;
    if (exhaustive) b.mode = SearchMode::exhaustive;
    if (heuristic) b.mode = SearchMode::heuristic;
    b.seed = c.seed;
    b.threads = c.resolved_threads();
    if (max_evals > 0) b.max_evaluations = max_evals;
    return b;
}

} // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Computation broadcast toolkit: characteristic graphs, rates, bounds and simulation", "cbcast"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    detail::Common c;
    auto add_instance = [&](CLI::App* sub) {
        sub->add_option("instance", c.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
    };
    auto add_base = [&](CLI::App* sub) {
        sub->add_option("--base", c.base, "Logarithm base (default: q)")->check(CLI::PositiveNumber);
    };
    auto add_run = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "RNG seed");
        sub->add_option("--threads", c.threads, "Worker threads (default: CBCAST_THREADS or hardware)");
    };

    auto* validate = app.add_subcommand("validate", "Check an instance file");
    add_instance(validate);

    int graph_user = 0;
    bool graph_union = false;
    int power = 1;
    std::string output;
    auto* graph = app.add_subcommand("graph", "Characteristic graph as DOT");
    add_instance(graph);
    auto* g_user = graph->add_option("--user", graph_user, "User index (1-based)");
    auto* g_union = graph->add_flag("--union", graph_union, "Union of all users' graphs");
    g_user->excludes(g_union);
    graph->add_option("--power", power, "OR power (block length)")->check(CLI::PositiveNumber);
    graph->add_option("-o,--output", output, "Output file (default: stdout)");

    int mis_user = 0;
    auto* mis = app.add_subcommand("mis", "Maximal independent sets of the union graph");
    add_instance(mis);
    mis->add_option("--user", mis_user, "Use one user's graph instead of the union");

    bool exhaustive = false, heuristic = false;
    std::string cover_path;
    std::uint64_t max_evals = 0;
    auto* ach = app.add_subcommand("rate-ach", "Achievable rate max_i H(W|S_i) over MIS covers");
    add_instance(ach);
    add_base(ach);
    add_run(ach);
    auto* f_ex = ach->add_flag("--exhaustive", exhaustive, "Exhaustive deterministic search");
    auto* f_he = ach->add_flag("--heuristic", heuristic, "Local search");
    f_ex->excludes(f_he);
    ach->add_option("--cover", cover_path, "Evaluate this cover instead of optimizing")->check(CLI::ExistingFile);
    ach->add_option("--max-evals", max_evals, "Optimizer evaluation budget");

    std::vector<std::string> messages;
    auto* baseline = app.add_subcommand("baseline", "Rate for every user to recover all datasets");
    add_instance(baseline);
    add_base(baseline);
    baseline->add_option("--message", messages, "Explicit message component (repeatable), e.g. 'X1 + X2'");

    std::string interpretation = "joint-demand";
    auto* prop1 = app.add_subcommand("bound-prop1", "Joint demand entropy bound");
    add_instance(prop1);
    add_base(prop1);
    prop1->add_option("--interpretation", interpretation, "joint-demand or residual-with-erasure")
        ->check(CLI::IsMember({"joint-demand", "residual-with-erasure"}));

    std::string ordering;
    bool all_orderings = false;
    auto* genie = app.add_subcommand("bound-genie", "Genie-aided lower bound");
    add_instance(genie);
    add_base(genie);
    auto* o_ord = genie->add_option("--ordering", ordering, "User order, e.g. 3,1,2 (default: 1..K)");
    auto* o_all = genie->add_flag("--all-orderings", all_orderings, "Best over all orderings (K <= 6)");
    o_ord->excludes(o_all);

    std::string pair = "1,2";
    std::string compat_mode = "linear";
    auto* compat = app.add_subcommand("scheme-compat", "Smallest-entropy compatible function for two users");
    add_instance(compat);
    add_base(compat);
    compat->add_option("--pair", pair, "Two users, e.g. 1,2");
    compat->add_option("--mode", compat_mode, "linear or exhaustive")->check(CLI::IsMember({"linear", "exhaustive"}));

    std::string z12, z23, z13;
    auto* split = app.add_subcommand("scheme-split", "Three-message split scheme (K = 3)");
    add_instance(split);
    add_base(split);
    split->add_option("--z12", z12, "Compatible function of users 1,2 (default: linear search)");
    split->add_option("--z23", z23, "Compatible function of users 2,3");
    split->add_option("--z13", z13, "Compatible function of users 1,3");

    std::string scheme_path;
    auto* vec = app.add_subcommand("scheme-vector", "Vector scheme conditioned on one coordinate");
    add_instance(vec);
    add_base(vec);
    vec->add_option("--scheme", scheme_path, "Vector scheme JSON")->required()->check(CLI::ExistingFile);

    std::string objective = "max-conditional";
    auto* oracle = app.add_subcommand("oracle", "Exhaustive search over independent-set partitions");
    add_instance(oracle);
    add_base(oracle);
    oracle->add_option("--objective", objective, "entropy (H(M)) or max-conditional (max_i H(M|S_i))")
        ->check(CLI::IsMember({"entropy", "max-conditional"}));

    SimConfig sim;
    std::string mode = "lazy";
    std::string trace_path;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run of the compress-bin scheme");
    add_instance(simulate);
    add_run(simulate);
    simulate->add_option("--cover", cover_path, "Cover JSON (default: optimizer witness)")->check(CLI::ExistingFile);
    simulate->add_option("-n,--n", sim.n, "Block length");
    simulate->add_option("--R-prime", sim.R_prime, "Codebook rate (base q)");
    simulate->add_option("--R", sim.R, "Bin rate (base q)");
    simulate->add_option("--epsilon", sim.epsilon, "Decoder typicality slack");
    simulate->add_option("--epsilon-prime", sim.epsilon_prime, "Encoder typicality slack");
    simulate->add_option("--trials", sim.trials, "Number of trials");
    simulate->add_option("--mode", mode, "lazy or explicit codebook")->check(CLI::IsMember({"lazy", "explicit"}));
    simulate->add_option("--trace", trace_path, "Write per-trial CSV here");

    auto* report = app.add_subcommand("report", "All rates and bounds of an instance as CSV");
    add_instance(report);
    add_base(report);
    add_run(report);
    report->add_option("-o,--output", output, "Output file (default: stdout)");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    try {
        const auto inst = load_instance(c.instance);
        require_valid(inst);
        const double base = c.resolved_base(inst);
        check_base(base);

        if (validate->parsed()) {
            out << "valid: q=" << inst.q << " N=" << inst.n_datasets << " K=" << inst.users.size()
                << " support=" << support(inst).size() << '\n';
            return exit_ok;
        }

        if (graph->parsed()) {
            CharGraph g = graph_user > 0 ? build_characteristic_graph(inst, detail::user_index(inst, graph_user))
                                         : build_union_graph(inst);
            if (power > 1) g = or_power(g, power);
            detail::write_output(output, export_dot(g), out);
            return exit_ok;
        }

        if (mis->parsed()) {
            const auto g = mis_user > 0 ? build_characteristic_graph(inst, detail::user_index(inst, mis_user))
                                        : build_union_graph(inst);
            const auto fam = enumerate_mis(g);
            for (const auto& s : fam.sets) out << format_set(g, s) << '\n';
            out << fam.sets.size() << " maximal independent sets of " << g.label() << '\n';
            return exit_ok;
        }

        if (ach->parsed()) {
            const auto g = build_union_graph(inst);
            const auto fam = enumerate_mis(g);
            if (!cover_path.empty()) {
                const auto cover = cover_from_json(read_json_file(cover_path), g, fam);
                auto r = evaluate_cover_rate(inst, fam, cover, base);
                r.witness = cover.is_deterministic() ? describe_partition_of_cover(g, fam, cover)
                                                     : describe_cover(g, fam, cover);
                const auto bad = cover_decodability_violation(inst, fam, cover);
                if (!bad.empty()) r.notes.push_back("not decodable: " + bad);
                detail::print_report(out, r);
                return exit_ok;
            }
            const auto res = optimize_achievable(inst, fam, base, detail::budget_from(c, exhaustive, heuristic, max_evals));
            auto r = res.report;
            r.witness = res.witness.is_deterministic() ? describe_partition_of_cover(g, fam, res.witness)
                                                       : describe_cover(g, fam, res.witness);
            r.notes.push_back(std::string(res.certified ? "certified optimum over MIS covers"
                                                        : "upper bound, not certified") +
                              "; " + std::to_string(res.evaluations) + " evaluations");
            detail::print_report(out, r);
            return exit_ok;
        }

        if (baseline->parsed()) {
            detail::print_report(out, slepian_wolf_baseline(inst, base));
            if (!messages.empty()) {
                std::vector<DemandTable> comps;
                std::string desc;
                for (const auto& m : messages) {
                    comps.push_back(expand_demand(m, inst.space()));
                    desc += (desc.empty() ? "(" : ", ") + m;
                }
                detail::print_report(out, explicit_message_rate(inst, comps, base, desc + ")"));
            }
            return exit_ok;
        }

        if (prop1->parsed()) {
            const auto interp = interpretation == "joint-demand" ? Prop1Interpretation::joint_demand
                                                                 : Prop1Interpretation::residual_with_erasure;
            detail::print_report(out, prop1_lower_bound(inst, interp, base));
            return exit_ok;
        }

        if (genie->parsed()) {
            if (all_orderings) {
                detail::print_report(out, genie_lower_bound_best(inst, base));
                return exit_ok;
            }
            std::vector<std::size_t> perm;
            if (ordering.empty()) {
                for (std::size_t i = 0; i < inst.users.size(); ++i) perm.push_back(i);
            } else {
                for (int u : detail::parse_int_list(ordering)) perm.push_back(detail::user_index(inst, u));
            }
            detail::print_report(out, genie_lower_bound(inst, perm, base));
            return exit_ok;
        }

        if (compat->parsed()) {
            const auto p = detail::parse_int_list(pair);
            if (p.size() != 2) throw UsageError("--pair needs two users");
            const auto a = detail::user_index(inst, p[0]);
            const auto b = detail::user_index(inst, p[1]);
            const auto f = find_compatible_function(inst, a, b,
                                                    compat_mode == "linear" ? CompatSearch::linear : CompatSearch::exhaustive, base);
            if (!f) {
                out << "no compatible function for users " << p[0] << "," << p[1] << '\n';
                return exit_ok;
            }
            auto r = make_report("compatible", f->entropy, base, inst.q);
            r.witness = f->description;
            r.method = "H(Z) of the smallest-entropy " + compat_mode + " compatible function";
            detail::print_report(out, r);
            return exit_ok;
        }

        if (split->parsed()) {
            auto pick = [&](const std::string& expr, std::size_t a, std::size_t b) {
                if (!expr.empty()) return expand_demand(expr, inst.space());
                const auto f = find_compatible_function(inst, a, b, CompatSearch::linear, base);
                if (!f)
                    throw ValidationError(std::vector<Violation>{
                        {"no-compatible-function", "users " + std::to_string(a + 1) + "," + std::to_string(b + 1)}});
                out << "z" << a + 1 << b + 1 << " = " << f->description << '\n';
                return f->z;
            };
            const auto t12 = pick(z12, 0, 1);
            const auto t23 = pick(z23, 1, 2);
            const auto t13 = pick(z13, 0, 2);
            detail::print_report(out, split_scheme_rate(inst, t12, t23, t13, base));
            detail::print_report(out, separate_messages_rate(inst, {t12, t23, t13}, base));
            return exit_ok;
        }

        if (vec->parsed()) {
            const auto scheme = vector_scheme_from_json(read_json_file(scheme_path), inst);
            detail::print_report(out, vector_scheme_rate(inst, scheme, base));
            Partition p{vector_scheme_partition(inst, scheme)};
            p.normalize();
            const auto ss = single_shot_execute(inst, p);
            out << "single-shot decoding: " << (ss.ok ? "all " + std::to_string(ss.rows.size()) + " tuples correct" : ss.failure)
                << '\n';
            return ss.ok ? exit_ok : exit_validation;
        }

        if (oracle->parsed()) {
            const auto g = build_union_graph(inst);
            const auto obj = objective == "entropy" ? OracleObjective::message_entropy : OracleObjective::max_conditional;
            const auto res = oracle_search(inst, g, obj, base);
            detail::print_report(out, res.report);
            const auto dc = decode_check(inst, res.best);
            out << "decode check: " << (dc.ok ? "pass" : dc.message) << '\n';
            return exit_ok;
        }

        if (simulate->parsed()) {
            const auto g = build_union_graph(inst);
            const auto fam = enumerate_mis(g);
            CoverDistribution cover;
            if (!cover_path.empty()) {
                cover = cover_from_json(read_json_file(cover_path), g, fam);
            } else {
                cover = optimize_achievable(inst, fam, inst.q, detail::budget_from(c, false, false, 0)).witness;
            }
            sim.seed = c.seed;
            sim.threads = c.resolved_threads();
            sim.mode = mode == "lazy" ? CodebookMode::lazy : CodebookMode::explicit_codebook;
            sim.keep_traces = !trace_path.empty();
            const auto th = channel_thresholds(inst, cover, inst.q);
            const auto s = binning_simulate(inst, fam, cover, sim);
            const auto unit = unit_name(inst.q, inst.q);
            out << "I(X;W) = " << fixed6(th.covering) << ' ' << unit << ", max_i I(X;W|S_i) = " << fixed6(th.binning)
                << ' ' << unit << '\n';
            out << "n=" << sim.n << " R'=" << fixed6(sim.R_prime) << " R=" << fixed6(sim.R) << " codewords=" << s.shape.codewords
                << " bins=" << s.shape.bins << " bin_size=" << s.shape.bin_size << " trials=" << s.trials << '\n';
            for (std::size_t i = 0; i < s.per_user.size(); ++i) {
                const auto& u = s.per_user[i];
                out << "user " << i + 1 << ": Er1=" << fixed6(s.rate(u.er1)) << " Er2=" << fixed6(s.rate(u.er2))
                    << " Er3=" << fixed6(s.rate(u.er3)) << " demand_error=" << fixed6(s.rate(u.demand_errors())) << '\n';
            }
            const double p = s.total_error_rate();
            out << "total error rate: " << fixed6(p) << " (+/- " << fixed6(2.0 * s.standard_error(p)) << " at 2 sigma)\n";
            if (!trace_path.empty()) detail::write_output(trace_path, simulation_to_csv(s, inst.users.size()), out);
            return exit_ok;
        }

        if (report->parsed()) {
            std::vector<RateReport> rows;
            rows.push_back(slepian_wolf_baseline(inst, base));
            const auto g = build_union_graph(inst);
            const auto fam = enumerate_mis(g);
            auto ach_res = optimize_achievable(inst, fam, base, detail::budget_from(c, false, false, 0));
            ach_res.report.witness = describe_partition_of_cover(g, fam, ach_res.deterministic_witness);
            rows.push_back(ach_res.report);
            if (support(inst).size() <= oracle_support_guard)
                rows.push_back(oracle_search(inst, g, OracleObjective::max_conditional, base).report);
            rows.push_back(prop1_lower_bound(inst, Prop1Interpretation::joint_demand, base));
            rows.push_back(prop1_lower_bound(inst, Prop1Interpretation::residual_with_erasure, base));
            if (inst.users.size() <= 6) rows.push_back(genie_lower_bound_best(inst, base));
            detail::write_output(output, reports_to_csv(rows), out);
            return exit_ok;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ValidationError& e) {
        err << "validation failed:\n";
        for (const auto& v : e.violations()) err << "  " << v.code << ": " << v.detail << '\n';
        return exit_validation;
    } catch (const GuardError& e) {
        err << "guard: " << e.what() << '\n';
        return exit_guard;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    err << app.help();
    return exit_usage;
}

} // namespace cbcast::cli
