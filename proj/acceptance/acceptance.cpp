// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N[,N...]] [--known-unattainable N[,N...]] [--trials T]
//
// Exit status is 0 when every criterion passes, or when the only failures
// are listed with --known-unattainable (they are still printed as FAIL).
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include <cbcast/cbcast.hpp>

#include "oracles.hpp"

using namespace cbcast;

namespace {

// Tolerances.
constexpr double exact_tol = 1e-9;
constexpr double rounded_tol = 1e-4;
constexpr double property_tol = 1e-9;
constexpr int property_rounds = 120;
constexpr double sim_sigmas = 2.0;
constexpr double sim_margin = 0.2;   // rate above each threshold, base q
constexpr std::uint64_t sim_seed = 2024;

const std::string dir = CBCAST_INSTANCES_DIR;

struct Verdict {
    bool pass = true;
    std::vector<std::string> lines;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void info(const std::string& what) { lines.push_back("     " + what); }
};

std::string num(double v) { return fixed6(v); }

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(1) << v;
    return s.str();
}

std::string one_line(std::string text) {
    while (!text.empty() && text.back() == '\n') text.pop_back();
    std::string out;
    for (char c : text) out += c == '\n' ? std::string("; ") : std::string(1, c);
    return out;
}

std::string near_text(double got, double want, double tol) {
    std::ostringstream s;
    s << num(got) << " (want " << num(want) << " +/- " << tol << ")";
    return s.str();
}

struct Ex1 {
    Instance inst = load_instance(dir + "/example1_boolean.json");
    CharGraph g = build_union_graph(inst);
    MISFamily fam = enumerate_mis(g);
    CoverDistribution reference = cover_from_json(read_json_file(dir + "/example1_reference_cover.json"), g, fam);
};

struct Ex2 {
    Instance inst = load_instance(dir + "/example2_linear.json");
    VectorScheme scheme = vector_scheme_from_json(read_json_file(dir + "/example2_vector_scheme.json"), inst);
};

std::set<std::pair<std::string, std::string>> named_edges(const CharGraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    for (auto [a, b] : g.edges()) {
        auto x = g.vertex_name(a), y = g.vertex_name(b);
        if (x > y) std::swap(x, y);
        out.insert({x, y});
    }
    return out;
}

Verdict c1_graphs() {
    Verdict o;
    const Ex1 e;
    const auto g1 = build_characteristic_graph(e.inst, 0);
    const std::set<std::pair<std::string, std::string>> want{{"100", "111"}, {"101", "111"}, {"110", "111"}};
    o.check(named_edges(g1) == want, "user-1 graph edges are exactly {111-100, 111-101, 111-110}");
    o.check(e.g.edge_count() == 13, "union graph has " + std::to_string(e.g.edge_count()) + " edges (want 13)");
    o.check(named_edges(e.g) == [&] {
        std::set<std::pair<std::string, std::string>> s;
        const auto sp = e.inst.space();
        for (auto [a, b] : oracle::union_edges(e.inst)) s.insert({sp.format(a), sp.format(b)});
        return s;
    }(), "union edges match the brute-force definition");
    return o;
}

Verdict c2_mis() {
    Verdict o;
    const Ex1 e;
    std::set<std::vector<std::string>> got;
    for (const auto& w : e.fam.sets) {
        std::vector<std::string> names;
        for (auto v : w) names.push_back(e.g.vertex_name(v));
        std::sort(names.begin(), names.end());
        got.insert(names);
    }
    const std::set<std::vector<std::string>> want{{"000", "010", "011"},        {"000", "010", "111"},
                                                  {"001", "010", "011", "100"}, {"001", "011", "110"},
                                                  {"010", "100", "101"},        {"101", "110"}};
    o.check(got == want, "enumeration returns exactly the six expected sets (" + std::to_string(got.size()) + " found)");
    o.check(oracle::all_mis(e.inst).size() == 6, "brute-force subset scan also finds 6 maximal sets");
    return o;
}

Verdict c3_achievable() {
    Verdict o;
    const Ex1 e;
    const auto r = evaluate_cover_rate(e.inst, e.fam, e.reference, 2.0);
    o.check(std::abs(r.value - 1.5) <= exact_tol, "reference cover rate " + near_text(r.value, 1.5, exact_tol));
    OptimizerBudget b;
    b.mode = SearchMode::exhaustive;
    const auto opt = optimize_achievable(e.inst, e.fam, 2.0, b);
    o.check(opt.report.value <= 1.5 + exact_tol, "exhaustive optimizer " + num(opt.report.value) + " <= 1.5");
    o.info(std::string("optimizer certified: ") + (opt.certified ? "yes" : "no") + ", witness " +
           one_line(describe_cover(e.g, e.fam, opt.witness)));
    return o;
}

Verdict c4_slepian_wolf() {
    Verdict o;
    const Ex1 e;
    const auto sp = e.inst.space();
    const auto sw = explicit_message_rate(e.inst, {expand_demand("X1 ^ X2", sp), expand_demand("X2 ^ X3", sp)}, 2.0);
    o.check(std::abs(sw.value - 2.0) <= exact_tol, "H(X1^X2, X2^X3) " + near_text(sw.value, 2.0, exact_tol));
    const double ratio = 1.5 / sw.value;
    o.check(std::abs(ratio - 0.75) <= exact_tol, "ratio 1.5 / baseline " + near_text(ratio, 0.75, exact_tol));
    o.info("joint-source baseline H(X) = " + num(slepian_wolf_baseline(e.inst, 2.0).value) + " bits");
    return o;
}

Verdict c5_genie() {
    Verdict o;
    const Ex1 e;
    const auto r = genie_lower_bound(e.inst, {2, 0, 1}, 2.0);
    const std::vector<double> want{0.905639, 0.25, 0.0};
    bool terms_ok = r.terms.size() == 3;
    for (std::size_t k = 0; terms_ok && k < 3; ++k) terms_ok = std::abs(r.terms[k] - want[k]) <= 5e-7;
    o.check(terms_ok, "ordering (3,1,2) terms " + num(r.terms.at(0)) + " " + num(r.terms.at(1)) + " " +
                          num(r.terms.at(2)));
    o.check(std::abs(r.value - 1.155) <= 1e-3 && std::abs(r.value - 1.155639) <= rounded_tol,
            "sum " + num(r.value) + " (rounded reference 1.155)");
    return o;
}

bool scalar_multiple(const DemandTable& z, const DemandTable& form, int q) {
    for (int c = 1; c < q; ++c) {
        bool same = true;
        for (std::size_t t = 0; t < z.values.size() && same; ++t) same = z.values[t] == (c * form.values[t]) % q;
        if (same) return true;
    }
    return false;
}

Verdict c6_compatible() {
    Verdict o;
    const Ex2 e;
    const auto sp = e.inst.space();
    struct Pair {
        std::size_t a, b;
        const char* form;
    };
    for (const Pair& p : {Pair{0, 1, "X1 + X2 + X3"}, Pair{0, 2, "X1 + 2X2 + 2X3"}, Pair{1, 2, "X1 + 2X2 + X3"}}) {
        const auto z = find_compatible_function(e.inst, p.a, p.b, CompatSearch::linear, 3.0);
        const std::string label = "Z_" + std::to_string(p.a + 1) + std::to_string(p.b + 1);
        if (!z) {
            o.check(false, label + ": no compatible function found");
            continue;
        }
        o.check(scalar_multiple(z->z, expand_demand(p.form, sp), 3), label + " = " + z->description + " ~ " + p.form);
        o.check(std::abs(z->entropy - 1.0) <= exact_tol, label + " entropy " + near_text(z->entropy, 1.0, exact_tol));
    }
    return o;
}

Verdict c7_split() {
    Verdict o;
    const Ex2 e;
    const auto sp = e.inst.space();
    const auto r = split_scheme_rate(e.inst, expand_demand("X1 + X2 + X3", sp), expand_demand("X1 + 2X2 + X3", sp),
                                     expand_demand("X1 + 2X2 + 2X3", sp), 3.0);
    o.check(std::abs(r.value - 1.5) <= exact_tol, "split scheme " + near_text(r.value, 1.5, exact_tol) + " " + r.unit);
    return o;
}

Verdict c8_vector() {
    Verdict o;
    const Ex2 e;
    const auto r = vector_scheme_rate(e.inst, e.scheme, 3.0);
    const double closed = 1.0 / 3.0 + 2.0 / 3.0 * (1.0 + std::log(2.0) / std::log(3.0));
    o.check(std::abs(r.value - closed) <= exact_tol, "vector scheme " + near_text(r.value, closed, exact_tol));
    o.check(std::abs(r.value - 1.42) <= 1e-3 && std::abs(r.value - 1.420620) <= rounded_tol,
            "vector scheme " + num(r.value) + " (rounded reference 1.42)");
    const bool cells = r.terms.size() == 2 && std::abs(r.terms[0] - 1.0) <= rounded_tol &&
                       std::abs(r.terms[1] - 1.630930) <= rounded_tol && std::abs(r.terms[1] - 1.63) <= 1e-3;
    o.check(cells, "per-cell entropies " + (r.terms.size() == 2 ? num(r.terms[0]) + " " + num(r.terms[1]) : "?") +
                       " (want 1.0 and 1.63)");
    return o;
}

Verdict c9_oracle() {
    Verdict o;
    const Ex1 e;
    const auto sp = e.inst.space();
    const auto t1 = cover_partition(e.inst, e.reference);
    bool seen = false;
    double t1_value = -1.0;
    bool all_decodable = true;
    auto t1_norm = t1;
    t1_norm.normalize();
    const auto res = oracle_search(e.inst, e.g, OracleObjective::max_conditional, 2.0,
                                   [&](const Partition& p, double v) {
                                       if (p.cells == t1_norm.cells) {
                                           seen = true;
                                           t1_value = v;
                                       }
                                   });
    all_decodable = decode_check(e.inst, res.best).ok;
    o.check(res.report.value <= 1.5 + exact_tol, "oracle optimum " + num(res.report.value) + " <= 1.5 over " +
                                                     std::to_string(res.valid_partitions) + " valid partitions");
    o.check(all_decodable, "witness " + one_line(format_partition(res.best, sp)) + " passes decode check");
    o.check(seen && std::abs(t1_value - 1.5) <= exact_tol,
            "reference cover partition evaluated, scores " + num(t1_value));
    return o;
}

struct Named {
    std::string name;
    double bits;
};

Verdict c10_prop1() {
    Verdict o;
    const Ex1 e1;
    const Ex2 e2;
    const auto joint = prop1_lower_bound(e1.inst, Prop1Interpretation::joint_demand, 2.0);
    o.check(std::abs(joint.value - 1.75) <= exact_tol, "10a joint-demand " + near_text(joint.value, 1.75, exact_tol));
    o.info("reference value 1.45 recorded, not asserted");

    // 10b: every lower bound against every achievable value, per example.
    auto sweep = [&](const std::string& tag, const std::vector<Named>& lower, const std::vector<Named>& ach,
                     std::vector<std::string>& bad, std::vector<std::string>& bad_genie) {
        for (const auto& l : lower)
            for (const auto& a : ach)
                if (l.bits > a.bits + exact_tol) {
                    const auto text = tag + ": " + l.name + " " + num(l.bits) + " > " + a.name + " " + num(a.bits);
                    bad.push_back(text);
                    if (l.name.rfind("genie", 0) == 0) bad_genie.push_back(text);
                }
    };
    auto lower_bounds = [](const Instance& inst) {
        const double b = inst.q;
        std::vector<Named> out;
        out.push_back({"genie-best", genie_lower_bound_best(inst, b).value_bits});
        out.push_back({"prop1-joint-demand", prop1_lower_bound(inst, Prop1Interpretation::joint_demand, b).value_bits});
        out.push_back({"prop1-residual-with-erasure",
                       prop1_lower_bound(inst, Prop1Interpretation::residual_with_erasure, b).value_bits});
        return out;
    };

    std::vector<Named> ach1{{"reference-cover", evaluate_cover_rate(e1.inst, e1.fam, e1.reference, 2.0).value_bits}};
    OptimizerBudget b1;
    b1.mode = SearchMode::exhaustive;
    ach1.push_back({"optimizer", optimize_achievable(e1.inst, e1.fam, 2.0, b1).report.value_bits});
    ach1.push_back({"oracle", oracle_search(e1.inst, e1.g, OracleObjective::max_conditional, 2.0).report.value_bits});
    ach1.push_back({"vector", vector_scheme_rate(e1.inst,
                                                 vector_scheme_from_json(
                                                     read_json_file(dir + "/example1_vector_scheme.json"), e1.inst),
                                                 2.0)
                                  .value_bits});
    ach1.push_back({"slepian-wolf", slepian_wolf_baseline(e1.inst, 2.0).value_bits});

    const auto sp2 = e2.inst.space();
    const auto g2 = build_union_graph(e2.inst);
    const auto fam2 = enumerate_mis(g2);
    std::vector<Named> ach2;
    ach2.push_back({"split", split_scheme_rate(e2.inst, expand_demand("X1 + X2 + X3", sp2),
                                               expand_demand("X1 + 2X2 + X3", sp2),
                                               expand_demand("X1 + 2X2 + 2X3", sp2), 3.0)
                                 .value_bits});
    ach2.push_back({"vector", vector_scheme_rate(e2.inst, e2.scheme, 3.0).value_bits});
    OptimizerBudget b2;
    b2.max_evaluations = 1'000'000;
    ach2.push_back({"optimizer", optimize_achievable(e2.inst, fam2, 3.0, b2).report.value_bits});
    ach2.push_back({"slepian-wolf", slepian_wolf_baseline(e2.inst, 3.0).value_bits});

    std::vector<std::string> bad, bad_genie;
    const auto low1 = lower_bounds(e1.inst), low2 = lower_bounds(e2.inst);
    sweep("example 1", low1, ach1, bad, bad_genie);
    sweep("example 2", low2, ach2, bad, bad_genie);
    for (const auto& [tag, low, ach] : {std::tuple{"example 1", &low1, &ach1}, std::tuple{"example 2", &low2, &ach2}}) {
        std::string l = std::string(tag) + " lower:", a = std::string(tag) + " achievable:";
        for (const auto& x : *low) l += " " + x.name + "=" + num(x.bits);
        for (const auto& x : *ach) a += " " + x.name + "=" + num(x.bits);
        o.info(l + " bits");
        o.info(a + " bits");
    }
    o.check(bad_genie.empty(), "10b genie bound <= every achievable value on both examples");
    o.check(bad.empty(), "10b every lower bound <= every achievable value (" + std::to_string(bad.size()) +
                             " violations)");
    for (const auto& s : bad) o.info("violation " + s);
    return o;
}

Verdict c11_simulator(std::uint64_t trials) {
    Verdict o;
    const Ex1 e1;
    const Ex2 e2;
    const auto s1 = single_shot_execute(e1.inst, cover_partition(e1.inst, e1.reference));
    o.check(s1.ok && s1.rows.size() == 8, "single-shot, example 1: " + std::to_string(s1.rows.size()) + " inputs" +
                                              (s1.ok ? "" : ", " + s1.failure));
    const auto s2 = single_shot_execute(e2.inst, Partition{vector_scheme_partition(e2.inst, e2.scheme)});
    o.check(s2.ok && s2.rows.size() == 27, "single-shot, example 2: " + std::to_string(s2.rows.size()) + " inputs" +
                                               (s2.ok ? "" : ", " + s2.failure));

    const auto th = channel_thresholds(e1.inst, e1.reference, 2.0);
    SimConfig c;
    c.R_prime = th.covering + sim_margin;
    c.R = th.binning + sim_margin;
    c.epsilon_prime = 1.0;
    c.epsilon = 1.25;
    c.trials = trials;
    c.seed = sim_seed;
    o.info("thresholds I(X;W)=" + num(th.covering) + " max I(X;W|S)=" + num(th.binning) + ", R'=" + num(c.R_prime) +
           " R=" + num(c.R));
    std::vector<SimSummary> runs;
    for (int n : {4, 8, 12}) {
        c.n = n;
        const auto t0 = std::chrono::steady_clock::now();
        runs.push_back(binning_simulate(e1.inst, e1.fam, e1.reference, c));
        const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto& r = runs.back();
        std::ostringstream s;
        s << "n=" << n << " total error " << num(r.total_error_rate()) << " (se " << num(r.standard_error(r.total_error_rate())) << ", Er3 "
          << r.er3_total() << ", " << std::setprecision(3) << secs << " s)";
        o.info(s.str());
    }
    bool monotone = true;
    for (std::size_t k = 1; k < runs.size(); ++k) {
        const double a = runs[k - 1].total_error_rate(), b = runs[k].total_error_rate();
        const double slack = sim_sigmas * std::hypot(runs[k - 1].standard_error(a), runs[k].standard_error(b));
        monotone = monotone && b <= a + slack;
    }
    o.check(monotone, "total error frequency non-increasing in n (2-sigma slack, " + std::to_string(trials) + " trials)");

    SimConfig one = c;
    one.n = 8;
    one.R = one.R_prime;
    const auto r1 = binning_simulate(e1.inst, e1.fam, e1.reference, one);
    o.check(r1.er3_total() == 0 && r1.shape.bin_size == 1,
            "one bin per codeword: Er3 count " + std::to_string(r1.er3_total()));
    return o;
}

std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t rows, std::size_t labels, bool det) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> ch(rows, std::vector<double>(labels, 0.0));
    for (auto& row : ch) {
        if (det) {
            row[std::uniform_int_distribution<std::size_t>(0, labels - 1)(rng)] = 1.0;
            continue;
        }
        double s = 0.0;
        for (auto& w : row) s += (w = u(rng));
        for (auto& w : row) w /= s;
    }
    return ch;
}

Verdict c12_properties() {
    Verdict o;
    std::mt19937_64 rng(12);
    double worst_chain = 0.0, worst_identity = 0.0;
    int chain = 0, identity = 0, equiv = 0, power = 0;
    bool equiv_ok = true, power_ok = true;
    for (int r = 0; r < property_rounds; ++r) {
        const auto inst = oracle::random_instance(rng);
        const auto src = source_pmf(inst);
        const auto xs = all_dataset_axes(inst.n_datasets);
        auto wx = xs;
        wx.insert(wx.begin(), "W");

        const auto joint = push_channel(src, random_rows(rng, src.outcomes().size(), 3, false));
        worst_chain = std::max(worst_chain, std::abs(entropy(joint, wx, 2.0) - entropy(joint, xs, 2.0) -
                                                     conditional_entropy(joint, {"W"}, xs, 2.0)));
        ++chain;

        const auto det = push_channel(src, random_rows(rng, src.outcomes().size(), 4, true));
        const auto side = dataset_axes(inst.users[0].side_coords);
        std::vector<std::string> rest;
        for (const auto& x : xs)
            if (std::find(side.begin(), side.end(), x) == side.end()) rest.push_back(x);
        if (!rest.empty()) {
            worst_identity = std::max(worst_identity, std::abs(conditional_mutual_information(det, rest, {"W"}, side, 2.0) -
                                                               conditional_entropy(det, {"W"}, side, 2.0)));
            ++identity;
        }
    }
    o.check(chain >= 100 && worst_chain <= property_tol,
            "chain rule on " + std::to_string(chain) + " instances, worst gap " + sci(worst_chain));
    o.check(identity >= 100 && worst_identity <= property_tol,
            "I(X;W|S) = H(W|S) for deterministic W on " + std::to_string(identity) + " instances, worst gap " +
                sci(worst_identity));

    oracle::RandomInstanceOptions small;
    small.max_tuples = 9;
    std::uniform_int_distribution<int> pick(0, 3);
    for (int r = 0; r < property_rounds; ++r) {
        const auto inst = oracle::random_instance(rng, small);
        const auto g = build_union_graph(inst);
        std::vector<std::vector<TupleId>> cells(4);
        for (auto t : oracle::support_of(inst)) cells[static_cast<std::size_t>(pick(rng))].push_back(t);
        Partition p;
        for (auto& c : cells)
            if (!c.empty()) p.cells.push_back(c);
        p.normalize();
        equiv_ok = equiv_ok && decode_check(inst, p).ok == cells_independent(g, p);
        ++equiv;

        const auto gi = build_union_graph(oracle::random_instance(rng, {{2, 3}, 1, 2, 2, 0.3, 6}));
        const int n = 2 + r % 2;
        const auto pw = or_power(gi, n);
        const auto want = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(gi.vertex_count()), n)));
        power_ok = power_ok && pw.vertex_count() == want &&
                   std::abs(static_cast<double>(or_power_edge_count(gi, n)) - static_cast<double>(pw.edge_count())) <=
                       property_tol;
        ++power;
    }
    o.check(equiv_ok && equiv >= 100, "independent cells <=> decodable on " + std::to_string(equiv) + " instances");
    o.check(power_ok && power >= 100, "OR-power vertex count V^n on " + std::to_string(power) + " instances");
    return o;
}

std::set<int> parse_ids(const std::string& text) {
    std::set<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string only_text, known_text;
    std::uint64_t trials = 10000;
    app.add_option("--only", only_text, "comma-separated criteria to run");
    app.add_option("--known-unattainable", known_text, "criteria whose failure does not fail the run");
    app.add_option("--trials", trials, "Monte-Carlo trials per simulator run")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    const auto only = parse_ids(only_text);
    const auto known = parse_ids(known_text);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"example-1 graphs", c1_graphs},
        {"example-1 MIS family", c2_mis},
        {"example-1 achievable rate", c3_achievable},
        {"slepian-wolf baseline", c4_slepian_wolf},
        {"genie bound", c5_genie},
        {"example-2 compatible functions", c6_compatible},
        {"example-2 splitting scheme", c7_split},
        {"example-2 vector scheme", c8_vector},
        {"oracle ground truth", c9_oracle},
        {"demand-entropy bounds and ordering", c10_prop1},
        {"simulator sanity", [trials] { return c11_simulator(trials); }},
        {"property suites", c12_properties},
    };

    int failed = 0, excused = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& ex) {
            o.check(false, std::string("exception: ") + ex.what());
        }
        const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[k].first << " (" << std::fixed
                  << std::setprecision(2) << secs << " s)";
        if (!o.pass && known.count(id)) std::cout << " [known unattainable]";
        std::cout << "\n";
        for (const auto& l : o.lines) std::cout << "    " << l << "\n";
        std::cout.flush();
        if (!o.pass) (known.count(id) ? excused : failed)++;
    }
    std::cout << "summary: " << failed + excused << " failed";
    if (excused) std::cout << " (" << excused << " known unattainable)";
    std::cout << "\n";
    return failed == 0 ? 0 : 1;
}
