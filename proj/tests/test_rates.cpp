#include <gtest/gtest.h>

#include <random>

#include <cbcast/cbcast.hpp>

#include "oracles.hpp"

using namespace cbcast;

namespace {

const std::string dir = CBCAST_INSTANCES_DIR;

struct Loaded {
    Instance inst;
    CharGraph g;
    MISFamily fam;
};

Loaded load(const std::string& file) {
    Loaded l;
    l.inst = load_instance(dir + "/" + file);
    l.g = build_union_graph(l.inst);
    l.fam = enumerate_mis(l.g);
    return l;
}

Loaded from_instance(Instance inst) {
    Loaded l;
    l.inst = std::move(inst);
    l.g = build_union_graph(l.inst);
    l.fam = enumerate_mis(l.g);
    return l;
}

Instance restrict_users(Instance inst, std::vector<std::size_t> keep) {
    std::vector<UserSpec> us;
    for (auto k : keep) us.push_back(inst.users[k]);
    inst.users = std::move(us);
    return inst;
}

// Exact minimum of max_i H(M|S_i) over partitions of the support into
// independent sets, by brute-force enumeration.
double brute_partition_optimum(const Instance& inst) {
    const auto edges = oracle::union_edges(inst);
    double best = 1e300;
    oracle::for_each_partition(oracle::support_of(inst), [&](const auto& cells) {
        std::map<std::uint32_t, int> label;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            for (auto a : cells[k])
                for (auto b : cells[k])
                    if (a < b && edges.count({a, b})) return;
            for (auto t : cells[k]) label[t] = static_cast<int>(k);
        }
        best = std::min(best, oracle::max_conditional(inst, label, inst.q));
    });
    return best;
}

} // namespace

TEST(CoverRate, ReferenceCoverCover) {
    const auto l = load("example1_boolean.json");
    const auto cover = cover_from_json(read_json_file(dir + "/example1_reference_cover.json"), l.g, l.fam);
    const auto r = evaluate_cover_rate(l.inst, l.fam, cover, 2.0);
    EXPECT_NEAR(r.value, 1.5, 1e-9);
    ASSERT_EQ(r.per_user.size(), 3u);
    EXPECT_NEAR(r.per_user[0], 1.155639, 1e-6);
    EXPECT_NEAR(r.per_user[1], 1.5, 1e-9);
    EXPECT_NEAR(r.per_user[2], 1.5, 1e-9);
    EXPECT_EQ(r.unit, "bits");
    EXPECT_EQ(cover_decodability_violation(l.inst, l.fam, cover), "");
}

TEST(CoverRate, ConstantCoverOfEdgelessGraph) {
    Instance inst;
    inst.q = 2;
    inst.n_datasets = 2;
    inst.pmf = uniform_pmf(2, 2);
    inst.users.push_back({{1}, expand_demand("X1", inst.space()), "X1"});
    const auto l = from_instance(inst);
    ASSERT_EQ(l.fam.sets.size(), 1u);
    const auto c = CoverDistribution::deterministic(std::vector<std::uint32_t>(4, 0), 1);
    EXPECT_NEAR(evaluate_cover_rate(l.inst, l.fam, c, 2.0).value, 0.0, 1e-12);
}

TEST(CoverRate, MixedRowIsNoBetterThanOptimizer) {
    const auto l = load("example1_boolean.json");
    const auto cover = cover_from_json(read_json_file(dir + "/example1_mixed_cover.json"), l.g, l.fam);
    EXPECT_FALSE(cover.is_deterministic());
    const auto r = evaluate_cover_rate(l.inst, l.fam, cover, 2.0);
    const auto best = optimize_achievable(l.inst, l.fam, 2.0);
    EXPECT_GE(r.value, best.report.value - 1e-9);
    EXPECT_NEAR(r.value, 1.702820, 1e-6);
}

TEST(CoverRate, RejectsInvalidCover) {
    const auto l = load("example1_boolean.json");
    CoverDistribution c;
    c.rows.assign(8, std::vector<double>(l.fam.sets.size(), 0.0));
    EXPECT_THROW(evaluate_cover_rate(l.inst, l.fam, c, 2.0), ValidationError);
}

TEST(Achievable, ExampleOneIsCertifiedOneAndAHalf) {
    const auto l = load("example1_boolean.json");
    const auto res = optimize_achievable(l.inst, l.fam, 2.0);
    EXPECT_NEAR(res.report.value, 1.5, 1e-9);
    EXPECT_TRUE(res.exhaustive);
    EXPECT_TRUE(res.certified);
    EXPECT_FALSE(res.budget_exhausted);
    EXPECT_EQ(cover_decodability_violation(l.inst, l.fam, res.witness), "");
    EXPECT_NEAR(evaluate_cover_rate(l.inst, l.fam, res.witness, 2.0).value, res.report.value, 1e-12);
    double mx = 0.0;
    for (double h : res.report.per_user) mx = std::max(mx, h);
    EXPECT_NEAR(mx, res.report.value, 1e-9);
}

TEST(Achievable, ForcedHeuristicOnExampleOne) {
    const auto l = load("example1_boolean.json");
    OptimizerBudget b;
    b.mode = SearchMode::heuristic;
    b.max_evaluations = 20000;
    b.restarts = 4;
    const auto res = optimize_achievable(l.inst, l.fam, 2.0, b);
    EXPECT_FALSE(res.certified);
    EXPECT_NEAR(res.report.value, 1.5, 1e-9);
    EXPECT_NE(res.report.method.find("heuristic"), std::string::npos);
}

TEST(Achievable, HeuristicIsDeterministicForFixedSeed) {
    const auto l = load("example2_linear.json");
    OptimizerBudget b;
    b.max_evaluations = 100000;
    b.restarts = 4;
    b.threads = 2;
    const auto a = optimize_achievable(l.inst, l.fam, 3.0, b);
    b.threads = 1;
    const auto c = optimize_achievable(l.inst, l.fam, 3.0, b);
    EXPECT_EQ(a.report.value, c.report.value);
    EXPECT_FALSE(a.exhaustive);
    EXPECT_LE(a.report.value, slepian_wolf_baseline(l.inst, 3.0).value + 1e-9);
    EXPECT_EQ(cover_decodability_violation(l.inst, l.fam, a.witness), "");
}

TEST(Achievable, ForcedExhaustiveRespectsGuard) {
    const auto l = load("example2_linear.json");
    OptimizerBudget b;
    b.mode = SearchMode::exhaustive;
    EXPECT_THROW(optimize_achievable(l.inst, l.fam, 3.0, b), GuardError);
}

TEST(Achievable, ConstantDemandIsZero) {
    Instance inst;
    inst.q = 3;
    inst.n_datasets = 2;
    inst.pmf = uniform_pmf(3, 2);
    inst.users.push_back({{}, expand_demand("0", inst.space()), "0"});
    const auto l = from_instance(inst);
    EXPECT_NEAR(optimize_achievable(l.inst, l.fam, 3.0).report.value, 0.0, 1e-12);
}

TEST(Achievable, SingleUserMatchesPartitionOracle) {
    const auto full = load_instance(dir + "/example1_boolean.json");
    for (std::size_t u = 0; u < 3; ++u) {
        const auto l = from_instance(restrict_users(full, {u}));
        const auto ach = optimize_achievable(l.inst, l.fam, 2.0);
        const auto orc = oracle_search(l.inst, l.g, OracleObjective::max_conditional, 2.0);
        EXPECT_TRUE(ach.certified);
        EXPECT_NEAR(ach.report.value, orc.report.value, 1e-9) << "user " << u + 1;
        EXPECT_NEAR(orc.report.value, brute_partition_optimum(l.inst), 1e-9);
    }
}

TEST(Achievable, NeverWorseThanRandomCovers) {
    const auto l = load("example1_boolean.json");
    const auto best = optimize_achievable(l.inst, l.fam, 2.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        CoverDistribution c;
        c.rows.assign(8, std::vector<double>(l.fam.sets.size(), 0.0));
        for (VertexId v = 0; v < 8; ++v) {
            double total = 0.0;
            for (auto w : l.fam.sets_containing(v)) total += (c.rows[v][w] = u(rng));
            for (auto& x : c.rows[v]) x /= total;
        }
        EXPECT_GE(evaluate_cover_rate(l.inst, l.fam, c, 2.0).value, best.report.value - 1e-9);
    }
}

TEST(Baseline, SlepianWolfAndExplicitMessage) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    EXPECT_NEAR(slepian_wolf_baseline(inst, 2.0).value, 2.0, 1e-12);
    const auto sp = inst.space();
    const auto r = explicit_message_rate(inst, {expand_demand("X1 ^ X2", sp), expand_demand("X2 ^ X3", sp)}, 2.0);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
    // Every user recovers all datasets from the two parities and its side information.
    for (const auto& n : r.notes) EXPECT_NE(n.find("=0.000000"), std::string::npos) << n;
}

TEST(Baseline, FullSideInformationIsZero) {
    Instance inst;
    inst.q = 3;
    inst.n_datasets = 2;
    inst.pmf = uniform_pmf(3, 2);
    inst.users.push_back({{1, 2}, expand_demand("X1 + X2", inst.space()), "X1 + X2"});
    EXPECT_NEAR(slepian_wolf_baseline(inst, 3.0).value, 0.0, 1e-12);
    EXPECT_NEAR(genie_lower_bound(inst, {0}, 3.0).value, 0.0, 1e-12);
}

TEST(Prop1, Interpretations) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    const auto joint = prop1_lower_bound(inst, Prop1Interpretation::joint_demand, 2.0);
    EXPECT_NEAR(joint.value, 1.75, 1e-12);
    EXPECT_NE(joint.name.find("joint-demand"), std::string::npos);
    // Brute force: distribution of the demand triple.
    std::map<std::vector<int>, double> triple;
    for (auto t : oracle::support_of(inst)) {
        std::vector<int> k;
        for (const auto& u : inst.users) k.push_back(u.demand(t));
        triple[k] += inst.pmf[t];
    }
    EXPECT_NEAR(joint.value, oracle::entropy(triple), 1e-12);
    const auto erased = prop1_lower_bound(inst, Prop1Interpretation::residual_with_erasure, 2.0);
    EXPECT_NE(erased.name.find("residual-with-erasure"), std::string::npos);
    EXPECT_NEAR(erased.value, 2.75, 1e-12);
}

TEST(Prop1, ConstantDemandsAreZero) {
    Instance inst;
    inst.q = 2;
    inst.n_datasets = 2;
    inst.pmf = uniform_pmf(2, 2);
    for (int k = 0; k < 2; ++k) inst.users.push_back({{}, expand_demand("1", inst.space()), "1"});
    for (auto i : {Prop1Interpretation::joint_demand, Prop1Interpretation::residual_with_erasure})
        EXPECT_NEAR(prop1_lower_bound(inst, i, 2.0).value, 0.0, 1e-12);
}

TEST(Genie, OrderingThreeOneTwo) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    const auto r = genie_lower_bound(inst, {2, 0, 1}, 2.0);
    ASSERT_EQ(r.terms.size(), 3u);
    EXPECT_NEAR(r.terms[0], 0.905639, 1e-6);
    EXPECT_NEAR(r.terms[1], 0.25, 1e-12);
    EXPECT_NEAR(r.terms[2], 0.0, 1e-12);
    EXPECT_NEAR(r.value, 1.155639, 1e-6);
    EXPECT_EQ(r.witness, "ordering 3,1,2");
}

TEST(Genie, BestOrderingDominatesAndTermsMatchOracle) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    const auto best = genie_lower_bound_best(inst, 2.0);
    EXPECT_GE(best.value, 1.155639 - 1e-6);
    std::vector<std::size_t> perm{0, 1, 2};
    do {
        const auto r = genie_lower_bound(inst, perm, 2.0);
        EXPECT_LE(r.value, best.value + 1e-12);
        const auto want = oracle::genie_terms(inst, perm);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.terms[k], want[k], 1e-12);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Genie, RejectsBadOrdering) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    EXPECT_THROW(genie_lower_bound(inst, {0, 0, 1}, 2.0), std::invalid_argument);
    EXPECT_THROW(genie_lower_bound(inst, {0, 1}, 2.0), std::invalid_argument);
}

TEST(Sandwich, RandomInstances) {
    std::mt19937_64 rng(77);
    oracle::RandomInstanceOptions opt;
    opt.max_tuples = 9;
    int checked = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const auto l = from_instance(oracle::random_instance(rng, opt));
        if (oracle::support_of(l.inst).size() > 9) continue;
        const double base = 2.0;
        const double genie = genie_lower_bound_best(l.inst, base).value;
        const double orc = oracle_search(l.inst, l.g, OracleObjective::max_conditional, base).report.value;
        OptimizerBudget b;
        b.max_evaluations = 200000;
        const auto ach = optimize_achievable(l.inst, l.fam, base, b);
        const double sw = slepian_wolf_baseline(l.inst, base).value;
        ASSERT_LE(genie, orc + 1e-9) << trial;
        ASSERT_LE(orc, ach.deterministic_value + 1e-9) << trial;
        ASSERT_LE(ach.report.value, ach.deterministic_value + 1e-9) << trial;
        ASSERT_LE(ach.report.value, sw + 1e-9) << trial;
        ASSERT_EQ(cover_decodability_violation(l.inst, l.fam, ach.witness), "") << trial;
        ++checked;
    }
    EXPECT_GE(checked, 100);
}
