#include <gtest/gtest.h>

#include <random>

#include <cbcast/entropy.hpp>
#include <cbcast/instance_io.hpp>
#include <cbcast/scheme_io.hpp>

#include "oracles.hpp"

using namespace cbcast;

namespace {

const std::string dir = CBCAST_INSTANCES_DIR;

JointPMF two_axis(const std::vector<std::vector<double>>& table) {
    std::vector<Outcome> outs;
    for (std::uint32_t a = 0; a < table.size(); ++a)
        for (std::uint32_t b = 0; b < table[a].size(); ++b)
            if (table[a][b] > 0) outs.push_back({{a, b}, table[a][b]});
    return JointPMF({{"A", table.size()}, {"B", table[0].size()}}, outs);
}

// Example 1 with the cover from the reference table pushed through as W.
JointPMF example1_with_cover() {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    const auto g = build_union_graph(inst);
    const auto fam = enumerate_mis(g);
    const auto cover = cover_from_json(read_json_file(dir + "/example1_reference_cover.json"), g, fam);
    return push_channel(source_pmf(inst), cover.rows);
}

} // namespace

TEST(Entropy, BinaryQuarter) {
    JointPMF p({{"A", 2}}, {{{0}, 0.25}, {{1}, 0.75}});
    EXPECT_NEAR(entropy(p, 2.0), 0.811278, 1e-6);
    EXPECT_NEAR(entropy(p, {"A"}, 2.0), 0.811278, 1e-6);
}

TEST(Entropy, UniformOverEight) {
    std::vector<Outcome> outs;
    for (std::uint32_t k = 0; k < 8; ++k) outs.push_back({{k}, 0.125});
    JointPMF p({{"A", 8}}, outs);
    EXPECT_NEAR(entropy(p, 2.0), 3.0, 1e-12);
    EXPECT_NEAR(entropy(p, 8.0), 1.0, 1e-12);
}

TEST(Entropy, DegenerateIsZero) {
    JointPMF p({{"A", 3}}, {{{2}, 1.0}});
    EXPECT_EQ(entropy(p, 2.0), 0.0);
}

TEST(Entropy, BaseChangeScales) {
    JointPMF p({{"A", 3}}, {{{0}, 0.5}, {{1}, 0.3}, {{2}, 0.2}});
    EXPECT_NEAR(entropy(p, 3.0), entropy(p, 2.0) / std::log2(3.0), 1e-12);
    EXPECT_THROW(entropy(p, 1.0), std::invalid_argument);
}

TEST(Entropy, ConstructionErrors) {
    EXPECT_THROW(JointPMF({{"A", 2}, {"A", 2}}, {{{0, 0}, 1.0}}), std::invalid_argument);
    EXPECT_THROW(JointPMF({{"A", 2}}, {{{0}, 0.5}}), std::invalid_argument);
    EXPECT_THROW(JointPMF({{"A", 2}}, {{{2}, 1.0}}), std::invalid_argument);
    JointPMF p({{"A", 2}}, {{{0}, 1.0}});
    EXPECT_THROW(entropy(p, {"B"}, 2.0), std::invalid_argument);
}

TEST(Entropy, ConditionalOfIndependentAndIdentical) {
    const auto ind = two_axis({{0.25, 0.25}, {0.25, 0.25}});
    EXPECT_NEAR(conditional_entropy(ind, {"A"}, {"B"}, 2.0), 1.0, 1e-12);
    const auto same = two_axis({{0.5, 0.0}, {0.0, 0.5}});
    EXPECT_NEAR(conditional_entropy(same, {"A"}, {"B"}, 2.0), 0.0, 1e-12);
    EXPECT_NEAR(conditional_entropy(same, {"A"}, {"A"}, 2.0), 0.0, 1e-12);
}

TEST(Entropy, MutualInformationChecks) {
    const auto same = two_axis({{0.5, 0.0}, {0.0, 0.5}});
    EXPECT_NEAR(conditional_mutual_information(same, {"A"}, {"B"}, {}, 2.0), 1.0, 1e-12);
    EXPECT_THROW(conditional_mutual_information(same, {"A"}, {"A"}, {}, 2.0), std::invalid_argument);
}

TEST(Entropy, ReferenceCoverCoverConditionals) {
    const auto p = example1_with_cover();
    EXPECT_NEAR(conditional_entropy(p, {"W"}, {"X2"}, 2.0), 1.5, 1e-6);
    // I(X;W|X1) is evaluated as I(X2,X3;W|X1); the groups must be disjoint.
    EXPECT_NEAR(conditional_mutual_information(p, {"X2", "X3"}, {"W"}, {"X1"}, 2.0), 1.155639, 1e-6);
    EXPECT_THROW(conditional_mutual_information(p, {"X1", "X2", "X3"}, {"W"}, {"X1"}, 2.0), std::invalid_argument);
    // W is a function of X, so I(X;W|S) = H(W|S).
    const std::vector<std::string> x{"X1", "X2", "X3"};
    for (const std::string& s : x) {
        std::vector<std::string> rest;
        for (const auto& a : x)
            if (a != s) rest.push_back(a);
        EXPECT_NEAR(conditional_mutual_information(p, rest, {"W"}, {s}, 2.0), conditional_entropy(p, {"W"}, {s}, 2.0),
                    1e-12);
    }
    // Each tuple gets its own outcome with weight 1/8.
    EXPECT_EQ(p.outcomes().size(), 8u);
    for (const auto& o : p.outcomes()) EXPECT_DOUBLE_EQ(o.weight, 0.125);
}

TEST(Entropy, MatchesExplicitTableOracle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> t(3, std::vector<double>(4));
        double total = 0.0;
        for (auto& r : t)
            for (auto& x : r) total += (x = u(rng) < 0.3 ? 0.0 : u(rng));
        if (total == 0.0) continue;
        for (auto& r : t)
            for (auto& x : r) x /= total;
        const auto p = two_axis(t);
        std::map<std::pair<int, int>, double> joint;
        std::map<int, double> ma;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 4; ++b) {
                joint[{a, b}] += t[a][b];
                ma[a] += t[a][b];
            }
        EXPECT_NEAR(conditional_entropy(p, {"A"}, {"B"}, 2.0), oracle::conditional(joint), 1e-12);
        EXPECT_NEAR(entropy(p, {"A"}, 3.0), oracle::entropy(ma, 3.0), 1e-12);
    }
}

TEST(Entropy, SourceWithDemandsAndChainRule) {
    const auto inst = load_instance(dir + "/example2_linear.json");
    const auto p = with_demands(inst, source_pmf(inst));
    EXPECT_NEAR(entropy(p, all_dataset_axes(3), 3.0), 3.0, 1e-12);
    EXPECT_NEAR(conditional_entropy(p, {"F1"}, {"X1"}, 3.0), 1.0, 1e-12);
    EXPECT_NEAR(conditional_entropy(p, {"F1"}, {"X2", "X3"}, 3.0), 0.0, 1e-12);
    const double lhs = entropy(p, {"F1", "F2"}, 3.0);
    const double rhs = entropy(p, {"F1"}, 3.0) + conditional_entropy(p, {"F2"}, {"F1"}, 3.0);
    EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(Entropy, GenieTermOfUserThree) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    const auto p = with_demands(inst, source_pmf(inst));
    EXPECT_NEAR(conditional_entropy(p, {"F3"}, {"X3"}, 2.0), 0.905639, 1e-6);
}

TEST(Entropy, PushChannelIdentityAndUniform) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    const auto src = source_pmf(inst);
    std::vector<std::vector<double>> id(8, std::vector<double>(8, 0.0));
    for (std::size_t k = 0; k < 8; ++k) id[k][k] = 1.0;
    const auto diag = push_channel(src, id);
    EXPECT_NEAR(conditional_entropy(diag, {"W"}, all_dataset_axes(3), 2.0), 0.0, 1e-12);
    EXPECT_NEAR(conditional_entropy(diag, all_dataset_axes(3), {"W"}, 2.0), 0.0, 1e-12);
    for (const auto& o : diag.outcomes()) {
        std::vector<int> d(o.values.begin() + 1, o.values.end());
        EXPECT_EQ(o.values[0], inst.space().encode(d));
    }
    const auto coin = push_channel(src, std::vector<std::vector<double>>(8, {0.5, 0.5}));
    EXPECT_NEAR(conditional_entropy(coin, {"W"}, {"X1", "X2"}, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(entropy(coin, {"W"}, 2.0), 1.0, 1e-12);
}

TEST(Entropy, ConditioningReducesEntropy) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> t(4, std::vector<double>(3));
        double total = 0.0;
        for (auto& r : t)
            for (auto& x : r) total += (x = 0.01 + u(rng));
        for (auto& r : t)
            for (auto& x : r) x /= total;
        const auto p = two_axis(t);
        EXPECT_LE(conditional_entropy(p, {"A"}, {"B"}, 2.0), entropy(p, {"A"}, 2.0) + 1e-9);
        EXPECT_NEAR(entropy(p, 4.0) * std::log2(4.0), entropy(p, 2.0), 1e-9);
    }
}

TEST(Entropy, PushChannelValidatesRows) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    const auto src = source_pmf(inst);
    std::vector<std::vector<double>> bad(8, std::vector<double>{0.5, 0.4});
    EXPECT_THROW(push_channel(src, bad), std::invalid_argument);
    std::vector<std::vector<double>> short_rows(7, std::vector<double>{1.0});
    EXPECT_THROW(push_channel(src, short_rows), std::invalid_argument);
}

TEST(Entropy, UnitNames) {
    EXPECT_EQ(unit_name(2.0, 3), "bits");
    EXPECT_EQ(unit_name(3.0, 3), "q-ary symbols");
}
