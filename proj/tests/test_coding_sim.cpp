#include <gtest/gtest.h>

#include <random>

#include <cbcast/cbcast.hpp>

#include "oracles.hpp"

using namespace cbcast;

namespace {

const std::string dir = CBCAST_INSTANCES_DIR;

struct Setup {
    Instance inst;
    CharGraph g;
    MISFamily fam;
    CoverDistribution cover;
};

Setup reference_setup() {
    Setup s;
    s.inst = load_instance(dir + "/example1_boolean.json");
    s.g = build_union_graph(s.inst);
    s.fam = enumerate_mis(s.g);
    s.cover = cover_from_json(read_json_file(dir + "/example1_reference_cover.json"), s.g, s.fam);
    return s;
}

SimConfig base_config(int n, double rp, double r, std::uint64_t trials) {
    SimConfig c;
    c.n = n;
    c.R_prime = rp;
    c.R = r;
    c.epsilon_prime = 1.0;
    c.epsilon = 1.25;
    c.trials = trials;
    c.seed = 7;
    return c;
}

} // namespace

TEST(SingleShot, ReferenceCoverPartition) {
    const auto s = reference_setup();
    const auto p = cover_partition(s.inst, s.cover);
    EXPECT_EQ(p.cells.size(), 3u);
    const auto r = single_shot_execute(s.inst, p);
    EXPECT_TRUE(r.ok) << r.failure;
    ASSERT_EQ(r.rows.size(), 8u);
    for (const auto& row : r.rows) EXPECT_EQ(row.decoded, row.truth);
}

TEST(SingleShot, ConstantDemandSingleCell) {
    Instance inst;
    inst.q = 3;
    inst.n_datasets = 2;
    inst.pmf = uniform_pmf(3, 2);
    inst.users.push_back({{1}, expand_demand("2", inst.space()), "2"});
    Partition p;
    p.cells.push_back(support(inst));
    EXPECT_TRUE(single_shot_execute(inst, p).ok);
}

TEST(SingleShot, ExampleTwoVectorScheme) {
    const auto inst = load_instance(dir + "/example2_linear.json");
    const auto scheme = vector_scheme_from_json(read_json_file(dir + "/example2_vector_scheme.json"), inst);
    const auto r = single_shot_execute(inst, Partition{vector_scheme_partition(inst, scheme)});
    EXPECT_TRUE(r.ok) << r.failure;
    EXPECT_EQ(r.rows.size(), 27u);
}

TEST(SingleShot, MismatchIsReported) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    Partition p;
    p.cells.push_back(support(inst));
    const auto r = single_shot_execute(inst, p);
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.failure.empty());
}

TEST(SingleShot, AgreesWithDecodeCheck) {
    std::mt19937_64 rng(61);
    oracle::RandomInstanceOptions opt;
    opt.max_tuples = 8;
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = oracle::random_instance(rng, opt);
        const auto s = oracle::support_of(inst);
        if (s.size() > 6) continue;
        oracle::for_each_partition(s, [&](const auto& cells) {
            Partition p;
            for (const auto& c : cells) p.cells.emplace_back(c.begin(), c.end());
            ASSERT_EQ(single_shot_execute(inst, p).ok, decode_check(inst, p).ok);
        });
    }
}

TEST(Typicality, CountRange) {
    EXPECT_EQ(typical_count_range(0.5, 10, 0.2), (std::pair<int, int>{4, 6}));
    EXPECT_EQ(typical_count_range(0.25, 8, 1.0), (std::pair<int, int>{0, 4}));
}

TEST(Typicality, IidSequencesAreUsuallyTypical) {
    PairTable ref(2, 3);
    const double probs[2][3] = {{0.1, 0.2, 0.15}, {0.25, 0.05, 0.25}};
    std::vector<double> cdf;
    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b) {
            ref.at(a, b) = probs[a][b];
            cdf.push_back(acc += probs[a][b]);
        }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int typical = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::uint32_t> a(10000), b(10000);
        for (std::size_t t = 0; t < a.size(); ++t) {
            const auto k = static_cast<std::uint32_t>(std::upper_bound(cdf.begin(), cdf.end(), u(rng) * acc) - cdf.begin());
            a[t] = k / 3;
            b[t] = k % 3;
        }
        typical += typicality_check(a, b, ref, 0.1);
    }
    EXPECT_GE(typical, 99);
}

TEST(Typicality, ZeroProbabilitySymbolFails) {
    PairTable ref(2, 2);
    ref.at(0, 0) = 0.5;
    ref.at(1, 1) = 0.5;
    EXPECT_TRUE(typicality_check({0, 1}, {0, 1}, ref, 0.5));
    EXPECT_FALSE(typicality_check({0, 1}, {0, 0}, ref, 100.0));
}

TEST(Typicality, LengthOneWithWideSlack) {
    PairTable ref(2, 2);
    ref.at(0, 0) = 0.1;
    ref.at(0, 1) = 0.2;
    ref.at(1, 0) = 0.3;
    ref.at(1, 1) = 0.4;
    // Slack wide enough that a single draw of any positive-probability
    // symbol is within range: (1 - p) / p for the smallest p.
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b) EXPECT_TRUE(typicality_check({a}, {b}, ref, 9.0));
}

TEST(Typicality, LengthMismatch) {
    PairTable ref(1, 1);
    ref.at(0, 0) = 1.0;
    EXPECT_THROW(typicality_check({0, 0}, {0}, ref, 0.1), std::invalid_argument);
}

TEST(SimConfig, Validation) {
    EXPECT_TRUE(validate_sim_config(base_config(4, 1.7, 1.7, 10)).empty());
    EXPECT_FALSE(validate_sim_config(base_config(0, 1.7, 1.7, 10)).empty());
    EXPECT_FALSE(validate_sim_config(base_config(4, 1.0, 1.7, 10)).empty());
    auto c = base_config(4, 1.7, 1.7, 10);
    c.epsilon = c.epsilon_prime;
    EXPECT_FALSE(validate_sim_config(c).empty());
    c = base_config(4, 1.7, 1.7, 0);
    EXPECT_FALSE(validate_sim_config(c).empty());
}

TEST(SimConfig, CodebookShape) {
    const auto s = codebook_shape(2, base_config(8, 1.7, 1.45, 1));
    EXPECT_EQ(s.codewords, 12416u);   // floor(2^13.6)
    EXPECT_EQ(s.bin_size, 4u);
    EXPECT_EQ(s.bins, 3104u);
    EXPECT_EQ(codebook_shape(2, base_config(8, 1.7, 1.7, 1)).bin_size, 1u);
    EXPECT_THROW(codebook_shape(2, base_config(20, 1.7, 1.7, 1)), GuardError);
}

TEST(Binning, ThresholdsOfReferenceCover) {
    const auto s = reference_setup();
    const auto t = channel_thresholds(s.inst, s.cover, 2.0);
    EXPECT_NEAR(t.covering, 1.5, 1e-9);
    EXPECT_NEAR(t.binning, 1.5, 1e-9);
}

TEST(Binning, DeterministicSingleLetterIsErrorFree) {
    const auto s = reference_setup();
    SimConfig c = base_config(1, 10.0, 10.0, 500);
    c.epsilon_prime = 8.0;
    c.epsilon = 9.0;
    const auto r = binning_simulate(s.inst, s.fam, s.cover, c);
    EXPECT_EQ(r.trials_with_error, 0u);
    EXPECT_EQ(r.er3_total(), 0u);
}

TEST(Binning, OneBinPerCodewordHasNoCollisions) {
    const auto s = reference_setup();
    const auto r = binning_simulate(s.inst, s.fam, s.cover, base_config(8, 1.7, 1.7, 2000));
    EXPECT_EQ(r.er3_total(), 0u);
}

TEST(Binning, SingleCodewordCannotCover) {
    const auto s = reference_setup();
    SimConfig c = base_config(8, 0.0, 0.0, 500);
    c.epsilon_prime = 0.1;
    c.epsilon = 0.2;
    const auto r = binning_simulate(s.inst, s.fam, s.cover, c);
    EXPECT_EQ(r.shape.codewords, 1u);
    for (const auto& u : r.per_user) EXPECT_GE(r.rate(u.er1), 0.9);
}

TEST(Binning, ReproducibleAcrossThreadCounts) {
    const auto s = reference_setup();
    auto c = base_config(8, 1.7, 1.45, 400);
    c.keep_traces = true;
    const auto a = binning_simulate(s.inst, s.fam, s.cover, c);
    c.threads = 4;
    const auto b = binning_simulate(s.inst, s.fam, s.cover, c);
    ASSERT_EQ(a.traces.size(), b.traces.size());
    for (std::size_t k = 0; k < a.traces.size(); ++k) {
        EXPECT_EQ(a.traces[k].source, b.traces[k].source);
        EXPECT_EQ(a.traces[k].l_star, b.traces[k].l_star);
        EXPECT_EQ(a.traces[k].error, b.traces[k].error);
    }
    EXPECT_EQ(a.trials_with_error, b.trials_with_error);
}

TEST(Binning, TraceInvariants) {
    const auto s = reference_setup();
    auto c = base_config(8, 1.7, 1.2, 300);
    c.keep_traces = true;
    const auto r = binning_simulate(s.inst, s.fam, s.cover, c);
    for (const auto& tr : r.traces) {
        EXPECT_EQ(tr.m_star, tr.l_star / r.shape.bin_size);
        EXPECT_LT(tr.l_star, r.shape.codewords);
        if (tr.typical_codewords == 0) {
            EXPECT_EQ(tr.l_star, 0u);
        }
        for (std::size_t i = 0; i < tr.error.size(); ++i) {
            if (tr.error[i] == ErrorClass::none) {
                EXPECT_GE(tr.decoded[i], 0);
                EXPECT_EQ(tr.estimate[i].size(), 8u);
            }
            if (tr.decoded[i] < 0) {
                EXPECT_NE(tr.error[i], ErrorClass::none);
            }
        }
    }
}

TEST(Binning, CollisionsFallAsBinRateGrows) {
    const auto s = reference_setup();
    std::vector<SimSummary> runs;
    for (double r : {1.2, 1.45, 1.7}) runs.push_back(binning_simulate(s.inst, s.fam, s.cover, base_config(8, 1.7, r, 2000)));
    for (std::size_t i = 0; i < s.inst.users.size(); ++i) {
        for (std::size_t k = 1; k < runs.size(); ++k) {
            const double prev = runs[k - 1].rate(runs[k - 1].per_user[i].er3);
            const double cur = runs[k].rate(runs[k].per_user[i].er3);
            const double slack = 2.0 * std::sqrt(prev * (1 - prev) / 2000.0 + cur * (1 - cur) / 2000.0);
            EXPECT_LE(cur, prev + slack) << "user " << i + 1 << " step " << k;
        }
    }
    EXPECT_GT(runs[0].er3_total(), 0u);
    EXPECT_EQ(runs[2].er3_total(), 0u);
}

TEST(Binning, LazyAndExplicitCodebooksAgree) {
    const auto s = reference_setup();
    auto c = base_config(4, 1.7, 1.2, 3000);
    const auto lazy = binning_simulate(s.inst, s.fam, s.cover, c);
    c.mode = CodebookMode::explicit_codebook;
    const auto expl = binning_simulate(s.inst, s.fam, s.cover, c);
    const double a = lazy.total_error_rate(), b = expl.total_error_rate();
    const double se = std::sqrt(a * (1 - a) / 3000.0 + b * (1 - b) / 3000.0);
    EXPECT_LE(std::abs(a - b), 4.0 * se + 1e-3);
}

TEST(Binning, RejectsBadConfig) {
    const auto s = reference_setup();
    EXPECT_THROW(binning_simulate(s.inst, s.fam, s.cover, base_config(4, 1.0, 1.5, 10)), ValidationError);
}
