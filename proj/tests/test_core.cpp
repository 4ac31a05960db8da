#include <gtest/gtest.h>

#include <random>

#include <cbcast/demand_expr.hpp>
#include <cbcast/instance.hpp>
#include <cbcast/instance_io.hpp>

#include "oracles.hpp"

using namespace cbcast;

namespace {

const std::string dir = CBCAST_INSTANCES_DIR;

bool has_code(const std::vector<Violation>& vs, const std::string& code) {
    for (const auto& v : vs)
        if (v.code == code) return true;
    return false;
}

Instance tiny(int q, int n) {
    Instance inst;
    inst.q = q;
    inst.n_datasets = n;
    inst.pmf = uniform_pmf(q, n);
    inst.users.push_back({{1}, expand_demand("X1", inst.space()), "X1"});
    return inst;
}

} // namespace

TEST(TupleSpace, LexicographicWithFirstCoordinateMostSignificant) {
    TupleSpace sp{2, 3};
    EXPECT_EQ(sp.size(), 8u);
    EXPECT_EQ(sp.encode({1, 0, 0}), 4u);
    EXPECT_EQ(sp.digit(4, 1), 1);
    EXPECT_EQ(sp.digit(4, 3), 0);
    EXPECT_EQ(sp.format(3), "011");
    EXPECT_EQ(sp.parse("110"), 6u);
    for (TupleId t = 0; t < 8; ++t) EXPECT_EQ(sp.parse(sp.format(t)), t);
}

TEST(TupleSpace, WideFieldsUseDots) {
    TupleSpace sp{11, 2};
    EXPECT_EQ(sp.format(sp.encode({10, 3})), "10.3");
    EXPECT_EQ(sp.parse("10.3"), sp.encode({10, 3}));
    EXPECT_THROW(sp.parse("10..3"), std::invalid_argument);
}

TEST(TupleSpace, SizeGuard) {
    TupleSpace sp{2, 25};
    EXPECT_THROW(sp.size(), std::length_error);
}

TEST(DemandExpr, BooleanAndMatchesTruthTable) {
    const auto e = parse_demand("X1 & X2 & X3", 2, 3);
    const auto t = expand_demand(e, TupleSpace{2, 3});
    for (TupleId x = 0; x < 8; ++x) EXPECT_EQ(t(x), x == 7 ? 1 : 0) << x;
}

TEST(DemandExpr, ConstantZero) {
    const auto e = parse_demand("0", 3, 2);
    EXPECT_EQ(e, DemandExpr::constant(0));
    for (int v : expand_demand(e, TupleSpace{3, 2}).values) EXPECT_EQ(v, 0);
}

TEST(DemandExpr, LinearTernaryWithExplicitAndImplicitProduct) {
    const TupleSpace sp{3, 3};
    const auto a = expand_demand("X1 + 2*X2", sp);
    const auto b = expand_demand("X1 + 2X2", sp);
    EXPECT_EQ(a, b);
    for (TupleId x = 0; x < 27; ++x) {
        const auto d = oracle::decode(x, 3, 3);
        EXPECT_EQ(a(x), (d[0] + 2 * d[1]) % 3);
    }
}

TEST(DemandExpr, OrIsZeroOnlyAtOrigin) {
    const auto t = expand_demand("X1 | X2 | X3", TupleSpace{2, 3});
    for (TupleId x = 0; x < 8; ++x) EXPECT_EQ(t(x), x == 0 ? 0 : 1);
}

TEST(DemandExpr, IdentityTable) {
    const auto t = expand_demand("X1", TupleSpace{2, 1});
    EXPECT_EQ(t.values, (std::vector<int>{0, 1}));
}

TEST(DemandExpr, SumOfLastTwo) {
    const auto t = expand_demand("X2 + X3", TupleSpace{3, 3});
    for (TupleId x = 0; x < 27; ++x) {
        const auto d = oracle::decode(x, 3, 3);
        EXPECT_EQ(t(x), (d[1] + d[2]) % 3);
    }
}

TEST(DemandExpr, Errors) {
    EXPECT_THROW(parse_demand("X4", 2, 3), ParseError);
    EXPECT_THROW(parse_demand("X1 +", 3, 2), ParseError);
    EXPECT_THROW(parse_demand("X1 & X2", 3, 2), ParseError);
    EXPECT_THROW(parse_demand("5", 3, 2), ParseError);
    try {
        parse_demand("X1 & X2", 3, 2);
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::boolean_operator);
    }
    try {
        parse_demand("X9", 3, 2);
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::variable_out_of_range);
    }
}

TEST(DemandExpr, NegationAndSubtraction) {
    const TupleSpace sp{5, 2};
    const auto t = expand_demand("-X1 - 2(X2 - 1)", sp);
    for (TupleId x = 0; x < 25; ++x) {
        const auto d = oracle::decode(x, 5, 2);
        EXPECT_EQ(t(x), ((-d[0] - 2 * (d[1] - 1)) % 5 + 10) % 5);
    }
}

// Random expression trees for the homomorphism and round-trip properties.
namespace {

DemandExpr random_expr(std::mt19937_64& rng, int q, int n, int depth) {
    using Op = DemandExpr::Op;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    switch (pick(rng)) {
    case 0: return DemandExpr::var(std::uniform_int_distribution<int>(1, n)(rng));
    case 1: return DemandExpr::constant(std::uniform_int_distribution<int>(0, q - 1)(rng));
    case 2: return DemandExpr::unary(Op::negate, random_expr(rng, q, n, depth - 1));
    case 3: return DemandExpr::binary(Op::add, random_expr(rng, q, n, depth - 1), random_expr(rng, q, n, depth - 1));
    case 4: return DemandExpr::binary(Op::subtract, random_expr(rng, q, n, depth - 1), random_expr(rng, q, n, depth - 1));
    default: return DemandExpr::binary(Op::multiply, random_expr(rng, q, n, depth - 1), random_expr(rng, q, n, depth - 1));
    }
}

DemandExpr random_bool_expr(std::mt19937_64& rng, int n, int depth) {
    using Op = DemandExpr::Op;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
    switch (pick(rng)) {
    case 0: return DemandExpr::var(std::uniform_int_distribution<int>(1, n)(rng));
    case 1: return DemandExpr::constant(std::uniform_int_distribution<int>(0, 1)(rng));
    case 2: return DemandExpr::unary(Op::logical_not, random_bool_expr(rng, n, depth - 1));
    case 3: return DemandExpr::binary(Op::logical_and, random_bool_expr(rng, n, depth - 1), random_bool_expr(rng, n, depth - 1));
    case 4: return DemandExpr::binary(Op::logical_or, random_bool_expr(rng, n, depth - 1), random_bool_expr(rng, n, depth - 1));
    default: return DemandExpr::binary(Op::logical_xor, random_bool_expr(rng, n, depth - 1), random_bool_expr(rng, n, depth - 1));
    }
}

} // namespace

TEST(DemandExpr, ExpansionIsAdditive) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int q = trial % 2 ? 3 : 5;
        const TupleSpace sp{q, 3};
        const auto a = random_expr(rng, q, 3, 3);
        const auto b = random_expr(rng, q, 3, 3);
        const auto ta = expand_demand(a, sp);
        const auto tb = expand_demand(b, sp);
        const auto tab = expand_demand(DemandExpr::binary(DemandExpr::Op::add, a, b), sp);
        for (std::size_t x = 0; x < tab.values.size(); ++x) ASSERT_EQ(tab.values[x], (ta.values[x] + tb.values[x]) % q);
    }
}

TEST(DemandExpr, PrintParseRoundTrip) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        const int q = 3;
        const auto e = random_expr(rng, q, 3, 4);
        const auto text = to_string(e);
        EXPECT_EQ(parse_demand(text, q, 3), e) << text;
        const auto b = random_bool_expr(rng, 3, 4);
        EXPECT_EQ(parse_demand(to_string(b), 2, 3), b) << to_string(b);
    }
}

TEST(Instance, ExampleOneIsValid) {
    const auto inst = load_instance(dir + "/example1_boolean.json");
    EXPECT_TRUE(validate_instance(inst).empty());
    EXPECT_EQ(inst.users.size(), 3u);
    EXPECT_EQ(inst.users[2].demand, expand_demand("X1 & (X2 | X3)", inst.space()));
}

TEST(Instance, Violations) {
    auto inst = tiny(2, 3);
    for (auto& p : inst.pmf) p *= 0.9;
    EXPECT_TRUE(has_code(validate_instance(inst), "pmf-not-normalized"));

    inst = tiny(2, 3);
    inst.users[0].side_coords = {4};
    EXPECT_TRUE(has_code(validate_instance(inst), "coord-out-of-range"));

    inst = tiny(2, 3);
    inst.users[0].side_coords = {1, 1};
    EXPECT_TRUE(has_code(validate_instance(inst), "coord-duplicate"));

    inst = tiny(2, 3);
    inst.users[0].demand.values[3] = 2;
    EXPECT_TRUE(has_code(validate_instance(inst), "demand-out-of-range"));

    inst = tiny(2, 3);
    inst.users.clear();
    EXPECT_TRUE(has_code(validate_instance(inst), "no-users"));

    inst = tiny(2, 3);
    inst.q = 4;
    EXPECT_TRUE(has_code(validate_instance(inst), "field-order-not-prime"));

    inst = tiny(2, 3);
    inst.pmf[0] = -0.1;
    EXPECT_TRUE(has_code(validate_instance(inst), "pmf-negative"));
}

TEST(Instance, Support) {
    auto inst = tiny(2, 3);
    EXPECT_EQ(support(inst).size(), 8u);
    inst.pmf.assign(8, 0.0);
    inst.pmf[0] = inst.pmf[7] = 0.5;
    EXPECT_EQ(support(inst), (std::vector<TupleId>{0, 7}));
    EXPECT_EQ(support(tiny(3, 3)).size(), 27u);
}

TEST(Instance, SupportPropertyOnRandomInstances) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const auto inst = oracle::random_instance(rng);
        double total = 0.0;
        for (auto t : support(inst)) {
            EXPECT_GT(inst.pmf[t], 0.0);
            total += inst.pmf[t];
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Instance, SideClassesGroupEqualSideValues) {
    const auto inst = load_instance(dir + "/example2_linear.json");
    const auto verts = support(inst);
    std::uint32_t count = 0;
    const auto cls = side_classes(inst, 2, verts, &count);
    EXPECT_EQ(count, 3u);
    for (std::size_t a = 0; a < verts.size(); ++a)
        for (std::size_t b = 0; b < verts.size(); ++b)
            EXPECT_EQ(cls[a] == cls[b], oracle::side_of(inst, 2, verts[a]) == oracle::side_of(inst, 2, verts[b]));
}

TEST(InstanceIO, RationalAndDecimalWeights) {
    auto j = nlohmann::json::parse(R"({"q":2,"n_datasets":1,"pmf":["1/4", "0.75"],"users":[{"side":[],"demand":"X1"}]})");
    const auto inst = instance_from_json(j);
    EXPECT_DOUBLE_EQ(inst.pmf[0], 0.25);
    EXPECT_DOUBLE_EQ(inst.pmf[1], 0.75);
    EXPECT_TRUE(validate_instance(inst).empty());
}

TEST(InstanceIO, RoundTrip) {
    const auto inst = load_instance(dir + "/example2_linear.json");
    const auto back = instance_from_json(instance_to_json(inst));
    EXPECT_EQ(back.q, inst.q);
    EXPECT_EQ(back.pmf, inst.pmf);
    ASSERT_EQ(back.users.size(), inst.users.size());
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        EXPECT_EQ(back.users[i].demand, inst.users[i].demand);
        EXPECT_EQ(back.users[i].side_coords, inst.users[i].side_coords);
    }
}

TEST(InstanceIO, StructuralErrors) {
    EXPECT_THROW(instance_from_json(nlohmann::json::parse(R"({"q":2})")), ValidationError);
    EXPECT_THROW(load_instance(dir + "/does_not_exist.json"), ValidationError);
    try {
        instance_from_json(nlohmann::json::parse(
            R"({"q":2,"n_datasets":2,"users":[{"side":[1],"side_function":"X1+X2","demand":"X2"}]})"));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_TRUE(has_code(e.violations(), "side-function-unsupported"));
    }
    try {
        instance_from_json(nlohmann::json::parse(R"({"q":2,"n_datasets":2,"users":[{"side":[1],"demand":"X1 +"}]})"));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_TRUE(has_code(e.violations(), "demand-parse-error"));
    }
}
