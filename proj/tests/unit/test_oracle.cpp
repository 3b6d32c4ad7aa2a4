#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "repgraph/errors.hpp"
#include "repgraph/oracle.hpp"

using namespace repgraph;
using oracle::Rational;

TEST(AllMsts, FiveValueExampleHasSixTrees) {
    const auto trees = oracle::all_msts(fixtures::five_values());
    EXPECT_EQ(trees.size(), 6u);
    EXPECT_EQ(oracle::mst_union(fixtures::five_values()), fixtures::five_values_c0());
}

TEST(AllMsts, CompleteGraphWithEqualWeightsHasCayleyCount) {
    std::vector<double> d(25, 1);
    for (int i = 0; i < 5; ++i) d[i * 6] = 0;
    EXPECT_EQ(oracle::all_msts(DistanceMatrix(5, d)).size(), 125u);  // 5^(5-2)
}

TEST(Enumeration, SupportWeightsSumToAllAssignments) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    const auto null = oracle::enumerate_permutations(t, fixtures::five_values_c0());
    BigInt total = 0;
    for (const auto& a : null.support) total += a.weight;
    EXPECT_EQ(total, null.assignments);
    EXPECT_EQ(null.assignments, BigInt(924));  // C(12, 6)
    EXPECT_EQ(null.moments(Summary::averaging).var1, Rational(6271, 26136));
    EXPECT_EQ(null.moments(Summary::union_graph).vard, Rational(7));
    EXPECT_THROW(oracle::enumerate_permutations(t, fixtures::five_values_c0(), 100), EnumerationTooLargeError);
}

TEST(Enumeration, FamilyAverageAndUnionCounts) {
    const DistinctTable t = DistinctTable::from_counts({1, 2, 0}, {1, 0, 2});
    const SimilarityGraph c0(3, {{0, 1}, {1, 2}});
    const auto avg = oracle::average_over_family(t, c0, t.labels());
    const auto uni = oracle::union_graph_counts(t, c0, t.labels());
    // Values: a = {1, 2}, b = {1, 1}, c = {2, 2}. Union graph: aa, bb, cc plus 4 + 4 cross pairs.
    EXPECT_EQ(uni.r1, Rational(1 + 2));
    EXPECT_EQ(uni.r2, Rational(1));
    EXPECT_EQ(uni.r0, Rational(1 + 2 + 4));
    // Family: within-value trees are the single pair; cross edges pick a pair uniformly.
    EXPECT_EQ(avg.r1, Rational(1) + Rational(2, 4));
    EXPECT_EQ(avg.r2, Rational(1));
    EXPECT_EQ(avg.r0, Rational(1) + Rational(2, 4) + Rational(1));
}

TEST(Verification, DefaultRunPassesAndFaultIsCaught) {
    oracle::VerifyOptions opt;
    opt.instances = 30;
    const auto ok = oracle::run_verification(opt);
    EXPECT_TRUE(ok.passed()) << (ok.failures.empty() ? "" : ok.failures.front());
    EXPECT_GT(ok.checks, 300u);
    opt.inject_fault = true;
    const auto bad = oracle::run_verification(opt);
    EXPECT_FALSE(bad.passed());
    EXPECT_NE(bad.failures.front().find("m=("), std::string::npos);
}

TEST(RandomInstance, RespectsLimits) {
    SplitMix64 rng(3);
    oracle::InstanceLimits limits;
    limits.max_k = 4;
    limits.max_n = 9;
    for (int i = 0; i < 100; ++i) {
        const auto inst = oracle::random_instance(rng, limits);
        EXPECT_LE(inst.table.size(), 4u);
        EXPECT_GE(inst.table.total(), limits.min_n);
        EXPECT_LE(inst.table.total(), 9u);
        EXPECT_TRUE(inst.c0.connected());
        for (auto m : inst.table.multiplicity()) EXPECT_LE(m, limits.max_m);
    }
}
