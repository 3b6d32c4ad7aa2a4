#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "repgraph/errors.hpp"
#include "repgraph/oracle.hpp"
#include "repgraph/stats.hpp"

using namespace repgraph;

namespace {

MomentSet five_value_moments(std::vector<std::size_t> n1u) {
    const DistinctTable t = fixtures::five_values_table(std::move(n1u));
    const auto c0 = fixtures::five_values_c0();
    return moments(t, c0, union_graph_summary(c0, t));
}

}  // namespace

// Expected values below are exact fractions from an independent rational
// implementation, written as decimals.
TEST(ExtendedCounts, FiveValueExample) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    const auto c = extended_counts(t, t.n1u(), fixtures::five_values_c0());
    EXPECT_NEAR(c.averaging.r1, 26.0 / 9, 1e-12);
    EXPECT_NEAR(c.averaging.r2, 49.0 / 18, 1e-12);
    EXPECT_NEAR(c.averaging.r0 + c.averaging.r1 + c.averaging.r2, 12 - 5 + 6, 1e-12);
    EXPECT_DOUBLE_EQ(c.union_graph.r1, 12);
    EXPECT_DOUBLE_EQ(c.union_graph.r2, 10);
    EXPECT_DOUBLE_EQ(c.union_graph.r0, 47 - 22);
}

TEST(Moments, FiveValueExampleBalanced) {
    const MomentSet m = five_value_moments({1, 2, 2, 1, 0});
    EXPECT_NEAR(m.averaging.e1, 65.0 / 22, 1e-12);
    EXPECT_NEAR(m.averaging.var1, 6271.0 / 26136, 1e-12);
    EXPECT_NEAR(m.averaging.var2, 6271.0 / 26136, 1e-12);
    EXPECT_NEAR(m.averaging.cov12, 1345.0 / 6534, 1e-12);
    EXPECT_NEAR(m.averaging.varw, 11651.0 / 52272, 1e-12);
    EXPECT_NEAR(m.averaging.vard, 3.0 / 44, 1e-12);
    EXPECT_NEAR(m.union_graph.e1, 235.0 / 22, 1e-12);
    EXPECT_NEAR(m.union_graph.var1, 1249.0 / 484, 1e-12);
    EXPECT_NEAR(m.union_graph.cov12, -445.0 / 484, 1e-12);
    EXPECT_NEAR(m.union_graph.varw, 201.0 / 242, 1e-12);
    EXPECT_NEAR(m.union_graph.vard, 7.0, 1e-12);
    EXPECT_DOUBLE_EQ(m.weight, 0.5);
}

TEST(Moments, FiveValueExampleUnbalanced) {
    const MomentSet m = five_value_moments({1, 1, 1, 0, 0});
    EXPECT_NEAR(m.averaging.e1, 13.0 / 22, 1e-12);
    EXPECT_NEAR(m.averaging.e2, 78.0 / 11, 1e-12);
    EXPECT_NEAR(m.averaging.var1, 9499.0 / 87120, 1e-12);
    EXPECT_NEAR(m.averaging.var2, 3043.0 / 21780, 1e-12);
    EXPECT_NEAR(m.averaging.cov12, 538.0 / 5445, 1e-12);
    EXPECT_NEAR(m.averaging.ew, 104.0 / 55, 1e-12);
    EXPECT_NEAR(m.averaging.varw, 11651.0 / 108900, 1e-12);
    EXPECT_NEAR(m.averaging.ed, -6.5, 1e-12);
    EXPECT_NEAR(m.averaging.vard, 9.0 / 176, 1e-12);
    EXPECT_NEAR(m.union_graph.var1, 1473.0 / 2420, 1e-12);
    EXPECT_NEAR(m.union_graph.var2, 2274.0 / 605, 1e-12);
    EXPECT_NEAR(m.union_graph.cov12, -267.0 / 605, 1e-12);
    EXPECT_NEAR(m.union_graph.varw, 1206.0 / 3025, 1e-12);
    EXPECT_NEAR(m.union_graph.ed, -23.5, 1e-12);
    EXPECT_NEAR(m.union_graph.vard, 5.25, 1e-12);
    EXPECT_DOUBLE_EQ(m.weight, 0.2);
}

TEST(Moments, MatchExhaustiveEnumerationOnRandomInstances) {
    SplitMix64 rng(2024);
    oracle::InstanceLimits limits;
    limits.max_n = 10;
    for (int rep = 0; rep < 40; ++rep) {
        const auto inst = oracle::random_instance(rng, limits);
        const auto ms = moments(inst.table, inst.c0, union_graph_summary(inst.c0, inst.table),
                                DegeneracyPolicy::allow);
        const auto null = oracle::enumerate_permutations(inst.table, inst.c0);
        for (Summary s : {Summary::averaging, Summary::union_graph}) {
            const auto x = null.moments(s);
            EXPECT_NEAR(ms[s].var0, static_cast<double>(x.var0), 1e-10) << inst.describe();
            EXPECT_NEAR(ms[s].cov12, static_cast<double>(x.cov12), 1e-10) << inst.describe();
            EXPECT_NEAR(ms[s].varw, static_cast<double>(x.varw), 1e-10) << inst.describe();
            EXPECT_NEAR(ms[s].vard, static_cast<double>(x.vard), 1e-10) << inst.describe();
        }
    }
}

TEST(Moments, OptimalWeightIsPHat) {
    const MomentSet m = five_value_moments({1, 1, 1, 0, 0});
    EXPECT_NEAR(optimal_weight(m.averaging), 0.2, 1e-12);
    EXPECT_NEAR(optimal_weight(m.union_graph), 0.2, 1e-12);
    const double best = weighted_variance(m.averaging, 0.2);
    for (double p = 0; p <= 1; p += 0.01) EXPECT_GE(weighted_variance(m.averaging, p), best - 1e-15);
    EXPECT_NEAR(best, m.averaging.varw, 1e-12);
}

TEST(Moments, DegenerateNullIsRejected) {
    const DistinctTable t = DistinctTable::from_counts({2}, {2});
    const SimilarityGraph c0(1, {});
    EXPECT_THROW(moments(t, c0, union_graph_summary(c0, t)), DegenerateNullError);
    EXPECT_NO_THROW(moments(t, c0, union_graph_summary(c0, t), DegeneracyPolicy::allow));
    const DistinctTable tiny = DistinctTable::from_counts({1, 1}, {1, 0});
    const SimilarityGraph c1(2, {{0, 1}});
    EXPECT_THROW(moments(tiny, c1, union_graph_summary(c1, tiny)), DomainError);
}

TEST(Statistics, DecompositionMatchesQuadraticForm) {
    SplitMix64 rng(77);
    oracle::InstanceLimits limits;
    limits.max_k = 7;
    limits.max_n = 20;
    int checked = 0;
    for (int rep = 0; rep < 200 && checked < 50; ++rep) {
        const auto inst = oracle::random_instance(rng, limits);
        if (inst.table.n1() < 2 || inst.table.n2() < 2) continue;
        MomentSet ms;
        try {
            ms = moments(inst.table, inst.c0, union_graph_summary(inst.c0, inst.table));
        } catch (const DegenerateNullError&) {
            continue;
        }
        const auto counts = extended_counts(inst.table, inst.table.n1u(), inst.c0);
        for (Summary s : {Summary::averaging, Summary::union_graph}) {
            const auto v = summarize(counts[s], ms[s], ms.weight, std::vector<double>{1.0});
            const double q = generalized_quadratic_form(ms[s], counts[s].r1, counts[s].r2);
            EXPECT_NEAR(v.s, q, 1e-8 * std::max(1.0, std::abs(q))) << inst.describe();
            EXPECT_NEAR(v.s, v.zw * v.zw + v.zd * v.zd, 1e-12 * std::max(1.0, v.s));
        }
        ++checked;
    }
    EXPECT_GE(checked, 20);
}

TEST(Statistics, MaxStatistic) {
    EXPECT_DOUBLE_EQ(max_statistic(2.0, -1.0, 1.31), 2.62);
    EXPECT_DOUBLE_EQ(max_statistic(0.5, -3.0, 1.31), 3.0);
    EXPECT_THROW(max_statistic(1.0, 1.0, 0.0), DomainError);
}

TEST(Statistics, EvaluatorMatchesDirectCounts) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    const auto c0 = fixtures::five_values_c0();
    const MomentSet ms = moments(t, c0, union_graph_summary(c0, t));
    const StatisticEvaluator ev(t, c0, ms, {1.31, 1.14, 1.0});
    const std::vector<std::size_t> relabel{0, 3, 1, 2, 0};
    const auto direct = extended_counts(t, relabel, c0);
    const auto fast = ev.counts(relabel);
    for (Summary s : {Summary::averaging, Summary::union_graph}) {
        EXPECT_NEAR(fast[s].r0, direct[s].r0, 1e-12);
        EXPECT_NEAR(fast[s].r1, direct[s].r1, 1e-12);
        EXPECT_NEAR(fast[s].r2, direct[s].r2, 1e-12);
    }
    EXPECT_EQ(ev.evaluate(t.n1u()).averaging.m.size(), 3u);
    const std::vector<std::size_t> too_many{2, 2, 2, 1, 0};
    EXPECT_THROW(extended_counts(t, too_many, c0), ShapeError);
}

TEST(PerGraph, FixedGraphMomentsMatchEnumeration) {
    // A 7-node graph with uneven degrees; all C(7,3) labellings.
    const ObservationGraph g{7, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {3, 4}, {4, 5}, {5, 6}, {2, 6}}};
    std::vector<double> r0s, r1s, r2s;
    for (int mask = 0; mask < 128; ++mask) {
        if (__builtin_popcount(mask) != 3) continue;
        double r[3] = {0, 0, 0};
        for (const Edge& e : g.edges) {
            const bool a = mask >> e.u & 1, b = mask >> e.v & 1;
            r[a != b ? 0 : (a ? 1 : 2)] += 1;
        }
        r0s.push_back(r[0]);
        r1s.push_back(r[1]);
        r2s.push_back(r[2]);
    }
    auto mean = [](const std::vector<double>& x) {
        double s = 0;
        for (double v : x) s += v;
        return s / static_cast<double>(x.size());
    };
    auto cov = [&](const std::vector<double>& x, const std::vector<double>& y) {
        const double mx = mean(x), my = mean(y);
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
        return s / static_cast<double>(x.size());
    };
    double sum_sq = 0;
    std::vector<double> deg(7, 0);
    for (const Edge& e : g.edges) ++deg[e.u], ++deg[e.v];
    for (double d : deg) sum_sq += d * d;
    const SummaryMoments m = fixed_graph_moments(3, 4, 8, sum_sq);
    EXPECT_NEAR(m.e0, mean(r0s), 1e-12);
    EXPECT_NEAR(m.var0, cov(r0s, r0s), 1e-12);
    EXPECT_NEAR(m.e1, mean(r1s), 1e-12);
    EXPECT_NEAR(m.var1, cov(r1s, r1s), 1e-12);
    EXPECT_NEAR(m.var2, cov(r2s, r2s), 1e-12);
    EXPECT_NEAR(m.cov12, cov(r1s, r2s), 1e-12);

    std::vector<Sample> labels(7, Sample::second);
    labels[0] = labels[1] = labels[2] = Sample::first;
    const auto r = pergraph_statistics(g, labels, std::vector<double>{1.0});
    EXPECT_DOUBLE_EQ(r.values.r1, 3);
    EXPECT_DOUBLE_EQ(r.sum_sq_degree, sum_sq);
}
