#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "repgraph/errors.hpp"
#include "repgraph/inference.hpp"
#include "repgraph/oracle.hpp"

using namespace repgraph;

TEST(Normal, ReferenceValues) {
    EXPECT_NEAR(normal_cdf(0), 0.5, 1e-15);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-14);
    EXPECT_NEAR(normal_sf(8), 6.220960574271785e-16, 1e-28);
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-9);
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-13 + 1e-12 * p);
    EXPECT_THROW(normal_quantile(0), DomainError);
    EXPECT_THROW(normal_quantile(1), DomainError);
}

TEST(Pvalue, TailsPerStatistic) {
    EXPECT_NEAR(pvalue_analytic(StatisticKind::z0, -1.645), 0.05, 1e-4);
    EXPECT_NEAR(pvalue_analytic(StatisticKind::zw, 1.645), 0.05, 1e-4);
    EXPECT_NEAR(pvalue_analytic(StatisticKind::zd, -1.96), 0.05, 1e-4);
    EXPECT_NEAR(pvalue_analytic(StatisticKind::s, 2 * std::log(20.0)), 0.05, 1e-12);
    EXPECT_DOUBLE_EQ(pvalue_analytic(StatisticKind::m, -0.5, 1.14), 1.0);
    EXPECT_DOUBLE_EQ(pvalue_analytic(StatisticKind::m, 0.0, 1.14), 1.0);
    EXPECT_THROW(pvalue_analytic(StatisticKind::s, -1), DomainError);
    EXPECT_THROW(pvalue_analytic(StatisticKind::m, 1, 0), DomainError);
}

TEST(Pvalue, MaxTypeMatchesIndependentNormals) {
    // P(max(k Zw, |Zd|) >= x) for independent standard normals, by quadrature.
    const double kappa = 1.14, x = 2.3;
    const double h = 1e-4;
    double inside = 0;
    for (double z = -x + h / 2; z < x; z += h) inside += std::exp(-z * z / 2) * h;
    inside /= std::sqrt(2 * M_PI);
    const double expected = 1 - normal_cdf(x / kappa) * inside;
    EXPECT_NEAR(pvalue_analytic(StatisticKind::m, x, kappa), expected, 1e-7);
}

TEST(Kappa, SolutionIsConsistent) {
    for (double gamma : {0.125, 1.0, 3.0}) {
        const KappaSolution s = solve_kappa(gamma, 0.05);
        EXPECT_NEAR(s.alpha1, gamma * s.alpha2, 1e-14);
        EXPECT_NEAR((1 - s.alpha1) * (1 - s.alpha2), 0.95, 1e-14);
        EXPECT_NEAR(pvalue_analytic(StatisticKind::m, s.beta, s.kappa), 0.05, 1e-12);
    }
    EXPECT_NEAR(solve_kappa(0.5).kappa, 1.0, 0.01);
    EXPECT_THROW(solve_kappa(0), DomainError);
    EXPECT_THROW(solve_kappa(1, 1.5), DomainError);
}

TEST(Permutation, AtLeastAsExtreme) {
    EXPECT_TRUE(at_least_as_extreme(StatisticKind::z0, -2, -1));
    EXPECT_FALSE(at_least_as_extreme(StatisticKind::z0, 0, -1));
    EXPECT_TRUE(at_least_as_extreme(StatisticKind::zd, -2, 1.5));
    EXPECT_TRUE(at_least_as_extreme(StatisticKind::s, 3, 3 + 1e-12));
    EXPECT_FALSE(at_least_as_extreme(StatisticKind::zw, 1, 1.1));
}

namespace {

struct Small {
    DistinctTable table = DistinctTable::from_counts({2, 1, 2, 0, 1, 1}, {0, 2, 1, 2, 1, 0});
    SimilarityGraph c0{6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 4}}};
    MomentSet ms = moments(table, c0, union_graph_summary(c0, table));
    StatisticEvaluator ev{table, c0, ms, {1.14}};
    StatisticValues observed = ev.evaluate(table.n1u());
};

}  // namespace

TEST(Permutation, AgreesWithExactNull) {
    Small s;
    const auto null = oracle::enumerate_permutations(s.table, s.c0);
    const std::size_t b = 40000;
    const Pvalues p = permutation_pvalues(s.table, s.ev, s.observed, {b, 5, 2});
    for (Summary sum : {Summary::averaging, Summary::union_graph}) {
        const double obs_s = s.observed[sum].s, obs_w = s.observed[sum].zw;
        const double exact_s = null.probability([&](const oracle::NullAssignment& a) {
            return at_least_as_extreme(StatisticKind::s, s.ev.evaluate(a.n1u)[sum].s, obs_s);
        });
        const double exact_w = null.probability([&](const oracle::NullAssignment& a) {
            return at_least_as_extreme(StatisticKind::zw, s.ev.evaluate(a.n1u)[sum].zw, obs_w);
        });
        // add-one estimator: (1 + hits) / (1 + B)
        const double tol_s = 4 * std::sqrt(exact_s * (1 - exact_s) / b) + 2.0 / b;
        const double tol_w = 4 * std::sqrt(exact_w * (1 - exact_w) / b) + 2.0 / b;
        EXPECT_NEAR(p[sum].s, exact_s, tol_s) << to_string(sum);
        EXPECT_NEAR(p[sum].zw, exact_w, tol_w) << to_string(sum);
    }
}

TEST(Permutation, ThreadCountDoesNotChangeResults) {
    Small s;
    const Pvalues one = permutation_pvalues(s.table, s.ev, s.observed, {3000, 42, 1});
    const Pvalues four = permutation_pvalues(s.table, s.ev, s.observed, {3000, 42, 4});
    for (Summary sum : {Summary::averaging, Summary::union_graph}) {
        EXPECT_EQ(one[sum].s, four[sum].s);
        EXPECT_EQ(one[sum].zw, four[sum].zw);
        EXPECT_EQ(one[sum].zd, four[sum].zd);
        EXPECT_EQ(one[sum].z0, four[sum].z0);
        EXPECT_EQ(one[sum].m, four[sum].m);
    }
    const Pvalues other = permutation_pvalues(s.table, s.ev, s.observed, {3000, 43, 1});
    EXPECT_NE(one.averaging.s, other.averaging.s);
}

TEST(Permutation, EstimatorIsNeverZero) {
    Small s;
    const Pvalues p = permutation_pvalues(s.table, s.ev, s.observed, {10, 1, 1});
    EXPECT_GE(p.averaging.s, 1.0 / 11);
    EXPECT_LE(p.averaging.s, 1.0);
}

TEST(Diagnostics, FiveValueExample) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    const auto c0 = fixtures::five_values_c0();
    const auto d = condition_diagnostics(t, c0, union_graph_summary(c0, t));
    EXPECT_DOUBLE_EQ(d.edges_per_n, 0.5);
    EXPECT_DOUBLE_EQ(d.values_per_n, 5.0 / 12);
    EXPECT_NEAR(d.inverse_multiplicity, (1 + 1.0 / 3 + 0.25 + 1.0 / 3 + 1) / 12, 1e-15);
    EXPECT_NEAR(d.union_size, 47.0 / 12, 1e-15);
    EXPECT_GT(d.union_spread, 0);
}

TEST(RunTest, ReportIsComplete) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    TestOptions opt;
    opt.permutations = 500;
    opt.seed = 9;
    const TestReport r = run_test(t, fixtures::five_values_c0(), opt);
    EXPECT_EQ(r.family_size, "2239488");
    EXPECT_EQ(r.union_size, 47u);
    ASSERT_TRUE(r.permutation.has_value());
    EXPECT_EQ(r.analytic.averaging.m.size(), 3u);
    EXPECT_NEAR(r.statistics.averaging.s,
                r.statistics.averaging.zw * r.statistics.averaging.zw +
                    r.statistics.averaging.zd * r.statistics.averaging.zd,
                1e-12);
    opt.kappas = {1.0, -1.0};
    EXPECT_THROW(run_test(t, fixtures::five_values_c0(), opt), DomainError);
}
