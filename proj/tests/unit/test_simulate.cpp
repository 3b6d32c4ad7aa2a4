#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "repgraph/errors.hpp"
#include "repgraph/simulate.hpp"

using namespace repgraph;

TEST(Mallows, ProbabilitiesAreNormalized) {
    const MallowsModel m(0.7, {2, 1, 3, 4}, Metric::kendall);
    double total = 0;
    for (double p : m.probabilities()) total += p;
    EXPECT_NEAR(total, 1.0, 1e-14);
    // Kendall normalizer factorizes: prod_{j=1..n} (1 - e^{-j theta}) / (1 - e^{-theta}).
    double psi = 1;
    for (int j = 1; j <= 4; ++j) psi *= (1 - std::exp(-j * 0.7)) / (1 - std::exp(-0.7));
    EXPECT_NEAR(m.normalizer(), psi, 1e-12);
}

TEST(Mallows, ScalesDivideByTheLargestDistance) {
    const Ranking id{1, 2, 3, 4, 5, 6};
    const MallowsModel raw(0.1, id, Metric::spearman, DistanceScale::none);
    const MallowsModel scaled(7.0, id, Metric::spearman, DistanceScale::by_maximum);
    const MallowsModel corr(3.5, id, Metric::spearman, DistanceScale::correlation);
    // max Spearman distance on six objects is 70, so theta 7 on d/70 equals theta 0.1 on d.
    for (std::size_t i = 0; i < raw.probabilities().size(); ++i) {
        EXPECT_NEAR(raw.probabilities()[i], scaled.probabilities()[i], 1e-15);
        EXPECT_NEAR(corr.probabilities()[i], scaled.probabilities()[i], 1e-15);
    }
    EXPECT_THROW(parse_distance_scale("log"), DomainError);
}

TEST(Mallows, EmpiricalFrequenciesMatchExactTable) {
    const MallowsModel m(5.0, {1, 2, 3, 4, 5, 6}, Metric::spearman, DistanceScale::by_maximum);
    const std::size_t draws = 100000;
    std::map<Ranking, std::size_t> freq;
    for (const auto& r : sample_mallows(m, draws, 12)) ++freq[r];
    for (std::size_t i = 0; i < m.rankings().size(); ++i) {
        const double p = m.probabilities()[i];
        const double sd = std::sqrt(p * (1 - p) / draws);
        const double f = static_cast<double>(freq[m.rankings()[i]]) / draws;
        ASSERT_LE(std::abs(f - p), 4 * sd + 1e-9) << "ranking " << i;
    }
}

TEST(Mallows, LargeThetaStaysFinite) {
    const MallowsModel m(500.0, {3, 1, 2}, Metric::spearman);
    EXPECT_NEAR(m.probabilities()[std::find(m.rankings().begin(), m.rankings().end(), Ranking{3, 1, 2}) -
                                  m.rankings().begin()],
                1.0, 1e-12);
    EXPECT_THROW(MallowsModel(1.0, Ranking{1, 1, 2}), DomainError);
}

TEST(Predicates, SupportSizes) {
    EXPECT_EQ(RestrictedUniform(6, parse_predicate("first_not:6")).support().size(), 600u);
    EXPECT_EQ(RestrictedUniform(6, parse_predicate("first_not:6&last_not:1")).support().size(), 504u);
    EXPECT_EQ(RestrictedUniform(6, parse_predicate("before:1:5")).support().size(), 360u);
    // 1 or 2 in the top three: 720 minus rankings with both in the last three (3*2*4!).
    EXPECT_EQ(RestrictedUniform(6, parse_predicate("top:3:1|2")).support().size(), 576u);
    EXPECT_THROW(parse_predicate("bottom:2"), DomainError);
    EXPECT_THROW(RestrictedUniform(3, parse_predicate("first_not:1&first_not:2&first_not:3")), DomainError);
}

TEST(Predicates, UniformSamplerOnlyDrawsSupport) {
    const auto pred = parse_predicate("last_not:1");
    for (const auto& r : sample_restricted_uniform(6, pred, 2000, 3)) ASSERT_NE(r.back(), 1);
}

TEST(Scenario, ParsesConfigFile) {
    std::istringstream in(
        "name = demo  # comment\n"
        "sample1 = mallows 2.5 1,2,3,4\n"
        "sample2 = uniform before:1:2\n"
        "objects = 4\n"
        "n1 = 20\nn2 = 30\n"
        "graph = mst 2\ngraph_seed = 5\n"
        "kappas = 1.2, 1\n"
        "replicates = 7\n");
    const ScenarioConfig c = parse_scenario(in);
    EXPECT_EQ(c.name, "demo");
    EXPECT_EQ(c.sample1.kind, GeneratorSpec::Kind::mallows);
    EXPECT_DOUBLE_EQ(c.sample1.theta, 2.5);
    EXPECT_EQ(c.sample2.predicate, "before:1:2");
    EXPECT_EQ(c.graph.kind, GraphRule::Kind::mst);
    EXPECT_EQ(c.graph.seed, 5u);
    EXPECT_EQ(c.kappas, (std::vector<double>{1.2, 1.0}));
    EXPECT_EQ(c.replicates, 7u);
}

TEST(Scenario, ConfigErrorsNameTheLine) {
    std::istringstream in("sample1 = mallows 1 1,2,3\nsample2 = mallows 1 1,2,3\ncolour = red\n");
    try {
        parse_scenario(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(builtin_scenario("S9b"), DomainError);
    EXPECT_THROW(GraphRule::parse("nnl 0"), DomainError);
}

TEST(Scenario, BuiltinsAreWellFormed) {
    for (const auto& name : builtin_scenario_names()) {
        const ScenarioConfig c = builtin_scenario(name);
        EXPECT_EQ(c.name, name);
        EXPECT_FALSE(generate_samples(c, 1).empty());
    }
    EXPECT_EQ(builtin_scenario("S2u").n2, 600u);
    EXPECT_EQ(builtin_scenario("motivation-u").n2, 400u);
}

TEST(Scenario, ResultsDoNotDependOnThreads) {
    ScenarioConfig c = builtin_scenario("S4b");
    c.replicates = 24;
    c.threads = 1;
    const PowerResult one = run_scenario(c);
    c.threads = 3;
    const PowerResult three = run_scenario(c);
    ASSERT_EQ(one.entries.size(), power_statistic_names(c.kappas).size());
    for (std::size_t i = 0; i < one.entries.size(); ++i) EXPECT_EQ(one.entries[i].rejections, three.entries[i].rejections);
    std::ostringstream csv;
    write_power_csv(csv, one);
    EXPECT_NE(csv.str().find("R0(a)"), std::string::npos);
    EXPECT_EQ(power_json(one)["replicates"], 24);
}

TEST(Scenario, FailingReplicateIsNamed) {
    ScenarioConfig c = builtin_scenario("S1b");
    c.scale = DistanceScale::none;  // theta 5 on raw Spearman puts every draw on the center
    c.replicates = 2;
    try {
        run_scenario(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("replicate 0"), std::string::npos);
    }
}
