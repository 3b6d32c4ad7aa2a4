#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "repgraph/errors.hpp"
#include "repgraph/graph.hpp"

using namespace repgraph;

namespace {

std::vector<Edge> sorted_edges(const SimilarityGraph& g) {
    auto e = g.edges();
    std::sort(e.begin(), e.end());
    return e;
}

}  // namespace

TEST(Nnl, FiveValueExampleKeepsAllTiedEdges) {
    const SimilarityGraph g = build_nnl(fixtures::five_values());
    EXPECT_EQ(sorted_edges(g), sorted_edges(fixtures::five_values_c0()));
}

TEST(Nnl, TwoValuesGiveOneEdge) {
    const SimilarityGraph g = build_nnl(DistanceMatrix(2, {0, 4, 4, 0}));
    ASSERT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.edges()[0], (Edge{0, 1}));
}

TEST(Nnl, NeedsTwoValues) { EXPECT_THROW(build_nnl(DistanceMatrix(1, {0})), DomainError); }

TEST(Nnl, ComponentOrderChangesTheResult) {
    // Three tight pairs; every cross pair ties at distance 5.
    std::vector<double> d(36, 5);
    for (int i = 0; i < 6; ++i) d[i * 6 + i] = 0;
    for (int p = 0; p < 3; ++p) d[(2 * p) * 6 + 2 * p + 1] = d[(2 * p + 1) * 6 + 2 * p] = 1;
    const DistanceMatrix dm(6, d);
    const SimilarityGraph low = build_nnl(dm, ComponentOrder::lowest_index_first);
    const SimilarityGraph high = build_nnl(dm, ComponentOrder::highest_index_first);
    EXPECT_TRUE(low.connected());
    EXPECT_TRUE(high.connected());
    EXPECT_NE(sorted_edges(low), sorted_edges(high));
}

TEST(Knnl, RoundsAreDisjointAndInfeasibilityIsReported) {
    const auto rounds = knnl_rounds(fixtures::five_values(), 2);
    ASSERT_EQ(rounds.size(), 2u);
    for (const Edge& e : rounds[1]) EXPECT_EQ(std::count(rounds[0].begin(), rounds[0].end(), e), 0);
    EXPECT_EQ(build_knnl(fixtures::five_values(), 2).edge_count(), rounds[0].size() + rounds[1].size());
    EXPECT_THROW(build_knnl(DistanceMatrix(3, {0, 1, 2, 1, 0, 3, 2, 3, 0}), 2), InfeasibleError);
}

TEST(Kmst, SeedsReachEveryMinimumSpanningTree) {
    std::set<std::vector<Edge>> trees;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const SimilarityGraph g = build_kmst(fixtures::five_values(), 1, seed);
        ASSERT_EQ(g.edge_count(), 4u);
        ASSERT_TRUE(g.connected());
        trees.insert(sorted_edges(g));
    }
    EXPECT_EQ(trees.size(), 6u);
    EXPECT_EQ(sorted_edges(build_kmst(fixtures::five_values(), 1, 7)),
              sorted_edges(build_kmst(fixtures::five_values(), 1, 7)));
}

TEST(Kmst, ObservationGraphHasKTreesWorthOfEdges) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    const ObservationGraph g = build_observation_kmst(fixtures::five_values(), t, 2, 3);
    EXPECT_EQ(g.nodes, 12u);
    EXPECT_EQ(g.edges.size(), 22u);
}

TEST(GraphFamily, FiveValueExampleCount) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    EXPECT_EQ(count_graph_family(fixtures::five_values_c0(), t), BigInt(2239488));
}

TEST(GraphFamily, EnumeratorVisitsDistinctSpanningGraphs) {
    const DistinctTable t = DistinctTable::from_counts({1, 1, 2}, {2, 0, 1});
    const SimilarityGraph c0(3, {{0, 1}, {1, 2}});
    GraphFamilyEnumerator family(c0, t);
    ASSERT_EQ(BigInt(family.count()), count_graph_family(c0, t));
    EXPECT_EQ(family.count(), 3u * 1 * 3 * 3 * 3);  // C0 pairs 3*1, 1*3; trees 3^1, 1, 3^1
    std::set<std::vector<Edge>> seen;
    ObservationGraph g;
    while (family.next(g)) {
        EXPECT_EQ(g.edges.size(), t.total() - t.size() + c0.edge_count());
        auto e = g.edges;
        std::sort(e.begin(), e.end());
        seen.insert(e);
    }
    EXPECT_EQ(seen.size(), family.count());
}

TEST(GraphFamily, CapIsEnforced) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    EXPECT_THROW(GraphFamilyEnumerator(fixtures::five_values_c0(), t, 1000), EnumerationTooLargeError);
}

TEST(UnionGraph, SummaryMatchesMaterializedGraph) {
    const DistinctTable t = fixtures::five_values_table({1, 2, 2, 1, 0});
    const auto s = union_graph_summary(fixtures::five_values_c0(), t);
    const auto g = materialize_union_graph(fixtures::five_values_c0(), t);
    EXPECT_EQ(s.size, 47u);
    EXPECT_EQ(g.edges.size(), 47u);
    std::vector<std::uint64_t> degree(t.total(), 0);
    for (const Edge& e : g.edges) {
        ++degree[e.u];
        ++degree[e.v];
    }
    EXPECT_EQ(s.incident, degree);
    std::uint64_t sq = 0;
    for (auto x : degree) sq += x * x;
    EXPECT_EQ(s.sum_sq, sq);
}

TEST(Pruefer, DecodesKnownSequence) {
    const auto edges = decode_pruefer({3, 3, 3, 4}, 6);
    std::vector<Edge> sorted(edges);
    for (auto& e : sorted) e = Edge::make(e.u, e.v);
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<Edge>{{0, 3}, {1, 3}, {2, 3}, {3, 4}, {4, 5}}));
    EXPECT_THROW(decode_pruefer({0}, 4), DomainError);
}

TEST(SimilarityGraph, RejectsBadEdges) {
    EXPECT_THROW(SimilarityGraph(3, {{0, 0}}), ShapeError);
    EXPECT_THROW(SimilarityGraph(3, {{0, 3}}), ShapeError);
    EXPECT_THROW(SimilarityGraph(3, {{0, 1}, {1, 0}}), ShapeError);
}

TEST(GraphFile, RoundTrip) {
    std::stringstream s;
    write_graph(s, fixtures::five_values_c0());
    EXPECT_EQ(read_graph(s), fixtures::five_values_c0());
}

TEST(GraphFile, ErrorsCarryLineNumbers) {
    std::istringstream bad("K=3\n1,2\n# comment\n1,4\n");
    try {
        read_graph(bad);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
    std::istringstream no_header("1,2\n");
    EXPECT_THROW(read_graph(no_header), ParseError);
    std::istringstream loop("K=3\n2,2\n");
    EXPECT_THROW(read_graph(loop), ParseError);
}
