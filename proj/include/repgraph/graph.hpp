#pragma once

// Similarity graphs on distinct values and the observation-level graphs they induce.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "repgraph/dataset.hpp"

namespace repgraph {

using BigInt = boost::multiprecision::cpp_int;

// Undirected edge, always stored with u < v.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;

    static Edge make(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Simple undirected graph C0 on K distinct values with the per-node
// quantities the moment formulas need.
class SimilarityGraph {
public:
    SimilarityGraph() = default;

    // Throws ShapeError on self-loops, duplicate edges or out-of-range nodes.
    SimilarityGraph(std::size_t k, std::vector<Edge> edges);

    std::size_t size() const noexcept { return neighbors_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::size_t degree(std::size_t u) const { return neighbors_[u].size(); }
    const std::vector<std::size_t>& neighbors(std::size_t u) const { return neighbors_[u]; }

    // Number of edges with at least one endpoint adjacent to u.
    std::size_t second_order_edge_count(std::size_t u) const { return second_order_[u]; }

    bool contains(std::size_t a, std::size_t b) const;
    bool connected() const;

    friend bool operator==(const SimilarityGraph& a, const SimilarityGraph& b) {
        return a.size() == b.size() && a.edges_ == b.edges_;
    }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> neighbors_;
    std::vector<std::size_t> second_order_;
};

// Which component Algorithm 1's merge loop grows. The reference rule is the
// component holding node 0; the alternative exists to probe order dependence.
enum class ComponentOrder { lowest_index_first, highest_index_first };

// Nearest neighbour link: every node joins all of its tied nearest values,
// then the component holding the chosen root repeatedly absorbs every pair
// that attains its minimum outgoing distance until the graph is connected.
SimilarityGraph build_nnl(const DistanceMatrix& d,
                          ComponentOrder order = ComponentOrder::lowest_index_first);

// Edge sets of NNL rounds 1..k; round j treats earlier rounds' edges as
// infinitely far. Throws InfeasibleError when a round cannot connect.
std::vector<std::vector<Edge>> knnl_rounds(const DistanceMatrix& d, std::size_t k);

SimilarityGraph build_knnl(const DistanceMatrix& d, std::size_t k);

// Union of k successive minimum spanning trees built by Kruskal, with
// equal-weight edges visited in a seeded random order.
SimilarityGraph build_kmst(const DistanceMatrix& d, std::size_t k, std::uint64_t seed);

// Graph on observations (nodes 0..N-1).
struct ObservationGraph {
    std::size_t nodes = 0;
    std::vector<Edge> edges;
};

// Seeded k-MST on the N observations themselves; repeated observations sit at
// distance 0, so the result is one of many equally optimal graphs.
ObservationGraph build_observation_kmst(const DistanceMatrix& d, const DistinctTable& table,
                                        std::size_t k, std::uint64_t seed);

struct UnionGraphSummary {
    std::uint64_t size = 0;                     // |G-bar|
    std::vector<std::uint64_t> incident;        // per observation
    std::vector<std::uint64_t> incident_by_value;
    std::uint64_t sum_sq = 0;                   // sum_i incident_i^2
};

UnionGraphSummary union_graph_summary(const SimilarityGraph& c0, const DistinctTable& table);

// Edge set of G-bar itself: all within-value pairs plus all cross pairs along C0 edges.
ObservationGraph materialize_union_graph(const SimilarityGraph& c0, const DistinctTable& table);

// prod_{(u,v) in C0} m_u m_v * prod_u m_u^(m_u - 2)
BigInt count_graph_family(const SimilarityGraph& c0, const DistinctTable& table);

// Visits every graph of the family induced by C0 exactly once: one observation
// pair per C0 edge crossed with one labelled spanning tree per distinct value
// (trees decoded from Pruefer sequences).
class GraphFamilyEnumerator {
public:
    static constexpr std::uint64_t default_cap = 1'000'000;

    // Throws EnumerationTooLargeError when the family exceeds cap.
    GraphFamilyEnumerator(const SimilarityGraph& c0, const DistinctTable& table,
                          std::uint64_t cap = default_cap);

    std::uint64_t count() const noexcept { return count_; }

    // Writes the next graph into out; false once every graph has been produced.
    bool next(ObservationGraph& out);

private:
    void decode(ObservationGraph& out) const;

    std::size_t nodes_ = 0;
    std::vector<Edge> c0_edges_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::size_t> tree_values_;  // values with m_u >= 2
    std::vector<std::uint64_t> radix_;
    std::vector<std::uint64_t> digit_;
    std::uint64_t count_ = 0;
    std::uint64_t produced_ = 0;
};

// Labelled tree on n >= 2 nodes from a Pruefer sequence of length n - 2.
std::vector<Edge> decode_pruefer(const std::vector<std::size_t>& sequence, std::size_t n);

// "K=<K>" header followed by one "u,v" line per edge, 1-based.
void write_graph(std::ostream& out, const SimilarityGraph& g);
SimilarityGraph read_graph(std::istream& in);

}  // namespace repgraph
