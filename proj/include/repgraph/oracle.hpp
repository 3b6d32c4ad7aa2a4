#pragma once

// Brute-force reference implementations for tests and the verify command.
// Nothing here reuses the closed-form code paths: counts come from scans
// over observation pairs and all arithmetic is exact.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "repgraph/dataset.hpp"
#include "repgraph/graph.hpp"
#include "repgraph/random.hpp"
#include "repgraph/stats.hpp"

namespace repgraph::oracle {

using Rational = boost::multiprecision::cpp_rational;

struct RationalCounts {
    Rational r0, r1, r2;
};

// One point of the support of (n1u): weight = prod_u C(m_u, n1u) label assignments.
struct NullAssignment {
    std::vector<std::size_t> n1u;
    BigInt weight;
    RationalCounts averaging;
    RationalCounts union_graph;
    const RationalCounts& operator[](Summary s) const { return s == Summary::averaging ? averaging : union_graph; }
};

struct ExactMoments {
    Rational e0, var0, e1, var1, e2, var2, cov12, ew, varw, ed, vard;
};

struct ExhaustiveNull {
    BigInt assignments;  // C(N, n1)
    std::vector<NullAssignment> support;

    Rational mean(const std::function<Rational(const NullAssignment&)>& f) const;
    Rational covariance(const std::function<Rational(const NullAssignment&)>& f,
                        const std::function<Rational(const NullAssignment&)>& g) const;
    ExactMoments moments(Summary s) const;

    // Probability under the permutation null that `pred` holds.
    double probability(const std::function<bool(const NullAssignment&)>& pred) const;

    std::size_t n1 = 0, n2 = 0;
};

// Throws EnumerationTooLargeError when C(N, n1) exceeds cap.
ExhaustiveNull enumerate_permutations(const DistinctTable& table, const SimilarityGraph& c0,
                                      std::uint64_t cap = 1'000'000);

// Labels: one per observation, observation i having value table.value_of(i).
RationalCounts average_over_family(const DistinctTable& table, const SimilarityGraph& c0,
                                   const std::vector<Sample>& labels, std::uint64_t cap = 10'000);

// Counts on the explicitly materialized union graph.
RationalCounts union_graph_counts(const DistinctTable& table, const SimilarityGraph& c0,
                                  const std::vector<Sample>& labels);

// Every minimum-weight spanning tree, each as a sorted edge list. K <= 8.
std::vector<std::vector<Edge>> all_msts(const DistanceMatrix& d);

// Union of the edge sets of all_msts(d).
SimilarityGraph mst_union(const DistanceMatrix& d);

// Random test instance: K values with multiplicities, random sample-1 counts
// and a random connected C0 (spanning tree plus extra edges).
struct Instance {
    DistinctTable table;
    SimilarityGraph c0;
    std::string describe() const;
};

struct InstanceLimits {
    std::size_t min_k = 2, max_k = 5;
    std::size_t max_m = 3;
    std::size_t min_n = 4, max_n = 12;
    double extra_edge_probability = 0.3;
};

// Rejection-samples until N lies in [min_n, max_n].
Instance random_instance(SplitMix64& rng, const InstanceLimits& limits);

// Symmetric integer distances in 1..max_d (ties likely for small max_d).
DistanceMatrix random_tied_distances(SplitMix64& rng, std::size_t k, int max_d);

std::string describe(const DistanceMatrix& d);

struct VerifyOptions {
    std::size_t max_n = 10;
    std::size_t instances = 100;
    std::uint64_t seed = 1;
    bool check_nnl = false;
    bool inject_fault = false;  // perturbs one closed form to prove the suite can fail
};

struct VerifyOutcome {
    std::size_t checks = 0;
    std::vector<std::string> failures;  // each names the check and serializes the instance
    bool passed() const noexcept { return failures.empty(); }
};

// Random small instances: closed-form counts and moments against exhaustive
// enumeration, the optimal weight, the graph-family size and optionally the
// NNL against the union of all minimum spanning trees.
VerifyOutcome run_verification(const VerifyOptions& options);

}  // namespace repgraph::oracle
