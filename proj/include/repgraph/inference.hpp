#pragma once

// p-values (asymptotic and permutation), kappa calibration and diagnostics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repgraph/dataset.hpp"
#include "repgraph/graph.hpp"
#include "repgraph/stats.hpp"

namespace repgraph {

double normal_cdf(double x);
double normal_sf(double x);  // 1 - Phi(x) without cancellation
double normal_quantile(double p);

// Tail used for each statistic: z0 lower, zw upper, zd two-sided, s and m upper.
enum class StatisticKind { z0, zw, zd, s, m };

std::string to_string(StatisticKind kind);

// kappa is only read for StatisticKind::m. Throws DomainError for negative S
// or non-positive kappa.
double pvalue_analytic(StatisticKind kind, double value, double kappa = 1.0);

struct KappaSolution {
    double kappa = 0;
    double beta = 0;    // M(kappa) >= beta rejects
    double alpha1 = 0;  // P(Z_w >= beta / kappa)
    double alpha2 = 0;  // P(|Z_d| >= beta)
};

// Solves P(M(kappa) >= beta) = alpha with alpha1 = gamma * alpha2, treating
// Z_w and Z_d as independent standard normals.
KappaSolution solve_kappa(double gamma, double alpha = 0.05);

struct SummaryPvalues {
    double z0 = 1, zw = 1, zd = 1, s = 1;
    std::vector<double> m;
};

struct Pvalues {
    SummaryPvalues averaging;
    SummaryPvalues union_graph;
    const SummaryPvalues& operator[](Summary s) const { return s == Summary::averaging ? averaging : union_graph; }
};

Pvalues analytic_pvalues(const StatisticValues& values);

struct PermutationOptions {
    std::size_t permutations = 10000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// Monte-Carlo permutation p-values with the add-one estimator. Draw b uses
// its own stream derived from (seed, b), so results do not depend on the
// thread count. Values are sampled in canonical order, so the result does
// not depend on the order observations were read in either.
Pvalues permutation_pvalues(const DistinctTable& table, const StatisticEvaluator& evaluator,
                            const StatisticValues& observed, const PermutationOptions& options);

// True when `candidate` is at least as extreme as `observed` for this kind.
bool at_least_as_extreme(StatisticKind kind, double candidate, double observed);

struct ConditionDiagnostics {
    double edges_per_n = 0;           // |C0| / N
    double inverse_edge_weight = 0;   // sum_{C0} 1/(m_u m_v) / N
    double values_per_n = 0;          // K / N
    double inverse_multiplicity = 0;  // sum_u 1/m_u / N
    double averaging_spread = 0;      // degree-variety sum / N
    double averaging_third_value = 0; // per-value third-moment sum / N^{3/2}
    double averaging_third_edge = 0;  // per-edge third-moment sum / N^{3/2}
    double union_size = 0;            // |G-bar| / N
    double union_spread = 0;          // (sum_i |E_i|^2 - 4|G-bar|^2/N) / N
    double union_third_value = 0;
    double union_third_edge = 0;
    std::vector<std::string> warnings;
};

ConditionDiagnostics condition_diagnostics(const DistinctTable& table, const SimilarityGraph& c0,
                                           const UnionGraphSummary& u);

struct TestOptions {
    std::vector<double> kappas{1.31, 1.14, 1.0};
    double alpha = 0.05;
    std::size_t permutations = 0;  // 0 skips the permutation test
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct TestReport {
    std::size_t n1 = 0, n2 = 0, total = 0, values = 0, c0_edges = 0;
    std::uint64_t union_size = 0;
    std::string family_size;  // exact big integer in decimal
    std::string graph_rule;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t permutations = 0;
    std::vector<double> kappas;
    MomentSet moments;
    StatisticValues statistics;
    Pvalues analytic;
    std::optional<Pvalues> permutation;
    ConditionDiagnostics diagnostics;
    std::optional<std::string> timestamp;
};

// Full pipeline on a prepared table and graph. Throws DegenerateNullError
// when a standardized statistic has no null variance.
TestReport run_test(const DistinctTable& table, const SimilarityGraph& c0, const TestOptions& options);

}  // namespace repgraph
