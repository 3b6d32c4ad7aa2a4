#pragma once

// Extended edge-count statistics and their permutation-null moments.
//
// Everything on the distinct-value path is a function of the per-value
// sample-1 counts n1u, so one evaluation costs O(K + |C0|).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "repgraph/dataset.hpp"
#include "repgraph/graph.hpp"

namespace repgraph {

// "averaging" = mean over the graph family, "union" = the union graph.
enum class Summary { averaging, union_graph };

std::string to_string(Summary s);
std::string suffix(Summary s);  // "(a)" / "(u)"

struct EdgeCounts {
    double r0 = 0, r1 = 0, r2 = 0;
};

struct ExtendedCounts {
    EdgeCounts averaging;
    EdgeCounts union_graph;
    const EdgeCounts& operator[](Summary s) const { return s == Summary::averaging ? averaging : union_graph; }
};

// Throws ShapeError when n1u does not match the table or exceeds a multiplicity.
void check_label_counts(const DistinctTable& table, std::span<const std::size_t> n1u);

// Sample-1 count per value from per-observation labels.
std::vector<std::size_t> label_counts(const DistinctTable& table);

ExtendedCounts extended_counts(const DistinctTable& table, std::span<const std::size_t> n1u,
                               const SimilarityGraph& c0);

// Null moments for one summary.
struct SummaryMoments {
    double e0 = 0, var0 = 0;
    double e1 = 0, var1 = 0;
    double e2 = 0, var2 = 0;
    double cov12 = 0;
    double ew = 0, varw = 0;  // closed forms for R_w
    double ed = 0, vard = 0;  // closed forms for R_d
    double edges = 0;         // R0 + R1 + R2, constant under the null
};

struct MomentSet {
    std::size_t n1 = 0, n2 = 0, total = 0;
    double p1 = 0, p2 = 0, p3 = 0;
    double q1 = 0, q2 = 0, q3 = 0;
    double f1 = 0;
    double weight = 0;  // p-hat = (n1 - 1) / (N - 2)
    SummaryMoments averaging;
    SummaryMoments union_graph;
    const SummaryMoments& operator[](Summary s) const { return s == Summary::averaging ? averaging : union_graph; }
};

// reject: throw DegenerateNullError when Var(R0), Var(R_w) or Var(R_d) is
// below 1e-9 * max(1, E^2). allow: return the moments anyway.
enum class DegeneracyPolicy { reject, allow };

// Throws DomainError for N < 4.
MomentSet moments(const DistinctTable& table, const SimilarityGraph& c0, const UnionGraphSummary& u,
                  DegeneracyPolicy policy = DegeneracyPolicy::reject);

// Moments of (R0, R1, R2) on one fixed observation-level graph; they depend
// on the graph only through its edge count and sum of squared degrees.
SummaryMoments fixed_graph_moments(std::size_t n1, std::size_t n2, double edges, double sum_sq_degree);

// Var((1-p) R1 + p R2) from the 2x2 covariance.
double weighted_variance(const SummaryMoments& m, double p);

// Minimizer of weighted_variance over p.
double optimal_weight(const SummaryMoments& m);

struct SummaryValues {
    double r0 = 0, r1 = 0, r2 = 0, rw = 0, rd = 0;
    double z0 = 0, zw = 0, zd = 0;
    double s = 0;
    std::vector<double> m;  // one per kappa
};

struct StatisticValues {
    std::vector<double> kappas;
    SummaryValues averaging;
    SummaryValues union_graph;
    const SummaryValues& operator[](Summary s) const { return s == Summary::averaging ? averaging : union_graph; }
};

double max_statistic(double zw, double zd, double kappa);

// S from the 2x2 inverse covariance of (R1, R2); kept to cross-check Z_w^2 + Z_d^2.
double generalized_quadratic_form(const SummaryMoments& m, double r1, double r2);

// Fills every derived statistic from raw counts and moments.
SummaryValues summarize(const EdgeCounts& c, const SummaryMoments& m, double weight,
                        std::span<const double> kappas);

// Precomputes per-value and per-edge factors so repeated evaluations under
// relabelling stay O(K + |C0|) with no allocation beyond the result.
class StatisticEvaluator {
public:
    StatisticEvaluator(const DistinctTable& table, const SimilarityGraph& c0, const MomentSet& moments,
                       std::vector<double> kappas);

    ExtendedCounts counts(std::span<const std::size_t> n1u) const;
    StatisticValues evaluate(std::span<const std::size_t> n1u) const;

    const MomentSet& moments() const noexcept { return moments_; }
    const std::vector<double>& kappas() const noexcept { return kappas_; }

private:
    std::vector<double> m_, inv_m_;
    std::vector<Edge> edges_;
    std::vector<double> inv_mm_;
    MomentSet moments_;
    std::vector<double> kappas_;
};

// Statistics on an explicit observation-level graph, with fixed-graph moments.
struct PerGraphResult {
    SummaryMoments moments;
    SummaryValues values;
    double sum_sq_degree = 0;
};

PerGraphResult pergraph_statistics(const ObservationGraph& g, std::span<const Sample> labels,
                                   std::span<const double> kappas,
                                   DegeneracyPolicy policy = DegeneracyPolicy::reject);

}  // namespace repgraph
