#pragma once

// Observations, the distinct-value table and distances between distinct values.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace repgraph {

enum class Sample : std::uint8_t { first = 1, second = 2 };

using RealVector = std::vector<double>;

// A ranking of n objects stored as a sequence; entry i is the object in position i.
// Must be a bijection on {1..n}.
using Ranking = std::vector<int>;

// Square 0/1 adjacency matrix, row-major. Directed networks are allowed.
struct AdjacencyMatrix {
    std::size_t nodes = 0;
    std::vector<std::uint8_t> cells;

    std::uint8_t operator()(std::size_t i, std::size_t j) const { return cells[i * nodes + j]; }
    friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;
};

using Payload = std::variant<RealVector, AdjacencyMatrix, Ranking>;

enum class PayloadKind { vector, network, ranking };

PayloadKind kind_of(const Payload& payload);
std::string to_string(PayloadKind kind);
PayloadKind parse_payload_kind(const std::string& text);

struct Observation {
    Payload payload;
    Sample label = Sample::first;
};

// Canonical byte encoding; two observations are the same distinct value iff
// their keys are equal. -0.0 is folded onto 0.0 and NaN is rejected.
std::string canonical_key(const Payload& payload);

// Distinct values with per-value sample counts (n1u, n2u, m_u).
//
// Values are indexed 0..K-1 in order of first appearance. Observation i maps
// to value value_of(i); for tables built from counts the observations are laid
// out value by value with the sample-1 observations first.
class DistinctTable {
public:
    // Counts only (pre-deduplicated data or synthetic instances).
    static DistinctTable from_counts(std::vector<std::size_t> n1u, std::vector<std::size_t> n2u);

    // Pre-deduplicated observation mapping, e.g. a distance-matrix sidecar file.
    static DistinctTable from_mapping(std::size_t k, std::span<const std::size_t> value_of,
                                      std::span<const Sample> labels);

    std::size_t size() const noexcept { return m_.size(); }  // K
    std::size_t n1() const noexcept { return n1_; }
    std::size_t n2() const noexcept { return n2_; }
    std::size_t total() const noexcept { return n1_ + n2_; }  // N

    const std::vector<std::size_t>& n1u() const noexcept { return n1u_; }
    const std::vector<std::size_t>& n2u() const noexcept { return n2u_; }
    const std::vector<std::size_t>& multiplicity() const noexcept { return m_; }
    std::size_t multiplicity(std::size_t u) const { return m_[u]; }

    std::size_t value_of(std::size_t observation) const { return value_of_[observation]; }
    const std::vector<std::size_t>& value_of() const noexcept { return value_of_; }
    const std::vector<Sample>& labels() const noexcept { return labels_; }

    // Observation indices that share value u, ascending.
    std::vector<std::vector<std::size_t>> members() const;

    bool has_payloads() const noexcept { return !representatives_.empty(); }
    const std::vector<Payload>& representatives() const noexcept { return representatives_; }

    // Value order that does not depend on the order observations arrived in:
    // ascending canonical key when payloads are known, identity otherwise.
    const std::vector<std::size_t>& canonical_order() const noexcept { return canonical_order_; }

    friend DistinctTable deduplicate(std::span<const Observation> observations);

private:
    DistinctTable() = default;
    void finish();

    std::vector<std::size_t> n1u_, n2u_, m_;
    std::size_t n1_ = 0, n2_ = 0;
    std::vector<std::size_t> value_of_;
    std::vector<Sample> labels_;
    std::vector<Payload> representatives_;
    std::vector<std::string> keys_;
    std::vector<std::size_t> canonical_order_;
};

DistinctTable deduplicate(std::span<const Observation> observations);

enum class Metric { euclidean, frobenius_sq, spearman, footrule, kendall };

std::string to_string(Metric metric);
Metric parse_metric(const std::string& text);
Metric default_metric(PayloadKind kind);
bool metric_applies(Metric metric, PayloadKind kind);

// Squared Frobenius norm of A - B for 0/1 matrices: the number of differing cells.
std::int64_t distance_frobenius_sq(const AdjacencyMatrix& a, const AdjacencyMatrix& b);

// Spearman's rho distance sum_i (a_i - b_i)^2.
std::int64_t distance_spearman(const Ranking& a, const Ranking& b);

// Spearman's footrule sum_i |a_i - b_i|.
std::int64_t distance_footrule(const Ranking& a, const Ranking& b);

// Number of discordant pairs (Kendall's tau distance), O(n log n).
std::int64_t distance_kendall(const Ranking& a, const Ranking& b);

double distance_euclidean(const RealVector& a, const RealVector& b);

void validate_ranking(const Ranking& r);

// Symmetric K x K dissimilarities on distinct values.
//
// Ties are decided by |d - d'| <= tie_tolerance. Integer metrics are held in
// doubles, which is exact below 2^53, so tie detection stays exact for them.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    // Throws ShapeError on bad size / asymmetry / nonzero diagonal, DomainError
    // on negative or non-finite entries and ConsistencyError when two distinct
    // values are not separated by more than the tie tolerance.
    DistanceMatrix(std::size_t k, std::vector<double> values, double tie_tolerance = 0.0);

    std::size_t size() const noexcept { return k_; }
    double operator()(std::size_t u, std::size_t v) const { return values_[u * k_ + v]; }
    double tie_tolerance() const noexcept { return tie_tolerance_; }
    bool integral() const noexcept { return integral_; }
    bool tied(double a, double b) const noexcept;
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t k_ = 0;
    std::vector<double> values_;
    double tie_tolerance_ = 0.0;
    bool integral_ = true;
};

DistanceMatrix pairwise_distances(const DistinctTable& table, Metric metric,
                                  double tie_tolerance = 0.0);

}  // namespace repgraph
