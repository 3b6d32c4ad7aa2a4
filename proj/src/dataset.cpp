#include "repgraph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>

#include "repgraph/errors.hpp"

namespace repgraph {

PayloadKind kind_of(const Payload& payload) {
    switch (payload.index()) {
        case 0: return PayloadKind::vector;
        case 1: return PayloadKind::network;
        default: return PayloadKind::ranking;
    }
}

std::string to_string(PayloadKind kind) {
    switch (kind) {
        case PayloadKind::vector: return "vector";
        case PayloadKind::network: return "network";
        case PayloadKind::ranking: return "ranking";
    }
    return "?";
}

PayloadKind parse_payload_kind(const std::string& text) {
    if (text == "vector") return PayloadKind::vector;
    if (text == "network") return PayloadKind::network;
    if (text == "ranking") return PayloadKind::ranking;
    throw DomainError("unknown payload kind '" + text + "' (vector|network|ranking)");
}

namespace {

template <typename T>
void append_raw(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

std::size_t shape_of(const Payload& p) {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, AdjacencyMatrix>)
                return v.nodes;
            else
                return v.size();
        },
        p);
}

}  // namespace

void validate_ranking(const Ranking& r) {
    std::vector<bool> seen(r.size() + 1, false);
    for (int x : r) {
        if (x < 1 || static_cast<std::size_t>(x) > r.size() || seen[x])
            throw DomainError("ranking is not a permutation of 1.." + std::to_string(r.size()));
        seen[x] = true;
    }
}

std::string canonical_key(const Payload& payload) {
    std::string key;
    key.push_back(static_cast<char>(payload.index()));
    std::visit(
        [&key](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RealVector>) {
                append_raw<std::uint64_t>(key, v.size());
                for (double x : v) {
                    if (std::isnan(x)) throw DomainError("NaN in observation vector");
                    append_raw<double>(key, x == 0.0 ? 0.0 : x);
                }
            } else if constexpr (std::is_same_v<T, AdjacencyMatrix>) {
                append_raw<std::uint64_t>(key, v.nodes);
                key.append(reinterpret_cast<const char*>(v.cells.data()), v.cells.size());
            } else {
                append_raw<std::uint64_t>(key, v.size());
                for (int x : v) append_raw<std::int32_t>(key, x);
            }
        },
        payload);
    return key;
}

DistinctTable DistinctTable::from_counts(std::vector<std::size_t> n1u, std::vector<std::size_t> n2u) {
    if (n1u.size() != n2u.size()) throw ShapeError("n1u and n2u differ in length");
    if (n1u.empty()) throw DomainError("distinct table needs at least one value");
    DistinctTable t;
    t.n1u_ = std::move(n1u);
    t.n2u_ = std::move(n2u);
    for (std::size_t u = 0; u < t.n1u_.size(); ++u) {
        if (t.n1u_[u] + t.n2u_[u] == 0) throw DomainError("distinct value with no observations");
        for (std::size_t i = 0; i < t.n1u_[u]; ++i) {
            t.value_of_.push_back(u);
            t.labels_.push_back(Sample::first);
        }
        for (std::size_t i = 0; i < t.n2u_[u]; ++i) {
            t.value_of_.push_back(u);
            t.labels_.push_back(Sample::second);
        }
    }
    t.finish();
    return t;
}

DistinctTable DistinctTable::from_mapping(std::size_t k, std::span<const std::size_t> value_of,
                                          std::span<const Sample> labels) {
    if (value_of.size() != labels.size()) throw ShapeError("mapping and label vectors differ in length");
    if (value_of.empty()) throw DomainError("no observations");
    DistinctTable t;
    t.n1u_.assign(k, 0);
    t.n2u_.assign(k, 0);
    for (std::size_t i = 0; i < value_of.size(); ++i) {
        if (value_of[i] >= k) throw DomainError("observation mapped to value index beyond K");
        (labels[i] == Sample::first ? t.n1u_ : t.n2u_)[value_of[i]]++;
    }
    for (std::size_t u = 0; u < k; ++u)
        if (t.n1u_[u] + t.n2u_[u] == 0)
            throw DomainError("distinct value " + std::to_string(u + 1) + " has no observations");
    t.value_of_.assign(value_of.begin(), value_of.end());
    t.labels_.assign(labels.begin(), labels.end());
    t.finish();
    return t;
}

void DistinctTable::finish() {
    m_.resize(n1u_.size());
    for (std::size_t u = 0; u < m_.size(); ++u) m_[u] = n1u_[u] + n2u_[u];
    n1_ = std::accumulate(n1u_.begin(), n1u_.end(), std::size_t{0});
    n2_ = std::accumulate(n2u_.begin(), n2u_.end(), std::size_t{0});
    canonical_order_.resize(m_.size());
    std::iota(canonical_order_.begin(), canonical_order_.end(), std::size_t{0});
    if (!keys_.empty())
        std::sort(canonical_order_.begin(), canonical_order_.end(),
                  [this](std::size_t a, std::size_t b) { return keys_[a] < keys_[b]; });
}

std::vector<std::vector<std::size_t>> DistinctTable::members() const {
    std::vector<std::vector<std::size_t>> out(size());
    for (std::size_t i = 0; i < value_of_.size(); ++i) out[value_of_[i]].push_back(i);
    return out;
}

DistinctTable deduplicate(std::span<const Observation> observations) {
    if (observations.empty()) throw DomainError("deduplicate: empty observation list");
    const PayloadKind kind = kind_of(observations.front().payload);
    const std::size_t shape = shape_of(observations.front().payload);

    DistinctTable t;
    std::unordered_map<std::string, std::size_t> index;
    t.value_of_.reserve(observations.size());
    t.labels_.reserve(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& obs = observations[i];
        if (kind_of(obs.payload) != kind || shape_of(obs.payload) != shape)
            throw ShapeError("observation " + std::to_string(i + 1) +
                             " differs in payload kind or shape from the first observation");
        if (kind == PayloadKind::ranking) validate_ranking(std::get<Ranking>(obs.payload));
        std::string key = canonical_key(obs.payload);
        auto [it, inserted] = index.try_emplace(std::move(key), t.keys_.size());
        if (inserted) {
            t.keys_.push_back(it->first);
            t.representatives_.push_back(obs.payload);
            t.n1u_.push_back(0);
            t.n2u_.push_back(0);
        }
        const std::size_t u = it->second;
        (obs.label == Sample::first ? t.n1u_ : t.n2u_)[u]++;
        t.value_of_.push_back(u);
        t.labels_.push_back(obs.label);
    }
    t.finish();
    return t;
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::euclidean: return "euclidean";
        case Metric::frobenius_sq: return "frobenius_sq";
        case Metric::spearman: return "spearman";
        case Metric::footrule: return "footrule";
        case Metric::kendall: return "kendall";
    }
    return "?";
}

Metric parse_metric(const std::string& text) {
    if (text == "euclidean") return Metric::euclidean;
    if (text == "frobenius_sq" || text == "frobenius") return Metric::frobenius_sq;
    if (text == "spearman") return Metric::spearman;
    if (text == "footrule") return Metric::footrule;
    if (text == "kendall") return Metric::kendall;
    throw DomainError("unknown metric '" + text + "'");
}

Metric default_metric(PayloadKind kind) {
    switch (kind) {
        case PayloadKind::vector: return Metric::euclidean;
        case PayloadKind::network: return Metric::frobenius_sq;
        case PayloadKind::ranking: return Metric::spearman;
    }
    return Metric::euclidean;
}

bool metric_applies(Metric metric, PayloadKind kind) {
    switch (metric) {
        case Metric::euclidean: return kind == PayloadKind::vector;
        case Metric::frobenius_sq: return kind == PayloadKind::network;
        default: return kind == PayloadKind::ranking;
    }
}

std::int64_t distance_frobenius_sq(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
    if (a.nodes != b.nodes || a.cells.size() != b.cells.size())
        throw ShapeError("adjacency matrices differ in size");
    std::int64_t diff = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i) diff += (a.cells[i] != b.cells[i]);
    return diff;
}

namespace {

void check_pair(const Ranking& a, const Ranking& b) {
    if (a.size() != b.size()) throw ShapeError("rankings differ in length");
    validate_ranking(a);
    validate_ranking(b);
}

// Counts inversions of v while merge-sorting it.
std::int64_t count_inversions(std::vector<int>& v, std::vector<int>& scratch, std::size_t lo,
                              std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
            scratch[k++] = v[i++];
        } else {
            inv += static_cast<std::int64_t>(mid - i);
            scratch[k++] = v[j++];
        }
    }
    while (i < mid) scratch[k++] = v[i++];
    while (j < hi) scratch[k++] = v[j++];
    std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
    return inv;
}

}  // namespace

std::int64_t distance_spearman(const Ranking& a, const Ranking& b) {
    check_pair(a, b);
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::int64_t d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::int64_t distance_footrule(const Ranking& a, const Ranking& b) {
    check_pair(a, b);
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

std::int64_t distance_kendall(const Ranking& a, const Ranking& b) {
    check_pair(a, b);
    // Visit positions in increasing order of b; the discordant pairs are then
    // exactly the inversions of the a-values in that order.
    std::vector<std::size_t> position_of_b(b.size() + 1);
    for (std::size_t i = 0; i < b.size(); ++i) position_of_b[b[i]] = i;
    std::vector<int> seq(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) seq[t] = a[position_of_b[t + 1]];
    std::vector<int> scratch(seq.size());
    return count_inversions(seq, scratch, 0, seq.size());
}

double distance_euclidean(const RealVector& a, const RealVector& b) {
    if (a.size() != b.size()) throw ShapeError("vectors differ in dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

DistanceMatrix::DistanceMatrix(std::size_t k, std::vector<double> values, double tie_tolerance)
    : k_(k), values_(std::move(values)), tie_tolerance_(tie_tolerance) {
    if (values_.size() != k_ * k_) throw ShapeError("distance matrix is not K x K");
    if (!(tie_tolerance_ >= 0.0) || !std::isfinite(tie_tolerance_))
        throw DomainError("tie tolerance must be a finite nonnegative number");
    for (std::size_t u = 0; u < k_; ++u) {
        if ((*this)(u, u) != 0.0) throw ShapeError("distance matrix has a nonzero diagonal entry");
        for (std::size_t v = 0; v < k_; ++v) {
            const double d = (*this)(u, v);
            if (!std::isfinite(d) || d < 0.0) throw DomainError("distances must be finite and nonnegative");
            if (d != (*this)(v, u)) throw ShapeError("distance matrix is not symmetric");
            if (d != std::floor(d)) integral_ = false;
            if (u != v && d <= tie_tolerance_)
                throw ConsistencyError("distinct values " + std::to_string(u + 1) + " and " +
                                       std::to_string(v + 1) +
                                       " are not separated (distance within tie tolerance)");
        }
    }
}

bool DistanceMatrix::tied(double a, double b) const noexcept {
    return std::abs(a - b) <= tie_tolerance_;
}

DistanceMatrix pairwise_distances(const DistinctTable& table, Metric metric, double tie_tolerance) {
    if (!table.has_payloads()) throw DomainError("distinct table carries no payloads");
    const auto& reps = table.representatives();
    const PayloadKind kind = kind_of(reps.front());
    if (!metric_applies(metric, kind))
        throw DomainError("metric " + to_string(metric) + " does not apply to " + to_string(kind) +
                          " payloads");
    const std::size_t k = reps.size();
    std::vector<double> values(k * k, 0.0);
    for (std::size_t u = 0; u < k; ++u) {
        for (std::size_t v = u + 1; v < k; ++v) {
            double d = 0.0;
            switch (metric) {
                case Metric::euclidean:
                    d = distance_euclidean(std::get<RealVector>(reps[u]), std::get<RealVector>(reps[v]));
                    break;
                case Metric::frobenius_sq:
                    d = static_cast<double>(distance_frobenius_sq(std::get<AdjacencyMatrix>(reps[u]),
                                                                  std::get<AdjacencyMatrix>(reps[v])));
                    break;
                case Metric::spearman:
                    d = static_cast<double>(
                        distance_spearman(std::get<Ranking>(reps[u]), std::get<Ranking>(reps[v])));
                    break;
                case Metric::footrule:
                    d = static_cast<double>(
                        distance_footrule(std::get<Ranking>(reps[u]), std::get<Ranking>(reps[v])));
                    break;
                case Metric::kendall:
                    d = static_cast<double>(
                        distance_kendall(std::get<Ranking>(reps[u]), std::get<Ranking>(reps[v])));
                    break;
            }
            values[u * k + v] = values[v * k + u] = d;
        }
    }
    return DistanceMatrix(k, std::move(values), tie_tolerance);
}

}  // namespace repgraph
