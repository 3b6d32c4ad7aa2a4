#include "repgraph/graph.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "repgraph/errors.hpp"
#include "repgraph/random.hpp"

namespace repgraph {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned> rank_;
};

// K x K mask of pairs that earlier rounds already used.
class PairMask {
public:
    explicit PairMask(std::size_t k) : k_(k), bits_(k * k, false) {}
    bool operator()(std::size_t a, std::size_t b) const { return bits_[a * k_ + b]; }
    void set(const Edge& e) { bits_[e.u * k_ + e.v] = bits_[e.v * k_ + e.u] = true; }

private:
    std::size_t k_;
    std::vector<bool> bits_;
};

std::vector<Edge> nnl_round(const DistanceMatrix& d, const PairMask& excluded, ComponentOrder order) {
    const std::size_t k = d.size();
    const double tol = d.tie_tolerance();
    auto dist = [&](std::size_t a, std::size_t b) { return excluded(a, b) ? infinity : d(a, b); };

    std::vector<Edge> edges;
    DisjointSets sets(k);

    for (std::size_t i = 0; i < k; ++i) {
        double best = infinity;
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) best = std::min(best, dist(i, j));
        if (best == infinity) continue;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i || excluded(i, j) || d(i, j) > best + tol) continue;
            edges.push_back(Edge::make(i, j));
            sets.unite(i, j);
        }
    }

    // Grow the component holding the root. Every pair added in this phase
    // touches it, so it stays the component processed on the next pass and a
    // Prim-style nearest-distance array replaces the repeated cut scans.
    const std::size_t root = order == ComponentOrder::lowest_index_first ? 0 : k - 1;
    std::vector<std::vector<std::size_t>> component(k);
    for (std::size_t i = 0; i < k; ++i) component[sets.find(i)].push_back(i);

    std::vector<bool> inside(k, false);
    std::vector<double> nearest(k, infinity);
    std::vector<std::size_t> members;
    auto absorb = [&](std::size_t node) {
        for (std::size_t i : component[sets.find(node)]) {
            if (inside[i]) continue;
            inside[i] = true;
            members.push_back(i);
            for (std::size_t j = 0; j < k; ++j)
                if (!inside[j]) nearest[j] = std::min(nearest[j], dist(i, j));
        }
    };
    absorb(root);

    while (members.size() < k) {
        double cut = infinity;
        for (std::size_t j = 0; j < k; ++j)
            if (!inside[j]) cut = std::min(cut, nearest[j]);
        if (cut == infinity)
            throw InfeasibleError("nearest neighbour link round cannot connect all " +
                                  std::to_string(k) + " values: every remaining pair is excluded");
        std::vector<std::size_t> reached;
        for (std::size_t j = 0; j < k; ++j) {
            if (inside[j] || nearest[j] > cut + tol) continue;
            for (std::size_t i : members)
                if (!excluded(i, j) && d(i, j) <= cut + tol) edges.push_back(Edge::make(i, j));
            reached.push_back(j);
        }
        for (std::size_t j : reached) absorb(j);
    }

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// Kruskal rounds over n nodes; ties in weight are visited in seeded random order.
template <typename Dist>
std::vector<Edge> kmst_edges(std::size_t n, Dist&& dist, double tol, std::size_t k, std::uint64_t seed) {
    if (n < 2) throw DomainError("k-MST needs at least two nodes");
    if (k == 0) throw DomainError("k must be positive");
    struct Weighted {
        double w;
        Edge e;
    };
    std::vector<Weighted> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) pairs.push_back({dist(a, b), Edge{a, b}});
    std::sort(pairs.begin(), pairs.end(),
              [](const Weighted& x, const Weighted& y) { return x.w < y.w || (x.w == y.w && x.e < y.e); });

    SplitMix64 rng(seed);
    std::vector<bool> taken(n * n, false);
    std::vector<Edge> result;
    for (std::size_t round = 0; round < k; ++round) {
        // Fresh shuffle of each tie class every round.
        for (std::size_t start = 0; start < pairs.size();) {
            std::size_t end = start + 1;
            while (end < pairs.size() && pairs[end].w <= pairs[start].w + tol) ++end;
            shuffle_range(pairs, start, end, rng);
            start = end;
        }
        DisjointSets sets(n);
        std::size_t added = 0;
        for (const auto& p : pairs) {
            if (added == n - 1) break;
            if (taken[p.e.u * n + p.e.v]) continue;
            if (sets.unite(p.e.u, p.e.v)) {
                result.push_back(p.e);
                taken[p.e.u * n + p.e.v] = true;
                ++added;
            }
        }
        if (added != n - 1)
            throw InfeasibleError("spanning tree round " + std::to_string(round + 1) +
                                  " cannot connect all nodes with unused pairs");
    }
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace

SimilarityGraph::SimilarityGraph(std::size_t k, std::vector<Edge> edges)
    : edges_(std::move(edges)), neighbors_(k), second_order_(k, 0) {
    for (auto& e : edges_) {
        if (e.u == e.v) throw ShapeError("similarity graph may not contain self-loops");
        if (e.u >= k || e.v >= k) throw ShapeError("edge endpoint beyond node count");
        e = Edge::make(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw ShapeError("similarity graph may not contain duplicate edges");
    for (const auto& e : edges_) {
        neighbors_[e.u].push_back(e.v);
        neighbors_[e.v].push_back(e.u);
    }
    for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());

    // |E_{u,2}| = sum of neighbour degrees minus edges with both ends among the neighbours.
    std::vector<bool> mark(k, false);
    for (std::size_t u = 0; u < k; ++u) {
        std::size_t total = 0, inner = 0;
        for (std::size_t v : neighbors_[u]) mark[v] = true;
        for (std::size_t v : neighbors_[u]) {
            total += neighbors_[v].size();
            for (std::size_t w : neighbors_[v])
                if (w > v && mark[w]) ++inner;
        }
        for (std::size_t v : neighbors_[u]) mark[v] = false;
        second_order_[u] = total - inner;
    }
}

bool SimilarityGraph::contains(std::size_t a, std::size_t b) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge::make(a, b));
}

bool SimilarityGraph::connected() const {
    if (size() <= 1) return true;
    DisjointSets sets(size());
    std::size_t merges = 0;
    for (const auto& e : edges_) merges += sets.unite(e.u, e.v);
    return merges == size() - 1;
}

SimilarityGraph build_nnl(const DistanceMatrix& d, ComponentOrder order) {
    if (d.size() < 2) throw DomainError("nearest neighbour link needs K >= 2 distinct values");
    return SimilarityGraph(d.size(), nnl_round(d, PairMask(d.size()), order));
}

std::vector<std::vector<Edge>> knnl_rounds(const DistanceMatrix& d, std::size_t k) {
    if (d.size() < 2) throw DomainError("nearest neighbour link needs K >= 2 distinct values");
    if (k == 0) throw DomainError("k must be positive");
    PairMask excluded(d.size());
    std::vector<std::vector<Edge>> rounds;
    for (std::size_t j = 0; j < k; ++j) {
        try {
            rounds.push_back(nnl_round(d, excluded, ComponentOrder::lowest_index_first));
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("k=" + std::to_string(k) + " is infeasible at round " +
                                  std::to_string(j + 1) + ": " + e.what());
        }
        for (const auto& e : rounds.back()) excluded.set(e);
    }
    return rounds;
}

SimilarityGraph build_knnl(const DistanceMatrix& d, std::size_t k) {
    std::vector<Edge> all;
    for (auto& round : knnl_rounds(d, k)) all.insert(all.end(), round.begin(), round.end());
    return SimilarityGraph(d.size(), std::move(all));
}

SimilarityGraph build_kmst(const DistanceMatrix& d, std::size_t k, std::uint64_t seed) {
    auto edges = kmst_edges(
        d.size(), [&](std::size_t a, std::size_t b) { return d(a, b); }, d.tie_tolerance(), k, seed);
    return SimilarityGraph(d.size(), std::move(edges));
}

ObservationGraph build_observation_kmst(const DistanceMatrix& d, const DistinctTable& table,
                                        std::size_t k, std::uint64_t seed) {
    if (d.size() != table.size()) throw ShapeError("distance matrix and distinct table differ in K");
    const auto& value = table.value_of();
    auto edges = kmst_edges(
        table.total(),
        [&](std::size_t a, std::size_t b) { return value[a] == value[b] ? 0.0 : d(value[a], value[b]); },
        d.tie_tolerance(), k, seed);
    return ObservationGraph{table.total(), std::move(edges)};
}

UnionGraphSummary union_graph_summary(const SimilarityGraph& c0, const DistinctTable& table) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    const auto& m = table.multiplicity();
    UnionGraphSummary s;
    s.incident_by_value.resize(c0.size());
    for (std::size_t u = 0; u < c0.size(); ++u) {
        std::uint64_t inc = m[u] - 1;
        for (std::size_t v : c0.neighbors(u)) inc += m[v];
        s.incident_by_value[u] = inc;
        s.size += static_cast<std::uint64_t>(m[u]) * (m[u] - 1) / 2;
        s.sum_sq += static_cast<std::uint64_t>(m[u]) * inc * inc;
    }
    for (const auto& e : c0.edges()) s.size += static_cast<std::uint64_t>(m[e.u]) * m[e.v];
    s.incident.resize(table.total());
    for (std::size_t i = 0; i < table.total(); ++i) s.incident[i] = s.incident_by_value[table.value_of(i)];
    return s;
}

ObservationGraph materialize_union_graph(const SimilarityGraph& c0, const DistinctTable& table) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    const auto members = table.members();
    ObservationGraph g{table.total(), {}};
    for (const auto& group : members)
        for (std::size_t a = 0; a < group.size(); ++a)
            for (std::size_t b = a + 1; b < group.size(); ++b) g.edges.push_back(Edge::make(group[a], group[b]));
    for (const auto& e : c0.edges())
        for (std::size_t i : members[e.u])
            for (std::size_t j : members[e.v]) g.edges.push_back(Edge::make(i, j));
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

BigInt count_graph_family(const SimilarityGraph& c0, const DistinctTable& table) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    const auto& m = table.multiplicity();
    BigInt count = 1;
    for (const auto& e : c0.edges()) count *= BigInt(m[e.u]) * m[e.v];
    for (std::size_t u = 0; u < m.size(); ++u)
        if (m[u] > 2) count *= boost::multiprecision::pow(BigInt(m[u]), static_cast<unsigned>(m[u] - 2));
    return count;
}

std::vector<Edge> decode_pruefer(const std::vector<std::size_t>& sequence, std::size_t n) {
    if (n < 2 || sequence.size() != n - 2) throw DomainError("Pruefer sequence length must be n - 2");
    std::vector<std::size_t> degree(n, 1);
    for (std::size_t x : sequence) {
        if (x >= n) throw DomainError("Pruefer symbol out of range");
        ++degree[x];
    }
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (std::size_t x : sequence) {
        std::size_t leaf = 0;
        while (degree[leaf] != 1) ++leaf;
        edges.push_back(Edge::make(leaf, x));
        --degree[leaf];
        --degree[x];
    }
    std::size_t a = n, b = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (degree[i] != 1) continue;
        (a == n ? a : b) = i;
    }
    edges.push_back(Edge::make(a, b));
    return edges;
}

GraphFamilyEnumerator::GraphFamilyEnumerator(const SimilarityGraph& c0, const DistinctTable& table,
                                             std::uint64_t cap)
    : nodes_(table.total()), c0_edges_(c0.edges()), members_(table.members()) {
    const BigInt total = count_graph_family(c0, table);
    if (total > cap)
        throw EnumerationTooLargeError("graph family has " + total.str() + " members, above the cap of " +
                                       std::to_string(cap));
    count_ = total.convert_to<std::uint64_t>();
    const auto& m = table.multiplicity();
    for (const auto& e : c0_edges_) radix_.push_back(static_cast<std::uint64_t>(m[e.u]) * m[e.v]);
    for (std::size_t u = 0; u < m.size(); ++u) {
        if (m[u] < 2) continue;
        tree_values_.push_back(u);
        std::uint64_t trees = 1;
        for (std::size_t i = 2; i < m[u]; ++i) trees *= m[u];
        radix_.push_back(trees);
    }
    digit_.assign(radix_.size(), 0);
}

void GraphFamilyEnumerator::decode(ObservationGraph& out) const {
    out.nodes = nodes_;
    out.edges.clear();
    std::size_t slot = 0;
    for (const auto& e : c0_edges_) {
        const auto& mv = members_[e.v];
        const std::uint64_t d = digit_[slot++];
        out.edges.push_back(Edge::make(members_[e.u][d / mv.size()], mv[d % mv.size()]));
    }
    for (std::size_t u : tree_values_) {
        const auto& group = members_[u];
        const std::size_t n = group.size();
        std::uint64_t d = digit_[slot++];
        std::vector<std::size_t> seq(n - 2);
        for (std::size_t i = 0; i < seq.size(); ++i) {
            seq[i] = d % n;
            d /= n;
        }
        for (const Edge& t : decode_pruefer(seq, n)) out.edges.push_back(Edge::make(group[t.u], group[t.v]));
    }
    std::sort(out.edges.begin(), out.edges.end());
}

bool GraphFamilyEnumerator::next(ObservationGraph& out) {
    if (produced_ == count_) return false;
    decode(out);
    ++produced_;
    for (std::size_t i = 0; i < digit_.size(); ++i) {
        if (++digit_[i] < radix_[i]) break;
        digit_[i] = 0;
    }
    return true;
}

void write_graph(std::ostream& out, const SimilarityGraph& g) {
    out << "K=" << g.size() << '\n';
    for (const auto& e : g.edges()) out << e.u + 1 << ',' << e.v + 1 << '\n';
}

SimilarityGraph read_graph(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t k = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            if (line.rfind("K=", 0) != 0) throw ParseError("expected header 'K=<K>'", line_no);
            try {
                std::size_t pos = 0;
                k = std::stoul(line.substr(2), &pos);
                if (pos != line.size() - 2) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError("malformed node count in header", line_no);
            }
            have_header = true;
            continue;
        }
        std::istringstream row(line);
        long long a = 0, b = 0;
        char comma = 0;
        if (!(row >> a >> comma >> b) || comma != ',' || !(row >> std::ws).eof())
            throw ParseError("expected 'u,v'", line_no);
        if (a < 1 || b < 1 || static_cast<std::size_t>(a) > k || static_cast<std::size_t>(b) > k)
            throw ParseError("node index outside 1..K", line_no);
        if (a == b) throw ParseError("self-loop", line_no);
        edges.push_back(Edge::make(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1)));
    }
    if (!have_header) throw ParseError("missing 'K=<K>' header", 0);
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ParseError("duplicate edge", 0);
    return SimilarityGraph(k, std::move(edges));
}

}  // namespace repgraph
