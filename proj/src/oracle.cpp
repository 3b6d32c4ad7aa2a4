#include "repgraph/oracle.hpp"

#include <algorithm>
#include <limits>

#include "repgraph/errors.hpp"

namespace repgraph::oracle {

namespace {

BigInt choose(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    BigInt r = 1;
    for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

void tally(RationalCounts& c, Sample a, Sample b, const Rational& w) {
    if (a != b)
        c.r0 += w;
    else if (a == Sample::first)
        c.r1 += w;
    else
        c.r2 += w;
}

// Scan of all observation pairs. In a uniformly drawn member of the graph
// family, a pair inside value u is an edge with probability
// (m_u - 1) / C(m_u, 2) = 2 / m_u (a random spanning tree of the clique), and
// a pair across a C0 edge with probability 1 / (m_u m_v).
void scan_pairs(const DistinctTable& table, const SimilarityGraph& c0, const std::vector<Sample>& labels,
                RationalCounts& averaging, RationalCounts& union_graph) {
    const std::size_t n = table.total();
    const auto& m = table.multiplicity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t u = table.value_of(i), v = table.value_of(j);
            Rational p;
            if (u == v)
                p = Rational(2, m[u]);
            else if (c0.contains(u, v))
                p = Rational(1, static_cast<long long>(m[u] * m[v]));
            else
                continue;
            tally(averaging, labels[i], labels[j], p);
            tally(union_graph, labels[i], labels[j], 1);
        }
}

}  // namespace

Rational ExhaustiveNull::mean(const std::function<Rational(const NullAssignment&)>& f) const {
    Rational s = 0;
    for (const auto& a : support) s += Rational(a.weight) * f(a);
    return s / Rational(assignments);
}

Rational ExhaustiveNull::covariance(const std::function<Rational(const NullAssignment&)>& f,
                                    const std::function<Rational(const NullAssignment&)>& g) const {
    const Rational mf = mean(f), mg = mean(g);
    Rational s = 0;
    for (const auto& a : support) s += Rational(a.weight) * (f(a) - mf) * (g(a) - mg);
    return s / Rational(assignments);
}

ExactMoments ExhaustiveNull::moments(Summary s) const {
    const std::size_t total = n1 + n2;
    const Rational w(static_cast<long long>(n1) - 1, static_cast<long long>(total) - 2);
    auto r0 = [s](const NullAssignment& a) { return a[s].r0; };
    auto r1 = [s](const NullAssignment& a) { return a[s].r1; };
    auto r2 = [s](const NullAssignment& a) { return a[s].r2; };
    auto rw = [s, w](const NullAssignment& a) { return (1 - w) * a[s].r1 + w * a[s].r2; };
    auto rd = [s](const NullAssignment& a) { return a[s].r1 - a[s].r2; };
    ExactMoments m;
    m.e0 = mean(r0);
    m.var0 = covariance(r0, r0);
    m.e1 = mean(r1);
    m.var1 = covariance(r1, r1);
    m.e2 = mean(r2);
    m.var2 = covariance(r2, r2);
    m.cov12 = covariance(r1, r2);
    m.ew = mean(rw);
    m.varw = covariance(rw, rw);
    m.ed = mean(rd);
    m.vard = covariance(rd, rd);
    return m;
}

double ExhaustiveNull::probability(const std::function<bool(const NullAssignment&)>& pred) const {
    BigInt hits = 0;
    for (const auto& a : support)
        if (pred(a)) hits += a.weight;
    return static_cast<double>(Rational(hits) / Rational(assignments));
}

ExhaustiveNull enumerate_permutations(const DistinctTable& table, const SimilarityGraph& c0, std::uint64_t cap) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    ExhaustiveNull out;
    out.n1 = table.n1();
    out.n2 = table.n2();
    out.assignments = choose(table.total(), table.n1());
    if (out.assignments > cap)
        throw EnumerationTooLargeError("C(N, n1) = " + out.assignments.str() + " exceeds the cap of " +
                                       std::to_string(cap));

    const auto& m = table.multiplicity();
    const auto members = table.members();
    const std::size_t k = table.size();
    std::vector<std::size_t> n1u(k, 0);
    std::vector<Sample> labels(table.total());

    // Depth-first over values, keeping the running total at n1.
    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t u, std::size_t left) {
        if (u == k) {
            if (left != 0) return;
            NullAssignment a;
            a.n1u = n1u;
            a.weight = 1;
            for (std::size_t x = 0; x < k; ++x) {
                a.weight *= choose(m[x], n1u[x]);
                for (std::size_t i = 0; i < members[x].size(); ++i)
                    labels[members[x][i]] = i < n1u[x] ? Sample::first : Sample::second;
            }
            scan_pairs(table, c0, labels, a.averaging, a.union_graph);
            out.support.push_back(std::move(a));
            return;
        }
        for (std::size_t c = 0; c <= std::min(m[u], left); ++c) {
            n1u[u] = c;
            visit(u + 1, left - c);
        }
        n1u[u] = 0;
    };
    visit(0, table.n1());
    return out;
}

RationalCounts average_over_family(const DistinctTable& table, const SimilarityGraph& c0,
                                   const std::vector<Sample>& labels, std::uint64_t cap) {
    if (labels.size() != table.total()) throw ShapeError("one label per observation required");
    GraphFamilyEnumerator family(c0, table, cap);
    BigInt r0 = 0, r1 = 0, r2 = 0;
    ObservationGraph g;
    while (family.next(g))
        for (const auto& e : g.edges) {
            const Sample a = labels[e.u], b = labels[e.v];
            if (a != b)
                ++r0;
            else if (a == Sample::first)
                ++r1;
            else
                ++r2;
        }
    const Rational count(family.count());
    return {Rational(r0) / count, Rational(r1) / count, Rational(r2) / count};
}

RationalCounts union_graph_counts(const DistinctTable& table, const SimilarityGraph& c0,
                                  const std::vector<Sample>& labels) {
    if (labels.size() != table.total()) throw ShapeError("one label per observation required");
    RationalCounts c;
    for (const auto& e : materialize_union_graph(c0, table).edges) tally(c, labels[e.u], labels[e.v], 1);
    return c;
}

std::vector<std::vector<Edge>> all_msts(const DistanceMatrix& d) {
    const std::size_t k = d.size();
    if (k < 2) throw DomainError("spanning trees need K >= 2");
    if (k > 8) throw EnumerationTooLargeError("all-MST enumeration is limited to K <= 8");

    std::vector<Edge> pairs;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) pairs.push_back({a, b});

    std::vector<std::vector<Edge>> trees;
    std::vector<double> weights;
    std::vector<Edge> chosen;

    // Each pair is either kept (when it joins two components) or deleted.
    std::function<void(std::size_t, std::vector<std::size_t>, double)> grow =
        [&](std::size_t next, std::vector<std::size_t> comp, double weight) {
            if (chosen.size() == k - 1) {
                trees.push_back(chosen);
                weights.push_back(weight);
                return;
            }
            if (pairs.size() - next < k - 1 - chosen.size()) return;
            const Edge e = pairs[next];
            if (comp[e.u] != comp[e.v]) {
                auto merged = comp;
                const std::size_t from = comp[e.v], to = comp[e.u];
                for (auto& c : merged)
                    if (c == from) c = to;
                chosen.push_back(e);
                grow(next + 1, std::move(merged), weight + d(e.u, e.v));
                chosen.pop_back();
            }
            grow(next + 1, std::move(comp), weight);
        };
    std::vector<std::size_t> comp(k);
    for (std::size_t i = 0; i < k; ++i) comp[i] = i;
    grow(0, comp, 0.0);

    const double best = *std::min_element(weights.begin(), weights.end());
    const double slack = d.tie_tolerance() * static_cast<double>(k - 1) +
                         1e-12 * std::max(1.0, std::abs(best));
    std::vector<std::vector<Edge>> out;
    for (std::size_t i = 0; i < trees.size(); ++i)
        if (weights[i] <= best + slack) out.push_back(trees[i]);
    return out;
}

SimilarityGraph mst_union(const DistanceMatrix& d) {
    std::vector<Edge> all;
    for (const auto& t : all_msts(d)) all.insert(all.end(), t.begin(), t.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return SimilarityGraph(d.size(), std::move(all));
}

}  // namespace repgraph::oracle
