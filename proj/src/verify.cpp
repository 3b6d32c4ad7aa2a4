#include <algorithm>
#include <cmath>
#include <sstream>

#include "repgraph/errors.hpp"
#include "repgraph/oracle.hpp"

namespace repgraph::oracle {

std::string Instance::describe() const {
    std::ostringstream out;
    out << "m=(";
    for (std::size_t u = 0; u < table.size(); ++u) out << (u ? "," : "") << table.multiplicity(u);
    out << ") n1u=(";
    for (std::size_t u = 0; u < table.size(); ++u) out << (u ? "," : "") << table.n1u()[u];
    out << ") C0={";
    for (std::size_t i = 0; i < c0.edges().size(); ++i)
        out << (i ? "," : "") << c0.edges()[i].u + 1 << '-' << c0.edges()[i].v + 1;
    out << '}';
    return out.str();
}

Instance random_instance(SplitMix64& rng, const InstanceLimits& limits) {
    if (limits.min_k < 1 || limits.max_k < limits.min_k || limits.max_m < 1 || limits.max_n < limits.min_n)
        throw DomainError("inconsistent instance limits");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const std::size_t k = limits.min_k + uniform_index(rng, limits.max_k - limits.min_k + 1);
        std::vector<std::size_t> m(k);
        std::size_t n = 0;
        for (auto& x : m) n += x = 1 + uniform_index(rng, limits.max_m);
        if (n < limits.min_n || n > limits.max_n) continue;
        std::vector<std::size_t> n1u(k), n2u(k);
        for (std::size_t u = 0; u < k; ++u) {
            n1u[u] = uniform_index(rng, m[u] + 1);
            n2u[u] = m[u] - n1u[u];
        }
        std::vector<Edge> edges;
        for (std::size_t v = 1; v < k; ++v) edges.push_back(Edge::make(uniform_index(rng, v), v));
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                if (uniform01(rng) < limits.extra_edge_probability &&
                    std::find(edges.begin(), edges.end(), Edge{a, b}) == edges.end())
                    edges.push_back({a, b});
        return {DistinctTable::from_counts(n1u, n2u), SimilarityGraph(k, edges)};
    }
    throw DomainError("could not draw an instance within the limits");
}

DistanceMatrix random_tied_distances(SplitMix64& rng, std::size_t k, int max_d) {
    std::vector<double> v(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            v[a * k + b] = v[b * k + a] = static_cast<double>(1 + uniform_index(rng, static_cast<std::uint64_t>(max_d)));
    return DistanceMatrix(k, std::move(v));
}

std::string describe(const DistanceMatrix& d) {
    std::ostringstream out;
    out << "K=" << d.size() << " d=[";
    for (std::size_t a = 0; a < d.size(); ++a) {
        out << (a ? ";" : "");
        for (std::size_t b = 0; b < d.size(); ++b) out << (b ? "," : "") << d(a, b);
    }
    out << ']';
    return out.str();
}

namespace {

bool close(double value, const Rational& exact) {
    const double e = static_cast<double>(exact);
    return std::abs(value - e) <= 1e-10 * std::max(1.0, std::abs(e));
}

class Checker {
public:
    explicit Checker(VerifyOutcome& out) : out_(out) {}
    void expect(bool ok, const std::string& what, const std::string& instance) {
        ++out_.checks;
        if (!ok) out_.failures.push_back(what + " mismatch on " + instance);
    }
    void expect_close(double value, const Rational& exact, const std::string& what, const std::string& instance) {
        ++out_.checks;
        if (!close(value, exact)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << what << ": closed form " << value << " vs enumeration " << static_cast<double>(exact) << " on "
                << instance;
            out_.failures.push_back(msg.str());
        }
    }

private:
    VerifyOutcome& out_;
};

void check_counts(Checker& c, const Instance& inst) {
    const std::string id = inst.describe();
    const auto counts = extended_counts(inst.table, inst.table.n1u(), inst.c0);
    const auto labels = inst.table.labels();
    const auto uni = union_graph_counts(inst.table, inst.c0, labels);
    c.expect_close(counts.union_graph.r0, uni.r0, "R0(u)", id);
    c.expect_close(counts.union_graph.r1, uni.r1, "R1(u)", id);
    c.expect_close(counts.union_graph.r2, uni.r2, "R2(u)", id);
    if (count_graph_family(inst.c0, inst.table) <= 10'000) {
        const auto avg = average_over_family(inst.table, inst.c0, labels);
        c.expect_close(counts.averaging.r0, avg.r0, "R0(a)", id);
        c.expect_close(counts.averaging.r1, avg.r1, "R1(a)", id);
        c.expect_close(counts.averaging.r2, avg.r2, "R2(a)", id);

        GraphFamilyEnumerator family(inst.c0, inst.table, 10'000);
        ObservationGraph g;
        std::uint64_t seen = 0;
        bool sizes_ok = true;
        const std::size_t expected = inst.table.total() - inst.table.size() + inst.c0.edge_count();
        while (family.next(g)) {
            ++seen;
            sizes_ok = sizes_ok && g.edges.size() == expected;
        }
        c.expect(BigInt(seen) == count_graph_family(inst.c0, inst.table), "graph family size", id);
        c.expect(sizes_ok, "graph family edge count", id);
    }
    c.expect(union_graph_summary(inst.c0, inst.table).size ==
                 materialize_union_graph(inst.c0, inst.table).edges.size(),
             "union graph size", id);
}

void check_moments(Checker& c, const Instance& inst, bool fault) {
    const std::string id = inst.describe();
    const auto u = union_graph_summary(inst.c0, inst.table);
    MomentSet ms = moments(inst.table, inst.c0, u, DegeneracyPolicy::allow);
    if (fault) ms.averaging.e1 += ms.p1;  // as if |C0| were one larger
    const ExhaustiveNull null = enumerate_permutations(inst.table, inst.c0);
    for (Summary s : {Summary::averaging, Summary::union_graph}) {
        const SummaryMoments& m = ms[s];
        const ExactMoments x = null.moments(s);
        const std::string t = suffix(s);
        c.expect_close(m.e0, x.e0, "E(R0" + t + ")", id);
        c.expect_close(m.var0, x.var0, "Var(R0" + t + ")", id);
        c.expect_close(m.e1, x.e1, "E(R1" + t + ")", id);
        c.expect_close(m.var1, x.var1, "Var(R1" + t + ")", id);
        c.expect_close(m.e2, x.e2, "E(R2" + t + ")", id);
        c.expect_close(m.var2, x.var2, "Var(R2" + t + ")", id);
        c.expect_close(m.cov12, x.cov12, "Cov(R1,R2" + t + ")", id);
        c.expect_close(m.ew, x.ew, "E(R_w" + t + ")", id);
        c.expect_close(m.varw, x.varw, "Var(R_w" + t + ")", id);
        c.expect_close(m.ed, x.ed, "E(R_d" + t + ")", id);
        c.expect_close(m.vard, x.vard, "Var(R_d" + t + ")", id);
    }
    const SummaryMoments& a = ms.averaging;
    const double spread = a.var1 + a.var2 - 2 * a.cov12;
    if (spread > 1e-6 * (a.var1 + a.var2)) {
        const Rational phat(static_cast<long long>(inst.table.n1()) - 1,
                            static_cast<long long>(inst.table.total()) - 2);
        c.expect_close(optimal_weight(a), phat, "optimal weight", id);
    }
}

}  // namespace

VerifyOutcome run_verification(const VerifyOptions& options) {
    if (options.max_n < 4) throw DomainError("verification needs max_n >= 4");
    VerifyOutcome out;
    Checker checker(out);
    SplitMix64 rng(options.seed);
    InstanceLimits limits;
    limits.max_n = options.max_n;
    for (std::size_t i = 0; i < options.instances; ++i) {
        const Instance inst = random_instance(rng, limits);
        check_counts(checker, inst);
        check_moments(checker, inst, options.inject_fault);
    }
    if (options.check_nnl) {
        for (std::size_t i = 0; i < options.instances; ++i) {
            const std::size_t k = 2 + uniform_index(rng, 6);
            const DistanceMatrix d = random_tied_distances(rng, k, 4);
            const SimilarityGraph nnl = build_nnl(d);
            const SimilarityGraph mst = mst_union(d);
            ++out.checks;
            if (!(nnl == mst)) out.failures.push_back("NNL differs from the union of all MSTs on " + describe(d));
        }
    }
    return out;
}

}  // namespace repgraph::oracle
