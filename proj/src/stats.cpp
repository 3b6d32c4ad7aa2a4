#include "repgraph/stats.hpp"

#include <algorithm>
#include <cmath>

#include "repgraph/errors.hpp"

namespace repgraph {

using real = long double;

std::string to_string(Summary s) { return s == Summary::averaging ? "averaging" : "union"; }
std::string suffix(Summary s) { return s == Summary::averaging ? "(a)" : "(u)"; }

void check_label_counts(const DistinctTable& table, std::span<const std::size_t> n1u) {
    if (n1u.size() != table.size())
        throw ShapeError("label counts have " + std::to_string(n1u.size()) + " entries, table has K=" +
                         std::to_string(table.size()));
    for (std::size_t u = 0; u < n1u.size(); ++u)
        if (n1u[u] > table.multiplicity(u))
            throw ShapeError("label count for value " + std::to_string(u + 1) + " exceeds its multiplicity");
}

std::vector<std::size_t> label_counts(const DistinctTable& table) { return table.n1u(); }

ExtendedCounts extended_counts(const DistinctTable& table, std::span<const std::size_t> n1u,
                               const SimilarityGraph& c0) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    check_label_counts(table, n1u);
    const auto& m = table.multiplicity();
    ExtendedCounts out;
    auto& a = out.averaging;
    auto& u = out.union_graph;
    for (std::size_t x = 0; x < m.size(); ++x) {
        const double n1 = static_cast<double>(n1u[x]);
        const double n2 = static_cast<double>(m[x] - n1u[x]);
        const double mx = static_cast<double>(m[x]);
        a.r1 += n1 * (n1 - 1) / mx;
        a.r2 += n2 * (n2 - 1) / mx;
        a.r0 += 2 * n1 * n2 / mx;
        u.r1 += n1 * (n1 - 1) / 2;
        u.r2 += n2 * (n2 - 1) / 2;
        u.r0 += n1 * n2;
    }
    for (const auto& e : c0.edges()) {
        const double n1a = static_cast<double>(n1u[e.u]), n1b = static_cast<double>(n1u[e.v]);
        const double n2a = static_cast<double>(m[e.u] - n1u[e.u]), n2b = static_cast<double>(m[e.v] - n1u[e.v]);
        const double mm = static_cast<double>(m[e.u]) * static_cast<double>(m[e.v]);
        a.r1 += n1a * n1b / mm;
        a.r2 += n2a * n2b / mm;
        a.r0 += (n1a * n2b + n1b * n2a) / mm;
        u.r1 += n1a * n1b;
        u.r2 += n2a * n2b;
        u.r0 += n1a * n2b + n1b * n2a;
    }
    return out;
}

namespace {

// x (x-1) ... (x-k+1) / (N (N-1) ... (N-k+1)) as a product of ratios.
real falling_ratio(std::size_t x, std::size_t total, int k) {
    real r = 1;
    for (int i = 0; i < k; ++i) {
        if (x < static_cast<std::size_t>(i) + 1) return 0;
        r *= static_cast<real>(x - i) / static_cast<real>(total - i);
    }
    return r;
}

struct Constants {
    real n1, n2, n;
    real p1, p2, p3, q1, q2, q3, f1;
};

Constants constants(std::size_t n1, std::size_t n2) {
    const std::size_t total = n1 + n2;
    if (total < 4) throw DomainError("null moments need N >= 4, got N=" + std::to_string(total));
    Constants c;
    c.n1 = n1;
    c.n2 = n2;
    c.n = total;
    c.p1 = falling_ratio(n1, total, 2);
    c.p2 = falling_ratio(n1, total, 3);
    c.p3 = falling_ratio(n1, total, 4);
    c.q1 = falling_ratio(n2, total, 2);
    c.q2 = falling_ratio(n2, total, 3);
    c.q3 = falling_ratio(n2, total, 4);
    // n1 (n1-1) n2 (n2-1) / (N (N-1) (N-2) (N-3))
    c.f1 = n1 < 2 || n2 < 2 ? 0
                            : (c.n1 / c.n) * ((c.n1 - 1) / (c.n - 1)) * (c.n2 / (c.n - 2)) *
                                  ((c.n2 - 1) / (c.n - 3));
    return c;
}

void finish_moments(SummaryMoments& s, real edges, real e1, real e2, real v1, real v2, real cov, real ew,
                    real varw, real ed, real vard) {
    s.edges = static_cast<double>(edges);
    s.e1 = static_cast<double>(e1);
    s.e2 = static_cast<double>(e2);
    s.var1 = static_cast<double>(v1);
    s.var2 = static_cast<double>(v2);
    s.cov12 = static_cast<double>(cov);
    s.e0 = static_cast<double>(edges - e1 - e2);
    s.var0 = static_cast<double>(v1 + v2 + 2 * cov);
    s.ew = static_cast<double>(ew);
    s.varw = static_cast<double>(varw);
    s.ed = static_cast<double>(ed);
    s.vard = static_cast<double>(vard);
}

SummaryMoments fixed_graph(const Constants& c, real g, real sum_sq) {
    const real n = c.n;
    const real pairs = sum_sq - 2 * g;  // sum_i |E_i| (|E_i| - 1)
    const real v1 = (c.p1 - c.p3) * g + (c.p2 - c.p3) * pairs + (c.p3 - c.p1 * c.p1) * g * g;
    const real v2 = (c.q1 - c.q3) * g + (c.q2 - c.q3) * pairs + (c.q3 - c.q1 * c.q1) * g * g;
    const real cov = c.f1 * (g * g - g - pairs) - c.p1 * c.q1 * g * g;
    const real ew = g * (c.n1 - 1) * (c.n2 - 1) / ((n - 1) * (n - 2));
    const real varw = c.f1 * (g - sum_sq / (n - 2) + 2 * g * g / ((n - 1) * (n - 2)));
    const real ed = g * (c.n1 - c.n2) / n;
    const real vard = c.n1 * c.n2 / (n * (n - 1)) * (sum_sq - 4 * g * g / n);
    SummaryMoments s;
    finish_moments(s, g, g * c.p1, g * c.q1, v1, v2, cov, ew, varw, ed, vard);
    return s;
}

bool degenerate(double var, double mean) { return !(var >= 1e-9 * std::max(1.0, mean * mean)); }

void check_degenerate(const SummaryMoments& s, const std::string& tag) {
    if (degenerate(s.var0, s.e0)) throw DegenerateNullError("R0" + tag, s.var0);
    if (degenerate(s.varw, s.ew)) throw DegenerateNullError("R_w" + tag, s.varw);
    if (degenerate(s.vard, s.ed)) throw DegenerateNullError("R_d" + tag, s.vard);
}

}  // namespace

SummaryMoments fixed_graph_moments(std::size_t n1, std::size_t n2, double edges, double sum_sq_degree) {
    return fixed_graph(constants(n1, n2), edges, sum_sq_degree);
}

MomentSet moments(const DistinctTable& table, const SimilarityGraph& c0, const UnionGraphSummary& u,
                  DegeneracyPolicy policy) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    const Constants c = constants(table.n1(), table.n2());
    const auto& m = table.multiplicity();
    const real n = c.n;
    const real k = static_cast<real>(table.size());
    const real edges = static_cast<real>(c0.edge_count());

    real deg_sq = 0, deg_over_m = 0, inv_m = 0, shifted = 0;
    for (std::size_t x = 0; x < m.size(); ++x) {
        const real d = static_cast<real>(c0.degree(x));
        const real mx = static_cast<real>(m[x]);
        deg_sq += d * d / (4 * mx);
        deg_over_m += d / mx;
        inv_m += 1 / mx;
        shifted += (d - 2) * (d - 2) / (4 * mx);
    }
    real inv_mm = 0;
    for (const auto& e : c0.edges()) inv_mm += 1 / (static_cast<real>(m[e.u]) * static_cast<real>(m[e.v]));

    const real t = n - k + edges;
    const real a = n - k + 2 * edges + deg_sq - deg_over_m;
    const real spread = k - inv_m;
    const real c3 = shifted - (edges - k) * (edges - k) / n;

    const real v1 = 4 * (c.p2 - c.p3) * a + (c.p3 - c.p1 * c.p1) * t * t + (c.p1 - 2 * c.p2 + c.p3) * inv_mm +
                    2 * (c.p1 - 4 * c.p2 + 3 * c.p3) * spread;
    const real v2 = 4 * (c.q2 - c.q3) * a + (c.q3 - c.q1 * c.q1) * t * t + (c.q1 - 2 * c.q2 + c.q3) * inv_mm +
                    2 * (c.q1 - 4 * c.q2 + 3 * c.q3) * spread;
    const real cov = (c.f1 - c.p1 * c.q1) * t * t + c.f1 * (-4 * a + 6 * spread + inv_mm);
    const real ew = t * (c.n1 - 1) * (c.n2 - 1) / ((n - 1) * (n - 2));
    const real varw = c.f1 * (-4 / (n - 2) * c3 + 2 * spread + inv_mm - 2 / (n * (n - 1)) * t * t);
    const real ed = t * (c.n1 - c.n2) / n;
    const real vard = 4 * c.n1 * c.n2 / (n * (n - 1)) * c3;

    MomentSet out;
    out.n1 = table.n1();
    out.n2 = table.n2();
    out.total = table.total();
    out.p1 = static_cast<double>(c.p1);
    out.p2 = static_cast<double>(c.p2);
    out.p3 = static_cast<double>(c.p3);
    out.q1 = static_cast<double>(c.q1);
    out.q2 = static_cast<double>(c.q2);
    out.q3 = static_cast<double>(c.q3);
    out.f1 = static_cast<double>(c.f1);
    out.weight = static_cast<double>((c.n1 - 1) / (n - 2));
    finish_moments(out.averaging, t, t * c.p1, t * c.q1, v1, v2, cov, ew, varw, ed, vard);
    out.union_graph = fixed_graph(c, static_cast<real>(u.size), static_cast<real>(u.sum_sq));

    if (policy == DegeneracyPolicy::reject) {
        check_degenerate(out.averaging, "(a)");
        check_degenerate(out.union_graph, "(u)");
    }
    return out;
}

double weighted_variance(const SummaryMoments& m, double p) {
    return (1 - p) * (1 - p) * m.var1 + p * p * m.var2 + 2 * p * (1 - p) * m.cov12;
}

double optimal_weight(const SummaryMoments& m) {
    const double denom = m.var1 + m.var2 - 2 * m.cov12;
    if (!(denom > 0)) throw NumericError("Var(R1 - R2) is not positive; weight is undetermined");
    return (m.var1 - m.cov12) / denom;
}

double max_statistic(double zw, double zd, double kappa) {
    if (!(kappa > 0)) throw DomainError("kappa must be positive");
    return std::max(kappa * zw, std::abs(zd));
}

double generalized_quadratic_form(const SummaryMoments& m, double r1, double r2) {
    const double x1 = r1 - m.e1, x2 = r2 - m.e2;
    const double det = m.var1 * m.var2 - m.cov12 * m.cov12;
    if (!(det > 0)) throw NumericError("covariance of (R1, R2) is singular");
    return (m.var2 * x1 * x1 - 2 * m.cov12 * x1 * x2 + m.var1 * x2 * x2) / det;
}

SummaryValues summarize(const EdgeCounts& c, const SummaryMoments& m, double weight,
                        std::span<const double> kappas) {
    SummaryValues v;
    v.r0 = c.r0;
    v.r1 = c.r1;
    v.r2 = c.r2;
    v.rw = (1 - weight) * c.r1 + weight * c.r2;
    v.rd = c.r1 - c.r2;
    v.z0 = (v.r0 - m.e0) / std::sqrt(m.var0);
    v.zw = (v.rw - m.ew) / std::sqrt(m.varw);
    v.zd = (v.rd - m.ed) / std::sqrt(m.vard);
    v.s = v.zw * v.zw + v.zd * v.zd;
    v.m.reserve(kappas.size());
    for (double k : kappas) v.m.push_back(max_statistic(v.zw, v.zd, k));
    return v;
}

StatisticEvaluator::StatisticEvaluator(const DistinctTable& table, const SimilarityGraph& c0,
                                       const MomentSet& moments, std::vector<double> kappas)
    : edges_(c0.edges()), moments_(moments), kappas_(std::move(kappas)) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    for (double k : kappas_)
        if (!(k > 0)) throw DomainError("kappa must be positive");
    for (std::size_t mu : table.multiplicity()) {
        m_.push_back(static_cast<double>(mu));
        inv_m_.push_back(1.0 / static_cast<double>(mu));
    }
    for (const auto& e : edges_) inv_mm_.push_back(1.0 / (m_[e.u] * m_[e.v]));
}

ExtendedCounts StatisticEvaluator::counts(std::span<const std::size_t> n1u) const {
    ExtendedCounts out;
    auto& a = out.averaging;
    auto& u = out.union_graph;
    for (std::size_t x = 0; x < m_.size(); ++x) {
        const double n1 = static_cast<double>(n1u[x]);
        const double n2 = m_[x] - n1;
        const double w1 = n1 * (n1 - 1), w2 = n2 * (n2 - 1), b = n1 * n2;
        a.r1 += w1 * inv_m_[x];
        a.r2 += w2 * inv_m_[x];
        a.r0 += 2 * b * inv_m_[x];
        u.r1 += w1 / 2;
        u.r2 += w2 / 2;
        u.r0 += b;
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        const double n1a = static_cast<double>(n1u[e.u]), n1b = static_cast<double>(n1u[e.v]);
        const double n2a = m_[e.u] - n1a, n2b = m_[e.v] - n1b;
        const double w1 = n1a * n1b, w2 = n2a * n2b, b = n1a * n2b + n1b * n2a;
        a.r1 += w1 * inv_mm_[i];
        a.r2 += w2 * inv_mm_[i];
        a.r0 += b * inv_mm_[i];
        u.r1 += w1;
        u.r2 += w2;
        u.r0 += b;
    }
    return out;
}

StatisticValues StatisticEvaluator::evaluate(std::span<const std::size_t> n1u) const {
    const ExtendedCounts c = counts(n1u);
    StatisticValues v;
    v.kappas = kappas_;
    v.averaging = summarize(c.averaging, moments_.averaging, moments_.weight, kappas_);
    v.union_graph = summarize(c.union_graph, moments_.union_graph, moments_.weight, kappas_);
    return v;
}

PerGraphResult pergraph_statistics(const ObservationGraph& g, std::span<const Sample> labels,
                                   std::span<const double> kappas, DegeneracyPolicy policy) {
    if (labels.size() != g.nodes) throw ShapeError("label vector length differs from graph node count");
    std::size_t n1 = 0;
    for (Sample s : labels) n1 += s == Sample::first;
    const std::size_t n2 = labels.size() - n1;

    std::vector<double> degree(g.nodes, 0.0);
    EdgeCounts c;
    for (const auto& e : g.edges) {
        if (e.u >= g.nodes || e.v >= g.nodes || e.u == e.v) throw ShapeError("invalid observation graph edge");
        degree[e.u] += 1;
        degree[e.v] += 1;
        const Sample a = labels[e.u], b = labels[e.v];
        if (a != b)
            c.r0 += 1;
        else if (a == Sample::first)
            c.r1 += 1;
        else
            c.r2 += 1;
    }
    PerGraphResult out;
    for (double d : degree) out.sum_sq_degree += d * d;
    out.moments = fixed_graph_moments(n1, n2, static_cast<double>(g.edges.size()), out.sum_sq_degree);
    if (policy == DegeneracyPolicy::reject) check_degenerate(out.moments, "_G");
    const double weight = (static_cast<double>(n1) - 1) / (static_cast<double>(labels.size()) - 2);
    out.values = summarize(c, out.moments, weight, kappas);
    return out;
}

}  // namespace repgraph
