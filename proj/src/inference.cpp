#include "repgraph/inference.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "repgraph/errors.hpp"
#include "repgraph/random.hpp"

namespace repgraph {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0 && p < 1)) throw DomainError("normal quantile needs 0 < p < 1");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2 * p);
}

std::string to_string(StatisticKind kind) {
    switch (kind) {
        case StatisticKind::z0: return "Z0";
        case StatisticKind::zw: return "Z_w";
        case StatisticKind::zd: return "|Z_d|";
        case StatisticKind::s: return "S";
        case StatisticKind::m: return "M";
    }
    return "?";
}

double pvalue_analytic(StatisticKind kind, double value, double kappa) {
    switch (kind) {
        case StatisticKind::z0: return normal_cdf(value);
        case StatisticKind::zw: return normal_sf(value);
        case StatisticKind::zd: return std::min(1.0, 2 * normal_sf(std::abs(value)));
        case StatisticKind::s:
            if (value < 0) throw DomainError("S cannot be negative");
            return std::exp(-value / 2);
        case StatisticKind::m: {
            if (!(kappa > 0)) throw DomainError("kappa must be positive");
            if (value <= 0) return 1.0;
            const double cdf = normal_cdf(value / kappa) * (1 - 2 * normal_sf(value));
            return std::clamp(1 - cdf, 0.0, 1.0);
        }
    }
    return 1.0;
}

KappaSolution solve_kappa(double gamma, double alpha) {
    if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
    if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must lie in (0, 1)");
    // (1 - alpha1)(1 - alpha2) = 1 - alpha with alpha1 = gamma alpha2 gives
    // gamma a^2 - (1 + gamma) a + alpha = 0; the smaller root keeps alpha1, alpha2 < 1.
    const double b = 1 + gamma;
    const double disc = b * b - 4 * gamma * alpha;
    if (disc < 0) throw NumericError("no admissible (alpha1, alpha2) for this gamma");
    // Rationalised form of (b - sqrt(disc)) / (2 gamma), stable for small gamma.
    const double alpha2 = 2 * alpha / (b + std::sqrt(disc));
    const double alpha1 = gamma * alpha2;
    if (!(alpha1 > 0 && alpha1 < 1 && alpha2 > 0 && alpha2 < 1))
        throw NumericError("kappa equations have no root for gamma=" + std::to_string(gamma));
    KappaSolution s;
    s.alpha1 = alpha1;
    s.alpha2 = alpha2;
    s.beta = normal_quantile(1 - alpha2 / 2);
    const double bw = normal_quantile(1 - alpha1);
    if (!(bw > 0)) throw NumericError("alpha1 >= 1/2 leaves no positive kappa");
    s.kappa = s.beta / bw;
    return s;
}

namespace {

SummaryPvalues summary_pvalues(const SummaryValues& v, const std::vector<double>& kappas) {
    SummaryPvalues p;
    p.z0 = pvalue_analytic(StatisticKind::z0, v.z0);
    p.zw = pvalue_analytic(StatisticKind::zw, v.zw);
    p.zd = pvalue_analytic(StatisticKind::zd, v.zd);
    p.s = pvalue_analytic(StatisticKind::s, v.s);
    for (std::size_t i = 0; i < kappas.size(); ++i)
        p.m.push_back(pvalue_analytic(StatisticKind::m, v.m[i], kappas[i]));
    return p;
}

struct Tally {
    std::size_t z0 = 0, zw = 0, zd = 0, s = 0;
    std::vector<std::size_t> m;

    explicit Tally(std::size_t kappas = 0) : m(kappas, 0) {}

    void add(const SummaryValues& draw, const SummaryValues& obs) {
        z0 += at_least_as_extreme(StatisticKind::z0, draw.z0, obs.z0);
        zw += at_least_as_extreme(StatisticKind::zw, draw.zw, obs.zw);
        zd += at_least_as_extreme(StatisticKind::zd, draw.zd, obs.zd);
        s += at_least_as_extreme(StatisticKind::s, draw.s, obs.s);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += at_least_as_extreme(StatisticKind::m, draw.m[i], obs.m[i]);
    }
    void merge(const Tally& o) {
        z0 += o.z0;
        zw += o.zw;
        zd += o.zd;
        s += o.s;
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += o.m[i];
    }
    SummaryPvalues pvalues(std::size_t b) const {
        const double denom = static_cast<double>(b) + 1;
        auto p = [&](std::size_t c) { return (1.0 + static_cast<double>(c)) / denom; };
        SummaryPvalues out;
        out.z0 = p(z0);
        out.zw = p(zw);
        out.zd = p(zd);
        out.s = p(s);
        for (std::size_t c : m) out.m.push_back(p(c));
        return out;
    }
};

}  // namespace

Pvalues analytic_pvalues(const StatisticValues& values) {
    return {summary_pvalues(values.averaging, values.kappas), summary_pvalues(values.union_graph, values.kappas)};
}

bool at_least_as_extreme(StatisticKind kind, double candidate, double observed) {
    // Sums are accumulated in a different order for permuted draws, so allow
    // a few ulps of slack; otherwise exact ties would be counted at random.
    const double slack = 1e-9 * std::max(1.0, std::abs(observed));
    switch (kind) {
        case StatisticKind::z0: return candidate <= observed + slack;
        case StatisticKind::zd: return std::abs(candidate) >= std::abs(observed) - slack;
        default: return candidate >= observed - slack;
    }
}

Pvalues permutation_pvalues(const DistinctTable& table, const StatisticEvaluator& evaluator,
                            const StatisticValues& observed, const PermutationOptions& options) {
    if (options.permutations == 0) throw DomainError("permutation count must be at least 1");
    const std::size_t b = options.permutations;
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, b));
    const std::size_t kappas = evaluator.kappas().size();

    std::vector<Tally> avg(workers, Tally(kappas)), uni(workers, Tally(kappas));
    auto work = [&](std::size_t w) {
        const std::size_t first = b * w / workers, last = b * (w + 1) / workers;
        std::vector<std::size_t> n1u;
        for (std::size_t draw = first; draw < last; ++draw) {
            SplitMix64 rng(derive_seed(options.seed, draw));
            sample_multivariate_hypergeometric(rng, table.multiplicity(), table.canonical_order(), table.n1(), n1u);
            const StatisticValues v = evaluator.evaluate(n1u);
            avg[w].add(v.averaging, observed.averaging);
            uni[w].add(v.union_graph, observed.union_graph);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (std::size_t w = 1; w < workers; ++w) {
        avg[0].merge(avg[w]);
        uni[0].merge(uni[w]);
    }
    return {avg[0].pvalues(b), uni[0].pvalues(b)};
}

ConditionDiagnostics condition_diagnostics(const DistinctTable& table, const SimilarityGraph& c0,
                                           const UnionGraphSummary& u) {
    if (c0.size() != table.size()) throw ShapeError("graph and distinct table differ in K");
    const auto& m = table.multiplicity();
    const std::size_t k = table.size();
    const double n = static_cast<double>(table.total());
    const double n32 = std::pow(n, 1.5);
    const double edges = static_cast<double>(c0.edge_count());

    std::vector<double> md(m.begin(), m.end());
    std::vector<double> nb_mass(k, 0.0);  // sum of m_v over neighbours
    for (std::size_t x = 0; x < k; ++x)
        for (std::size_t v : c0.neighbors(x)) nb_mass[x] += md[v];
    auto deg = [&](std::size_t x) { return static_cast<double>(c0.degree(x)); };
    auto e2 = [&](std::size_t x) { return static_cast<double>(c0.second_order_edge_count(x)); };

    ConditionDiagnostics d;
    double inv_mm = 0, inv_m = 0, shifted = 0;
    for (const auto& e : c0.edges()) inv_mm += 1 / (md[e.u] * md[e.v]);
    for (std::size_t x = 0; x < k; ++x) {
        inv_m += 1 / md[x];
        shifted += (deg(x) - 2) * (deg(x) - 2) / (4 * md[x]);
    }
    d.edges_per_n = edges / n;
    d.inverse_edge_weight = inv_mm / n;
    d.values_per_n = static_cast<double>(k) / n;
    d.inverse_multiplicity = inv_m / n;
    d.averaging_spread = (shifted - (edges - static_cast<double>(k)) * (edges - static_cast<double>(k)) / n) / n;

    // h_w = sum_{y in V_w} m_w (m_w + m_y), used by the union per-edge sum.
    std::vector<double> h(k), reach(k);
    for (std::size_t x = 0; x < k; ++x) {
        h[x] = md[x] * (deg(x) * md[x] + nb_mass[x]);
        reach[x] = md[x] * (md[x] + nb_mass[x]);
    }

    double avg_value = 0, uni_value = 0;
    for (std::size_t x = 0; x < k; ++x) {
        avg_value += md[x] * (md[x] + deg(x)) * (md[x] + nb_mass[x] + e2(x));
        double around = reach[x];
        for (std::size_t v : c0.neighbors(x)) around += reach[v];
        uni_value += md[x] * md[x] * md[x] * (md[x] + nb_mass[x]) * around;
    }

    std::vector<bool> mark(k, false);
    std::vector<std::size_t> touched;
    double avg_edge = 0, uni_edge = 0;
    for (const auto& e : c0.edges()) {
        touched.clear();
        auto visit = [&](std::size_t w) {
            if (!mark[w]) {
                mark[w] = true;
                touched.push_back(w);
            }
        };
        visit(e.u);
        visit(e.v);
        for (std::size_t w : c0.neighbors(e.u)) visit(w);
        for (std::size_t w : c0.neighbors(e.v)) visit(w);
        double mass = 0, hsum = 0;
        for (std::size_t w : touched) {
            mass += md[w];
            hsum += h[w];
            mark[w] = false;
        }
        // u and v are neighbours of each other, so the union of the two
        // neighbourhoods already contains both endpoints.
        avg_edge += (md[e.u] + md[e.v] + deg(e.u) + deg(e.v)) * (md[e.u] + md[e.v] + mass + e2(e.u) + e2(e.v));
        uni_edge += md[e.u] * md[e.v] * (reach[e.u] + reach[e.v]) * hsum;
    }
    d.averaging_third_value = avg_value / n32;
    d.averaging_third_edge = avg_edge / n32;

    const double g = static_cast<double>(u.size);
    d.union_size = g / n;
    d.union_spread = (static_cast<double>(u.sum_sq) - 4 * g * g / n) / n;
    d.union_third_value = uni_value / n32;
    d.union_third_edge = uni_edge / n32;

    auto warn = [&](const std::string& msg) {
        d.warnings.push_back(msg + "; analytic p-values may be unreliable, prefer permutation p-values");
    };
    if (d.averaging_spread < 1e-3) warn("averaging: degree variety of C0 is near zero");
    if (std::max(d.averaging_third_value, d.averaging_third_edge) > 1)
        warn("averaging: third-moment sums are large relative to N^1.5");
    if (d.union_spread < 1e-3) warn("union: degree variety of the union graph is near zero");
    if (std::max(d.union_third_value, d.union_third_edge) > 1)
        warn("union: third-moment sums are large relative to N^1.5");

    if (table.total() >= 4) {
        const MomentSet ms = moments(table, c0, u, DegeneracyPolicy::allow);
        for (Summary s : {Summary::averaging, Summary::union_graph}) {
            const SummaryMoments& sm = ms[s];
            auto check = [&](const char* name, double var, double mean) {
                if (!(var >= 1e-9 * std::max(1.0, mean * mean)))
                    d.warnings.push_back(std::string("Var(") + name + suffix(s) + ") is degenerate");
            };
            check("R0", sm.var0, sm.e0);
            check("R_w", sm.varw, sm.ew);
            check("R_d", sm.vard, sm.ed);
        }
    }
    return d;
}

TestReport run_test(const DistinctTable& table, const SimilarityGraph& c0, const TestOptions& options) {
    for (double k : options.kappas)
        if (!(k > 0)) throw DomainError("kappa must be positive");
    const UnionGraphSummary u = union_graph_summary(c0, table);
    TestReport r;
    r.n1 = table.n1();
    r.n2 = table.n2();
    r.total = table.total();
    r.values = table.size();
    r.c0_edges = c0.edge_count();
    r.union_size = u.size;
    r.family_size = count_graph_family(c0, table).str();
    r.alpha = options.alpha;
    r.seed = options.seed;
    r.permutations = options.permutations;
    r.kappas = options.kappas;
    r.diagnostics = condition_diagnostics(table, c0, u);
    r.moments = moments(table, c0, u);
    const StatisticEvaluator evaluator(table, c0, r.moments, options.kappas);
    r.statistics = evaluator.evaluate(table.n1u());
    r.analytic = analytic_pvalues(r.statistics);
    if (options.permutations > 0)
        r.permutation = permutation_pvalues(table, evaluator, r.statistics,
                                            {options.permutations, options.seed, options.threads});
    return r;
}

}  // namespace repgraph
