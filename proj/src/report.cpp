#include "repgraph/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace repgraph {

namespace {

using nlohmann::json;

struct Row {
    std::string name;
    double value, mean, sd;
};

std::vector<Row> breakdown(const SummaryValues& v, const SummaryMoments& m, Summary s) {
    const std::string t = suffix(s);
    return {
        {"R1" + t, v.r1, m.e1, std::sqrt(m.var1)},
        {"R2" + t, v.r2, m.e2, std::sqrt(m.var2)},
        {"(R1+R2)/2" + t, (v.r1 + v.r2) / 2, (m.e1 + m.e2) / 2, std::sqrt(m.var0) / 2},
        {"R_w" + t, v.rw, m.ew, std::sqrt(m.varw)},
        {"R_d" + t, v.rd, m.ed, std::sqrt(m.vard)},
    };
}

struct Test {
    StatisticKind kind;
    std::string name;
    double value;
    double analytic;
    std::optional<double> permutation;
    std::optional<double> kappa;
};

std::vector<Test> tests(const TestReport& r, Summary s) {
    const SummaryValues& v = r.statistics[s];
    const SummaryPvalues& a = r.analytic[s];
    const SummaryPvalues* p = r.permutation ? &(*r.permutation)[s] : nullptr;
    auto perm = [&](double SummaryPvalues::*field) -> std::optional<double> {
        if (!p) return std::nullopt;
        return p->*field;
    };
    const std::string t = suffix(s);
    std::vector<Test> out{
        {StatisticKind::z0, "Z0" + t, v.z0, a.z0, perm(&SummaryPvalues::z0), std::nullopt},
        {StatisticKind::s, "S" + t, v.s, a.s, perm(&SummaryPvalues::s), std::nullopt},
        {StatisticKind::zw, "Z_w" + t, v.zw, a.zw, perm(&SummaryPvalues::zw), std::nullopt},
        {StatisticKind::zd, "|Z_d|" + t, std::abs(v.zd), a.zd, perm(&SummaryPvalues::zd), std::nullopt},
    };
    for (std::size_t i = 0; i < r.kappas.size(); ++i) {
        std::optional<double> pm;
        if (p) pm = p->m[i];
        out.push_back({StatisticKind::m, "M" + t, v.m[i], a.m[i], pm, r.kappas[i]});
    }
    return out;
}

json moments_json(const SummaryMoments& m) {
    return {{"edges", m.edges},
            {"R0", {{"mean", m.e0}, {"var", m.var0}}},
            {"R1", {{"mean", m.e1}, {"var", m.var1}}},
            {"R2", {{"mean", m.e2}, {"var", m.var2}}},
            {"cov_R1_R2", m.cov12},
            {"R_w", {{"mean", m.ew}, {"var", m.varw}}},
            {"R_d", {{"mean", m.ed}, {"var", m.vard}}}};
}

json pvalue_json(const std::optional<double>& p) { return p ? json(*p) : json(nullptr); }

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string test_label(const Test& t) {
    if (!t.kappa) return t.name;
    return t.name + "(" + fixed(*t.kappa, 2) + ")";
}

}  // namespace

json to_json(const ConditionDiagnostics& d) {
    return {{"edges_per_n", d.edges_per_n},
            {"inverse_edge_weight_per_n", d.inverse_edge_weight},
            {"values_per_n", d.values_per_n},
            {"inverse_multiplicity_per_n", d.inverse_multiplicity},
            {"averaging_degree_variety", d.averaging_spread},
            {"averaging_third_moment_values", d.averaging_third_value},
            {"averaging_third_moment_edges", d.averaging_third_edge},
            {"union_size_per_n", d.union_size},
            {"union_degree_variety", d.union_spread},
            {"union_third_moment_values", d.union_third_value},
            {"union_third_moment_edges", d.union_third_edge},
            {"warnings", d.warnings}};
}

json to_json(const TestReport& r) {
    json j;
    j["sample"] = {{"n1", r.n1}, {"n2", r.n2}, {"N", r.total}, {"K", r.values}};
    j["graph"] = {{"rule", r.graph_rule},
                  {"edges", r.c0_edges},
                  {"union_size", r.union_size},
                  {"family_size", r.family_size}};
    j["alpha"] = r.alpha;
    j["seed"] = r.seed;
    j["permutations"] = r.permutations;
    j["kappas"] = r.kappas;
    j["moments"] = {{"weight", r.moments.weight},
                    {"p", {r.moments.p1, r.moments.p2, r.moments.p3}},
                    {"q", {r.moments.q1, r.moments.q2, r.moments.q3}},
                    {"f1", r.moments.f1},
                    {"averaging", moments_json(r.moments.averaging)},
                    {"union", moments_json(r.moments.union_graph)}};
    json stats = json::object();
    json rows = json::array();
    for (Summary s : {Summary::averaging, Summary::union_graph}) {
        json block = json::array();
        for (const Row& row : breakdown(r.statistics[s], r.moments[s], s))
            block.push_back({{"name", row.name}, {"value", row.value}, {"mean", row.mean}, {"sd", row.sd}});
        stats[to_string(s)] = block;
        for (const Test& t : tests(r, s)) {
            json row{{"statistic", t.name},
                     {"summary", to_string(s)},
                     {"kappa", t.kappa ? json(*t.kappa) : json(nullptr)},
                     {"value", t.value},
                     {"p_analytic", t.analytic},
                     {"p_permutation", pvalue_json(t.permutation)},
                     {"reject_analytic", t.analytic <= r.alpha}};
            rows.push_back(row);
        }
    }
    j["breakdown"] = stats;
    j["tests"] = rows;
    j["diagnostics"] = to_json(r.diagnostics);
    if (r.timestamp) j["timestamp"] = *r.timestamp;
    return j;
}

void write_text_report(std::ostream& out, const TestReport& r) {
    out << "N = " << r.total << " (n1 = " << r.n1 << ", n2 = " << r.n2 << "), K = " << r.values
        << ", |C0| = " << r.c0_edges << ", |G-bar| = " << r.union_size << ", graph family size = " << r.family_size
        << '\n';
    if (!r.graph_rule.empty()) out << "graph: " << r.graph_rule << '\n';
    out << '\n';

    for (Summary s : {Summary::averaging, Summary::union_graph}) {
        out << pad("", 14) << lpad("Value", 12) << lpad("Mean", 12) << lpad("Value-Mean", 12) << lpad("SD", 12)
            << '\n';
        for (const Row& row : breakdown(r.statistics[s], r.moments[s], s))
            out << pad(row.name, 14) << lpad(fixed(row.value, 2), 12) << lpad(fixed(row.mean, 2), 12)
                << lpad(fixed(row.value - row.mean, 2), 12) << lpad(fixed(row.sd, 2), 12) << '\n';
        out << '\n';
    }

    const bool perm = r.permutation.has_value();
    auto cell = [&](const Test& t) {
        std::string c = pad(test_label(t), 14) + lpad(fixed(t.value, 2), 9) + lpad(fixed(t.analytic, 3), 9);
        if (perm) c += lpad(fixed(*t.permutation, 3), 9);
        return c;
    };
    std::string head = pad("", 14) + lpad("Value", 9) + lpad("p-Value", 9);
    if (perm) head += lpad("Perm.", 9);
    out << head << "  |  " << head << '\n';
    const auto a = tests(r, Summary::averaging);
    const auto u = tests(r, Summary::union_graph);
    for (std::size_t i = 0; i < a.size(); ++i) out << cell(a[i]) << "  |  " << cell(u[i]) << '\n';
    if (perm) out << "\npermutation p-values from " << r.permutations << " draws, seed " << r.seed << '\n';
    for (const auto& w : r.diagnostics.warnings) out << "warning: " << w << '\n';
}

void write_csv_report(std::ostream& out, const TestReport& r) {
    out << "statistic,summary,kappa,value,p_analytic,p_permutation\n";
    auto num = [](double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    for (Summary s : {Summary::averaging, Summary::union_graph})
        for (const Test& t : tests(r, s)) {
            std::string base = t.name.substr(0, t.name.size() - 3);
            out << base << ',' << to_string(s) << ',' << (t.kappa ? num(*t.kappa) : "") << ',' << num(t.value) << ','
                << num(t.analytic) << ',' << (t.permutation ? num(*t.permutation) : "") << '\n';
        }
}

}  // namespace repgraph
