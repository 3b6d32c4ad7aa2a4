#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "repgraph/errors.hpp"
#include "repgraph/graph.hpp"
#include "repgraph/inference.hpp"
#include "repgraph/io.hpp"
#include "repgraph/oracle.hpp"
#include "repgraph/report.hpp"
#include "repgraph/simulate.hpp"

using namespace repgraph;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0, exit_verify = 1, exit_input = 2, exit_degenerate = 3;

std::size_t default_threads() {
    if (const char* env = std::getenv("REPGRAPH_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
        throw DomainError(std::string("REPGRAPH_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

// Writes to path, or stdout when path is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write(out);
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

struct Inputs {
    std::string observations, distances, sidecar;
    std::string kind = "ranking";
    std::string metric;
    double tie_tolerance = 0;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
    cmd->add_option("-i,--input", in.observations, "observation CSV (label first)");
    cmd->add_option("--distances", in.distances, "KxK distance matrix on distinct values");
    cmd->add_option("--sidecar", in.sidecar, "label,value_index rows for --distances");
    cmd->add_option("--kind", in.kind, "payload kind of --input")
        ->check(CLI::IsMember({"vector", "ranking", "network"}));
    cmd->add_option("--metric", in.metric, "euclidean|frobenius_sq|spearman|footrule|kendall");
    cmd->add_option("--tie-tolerance", in.tie_tolerance, "distances within this are ties")
        ->check(CLI::NonNegativeNumber);
}

struct Loaded {
    DistinctTable table;
    DistanceMatrix distances;
};

Loaded load(const Inputs& in) {
    if (in.observations.empty() == in.distances.empty())
        throw DomainError("give exactly one of --input or --distances");
    if (!in.observations.empty()) {
        auto file = open_in(in.observations);
        const PayloadKind kind = parse_payload_kind(in.kind);
        const auto obs = read_observations(file, kind);
        DistinctTable table = deduplicate(obs);
        const Metric metric = in.metric.empty() ? default_metric(kind) : parse_metric(in.metric);
        DistanceMatrix d = pairwise_distances(table, metric, in.tie_tolerance);
        return {std::move(table), std::move(d)};
    }
    if (in.sidecar.empty()) throw DomainError("--distances needs --sidecar");
    auto dfile = open_in(in.distances);
    DistanceMatrix d = read_distance_matrix(dfile, in.tie_tolerance);
    auto sfile = open_in(in.sidecar);
    DistinctTable table = read_sidecar(sfile, d.size());
    return {std::move(table), std::move(d)};
}

SimilarityGraph build_c0(const Loaded& data, const GraphRule& rule, const std::string& c0_path) {
    if (data.table.size() < 2)
        throw DegenerateNullError("R0", 0.0);  // one distinct value: no between-value edges exist
    if (!c0_path.empty()) {
        auto file = open_in(c0_path);
        SimilarityGraph g = read_graph(file);
        if (g.size() != data.table.size()) throw ShapeError("graph file K differs from the data");
        return g;
    }
    if (rule.kind == GraphRule::Kind::nnl) return build_knnl(data.distances, rule.k);
    return build_kmst(data.distances, rule.k, rule.seed);
}

std::vector<std::size_t> degree_histogram(const SimilarityGraph& g) {
    std::vector<std::size_t> h;
    for (std::size_t u = 0; u < g.size(); ++u) {
        const std::size_t d = g.degree(u);
        if (h.size() <= d) h.resize(d + 1, 0);
        ++h[d];
    }
    return h;
}

struct Common {
    std::string graph = "nnl 1";
    std::string c0;
    std::vector<double> kappas{1.31, 1.14, 1.0};
    double alpha = 0.05;
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string format = "json";
    std::string output;
    bool timestamp = false;
};

json pergraph_json(const PerGraphResult& r, const std::vector<double>& kappas) {
    json m = json::array();
    for (std::size_t i = 0; i < kappas.size(); ++i) m.push_back({{"kappa", kappas[i]}, {"value", r.values.m[i]}});
    return {{"R0", r.values.r0}, {"R1", r.values.r1}, {"R2", r.values.r2}, {"Z0", r.values.z0},
            {"Zw", r.values.zw}, {"Zd", r.values.zd}, {"S", r.values.s}, {"M", m}};
}

int cmd_test(const Inputs& in, const Common& c) {
    const Loaded data = load(in);
    GraphRule rule = GraphRule::parse(c.graph);
    rule.seed = c.seed;
    const SimilarityGraph c0 = build_c0(data, rule, c.c0);

    TestOptions opt;
    opt.kappas = c.kappas;
    opt.alpha = c.alpha;
    opt.permutations = c.permutations;
    opt.seed = c.seed;
    opt.threads = c.threads;
    TestReport report = run_test(data.table, c0, opt);
    report.graph_rule = c.c0.empty() ? rule.describe() : "file " + c.c0;
    if (c.timestamp) report.timestamp = utc_now();

    json j = to_json(report);
    // The observation-level k-MST is one arbitrary member of many optimal
    // graphs; its own statistics show how much that choice matters.
    std::optional<PerGraphResult> per_graph;
    if (c.c0.empty() && rule.kind == GraphRule::Kind::mst) {
        const ObservationGraph g = build_observation_kmst(data.distances, data.table, rule.k, rule.seed);
        per_graph = pergraph_statistics(g, data.table.labels(), c.kappas, DegeneracyPolicy::allow);
        j["per_graph"] = pergraph_json(*per_graph, c.kappas);
    }

    if (c.format == "json") {
        emit(c.output, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        if (!c.output.empty() && c.output != "-") write_text_report(std::cout, report);
    } else if (c.format == "text") {
        emit(c.output, [&](std::ostream& o) {
            write_text_report(o, report);
            if (per_graph) {
                const auto& v = per_graph->values;
                o << "\nsingle observation-level " << rule.describe() << " (seed " << rule.seed << "): S_G "
                  << v.s << "  Z_w,G " << v.zw << "  Z_d,G " << v.zd << "  Z_0,G " << v.z0 << '\n';
            }
        });
    } else {
        emit(c.output, [&](std::ostream& o) { write_csv_report(o, report); });
    }
    return exit_ok;
}

int cmd_graph(const Inputs& in, const Common& c, const std::string& export_path) {
    const Loaded data = load(in);
    GraphRule rule = GraphRule::parse(c.graph);
    rule.seed = c.seed;
    const SimilarityGraph c0 = build_c0(data, rule, c.c0);
    if (!export_path.empty()) emit(export_path, [&](std::ostream& o) { write_graph(o, c0); });

    const UnionGraphSummary u = union_graph_summary(c0, data.table);
    const ConditionDiagnostics diag = condition_diagnostics(data.table, c0, u);
    const auto hist = degree_histogram(c0);
    json j{{"K", c0.size()},
           {"N", data.table.total()},
           {"c0_edges", c0.edge_count()},
           {"family_size", count_graph_family(c0, data.table).str()},
           {"union_size", u.size},
           {"degree_histogram", hist},
           {"diagnostics", to_json(diag)}};

    std::ostream& o = std::cout;
    if (c.format == "json") {
        o << j.dump(2) << '\n';
        return exit_ok;
    }
    o << "K = " << c0.size() << "\nN = " << data.table.total() << "\n|C0| = " << c0.edge_count()
      << "\n|G_C0| = " << count_graph_family(c0, data.table).str() << "\n|G-bar| = " << u.size
      << "\ndegree histogram:";
    for (std::size_t d = 0; d < hist.size(); ++d)
        if (hist[d]) o << ' ' << d << ':' << hist[d];
    o << '\n';
    for (const auto& [key, value] : j["diagnostics"].items())
        if (key != "warnings") o << key << " = " << value << '\n';
    for (const auto& w : diag.warnings) o << "warning: " << w << '\n';
    return exit_ok;
}

int cmd_dedup(const Inputs& in, const std::string& distances_out) {
    const Loaded data = load(in);
    write_distinct_table(std::cout, data.table);
    if (!distances_out.empty()) emit(distances_out, [&](std::ostream& o) { write_distance_matrix(o, data.distances); });
    return exit_ok;
}

int cmd_power(const std::string& scenario, const std::string& config_path, std::size_t replicates,
              const std::string& scale, const Common& c, bool seed_given, const std::string& samples_path) {
    if (scenario.empty() == config_path.empty()) throw DomainError("give exactly one of --scenario or --config");
    ScenarioConfig cfg;
    if (!scenario.empty()) {
        cfg = builtin_scenario(scenario);
    } else {
        auto file = open_in(config_path);
        cfg = parse_scenario(file);
    }
    if (replicates) cfg.replicates = replicates;
    if (!scale.empty()) cfg.scale = parse_distance_scale(scale);
    if (seed_given) cfg.seed = c.seed;
    cfg.threads = c.threads;
    if (!samples_path.empty()) {
        // Replicate 0's data, for feeding into `test`.
        emit(samples_path, [&](std::ostream& o) { write_observations(o, generate_samples(cfg, derive_seed(cfg.seed, 0))); });
        return exit_ok;
    }
    const PowerResult result = run_scenario(cfg);
    if (c.format == "json")
        emit(c.output, [&](std::ostream& o) { o << power_json(result).dump(2) << '\n'; });
    else
        emit(c.output, [&](std::ostream& o) { write_power_csv(o, result); });
    return exit_ok;
}

int cmd_verify(const oracle::VerifyOptions& opt) {
    const auto outcome = oracle::run_verification(opt);
    for (const auto& f : outcome.failures) std::cout << "FAIL " << f << '\n';
    std::cout << outcome.checks - outcome.failures.size() << '/' << outcome.checks << " checks passed\n";
    return outcome.passed() ? exit_ok : exit_verify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-count two-sample tests for data with repeated observations"};
    app.require_subcommand(1);

    Inputs in;
    Common c;
    bool seed_given = false;
    auto common = [&](CLI::App* cmd, bool with_inputs) {
        if (with_inputs) add_inputs(cmd, in);
        cmd->add_option("--seed", c.seed, "seed for permutations, k-MST ties and simulation")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->add_option("--threads", c.threads, "worker threads (default: REPGRAPH_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--format", c.format, "json|text|csv")->check(CLI::IsMember({"json", "text", "csv"}));
        cmd->add_option("-o,--output", c.output, "output file (default stdout)");
    };

    auto* test = app.add_subcommand("test", "run the extended edge-count tests");
    common(test, true);
    test->add_option("--graph", c.graph, "'nnl k' or 'mst k'");
    test->add_option("--c0", c.c0, "read the similarity graph from a file instead of building it");
    test->add_option("--kappa", c.kappas, "kappa values for M")->delimiter(',')->check(CLI::PositiveNumber);
    test->add_option("--alpha", c.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
    test->add_option("--perm", c.permutations, "permutation draws (0 = analytic only)");
    test->add_flag("--timestamp", c.timestamp, "embed the UTC time in the report");

    std::string export_path;
    auto* graph = app.add_subcommand("graph", "build the similarity graph on distinct values");
    common(graph, true);
    graph->add_option("--graph", c.graph, "'nnl k' or 'mst k'");
    graph->add_option("--c0", c.c0, "read the graph instead of building it");
    graph->add_option("--export", export_path, "write the graph file here");
    graph->get_option("--format")->default_str("text");

    std::string distances_out;
    auto* dedup = app.add_subcommand("dedup", "collapse repeated observations into distinct values");
    add_inputs(dedup, in);
    dedup->add_option("--distances-out", distances_out, "write the distinct-value distance matrix");

    std::string scenario, config_path, scale, samples_path;
    std::size_t replicates = 0;
    auto* power = app.add_subcommand("power", "simulation power study");
    common(power, false);
    power->add_option("--scenario", scenario, "built-in scenario name");
    power->add_option("--config", config_path, "scenario file");
    power->add_option("--replicates", replicates, "override the replicate count");
    power->add_option("--scale", scale, "Mallows distance scale: none|by_maximum|correlation");
    power->add_option("--samples", samples_path, "write one replicate's observations instead of running");
    power->add_flag_callback("--list", [] {
        for (const auto& n : builtin_scenario_names()) std::cout << n << '\n';
        std::exit(0);
    }, "list built-in scenarios");

    oracle::VerifyOptions vopt;
    auto* verify = app.add_subcommand("verify", "check closed forms against brute-force enumeration");
    verify->add_option("--max-n", vopt.max_n, "largest N of a random instance")->check(CLI::Range(4, 14));
    verify->add_option("--instances", vopt.instances, "random instances");
    verify->add_option("--seed", vopt.seed, "instance seed");
    verify->add_flag("--check-nnl", vopt.check_nnl, "also compare the NNL with the union of all MSTs");
    verify->add_flag("--inject-fault", vopt.inject_fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (c.threads == 0) c.threads = default_threads();
        if (graph->parsed() && graph->get_option("--format")->count() == 0) c.format = "text";
        if (test->parsed()) return cmd_test(in, c);
        if (graph->parsed()) return cmd_graph(in, c, export_path);
        if (dedup->parsed()) return cmd_dedup(in, distances_out);
        if (power->parsed()) return cmd_power(scenario, config_path, replicates, scale, c, seed_given, samples_path);
        if (verify->parsed()) return cmd_verify(vopt);
    } catch (const DegenerateNullError& e) {
        std::cerr << "error: " << e.what() << "\n(run 'graph' on the same input for condition diagnostics)\n";
        return exit_degenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}
