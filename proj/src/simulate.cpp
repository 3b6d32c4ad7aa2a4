#include "repgraph/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "repgraph/errors.hpp"
#include "repgraph/graph.hpp"
#include "repgraph/inference.hpp"
#include "repgraph/stats.hpp"

namespace repgraph {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError("malformed " + what + " '" + s + "'");
    }
}

std::uint64_t parse_unsigned(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
        const auto v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError("malformed " + what + " '" + s + "'");
    }
}

Ranking parse_ranking(const std::string& s) {
    Ranking r;
    for (const auto& x : split_on(s, ',')) r.push_back(static_cast<int>(parse_unsigned(x, "ranking entry")));
    validate_ranking(r);
    return r;
}

std::int64_t ranking_distance(Metric metric, const Ranking& a, const Ranking& b) {
    switch (metric) {
        case Metric::spearman: return distance_spearman(a, b);
        case Metric::footrule: return distance_footrule(a, b);
        case Metric::kendall: return distance_kendall(a, b);
        default: throw DomainError("metric " + to_string(metric) + " does not apply to rankings");
    }
}

int position_of(const Ranking& r, int object) {
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] == object) return static_cast<int>(i);
    return -1;
}

RankingPredicate parse_atom(const std::string& atom) {
    const auto parts = split_on(atom, ':');
    const std::string& op = parts[0];
    auto object = [&](const std::string& s) { return static_cast<int>(parse_unsigned(s, "object number")); };
    if (op == "any" && parts.size() == 1) return [](const Ranking&) { return true; };
    if (op == "first_not" && parts.size() == 2) {
        const int a = object(parts[1]);
        return [a](const Ranking& r) { return !r.empty() && r.front() != a; };
    }
    if (op == "last_not" && parts.size() == 2) {
        const int a = object(parts[1]);
        return [a](const Ranking& r) { return !r.empty() && r.back() != a; };
    }
    if (op == "before" && parts.size() == 3) {
        const int a = object(parts[1]), b = object(parts[2]);
        return [a, b](const Ranking& r) { return position_of(r, a) < position_of(r, b); };
    }
    if (op == "top" && parts.size() == 3) {
        const auto k = static_cast<int>(parse_unsigned(parts[1], "top-k size"));
        std::vector<int> objects;
        for (const auto& x : split_on(parts[2], '|')) objects.push_back(object(x));
        return [k, objects](const Ranking& r) {
            for (int a : objects) {
                const int p = position_of(r, a);
                if (p >= 0 && p < k) return true;
            }
            return false;
        };
    }
    throw DomainError("unknown ranking predicate '" + atom + "'");
}

}  // namespace

std::string to_string(DistanceScale s) {
    switch (s) {
        case DistanceScale::none: return "none";
        case DistanceScale::by_maximum: return "by_maximum";
        case DistanceScale::correlation: return "correlation";
    }
    return "?";
}

DistanceScale parse_distance_scale(const std::string& text) {
    if (text == "none") return DistanceScale::none;
    if (text == "by_maximum") return DistanceScale::by_maximum;
    if (text == "correlation") return DistanceScale::correlation;
    throw DomainError("unknown distance scale '" + text + "' (none|by_maximum|correlation)");
}

std::vector<Ranking> all_rankings(std::size_t n) {
    Ranking r(n);
    std::iota(r.begin(), r.end(), 1);
    std::vector<Ranking> out;
    do out.push_back(r);
    while (std::next_permutation(r.begin(), r.end()));
    return out;
}

MallowsModel::MallowsModel(double theta, Ranking center, Metric metric, DistanceScale scale)
    : theta_(theta), center_(std::move(center)) {
    if (center_.empty()) throw DomainError("Mallows center must rank at least one object");
    if (center_.size() > 8) throw DomainError("Mallows model enumerates n! rankings and is limited to 8 objects");
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    validate_ranking(center_);
    rankings_ = all_rankings(center_.size());

    std::vector<double> d(rankings_.size());
    double largest = 0;
    for (std::size_t i = 0; i < rankings_.size(); ++i) {
        d[i] = static_cast<double>(ranking_distance(metric, rankings_[i], center_));
        largest = std::max(largest, d[i]);
    }
    double factor = 1;
    if (scale != DistanceScale::none && largest > 0) factor = (scale == DistanceScale::correlation ? 2.0 : 1.0) / largest;

    // Shift by the smallest exponent (0, at the center) so large theta cannot underflow the mode.
    const double low = theta >= 0 ? 0.0 : -theta * largest * factor;
    probabilities_.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) probabilities_[i] = std::exp(-theta * d[i] * factor - low);
    const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
    normalizer_ = total * std::exp(low);
    cumulative_.resize(d.size());
    double run = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        probabilities_[i] /= total;
        run += probabilities_[i];
        cumulative_[i] = run;
    }
}

const Ranking& MallowsModel::sample(SplitMix64& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return rankings_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<Ranking> sample_mallows(const MallowsModel& model, std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Ranking> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(model.sample(rng));
    return out;
}

RankingPredicate parse_predicate(const std::string& text) {
    std::vector<RankingPredicate> atoms;
    for (const auto& a : split_on(text, '&')) atoms.push_back(parse_atom(a));
    if (atoms.empty()) throw DomainError("empty ranking predicate");
    if (atoms.size() == 1) return atoms.front();
    return [atoms](const Ranking& r) {
        return std::all_of(atoms.begin(), atoms.end(), [&](const RankingPredicate& p) { return p(r); });
    };
}

RestrictedUniform::RestrictedUniform(std::size_t objects, const RankingPredicate& predicate) {
    if (objects == 0 || objects > 8) throw DomainError("restricted uniform sampling supports 1..8 objects");
    for (auto& r : all_rankings(objects))
        if (predicate(r)) support_.push_back(std::move(r));
    if (support_.empty()) throw DomainError("ranking predicate selects no ranking");
}

const Ranking& RestrictedUniform::sample(SplitMix64& rng) const {
    return support_[uniform_index(rng, support_.size())];
}

std::vector<Ranking> sample_restricted_uniform(std::size_t objects, const RankingPredicate& predicate,
                                               std::size_t count, std::uint64_t seed) {
    const RestrictedUniform gen(objects, predicate);
    SplitMix64 rng(seed);
    std::vector<Ranking> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(gen.sample(rng));
    return out;
}

GeneratorSpec GeneratorSpec::parse(const std::string& text) {
    std::istringstream in(text);
    std::string kind;
    in >> kind;
    GeneratorSpec g;
    if (kind == "mallows") {
        std::string theta, center, extra;
        if (!(in >> theta >> center) || (in >> extra))
            throw DomainError("expected 'mallows <theta> <center>', got '" + text + "'");
        g.kind = Kind::mallows;
        g.theta = parse_double(theta, "theta");
        g.center = parse_ranking(center);
    } else if (kind == "uniform") {
        std::string pred, extra;
        if (!(in >> pred) || (in >> extra)) throw DomainError("expected 'uniform <predicate>', got '" + text + "'");
        g.kind = Kind::uniform;
        g.predicate = pred;
        parse_predicate(pred);
    } else {
        throw DomainError("unknown generator '" + text + "' (mallows|uniform)");
    }
    return g;
}

std::string GeneratorSpec::describe() const {
    std::ostringstream out;
    if (kind == Kind::mallows) {
        out << "mallows " << theta << ' ';
        for (std::size_t i = 0; i < center.size(); ++i) out << (i ? "," : "") << center[i];
    } else {
        out << "uniform " << predicate;
    }
    return out.str();
}

GraphRule GraphRule::parse(const std::string& text) {
    std::istringstream in(text);
    std::string kind, k, extra;
    if (!(in >> kind >> k) || (in >> extra)) throw DomainError("expected '<nnl|mst> <k>', got '" + text + "'");
    GraphRule g;
    if (kind == "nnl")
        g.kind = Kind::nnl;
    else if (kind == "mst")
        g.kind = Kind::mst;
    else
        throw DomainError("unknown graph rule '" + kind + "' (nnl|mst)");
    g.k = parse_unsigned(k, "graph k");
    if (g.k == 0) throw DomainError("graph k must be positive");
    return g;
}

std::string GraphRule::describe() const {
    return (kind == Kind::nnl ? "nnl " : "mst ") + std::to_string(k);
}

ScenarioConfig parse_scenario(std::istream& in) {
    ScenarioConfig c;
    std::string line;
    std::size_t number = 0;
    bool have1 = false, have2 = false;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", number);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "name") c.name = value;
            else if (key == "objects") c.objects = parse_unsigned(value, "objects");
            else if (key == "sample1") { c.sample1 = GeneratorSpec::parse(value); have1 = true; }
            else if (key == "sample2") { c.sample2 = GeneratorSpec::parse(value); have2 = true; }
            else if (key == "n1") c.n1 = parse_unsigned(value, "n1");
            else if (key == "n2") c.n2 = parse_unsigned(value, "n2");
            else if (key == "metric") c.metric = parse_metric(value);
            else if (key == "scale") c.scale = parse_distance_scale(value);
            else if (key == "graph") c.graph = GraphRule::parse(value);
            else if (key == "graph_seed") c.graph.seed = parse_unsigned(value, "graph_seed");
            else if (key == "kappas") {
                c.kappas.clear();
                for (const auto& k : split_on(value, ',')) c.kappas.push_back(parse_double(k, "kappa"));
            }
            else if (key == "alpha") c.alpha = parse_double(value, "alpha");
            else if (key == "replicates") c.replicates = parse_unsigned(value, "replicates");
            else if (key == "seed") c.seed = parse_unsigned(value, "seed");
            else if (key == "threads") c.threads = parse_unsigned(value, "threads");
            else throw DomainError("unknown key '" + key + "'");
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), number);
        }
    }
    if (!have1 || !have2) throw ParseError("scenario needs both sample1 and sample2", 0);
    if (c.replicates == 0) throw ParseError("replicates must be at least 1", 0);
    if (!(c.alpha > 0 && c.alpha < 1)) throw ParseError("alpha must lie in (0, 1)", 0);
    for (double k : c.kappas)
        if (!(k > 0)) throw ParseError("kappa values must be positive", 0);
    return c;
}

namespace {

// Scale used by the built-in scenarios; see README.
constexpr DistanceScale builtin_scale = DistanceScale::by_maximum;

ScenarioConfig mallows_pair(const std::string& name, double t1, const Ranking& c1, double t2, const Ranking& c2,
                            std::size_t n1, std::size_t n2) {
    ScenarioConfig c;
    c.name = name;
    c.objects = c1.size();
    c.sample1 = {GeneratorSpec::Kind::mallows, t1, c1, "any"};
    c.sample2 = {GeneratorSpec::Kind::mallows, t2, c2, "any"};
    c.n1 = n1;
    c.n2 = n2;
    c.scale = builtin_scale;
    return c;
}

ScenarioConfig uniform_pair(const std::string& name, const std::string& d1, const std::string& d2, std::size_t n1,
                            std::size_t n2) {
    ScenarioConfig c;
    c.name = name;
    c.objects = 6;
    c.sample1 = {GeneratorSpec::Kind::uniform, 0, {}, d1};
    c.sample2 = {GeneratorSpec::Kind::uniform, 0, {}, d2};
    c.n1 = n1;
    c.n2 = n2;
    c.scale = builtin_scale;
    return c;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    std::vector<std::string> out;
    for (int i = 1; i <= 8; ++i) {
        out.push_back("S" + std::to_string(i) + "b");
        out.push_back("S" + std::to_string(i) + "u");
    }
    for (const char* n : {"motivation-b", "motivation-u", "null", "pvalue"}) out.emplace_back(n);
    return out;
}

ScenarioConfig builtin_scenario(const std::string& name) {
    const Ranking id{1, 2, 3, 4, 5, 6};
    const Ranking swap{1, 2, 5, 4, 3, 6};
    const bool balanced = name.size() == 3 && name.back() == 'b';
    const bool unbalanced = name.size() == 3 && name.back() == 'u';
    if (name.size() == 3 && name[0] == 'S' && (balanced || unbalanced)) {
        switch (name[1]) {
            case '1': return mallows_pair(name, 5, id, 5, swap, 100, balanced ? 100 : 400);
            case '2': return mallows_pair(name, 5.5, id, 4, id, 300, balanced ? 300 : 600);
            case '3': return mallows_pair(name, 4, id, 5.5, id, 300, balanced ? 300 : 600);
            case '4': return mallows_pair(name, 5.5, id, 4, swap, 100, balanced ? 100 : 300);
            case '5': return mallows_pair(name, 4, id, 5.5, swap, 100, balanced ? 100 : 300);
            case '6': return uniform_pair(name, "first_not:6", "last_not:1", 150, balanced ? 150 : 250);
            case '7': return uniform_pair(name, "before:1:5", "before:1:6", 150, balanced ? 150 : 250);
            case '8':
                return uniform_pair(name, "first_not:6&last_not:1", "top:3:1|2", 150, balanced ? 150 : 250);
            default: break;
        }
    }
    if (name == "motivation-b") return mallows_pair(name, 5, id, 5, swap, 80, 80);
    if (name == "motivation-u") return mallows_pair(name, 5, id, 5, swap, 80, 400);
    if (name == "null") return mallows_pair(name, 5, id, 5, id, 100, 100);
    if (name == "pvalue") {
        ScenarioConfig c = mallows_pair(name, 5, {1, 2, 3, 4, 5}, 5, {1, 4, 3, 2, 5}, 100, 100);
        c.graph = {GraphRule::Kind::nnl, 1, 0};
        return c;
    }
    std::string known;
    for (const auto& n : builtin_scenario_names()) known += (known.empty() ? "" : ", ") + n;
    throw DomainError("unknown scenario '" + name + "'; built-in scenarios: " + known);
}

std::vector<std::string> power_statistic_names(const std::vector<double>& kappas) {
    std::vector<std::string> out;
    for (Summary s : {Summary::averaging, Summary::union_graph}) {
        const std::string t = suffix(s);
        out.push_back("R0" + t);
        out.push_back("S" + t);
        out.push_back("R_w" + t);
        for (double k : kappas) {
            std::ostringstream name;
            name << "M" << t << "(" << k << ")";
            out.push_back(name.str());
        }
    }
    return out;
}

namespace {

struct Generator {
    std::optional<MallowsModel> mallows;
    std::optional<RestrictedUniform> uniform;

    Generator(const GeneratorSpec& spec, const ScenarioConfig& c) {
        if (spec.kind == GeneratorSpec::Kind::mallows) {
            if (spec.center.size() != c.objects)
                throw DomainError("Mallows center ranks " + std::to_string(spec.center.size()) + " objects, scenario has " +
                                  std::to_string(c.objects));
            mallows.emplace(spec.theta, spec.center, c.metric, c.scale);
        } else {
            uniform.emplace(c.objects, parse_predicate(spec.predicate));
        }
    }
    const Ranking& operator()(SplitMix64& rng) const { return mallows ? mallows->sample(rng) : uniform->sample(rng); }
};

std::vector<Observation> draw(const Generator& g1, const Generator& g2, const ScenarioConfig& c, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Observation> obs;
    obs.reserve(c.n1 + c.n2);
    for (std::size_t i = 0; i < c.n1; ++i) obs.push_back({g1(rng), Sample::first});
    for (std::size_t i = 0; i < c.n2; ++i) obs.push_back({g2(rng), Sample::second});
    return obs;
}

void check_config(const ScenarioConfig& c) {
    if (c.replicates == 0) throw DomainError("replicates must be at least 1");
    if (!metric_applies(c.metric, PayloadKind::ranking))
        throw DomainError("metric " + to_string(c.metric) + " does not apply to rankings");
    if (c.n1 + c.n2 < 4) throw DomainError("scenario needs n1 + n2 >= 4");
}

}  // namespace

std::vector<Observation> generate_samples(const ScenarioConfig& config, std::uint64_t seed) {
    check_config(config);
    const Generator g1(config.sample1, config), g2(config.sample2, config);
    return draw(g1, g2, config, seed);
}

PowerResult run_scenario(const ScenarioConfig& config) {
    check_config(config);
    const Generator g1(config.sample1, config), g2(config.sample2, config);
    const auto names = power_statistic_names(config.kappas);
    const std::size_t columns = names.size();
    const std::size_t reps = config.replicates;
    std::vector<std::uint8_t> rejected(reps * columns, 0);

    auto replicate = [&](std::size_t r) {
        const auto obs = draw(g1, g2, config, derive_seed(config.seed, r));
        const DistinctTable table = deduplicate(obs);
        const DistanceMatrix d = pairwise_distances(table, config.metric);
        const SimilarityGraph c0 = config.graph.kind == GraphRule::Kind::nnl
                                       ? build_knnl(d, config.graph.k)
                                       : build_kmst(d, config.graph.k, derive_seed(config.graph.seed, r));
        const UnionGraphSummary u = union_graph_summary(c0, table);
        const MomentSet ms = moments(table, c0, u);
        const StatisticEvaluator ev(table, c0, ms, config.kappas);
        const Pvalues p = analytic_pvalues(ev.evaluate(table.n1u()));
        std::uint8_t* row = &rejected[r * columns];
        std::size_t col = 0;
        for (Summary s : {Summary::averaging, Summary::union_graph}) {
            const SummaryPvalues& ps = p[s];
            row[col++] = ps.z0 <= config.alpha;
            row[col++] = ps.s <= config.alpha;
            row[col++] = ps.zw <= config.alpha;
            for (double pm : ps.m) row[col++] = pm <= config.alpha;
        }
    };

    std::vector<std::string> failures(reps);
    auto worker = [&](std::size_t w, std::size_t workers) {
        for (std::size_t r = w; r < reps; r += workers) {
            try {
                replicate(r);
            } catch (const std::exception& e) {
                failures[r] = e.what();
                return;
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, reps));
    if (workers == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w, workers);
        for (auto& t : pool) t.join();
    }
    for (std::size_t r = 0; r < reps; ++r)
        if (!failures[r].empty())
            throw Error("scenario " + config.name + ", replicate " + std::to_string(r) + ": " + failures[r]);

    PowerResult result;
    result.config = config;
    result.replicates = reps;
    for (std::size_t c = 0; c < columns; ++c) {
        PowerEntry e;
        e.statistic = names[c];
        for (std::size_t r = 0; r < reps; ++r) e.rejections += rejected[r * columns + c];
        e.power = static_cast<double>(e.rejections) / static_cast<double>(reps);
        e.standard_error = std::sqrt(e.power * (1 - e.power) / static_cast<double>(reps));
        result.entries.push_back(e);
    }
    return result;
}

void write_power_csv(std::ostream& out, const PowerResult& result) {
    out << "scenario";
    for (const auto& e : result.entries) out << ',' << e.statistic;
    out << "\n" << result.config.name;
    char buf[32];
    for (const auto& e : result.entries) {
        std::snprintf(buf, sizeof buf, "%.3f", e.power);
        out << ',' << buf;
    }
    out << "\n" << result.config.name << "_se";
    for (const auto& e : result.entries) {
        std::snprintf(buf, sizeof buf, "%.3f", e.standard_error);
        out << ',' << buf;
    }
    out << '\n';
}

nlohmann::json power_json(const PowerResult& result) {
    const auto& c = result.config;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : result.entries)
        entries.push_back({{"statistic", e.statistic},
                           {"rejections", e.rejections},
                           {"power", e.power},
                           {"standard_error", e.standard_error}});
    return {{"scenario", c.name},
            {"objects", c.objects},
            {"sample1", c.sample1.describe()},
            {"sample2", c.sample2.describe()},
            {"n1", c.n1},
            {"n2", c.n2},
            {"metric", to_string(c.metric)},
            {"scale", to_string(c.scale)},
            {"graph", c.graph.describe()},
            {"graph_seed", c.graph.seed},
            {"kappas", c.kappas},
            {"alpha", c.alpha},
            {"replicates", result.replicates},
            {"seed", c.seed},
            {"replicate_seed_rule", "derive_seed(seed, replicate)"},
            {"entries", entries}};
}

}  // namespace repgraph
