#pragma once

// Ranking generators and the power-study harness.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "repgraph/dataset.hpp"
#include "repgraph/random.hpp"

namespace repgraph {

// How the ranking distance enters exp(-theta d):
//   none:        raw distance
//   by_maximum:  d / max_zeta d(zeta, eta)
//   correlation: 1 - rank correlation (Spearman rho or Kendall tau), i.e. 2 d / max
enum class DistanceScale { none, by_maximum, correlation };

std::string to_string(DistanceScale s);
DistanceScale parse_distance_scale(const std::string& text);

// All n! rankings in lexicographic order.
std::vector<Ranking> all_rankings(std::size_t n);

// Exact Mallows model over all rankings of n_obj <= 8 objects.
class MallowsModel {
public:
    MallowsModel(double theta, Ranking center, Metric metric = Metric::spearman,
                 DistanceScale scale = DistanceScale::none);

    std::size_t objects() const noexcept { return center_.size(); }
    const Ranking& center() const noexcept { return center_; }
    double theta() const noexcept { return theta_; }
    const std::vector<Ranking>& rankings() const noexcept { return rankings_; }
    const std::vector<double>& probabilities() const noexcept { return probabilities_; }
    double normalizer() const noexcept { return normalizer_; }  // psi(theta), on the scaled distance

    const Ranking& sample(SplitMix64& rng) const;

private:
    double theta_;
    Ranking center_;
    std::vector<Ranking> rankings_;
    std::vector<double> probabilities_;
    std::vector<double> cumulative_;
    double normalizer_ = 0;
};

std::vector<Ranking> sample_mallows(const MallowsModel& model, std::size_t count, std::uint64_t seed);

using RankingPredicate = std::function<bool(const Ranking&)>;

// Predicates on rankings (entry i = object in position i, objects 1-based):
//   any | first_not:<a> | last_not:<a> | before:<a>:<b> | top:<k>:<a>|<b>...
// joined with '&' for conjunction, e.g. "first_not:6&last_not:1".
RankingPredicate parse_predicate(const std::string& text);

class RestrictedUniform {
public:
    // Throws DomainError when no ranking satisfies the predicate.
    RestrictedUniform(std::size_t objects, const RankingPredicate& predicate);

    const std::vector<Ranking>& support() const noexcept { return support_; }
    const Ranking& sample(SplitMix64& rng) const;

private:
    std::vector<Ranking> support_;
};

std::vector<Ranking> sample_restricted_uniform(std::size_t objects, const RankingPredicate& predicate,
                                               std::size_t count, std::uint64_t seed);

// One sample's generator: "mallows <theta> <center>" or "uniform <predicate>".
struct GeneratorSpec {
    enum class Kind { mallows, uniform } kind = Kind::mallows;
    double theta = 0;
    Ranking center;
    std::string predicate = "any";

    static GeneratorSpec parse(const std::string& text);
    std::string describe() const;
};

struct GraphRule {
    enum class Kind { nnl, mst } kind = Kind::nnl;
    std::size_t k = 1;
    std::uint64_t seed = 0;  // only used by mst

    static GraphRule parse(const std::string& text);  // "nnl 3", "mst 9"
    std::string describe() const;
};

struct ScenarioConfig {
    std::string name = "custom";
    std::size_t objects = 6;
    GeneratorSpec sample1, sample2;
    std::size_t n1 = 100, n2 = 100;
    Metric metric = Metric::spearman;
    DistanceScale scale = DistanceScale::none;
    GraphRule graph{GraphRule::Kind::nnl, 3, 0};
    std::vector<double> kappas{1.31, 1.14, 1.0};
    double alpha = 0.05;
    std::size_t replicates = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys are errors.
ScenarioConfig parse_scenario(std::istream& in);

// Built-in scenarios: S1..S8 with suffix "b" (balanced) or "u" (unbalanced),
// "motivation-b"/"motivation-u", "null" (both samples from one model) and
// "pvalue" (five objects, NNL, used for p-value accuracy studies).
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

struct PowerEntry {
    std::string statistic;  // e.g. "R0(a)", "M(u)(1.14)"
    std::size_t rejections = 0;
    double power = 0;
    double standard_error = 0;
};

struct PowerResult {
    ScenarioConfig config;
    std::vector<PowerEntry> entries;
    std::size_t replicates = 0;
};

// Per replicate: draw both samples, deduplicate, build distances and the
// graph, compute analytic p-values and count rejections at alpha. Replicate r
// uses seed derive_seed(config.seed, r), so results do not depend on threads.
// Any failing replicate aborts the run with its index in the message.
PowerResult run_scenario(const ScenarioConfig& config);

// Column names in PowerResult::entries order: R0, S, R_w, M(kappa) for
// averaging, then the same for union.
std::vector<std::string> power_statistic_names(const std::vector<double>& kappas);

void write_power_csv(std::ostream& out, const PowerResult& result);
nlohmann::json power_json(const PowerResult& result);

// Generates the two samples of one replicate.
std::vector<Observation> generate_samples(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace repgraph
