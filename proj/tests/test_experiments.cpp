#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ngsim/experiments.hpp"

using namespace ngsim;

namespace {

PopulationConfig memory_config(std::uint64_t seed) {
    PopulationConfig cfg;
    cfg.n = 24;
    cfg.labels = PopulationConfig::default_labels(2);
    cfg.dynamics = Dynamics::MemoryCoordination;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("bias assay: results are independent of the jobs count") {
    const auto serial = bias_assay(memory_config(5), 40, 1);
    const auto parallel = bias_assay(memory_config(5), 40, 4);
    REQUIRE(serial.counts == parallel.counts);
    REQUIRE(serial.converged == parallel.converged);
    REQUIRE(serial.p_uniform == parallel.p_uniform);
}

TEST_CASE("bias assay: zero runs yield an empty histogram with undefined p") {
    const auto hist = bias_assay(memory_config(5), 0, 1);
    REQUIRE(hist.runs == 0);
    REQUIRE(hist.converged == 0);
    REQUIRE_FALSE(hist.p_uniform.has_value());
    for (const auto& [label, count] : hist.counts) REQUIRE(count == 0);
}

TEST_CASE("bias assay: permuting labels permutes the histogram exactly") {
    PopulationConfig cfg = memory_config(31);
    const auto hist = bias_assay(cfg, 60, 2);

    PopulationConfig permuted = cfg;
    permuted.labels = {"B", "A"};  // swap the two label strings
    const auto hist_permuted = bias_assay(permuted, 60, 2);

    // the dynamics only sees name ids, so counts by id are identical and
    // counts by label are swapped
    REQUIRE(hist.counts.at("A") == hist_permuted.counts.at("B"));
    REQUIRE(hist.counts.at("B") == hist_permuted.counts.at("A"));
    REQUIRE(hist.p_uniform == hist_permuted.p_uniform);
}

TEST_CASE("individual bias probe: symmetric params are uniform") {
    PolicyParams params;
    const auto result = individual_bias_probe(params, 2, 10'000, 3);
    REQUIRE(result.counts.size() == 2);
    REQUIRE(result.counts[0] + result.counts[1] == 10'000);
    REQUIRE(result.p_uniform > 0.01);
}

TEST_CASE("individual bias probe: strong prior dominates at temperature 0") {
    PolicyParams params;
    params.pseudo_counts = {10.0, 0.0, 0.0};
    const auto result = individual_bias_probe(params, 3, 1000, 3);
    REQUIRE(result.counts[0] == 1000);
}

TEST_CASE("individual bias probe: softmax closed form at temperature 1") {
    PolicyParams params;
    params.temperature = 1.0;
    params.pseudo_counts = {1.0, 0.0};
    const int samples = 100'000;
    const auto result = individual_bias_probe(params, 2, samples, 11);
    const double expected = std::exp(1.0) / (std::exp(1.0) + 1.0);  // 0.7311
    const double freq = static_cast<double>(result.counts[0]) / samples;
    REQUIRE(freq == Catch::Approx(expected).margin(0.01));
}

TEST_CASE("individual bias probe: rejects tiny sample counts") {
    REQUIRE_THROWS_AS(individual_bias_probe(PolicyParams{}, 2, 50, 1), ConfigError);
}

TEST_CASE("tipping scan: validates init mode and grid") {
    PopulationConfig cfg = memory_config(1);
    REQUIRE_THROWS_AS(tipping_scan(cfg, 1, {0.0, 0.5}, 10), ConfigError);

    cfg.init = InitMode::SeededConsensus;
    cfg.seeded_name = 0;
    REQUIRE_THROWS_AS(tipping_scan(cfg, 0, {0.0, 0.5}, 10), ConfigError);  // target = seed
    REQUIRE_THROWS_AS(tipping_scan(cfg, 1, {-0.1}, 10), ConfigError);
}

TEST_CASE("tipping scan: endpoint behavior at p=0 and p=1") {
    PopulationConfig cfg = memory_config(77);
    cfg.init = InitMode::SeededConsensus;
    cfg.seeded_name = 0;
    const auto curve = tipping_scan(cfg, 1, {0.0, 1.0}, 20, 4);
    REQUIRE(curve.points.size() == 2);
    REQUIRE(curve.points[0].p == 0.0);
    REQUIRE(curve.points[0].takeover_freq == 0.0);
    REQUIRE(curve.points[1].p == 1.0);
    REQUIRE(curve.points[1].takeover_freq == 1.0);
}

TEST_CASE("detect_switches: single consensus yields no events") {
    PopulationConfig cfg = memory_config(9);
    auto traj = run_simulation(cfg);
    REQUIRE(traj.consensus_step.has_value());
    REQUIRE(detect_switches(traj, 3, cfg.n).empty());
}

TEST_CASE("detect_switches: synthetic A-then-B trajectory yields one event") {
    const int n = 10;
    const int sweep = n / 2;
    Trajectory traj;
    // consensus on A for 4 sweeps, gap, then consensus on B for 4 sweeps
    for (int i = 0; i < 4 * sweep; ++i) traj.consensus_name.push_back(0);
    for (int i = 0; i < sweep; ++i) traj.consensus_name.push_back(kNoName);
    for (int i = 0; i < 4 * sweep; ++i) traj.consensus_name.push_back(1);
    const auto events = detect_switches(traj, 3, n);
    REQUIRE(events.size() == 1);
    REQUIRE(events[0].from == 0);
    REQUIRE(events[0].to == 1);
    REQUIRE(events[0].end_step > events[0].start_step);
}

TEST_CASE("detect_switches: theta filters short-lived flips") {
    const int n = 10;
    const int sweep = n / 2;
    Trajectory traj;
    for (int i = 0; i < 3 * sweep; ++i) traj.consensus_name.push_back(0);
    for (int i = 0; i < sweep; ++i) traj.consensus_name.push_back(1);  // one-sweep blip
    for (int i = 0; i < 3 * sweep; ++i) traj.consensus_name.push_back(0);
    REQUIRE(detect_switches(traj, 3, n).empty());
    REQUIRE(detect_switches(traj, 1, n).size() == 2);  // blip counts at theta=1
}

TEST_CASE("detect_switches: rejects nonpositive theta") {
    Trajectory traj;
    REQUIRE_THROWS_AS(detect_switches(traj, 0, 10), ConfigError);
}

TEST_CASE("convergence scan: needs at least three population sizes") {
    REQUIRE_THROWS_AS(convergence_scan({10, 20}, 5, 1), ConfigError);
}

TEST_CASE("convergence scan: medians grow with N and rerun is bit-identical") {
    const auto a = convergence_scan({10, 20, 40}, 10, 42, 4);
    const auto b = convergence_scan({10, 20, 40}, 10, 42, 1);
    REQUIRE(a.points.size() == 3);
    REQUIRE(a.points[0].median_t < a.points[1].median_t);
    REQUIRE(a.points[1].median_t < a.points[2].median_t);
    REQUIRE(a.slope == b.slope);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(a.points[i].median_t == b.points[i].median_t);
        REQUIRE(a.points[i].mean_t == b.points[i].mean_t);
    }
}

TEST_CASE("run seeds are distinct per run index") {
    REQUIRE(run_seed(5, 0) != run_seed(5, 1));
    REQUIRE(run_seed(5, 1) == run_seed(5, 1));
}

TEST_CASE("strong-bias preset switches; the unbiased twin does not") {
    // small-count smoke version of the acceptance criterion
    const double biased = switch_rate(strong_bias_config(101, true), 20, 3, 4);
    const double unbiased = switch_rate(strong_bias_config(101, false), 20, 3, 4);
    REQUIRE(biased > 0.5);
    REQUIRE(unbiased <= 0.05);
}
