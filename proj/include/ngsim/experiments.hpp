#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ngsim/config.hpp"
#include "ngsim/engine.hpp"
#include "ngsim/stats.hpp"

namespace ngsim {

// ---------------------------------------------------------------------
// Run fan-out: independent seeded runs, results merged by run index so
// the outcome is identical regardless of the jobs count.
// ---------------------------------------------------------------------

inline std::uint64_t run_seed(std::uint64_t master_seed, int run_index) {
    return derive_seed(master_seed, stream::kRun, static_cast<std::uint64_t>(run_index));
}

template <typename Fn>
void for_each_run(int runs, int jobs, Fn&& body) {
    if (jobs <= 1) {
        for (int i = 0; i < runs; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([w, runs, jobs, &body] {
            for (int i = w; i < runs; i += jobs) body(i);
        });
    }
    for (auto& t : workers) t.join();
}

// ---------------------------------------------------------------------
// Winner histogram / collective bias
// ---------------------------------------------------------------------

struct WinnerHistogram {
    std::map<std::string, long> counts;  // by pool label, all W labels present
    long runs = 0;
    long converged = 0;
    std::optional<double> p_uniform;  // absent for zero converged runs
};

inline WinnerHistogram bias_assay(const PopulationConfig& base, int runs, int jobs = 1) {
    WinnerHistogram hist;
    hist.runs = runs;
    std::vector<std::optional<NameId>> winners(static_cast<std::size_t>(runs));
    for_each_run(runs, jobs, [&](int i) {
        PopulationConfig cfg = base;
        cfg.seed = run_seed(base.seed, i);
        RunOptions opts;
        opts.record_steps = false;
        winners[static_cast<std::size_t>(i)] = run_simulation(cfg, opts).winner;
    });
    std::vector<long> by_id(base.labels.size(), 0);
    for (const auto& w : winners) {
        if (!w) continue;
        ++hist.converged;
        ++by_id[static_cast<std::size_t>(*w)];
    }
    for (std::size_t i = 0; i < base.labels.size(); ++i)
        hist.counts[base.labels[i]] = by_id[i];
    if (hist.converged > 0) hist.p_uniform = stats::uniformity_pvalue(by_id);
    return hist;
}

// First choices of a fresh agent, tested against the uniform
// distribution. The isolation analogue of the in-population assay.
struct BiasProbeResult {
    std::vector<long> counts;  // per pool name
    double p_uniform = 1.0;
};

inline BiasProbeResult individual_bias_probe(const PolicyParams& params, int pool_size,
                                             int samples, std::uint64_t seed) {
    if (samples < 100) throw ConfigError("samples: need at least 100");
    BiasProbeResult result;
    result.counts.assign(static_cast<std::size_t>(pool_size), 0);
    Rng rng(derive_seed(seed, stream::kProbe));
    AgentState fresh;
    fresh.policy = params;
    const PolicyView view = view_of(fresh, pool_size);
    for (int s = 0; s < samples; ++s)
        ++result.counts[static_cast<std::size_t>(memory_choose(view, rng))];
    result.p_uniform = stats::uniformity_pvalue(result.counts);
    return result;
}

// ---------------------------------------------------------------------
// Committed-minority tipping
// ---------------------------------------------------------------------

struct TippingPoint {
    double p = 0.0;
    double takeover_freq = 0.0;
    long runs = 0;
};

struct TippingCurve {
    std::vector<TippingPoint> points;  // sorted by p
    double p_c_hat = 0.0;
    stats::Interval ci;
};

inline TippingCurve tipping_scan(const PopulationConfig& base, NameId committed_target,
                                 const std::vector<double>& p_grid, int runs_per_point,
                                 int jobs = 1) {
    if (base.init != InitMode::SeededConsensus)
        throw ConfigError("init: tipping scan requires seeded-consensus");
    if (committed_target == base.seeded_name)
        throw ConfigError("committed: target must differ from the seeded name");
    for (double p : p_grid)
        if (p < 0.0 || p > 1.0) throw ConfigError("p_grid: fraction outside [0,1]");

    std::vector<double> grid = p_grid;
    std::sort(grid.begin(), grid.end());

    TippingCurve curve;
    std::vector<stats::BinomialPoint> fit_points;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const double p = grid[gi];
        const int k = static_cast<int>(std::floor(p * base.n + 0.5));  // round half-up
        std::vector<char> takeover(static_cast<std::size_t>(runs_per_point), 0);
        for_each_run(runs_per_point, jobs, [&](int i) {
            PopulationConfig cfg = base;
            cfg.committed.clear();
            for (int a = 0; a < k; ++a) cfg.committed[a] = committed_target;
            cfg.seed = run_seed(derive_seed(base.seed, stream::kRun, 1000 + gi), i);
            RunOptions opts;
            opts.record_steps = false;
            const auto traj = run_simulation(cfg, opts);
            takeover[static_cast<std::size_t>(i)] =
                traj.winner && *traj.winner == committed_target;
        });
        long wins = 0;
        for (char t : takeover) wins += t;
        curve.points.push_back(TippingPoint{
            p, static_cast<double>(wins) / static_cast<double>(runs_per_point), runs_per_point});
        fit_points.push_back(stats::BinomialPoint{p, wins, runs_per_point});
    }
    const auto fit = stats::fit_logistic(fit_points);
    curve.p_c_hat = fit.crossing();
    curve.ci = stats::bootstrap_crossing_ci(fit_points, 200, base.seed);
    return curve;
}

// ---------------------------------------------------------------------
// Spontaneous switch detection
// ---------------------------------------------------------------------

struct SwitchEvent {
    NameId from = kNoName;
    NameId to = kNoName;
    long start_step = 0;
    long end_step = 0;
    bool committed_present = false;
};

// Scans the per-step consensus series at sweep granularity: a name
// "holds" once it is the consensus at theta consecutive sweep boundaries;
// each change of held name is one event.
inline std::vector<SwitchEvent> detect_switches(const Trajectory& traj, int theta, int n) {
    if (theta < 1) throw ConfigError("theta: stability window must be >= 1");
    const long sweep = std::max(1, n / 2);
    std::vector<SwitchEvent> events;

    std::optional<NameId> held;
    long held_end = 0;
    NameId candidate = kNoName;
    int candidate_len = 0;
    long candidate_start_boundary = 0;

    for (long boundary = sweep; boundary <= static_cast<long>(traj.consensus_name.size());
         boundary += sweep) {
        const NameId c = traj.consensus_name[static_cast<std::size_t>(boundary - 1)];
        if (c != kNoName && c == candidate) {
            ++candidate_len;
        } else {
            candidate = c;
            candidate_len = c == kNoName ? 0 : 1;
            candidate_start_boundary = boundary;
        }
        if (candidate_len >= theta) {
            if (held && *held != candidate) {
                events.push_back(SwitchEvent{*held, candidate, held_end,
                                             candidate_start_boundary, traj.committed_present});
            }
            held = candidate;
            held_end = boundary;
        }
    }
    return events;
}

// ---------------------------------------------------------------------
// Consensus-time scaling of the minimal naming game
// ---------------------------------------------------------------------

struct ScalingPoint {
    int n = 0;
    double median_t = 0.0;
    double mean_t = 0.0;
    int converged = 0;
    int runs = 0;
};

struct ScalingResult {
    std::vector<ScalingPoint> points;
    double slope = 0.0;     // of log(t_conv) vs log(N)
    double slope_se = 0.0;
    int non_converged = 0;
};

inline ScalingResult convergence_scan(const std::vector<int>& n_list, int runs,
                                      std::uint64_t master_seed, int jobs = 1) {
    if (n_list.size() < 3) throw ConfigError("n_list: need at least 3 population sizes");
    ScalingResult result;
    std::vector<double> log_n, log_t;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        std::vector<long> times(static_cast<std::size_t>(runs), -1);
        for_each_run(runs, jobs, [&](int i) {
            PopulationConfig cfg;
            cfg.n = n;
            cfg.dynamics = Dynamics::MinimalNg;
            cfg.labels = PopulationConfig::default_labels(2);  // unused; invention pool
            cfg.seed = run_seed(derive_seed(master_seed, stream::kRun, ni), i);
            RunOptions opts;
            opts.record_steps = false;
            const auto traj = run_simulation(cfg, opts);
            if (traj.consensus_step) times[static_cast<std::size_t>(i)] = *traj.consensus_step;
        });
        std::vector<double> converged_times;
        for (long t : times) {
            if (t >= 0)
                converged_times.push_back(static_cast<double>(t));
            else
                ++result.non_converged;
        }
        ScalingPoint point;
        point.n = n;
        point.runs = runs;
        point.converged = static_cast<int>(converged_times.size());
        point.median_t = stats::median(converged_times);
        point.mean_t = stats::mean(converged_times);
        result.points.push_back(point);
        if (!converged_times.empty()) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_t.push_back(std::log(point.median_t));
        }
    }
    const auto fit = stats::linear_fit(log_n, log_t);
    result.slope = fit.slope;
    result.slope_se = fit.slope_se;
    return result;
}

// ---------------------------------------------------------------------
// Calibrated strong-bias preset: seeded consensus on the first name,
// every agent biased towards the second, softmax noise. Under this
// setting the population regularly abandons the seeded convention for
// the favored one without any committed agents.
// ---------------------------------------------------------------------

inline PopulationConfig strong_bias_config(std::uint64_t seed, bool biased = true) {
    PopulationConfig cfg;
    cfg.n = 10;
    cfg.labels = PopulationConfig::default_labels(2);
    cfg.memory_capacity = 3;
    cfg.dynamics = Dynamics::MemoryCoordination;
    cfg.init = InitMode::SeededConsensus;
    cfg.seeded_name = 0;
    cfg.max_steps = 12'000;
    cfg.seed = seed;
    PolicyParams params;
    params.kind = PolicyKind::MemoryCoordination;
    params.temperature = 0.7;
    params.kappa = 1.0;
    if (biased) params.pseudo_counts = {0.0, 2.0};
    cfg.policy_mix.push_back(PolicyRange{0, cfg.n, params});
    return cfg;
}

// Fraction of runs with at least one detected switch event.
inline double switch_rate(const PopulationConfig& base, int runs, int theta, int jobs = 1) {
    std::vector<char> any(static_cast<std::size_t>(runs), 0);
    for_each_run(runs, jobs, [&](int i) {
        PopulationConfig cfg = base;
        cfg.seed = run_seed(base.seed, i);
        RunOptions opts;
        opts.stop_at_consensus = false;
        const auto traj = run_simulation(cfg, opts);
        any[static_cast<std::size_t>(i)] = !detect_switches(traj, theta, cfg.n).empty();
    });
    long hits = 0;
    for (char a : any) hits += a;
    return static_cast<double>(hits) / static_cast<double>(runs);
}

} // namespace ngsim
