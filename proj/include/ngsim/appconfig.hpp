#pragma once

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ngsim/config.hpp"
#include "ngsim/errors.hpp"
#include "ngsim/tomlmini.hpp"

namespace ngsim {

struct ExperimentParams {
    int runs = 500;
    std::vector<double> p_grid;
    int runs_per_point = 100;
    std::vector<int> n_list;
    int theta = 3;
    int samples = 10'000;
};

struct ProbeParams {
    std::string mode = "mock-canned";  // mock-canned | mock-echo | http
    std::string url = "http://localhost:8080";
    std::string model = "mock";
    int repetitions = 5;
    double temperature = 0.0;
    int max_attempts = 3;
    int backoff_ms = 100;
    int max_in_flight = 4;
    std::string echo_reply;
};

// Declarative experiment document: population + policy + per-assay
// parameters, with every default materialized before hashing.
struct AppConfig {
    PopulationConfig population;
    ExperimentParams experiment;
    ProbeParams probe;
    std::string output_dir = "out";
};

namespace detail {

inline void reject_unknown(const tomlmini::Table& table, const std::string& section,
                           const std::set<std::string>& known) {
    for (const auto& [key, value] : table)
        if (!known.count(key))
            throw ConfigError("config: unknown key '" +
                              (section.empty() ? key : section + "." + key) + "'");
}

inline NameId label_id(const PopulationConfig& pop, const std::string& label,
                       const std::string& field) {
    for (std::size_t i = 0; i < pop.labels.size(); ++i)
        if (pop.labels[i] == label) return static_cast<NameId>(i);
    throw ConfigError("config: " + field + ": label '" + label + "' not in pool");
}

} // namespace detail

inline AppConfig load_app_config(const std::string& text) {
    const auto doc = tomlmini::parse(text);
    for (const auto& [section, table] : doc) {
        static const std::set<std::string> sections = {"",       "population", "policy",
                                                       "committed", "experiment", "probe",
                                                       "output"};
        if (!sections.count(section))
            throw ConfigError("config: unknown section [" + section + "]");
        if (section.empty() && !table.empty())
            throw ConfigError("config: top-level key '" + table.begin()->first +
                              "' outside any section");
    }
    AppConfig app;
    auto& pop = app.population;

    if (auto it = doc.find("population"); it != doc.end()) {
        const auto& t = it->second;
        detail::reject_unknown(t, "population",
                               {"n", "pool", "w", "memory", "s_success", "s_failure", "pairing",
                                "dynamics", "init", "seeded_name", "max_steps", "seed"});
        if (t.count("n")) pop.n = static_cast<int>(t.at("n").as_int());
        if (t.count("pool")) {
            pop.labels.clear();
            for (const auto& v : t.at("pool").as_array()) pop.labels.push_back(v.as_string());
        } else if (t.count("w")) {
            pop.labels = PopulationConfig::default_labels(static_cast<int>(t.at("w").as_int()));
        }
        if (t.count("memory")) pop.memory_capacity = static_cast<int>(t.at("memory").as_int());
        if (t.count("s_success")) pop.s_success = t.at("s_success").as_double();
        if (t.count("s_failure")) pop.s_failure = t.at("s_failure").as_double();
        if (t.count("pairing")) {
            const auto& s = t.at("pairing").as_string();
            if (s == "random-pair") pop.pairing = Pairing::RandomPair;
            else if (s == "perfect-matching") pop.pairing = Pairing::PerfectMatching;
            else throw ConfigError("config: pairing: unknown mode '" + s + "'");
        }
        if (t.count("dynamics")) {
            const auto& s = t.at("dynamics").as_string();
            if (s == "minimal-ng") pop.dynamics = Dynamics::MinimalNg;
            else if (s == "memory-coordination") pop.dynamics = Dynamics::MemoryCoordination;
            else throw ConfigError("config: dynamics: unknown mode '" + s + "'");
        }
        if (t.count("max_steps")) pop.max_steps = t.at("max_steps").as_int();
        if (t.count("seed")) pop.seed = static_cast<std::uint64_t>(t.at("seed").as_int());
    }
    if (pop.labels.empty()) pop.labels = PopulationConfig::default_labels(2);
    if (auto it = doc.find("population"); it != doc.end()) {
        const auto& t = it->second;
        if (t.count("init")) {
            const auto& s = t.at("init").as_string();
            if (s == "empty") pop.init = InitMode::Empty;
            else if (s == "seeded-consensus") pop.init = InitMode::SeededConsensus;
            else throw ConfigError("config: init: unknown mode '" + s + "'");
        }
        if (t.count("seeded_name"))
            pop.seeded_name = detail::label_id(pop, t.at("seeded_name").as_string(), "seeded_name");
    }

    PolicyParams policy;
    policy.kind = pop.dynamics == Dynamics::MinimalNg ? PolicyKind::MinimalNg
                                                      : PolicyKind::MemoryCoordination;
    if (auto it = doc.find("policy"); it != doc.end()) {
        const auto& t = it->second;
        detail::reject_unknown(t, "policy", {"epsilon", "temperature", "kappa", "pseudo"});
        if (t.count("epsilon")) policy.epsilon = t.at("epsilon").as_double();
        if (t.count("temperature")) policy.temperature = t.at("temperature").as_double();
        if (t.count("kappa")) policy.kappa = t.at("kappa").as_double();
        if (t.count("pseudo")) {
            for (const auto& v : t.at("pseudo").as_array())
                policy.pseudo_counts.push_back(v.as_double());
            if (policy.pseudo_counts.size() != pop.labels.size())
                throw ConfigError("config: policy.pseudo: need one value per pool name");
        }
    }
    pop.policy_mix = {PolicyRange{0, pop.n, policy}};

    if (auto it = doc.find("committed"); it != doc.end()) {
        const auto& t = it->second;
        detail::reject_unknown(t, "committed", {"count", "fraction", "target"});
        if (!t.count("target"))
            throw ConfigError("config: committed.target: required when [committed] present");
        const NameId target = detail::label_id(pop, t.at("target").as_string(), "committed.target");
        int count = 0;
        if (t.count("count")) count = static_cast<int>(t.at("count").as_int());
        if (t.count("fraction"))
            count = static_cast<int>(t.at("fraction").as_double() * pop.n + 0.5);
        for (int i = 0; i < count; ++i) pop.committed[i] = target;
    }

    if (auto it = doc.find("experiment"); it != doc.end()) {
        const auto& t = it->second;
        detail::reject_unknown(t, "experiment",
                               {"runs", "p_grid", "runs_per_point", "n_list", "theta", "samples"});
        if (t.count("runs")) app.experiment.runs = static_cast<int>(t.at("runs").as_int());
        if (t.count("p_grid"))
            for (const auto& v : t.at("p_grid").as_array())
                app.experiment.p_grid.push_back(v.as_double());
        if (t.count("runs_per_point"))
            app.experiment.runs_per_point = static_cast<int>(t.at("runs_per_point").as_int());
        if (t.count("n_list"))
            for (const auto& v : t.at("n_list").as_array())
                app.experiment.n_list.push_back(static_cast<int>(v.as_int()));
        if (t.count("theta")) app.experiment.theta = static_cast<int>(t.at("theta").as_int());
        if (t.count("samples")) app.experiment.samples = static_cast<int>(t.at("samples").as_int());
    }
    if (app.experiment.p_grid.empty())
        for (int i = 0; i <= 10; ++i) app.experiment.p_grid.push_back(0.05 * i);
    if (app.experiment.n_list.empty()) app.experiment.n_list = {50, 100, 200, 400};

    if (auto it = doc.find("probe"); it != doc.end()) {
        const auto& t = it->second;
        detail::reject_unknown(t, "probe",
                               {"mode", "url", "model", "repetitions", "temperature",
                                "max_attempts", "backoff_ms", "max_in_flight", "echo_reply"});
        auto& p = app.probe;
        if (t.count("mode")) p.mode = t.at("mode").as_string();
        if (p.mode != "mock-canned" && p.mode != "mock-echo" && p.mode != "http")
            throw ConfigError("config: probe.mode: unknown mode '" + p.mode + "'");
        if (t.count("url")) p.url = t.at("url").as_string();
        if (t.count("model")) p.model = t.at("model").as_string();
        if (t.count("repetitions")) p.repetitions = static_cast<int>(t.at("repetitions").as_int());
        if (t.count("temperature")) p.temperature = t.at("temperature").as_double();
        if (t.count("max_attempts")) p.max_attempts = static_cast<int>(t.at("max_attempts").as_int());
        if (t.count("backoff_ms")) p.backoff_ms = static_cast<int>(t.at("backoff_ms").as_int());
        if (t.count("max_in_flight"))
            p.max_in_flight = static_cast<int>(t.at("max_in_flight").as_int());
        if (t.count("echo_reply")) p.echo_reply = t.at("echo_reply").as_string();
    }

    if (auto it = doc.find("output"); it != doc.end()) {
        detail::reject_unknown(it->second, "output", {"dir"});
        if (it->second.count("dir")) app.output_dir = it->second.at("dir").as_string();
    }

    validate(pop);
    return app;
}

// Fully materialized echo of the effective configuration; its FNV-64
// hash is the invocation hash embedded in every output file.
inline std::string effective_config_text(const AppConfig& app) {
    const auto& pop = app.population;
    const PolicyParams& policy = pop.policy_mix.empty() ? PolicyParams{}
                                                        : pop.policy_mix.front().params;
    std::ostringstream out;
    out.precision(17);
    out << "[population]\n";
    out << "n = " << pop.n << "\n";
    out << "pool = [";
    for (std::size_t i = 0; i < pop.labels.size(); ++i)
        out << (i ? ", " : "") << '"' << pop.labels[i] << '"';
    out << "]\n";
    out << "memory = " << pop.memory_capacity << "\n";
    out << "s_success = " << pop.s_success << "\n";
    out << "s_failure = " << pop.s_failure << "\n";
    out << "pairing = \"" << to_string(pop.pairing) << "\"\n";
    out << "dynamics = \"" << to_string(pop.dynamics) << "\"\n";
    out << "init = \"" << to_string(pop.init) << "\"\n";
    if (pop.init == InitMode::SeededConsensus)
        out << "seeded_name = \"" << pop.labels[static_cast<std::size_t>(pop.seeded_name)]
            << "\"\n";
    out << "max_steps = " << pop.effective_max_steps() << "\n";
    out << "seed = " << pop.seed << "\n";
    out << "\n[policy]\n";
    out << "epsilon = " << policy.epsilon << "\n";
    out << "temperature = " << policy.temperature << "\n";
    out << "kappa = " << policy.kappa << "\n";
    out << "pseudo = [";
    for (std::size_t i = 0; i < pop.labels.size(); ++i)
        out << (i ? ", " : "") << policy.pseudo(static_cast<NameId>(i));
    out << "]\n";
    if (!pop.committed.empty()) {
        out << "\n[committed]\n";
        out << "count = " << pop.committed.size() << "\n";
        out << "target = \""
            << pop.labels[static_cast<std::size_t>(pop.committed.begin()->second)] << "\"\n";
    }
    out << "\n[experiment]\n";
    out << "runs = " << app.experiment.runs << "\n";
    out << "p_grid = [";
    for (std::size_t i = 0; i < app.experiment.p_grid.size(); ++i)
        out << (i ? ", " : "") << app.experiment.p_grid[i];
    out << "]\n";
    out << "runs_per_point = " << app.experiment.runs_per_point << "\n";
    out << "n_list = [";
    for (std::size_t i = 0; i < app.experiment.n_list.size(); ++i)
        out << (i ? ", " : "") << app.experiment.n_list[i];
    out << "]\n";
    out << "theta = " << app.experiment.theta << "\n";
    out << "samples = " << app.experiment.samples << "\n";
    out << "\n[probe]\n";
    out << "mode = \"" << app.probe.mode << "\"\n";
    out << "url = \"" << app.probe.url << "\"\n";
    out << "model = \"" << app.probe.model << "\"\n";
    out << "repetitions = " << app.probe.repetitions << "\n";
    out << "temperature = " << app.probe.temperature << "\n";
    out << "max_attempts = " << app.probe.max_attempts << "\n";
    out << "backoff_ms = " << app.probe.backoff_ms << "\n";
    out << "max_in_flight = " << app.probe.max_in_flight << "\n";
    out << "\n[output]\n";
    out << "dir = \"" << app.output_dir << "\"\n";
    return out.str();
}

inline std::uint64_t effective_hash(const AppConfig& app) {
    return fnv1a64(effective_config_text(app));
}

} // namespace ngsim
