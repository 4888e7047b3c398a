#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ngsim/errors.hpp"
#include "ngsim/names.hpp"
#include "ngsim/types.hpp"

namespace ngsim {

enum class Pairing { RandomPair, PerfectMatching };
enum class Dynamics { MinimalNg, MemoryCoordination };
enum class InitMode { Empty, SeededConsensus };

// Half-open agent index range [lo, hi) bound to one policy.
struct PolicyRange {
    int lo = 0;
    int hi = 0;
    PolicyParams params;
};

struct PopulationConfig {
    int n = 24;
    std::vector<std::string> labels;  // fixed pool; size W
    int memory_capacity = 5;
    double s_success = 1.0;
    double s_failure = -1.0;
    Pairing pairing = Pairing::RandomPair;
    Dynamics dynamics = Dynamics::MemoryCoordination;
    std::vector<PolicyRange> policy_mix;   // empty = one default policy for all
    std::map<int, NameId> committed;       // agent index -> forced name
    InitMode init = InitMode::Empty;
    NameId seeded_name = 0;
    long max_steps = 0;  // 0 = default 200 * n^2
    std::uint64_t seed = 0;

    int pool_size() const { return static_cast<int>(labels.size()); }
    long effective_max_steps() const {
        return max_steps > 0 ? max_steps : 200L * n * n;
    }

    static std::vector<std::string> default_labels(int w) {
        std::vector<std::string> out;
        out.reserve(static_cast<std::size_t>(w));
        for (int i = 0; i < w; ++i) out.push_back(NamePool::default_label(i));
        return out;
    }
};

inline const char* to_string(Pairing p) {
    return p == Pairing::RandomPair ? "random-pair" : "perfect-matching";
}
inline const char* to_string(Dynamics d) {
    return d == Dynamics::MinimalNg ? "minimal-ng" : "memory-coordination";
}
inline const char* to_string(InitMode m) {
    return m == InitMode::Empty ? "empty" : "seeded-consensus";
}
inline const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::MinimalNg: return "minimal-ng";
        case PolicyKind::MemoryCoordination: return "memory-coordination";
        case PolicyKind::Committed: return "committed";
        case PolicyKind::ExternalModel: return "external-model";
    }
    return "?";
}

inline void validate(const PopulationConfig& cfg) {
    if (cfg.n < 2) throw ConfigError("n: population size must be >= 2");
    if (cfg.pool_size() < 2) throw ConfigError("pool: need at least 2 names");
    if (cfg.memory_capacity < 1) throw ConfigError("memory: capacity must be >= 1");
    if (cfg.pairing == Pairing::PerfectMatching && cfg.n % 2 != 0)
        throw ConfigError("pairing: perfect-matching requires even n");
    if (cfg.init == InitMode::SeededConsensus &&
        (cfg.seeded_name < 0 || cfg.seeded_name >= cfg.pool_size()))
        throw ConfigError("init: seeded-consensus name outside pool");
    for (const auto& [agent, target] : cfg.committed) {
        if (agent < 0 || agent >= cfg.n)
            throw ConfigError("committed: agent index outside [0, n)");
        if (target < 0 || target >= cfg.pool_size())
            throw ConfigError("committed: target outside pool");
    }
    for (const auto& range : cfg.policy_mix) {
        if (range.lo < 0 || range.hi > cfg.n || range.lo >= range.hi)
            throw ConfigError("policy_mix: bad agent range");
        const auto& p = range.params;
        if (p.epsilon < 0.0 || p.epsilon > 1.0)
            throw ConfigError("policy: epsilon outside [0,1]");
        if (p.temperature < 0.0) throw ConfigError("policy: temperature must be >= 0");
        for (double v : p.pseudo_counts)
            if (v < 0.0) throw ConfigError("policy: pseudo_counts must be >= 0");
        if (p.kind == PolicyKind::Committed &&
            (p.committed_target < 0 || p.committed_target >= cfg.pool_size()))
            throw ConfigError("policy: committed target outside pool");
    }
}

namespace detail {
inline void append_params(std::ostringstream& out, const PolicyParams& p) {
    out << to_string(p.kind) << " eps=" << p.epsilon << " temp=" << p.temperature
        << " kappa=" << p.kappa << " pseudo=[";
    for (double v : p.pseudo_counts) out << v << ",";
    out << "] target=" << p.committed_target;
}
} // namespace detail

// Canonical single-line rendering of every materialized field; the basis
// of the config hash embedded in all outputs.
inline std::string canonical_serialize(const PopulationConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "n=" << cfg.n << ";pool=";
    for (const auto& l : cfg.labels) out << l << ",";
    out << ";m=" << cfg.memory_capacity << ";s=" << cfg.s_success << "/" << cfg.s_failure
        << ";pairing=" << to_string(cfg.pairing) << ";dynamics=" << to_string(cfg.dynamics)
        << ";init=" << to_string(cfg.init) << ":" << cfg.seeded_name
        << ";max_steps=" << cfg.effective_max_steps() << ";seed=" << cfg.seed << ";mix=";
    for (const auto& r : cfg.policy_mix) {
        out << "[" << r.lo << "," << r.hi << ")";
        detail::append_params(out, r.params);
        out << "|";
    }
    out << ";committed=";
    for (const auto& [a, t] : cfg.committed) out << a << "->" << t << ",";
    return out.str();
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t config_hash(const PopulationConfig& cfg) {
    return fnv1a64(canonical_serialize(cfg));
}

} // namespace ngsim
