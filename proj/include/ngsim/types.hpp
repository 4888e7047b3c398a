#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "ngsim/names.hpp"

namespace ngsim {

// The only information an agent ever receives about the world: its own
// pairwise interaction outcomes.
struct InteractionRecord {
    long step = 0;
    NameId own_choice = kNoName;
    NameId partner_choice = kNoName;
    bool success = false;
    double payoff = 0.0;
};

enum class PolicyKind {
    MinimalNg,
    MemoryCoordination,
    Committed,
    ExternalModel,
};

struct PolicyParams {
    PolicyKind kind = PolicyKind::MemoryCoordination;
    double epsilon = 0.0;      // exploration probability in [0,1]
    double temperature = 0.0;  // 0 = strict argmax, >0 = softmax sampling
    double kappa = 1.0;        // weight of observed partner choices
    std::vector<double> pseudo_counts;  // prior score per pool name; empty = all zero
    NameId committed_target = kNoName;  // for kind == Committed

    double pseudo(NameId id) const {
        const auto i = static_cast<std::size_t>(id);
        return i < pseudo_counts.size() ? pseudo_counts[i] : 0.0;
    }
};

struct AgentState {
    int id = 0;
    std::vector<NameId> inventory;            // duplicate-free, insertion order
    std::vector<InteractionRecord> memory;    // FIFO, capacity M (oldest first)
    PolicyParams policy;
    std::optional<NameId> committed_to;

    bool knows(NameId name) const {
        return std::find(inventory.begin(), inventory.end(), name) != inventory.end();
    }

    // Returns true if the name was newly added.
    bool learn(NameId name) {
        if (knows(name)) return false;
        inventory.push_back(name);
        return true;
    }
};

struct StepRecord {
    long step = 0;  // 1-based
    int agent_a = 0;
    int agent_b = 0;
    NameId choice_a = kNoName;
    NameId choice_b = kNoName;
    bool success = false;
};

// Complete evidence object of one run. `consensus_name` holds, per step,
// the name every agent's deterministic-mode choice agrees on (kNoName if
// no such name); it is the input for switch detection.
struct Trajectory {
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::vector<StepRecord> steps;
    std::vector<int> distinct_names;
    std::vector<NameId> consensus_name;
    std::optional<long> consensus_step;
    std::optional<NameId> winner;
    bool committed_present = false;
    std::vector<std::string> labels;  // pool labels plus any invented names
};

} // namespace ngsim
