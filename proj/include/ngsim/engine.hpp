#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ngsim/config.hpp"
#include "ngsim/errors.hpp"
#include "ngsim/names.hpp"
#include "ngsim/policy.hpp"
#include "ngsim/rng.hpp"
#include "ngsim/types.hpp"

namespace ngsim {

struct InteractionOutcome {
    int agent_a = 0;
    int agent_b = 0;
    NameId choice_a = kNoName;
    NameId choice_b = kNoName;
    bool success = false;
};

// Injected decision source for agents with kind == ExternalModel. The
// adapter behind it sees exactly what a simulated policy sees: the
// agent's own state and the pool labels.
class ExternalChooser {
public:
    virtual ~ExternalChooser() = default;
    virtual NameId choose(const AgentState& agent, const NamePool& pool) = 0;
};

struct RunOptions {
    bool record_steps = true;       // keep per-step records and series
    bool stop_at_consensus = true;  // otherwise run to max_steps
};

class SimulationState {
public:
    explicit SimulationState(PopulationConfig config)
        : cfg_(normalized(std::move(config))),
          pool_(cfg_.labels),
          pair_rng_(derive_seed(cfg_.seed, stream::kPairing)) {
        validate(cfg_);
        hash_ = config_hash(cfg_);
        init_agents();
    }

    const PopulationConfig& config() const { return cfg_; }
    const NamePool& pool() const { return pool_; }
    NamePool& pool() { return pool_; }
    const std::vector<AgentState>& agents() const { return agents_; }
    long step_count() const { return step_count_; }

    void attach_external(ExternalChooser* chooser) { external_ = chooser; }

    // Uniform over unordered pairs; in perfect-matching mode, the next
    // pair of a fresh uniformly random matching each round.
    std::pair<int, int> draw_pair() {
        if (cfg_.pairing == Pairing::PerfectMatching) {
            if (matching_pos_ >= matching_.size()) regenerate_matching();
            return matching_[matching_pos_++];
        }
        const int a = pair_rng_.uniform_int(cfg_.n);
        int b = pair_rng_.uniform_int(cfg_.n - 1);
        if (b >= a) ++b;
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    InteractionOutcome step(const RunOptions& options = {}) {
        if (step_count_ >= cfg_.effective_max_steps())
            throw StepError("step: max_steps exhausted", -1);
        const auto [a, b] = draw_pair();
        InteractionOutcome out = cfg_.dynamics == Dynamics::MinimalNg
                                     ? minimal_ng_step(a, b)
                                     : coordination_step(a, b);
        ++step_count_;
        update_streak(out);
        record(out, options);
        return out;
    }

    // Consensus predicate: every agent's deterministic-mode choice is one
    // common name; under minimal-NG additionally every inventory is the
    // singleton of that name.
    bool is_consensus() const { return current_consensus() != kNoName; }

    NameId current_consensus() const {
        if (cfg_.dynamics == Dynamics::MinimalNg) {
            if (total_inventory_ != cfg_.n) return kNoName;
            for (const auto& [name, holders] : holders_)
                if (holders == cfg_.n) return name;
            return kNoName;
        }
        if (det_counts_leader_ != kNoName &&
            det_counts_.at(det_counts_leader_) == cfg_.n)
            return det_counts_leader_;
        return kNoName;
    }

    int distinct_names() const { return distinct_; }

    Trajectory run(const RunOptions& options = {}) {
        const long sweep = cfg_.n / 2;
        const long limit = cfg_.effective_max_steps();
        while (step_count_ < limit) {
            step(options);
            if (!traj_.consensus_step && streak_len_ >= sweep) {
                const NameId c = current_consensus();
                if (c != kNoName && c == streak_name_) {
                    traj_.consensus_step = step_count_;
                    traj_.winner = c;
                }
            }
            if (options.stop_at_consensus && traj_.consensus_step) break;
        }
        finalize_trajectory();
        return std::move(traj_);
    }

private:
    static PopulationConfig normalized(PopulationConfig cfg) {
        if (cfg.labels.empty()) cfg.labels = PopulationConfig::default_labels(2);
        return cfg;
    }

    void init_agents() {
        agents_.resize(static_cast<std::size_t>(cfg_.n));
        agent_rng_.reserve(static_cast<std::size_t>(cfg_.n));
        PolicyParams defaults;
        defaults.kind = cfg_.dynamics == Dynamics::MinimalNg ? PolicyKind::MinimalNg
                                                             : PolicyKind::MemoryCoordination;
        for (int i = 0; i < cfg_.n; ++i) {
            auto& agent = agents_[static_cast<std::size_t>(i)];
            agent.id = i;
            agent.policy = defaults;
            agent_rng_.emplace_back(derive_seed(cfg_.seed, stream::kAgent, static_cast<std::uint64_t>(i)));
        }
        for (const auto& range : cfg_.policy_mix)
            for (int i = range.lo; i < range.hi; ++i)
                agents_[static_cast<std::size_t>(i)].policy = range.params;
        for (auto& agent : agents_) {
            if (agent.policy.kind == PolicyKind::Committed)
                agent.committed_to = agent.policy.committed_target;
            if (agent.policy.kind == PolicyKind::ExternalModel &&
                cfg_.dynamics == Dynamics::MinimalNg)
                throw ConfigError("policy: external-model requires memory-coordination dynamics");
        }
        for (const auto& [idx, target] : cfg_.committed)
            agents_[static_cast<std::size_t>(idx)].committed_to = target;

        for (auto& agent : agents_) {
            if (agent.committed_to) {
                agent.inventory.assign(1, *agent.committed_to);
            } else if (cfg_.init == InitMode::SeededConsensus) {
                agent.inventory.assign(1, cfg_.seeded_name);
            }
            // Seeded consensus under memory dynamics also prefills the
            // memory window with successes on the seeded name; otherwise
            // the seeded state would not satisfy the consensus predicate.
            if (cfg_.init == InitMode::SeededConsensus &&
                cfg_.dynamics == Dynamics::MemoryCoordination && !agent.committed_to) {
                InteractionRecord seed_rec{0, cfg_.seeded_name, cfg_.seeded_name, true, cfg_.s_success};
                agent.memory.assign(static_cast<std::size_t>(cfg_.memory_capacity), seed_rec);
            }
        }

        for (const auto& agent : agents_)
            for (NameId name : agent.inventory) add_holder(name);
        if (cfg_.dynamics == Dynamics::MemoryCoordination) {
            det_choice_.assign(static_cast<std::size_t>(cfg_.n), kNoName);
            for (const auto& agent : agents_) refresh_det_choice(agent.id);
        }
        traj_.seed = cfg_.seed;
        traj_.config_hash = hash_;
        traj_.committed_present = !cfg_.committed.empty() ||
            std::any_of(agents_.begin(), agents_.end(),
                        [](const AgentState& a) { return a.committed_to.has_value(); });
    }

    NameId choose(AgentState& agent) {
        if (agent.committed_to) return committed_choose(agent);
        if (agent.policy.kind == PolicyKind::ExternalModel) {
            if (!external_) throw StepError("step: no external endpoint attached", agent.id);
            return external_->choose(agent, pool_);
        }
        return memory_choose(view_of(agent, pool_.base_size()),
                             agent_rng_[static_cast<std::size_t>(agent.id)]);
    }

    InteractionOutcome coordination_step(int a, int b) {
        auto& agent_a = agents_[static_cast<std::size_t>(a)];
        auto& agent_b = agents_[static_cast<std::size_t>(b)];
        // Simultaneous choices: neither side sees the other's pick.
        const NameId ca = choose(agent_a);
        const NameId cb = choose(agent_b);
        const bool success = ca == cb;
        const double payoff = success ? cfg_.s_success : cfg_.s_failure;
        const long t = step_count_ + 1;
        apply_memory_update(agent_a, InteractionRecord{t, ca, cb, success, payoff});
        apply_memory_update(agent_b, InteractionRecord{t, cb, ca, success, payoff});
        refresh_det_choice(a);
        refresh_det_choice(b);
        return InteractionOutcome{a, b, ca, cb, success};
    }

    InteractionOutcome minimal_ng_step(int a, int b) {
        const bool a_speaks = pair_rng_.uniform_below(2) == 0;
        const int s = a_speaks ? a : b;
        const int l = a_speaks ? b : a;
        auto& speaker = agents_[static_cast<std::size_t>(s)];
        auto& listener = agents_[static_cast<std::size_t>(l)];

        NameId name;
        if (speaker.committed_to) {
            name = committed_choose(speaker);
        } else {
            const std::size_t before = speaker.inventory.size();
            name = minimal_ng_choose(speaker, pool_, agent_rng_[static_cast<std::size_t>(s)]);
            if (speaker.inventory.size() > before) add_holder(name);  // invention
        }
        const bool success = listener.knows(name);
        const NameId listener_declared = listener.committed_to ? *listener.committed_to
                                         : success             ? name
                                         : listener.inventory.empty() ? kNoName
                                                                      : listener.inventory.front();

        if (success) {
            if (!speaker.committed_to) prune_to(speaker, name);
            if (!listener.committed_to) prune_to(listener, name);
        } else if (!listener.committed_to && listener.learn(name)) {
            add_holder(name);
        }

        const double payoff = success ? cfg_.s_success : cfg_.s_failure;
        const long t = step_count_ + 1;
        append_record(speaker, InteractionRecord{t, name, listener_declared, success, payoff});
        append_record(listener, InteractionRecord{t, listener_declared, name, success, payoff});

        return a_speaks ? InteractionOutcome{a, b, name, listener_declared, success}
                        : InteractionOutcome{a, b, listener_declared, name, success};
    }

    void apply_memory_update(AgentState& agent, const InteractionRecord& rec) {
        const bool knew_own = rec.own_choice == kNoName || agent.knows(rec.own_choice);
        const bool knew_partner = rec.partner_choice == kNoName || agent.knows(rec.partner_choice);
        memory_update(agent, rec, cfg_.memory_capacity);
        if (!knew_own) add_holder(rec.own_choice);
        if (!knew_partner && rec.partner_choice != rec.own_choice) add_holder(rec.partner_choice);
    }

    // Minimal-NG agents still receive the record, but inventories are
    // governed solely by the pruning rule.
    void append_record(AgentState& agent, const InteractionRecord& rec) {
        agent.memory.push_back(rec);
        if (agent.memory.size() > static_cast<std::size_t>(cfg_.memory_capacity))
            agent.memory.erase(agent.memory.begin());
    }

    void prune_to(AgentState& agent, NameId name) {
        for (NameId old : agent.inventory)
            if (old != name) remove_holder(old);
        if (!agent.knows(name)) add_holder(name);
        agent.inventory.assign(1, name);
    }

    void add_holder(NameId name) {
        int& h = holders_[name];
        if (h == 0) ++distinct_;
        ++h;
        ++total_inventory_;
    }

    void remove_holder(NameId name) {
        int& h = holders_[name];
        --h;
        --total_inventory_;
        if (h == 0) --distinct_;
    }

    void refresh_det_choice(int id) {
        if (cfg_.dynamics != Dynamics::MemoryCoordination) return;
        const auto& agent = agents_[static_cast<std::size_t>(id)];
        std::optional<NameId> det;
        if (agent.committed_to) {
            det = *agent.committed_to;
        } else {
            det = memory_argmax(view_of(agent, pool_.base_size()));
        }
        const NameId next = det.value_or(kNoName);
        NameId& slot = det_choice_[static_cast<std::size_t>(id)];
        if (slot == next) return;
        if (slot != kNoName) --det_counts_[slot];
        slot = next;
        if (next != kNoName) {
            int& c = det_counts_[next];
            ++c;
            if (det_counts_leader_ == kNoName || c > det_counts_[det_counts_leader_])
                det_counts_leader_ = next;
        }
        if (det_counts_leader_ != kNoName) {
            // leader may have lost the top spot; rescan lazily (W is small)
            for (const auto& [name, count] : det_counts_)
                if (count > det_counts_[det_counts_leader_]) det_counts_leader_ = name;
        }
    }

    void update_streak(const InteractionOutcome& out) {
        if (out.success && out.choice_a == streak_name_) {
            ++streak_len_;
        } else if (out.success) {
            streak_name_ = out.choice_a;
            streak_len_ = 1;
        } else {
            streak_name_ = kNoName;
            streak_len_ = 0;
        }
    }

    void record(const InteractionOutcome& out, const RunOptions& options) {
        if (!options.record_steps) return;
        traj_.steps.push_back(StepRecord{step_count_, out.agent_a, out.agent_b,
                                         out.choice_a, out.choice_b, out.success});
        traj_.distinct_names.push_back(distinct_);
        traj_.consensus_name.push_back(current_consensus());
    }

    void regenerate_matching() {
        std::vector<int> order(static_cast<std::size_t>(cfg_.n));
        std::iota(order.begin(), order.end(), 0);
        pair_rng_.shuffle(order);
        matching_.clear();
        for (int i = 0; i + 1 < cfg_.n; i += 2) {
            const int a = order[static_cast<std::size_t>(i)];
            const int b = order[static_cast<std::size_t>(i + 1)];
            matching_.emplace_back(std::min(a, b), std::max(a, b));
        }
        matching_pos_ = 0;
    }

    void finalize_trajectory() {
        traj_.labels.clear();
        for (NameId i = 0; i < pool_.size(); ++i) traj_.labels.push_back(pool_.label(i));
    }

    PopulationConfig cfg_;
    NamePool pool_;
    std::uint64_t hash_ = 0;
    std::vector<AgentState> agents_;
    std::vector<Rng> agent_rng_;
    Rng pair_rng_;
    ExternalChooser* external_ = nullptr;

    long step_count_ = 0;
    NameId streak_name_ = kNoName;
    long streak_len_ = 0;

    std::unordered_map<NameId, int> holders_;
    int distinct_ = 0;
    long total_inventory_ = 0;
    std::vector<NameId> det_choice_;
    std::unordered_map<NameId, int> det_counts_;
    NameId det_counts_leader_ = kNoName;

    std::vector<std::pair<int, int>> matching_;
    std::size_t matching_pos_ = 0;

    Trajectory traj_;
};

inline SimulationState init_population(PopulationConfig config) {
    return SimulationState(std::move(config));
}

inline Trajectory run_simulation(PopulationConfig config, const RunOptions& options = {}) {
    SimulationState state(std::move(config));
    return state.run(options);
}

} // namespace ngsim
