#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "ngsim/names.hpp"
#include "ngsim/rng.hpp"
#include "ngsim/types.hpp"

namespace ngsim {

// Everything a policy is allowed to see: the agent's own inventory and
// memory, the pool size, and its own parameters. Population structure is
// deliberately unreachable through this interface.
struct PolicyView {
    std::span<const NameId> inventory;
    std::span<const InteractionRecord> memory;
    int pool_size = 0;
    const PolicyParams* params = nullptr;
};

inline PolicyView view_of(const AgentState& agent, int pool_size) {
    return PolicyView{agent.inventory, agent.memory, pool_size, &agent.policy};
}

// score(c) = prior(c) + sum of payoffs of own plays of c
//          + kappa * (number of times a partner was seen playing c).
// Repeating after a success is the greedy choice, while accumulated
// failures against a unanimous partner name eventually flip the argmax.
inline std::vector<double> memory_scores(const PolicyView& view) {
    std::vector<double> scores(static_cast<std::size_t>(view.pool_size), 0.0);
    for (std::size_t c = 0; c < scores.size(); ++c)
        scores[c] = view.params->pseudo(static_cast<NameId>(c));
    for (const auto& rec : view.memory) {
        if (rec.own_choice >= 0 && rec.own_choice < view.pool_size)
            scores[static_cast<std::size_t>(rec.own_choice)] += rec.payoff;
        if (rec.partner_choice >= 0 && rec.partner_choice < view.pool_size)
            scores[static_cast<std::size_t>(rec.partner_choice)] += view.params->kappa;
    }
    return scores;
}

namespace detail {

inline NameId argmax_with_uniform_ties(const std::vector<double>& scores, Rng& rng) {
    double best = scores[0];
    for (double s : scores) best = std::max(best, s);
    std::vector<NameId> tied;
    for (std::size_t c = 0; c < scores.size(); ++c)
        if (scores[c] == best) tied.push_back(static_cast<NameId>(c));
    if (tied.size() == 1) return tied[0];
    return tied[static_cast<std::size_t>(rng.uniform_below(tied.size()))];
}

inline NameId softmax_sample(const std::vector<double>& scores, double temperature, Rng& rng) {
    double best = scores[0];
    for (double s : scores) best = std::max(best, s);
    std::vector<double> weights(scores.size());
    double total = 0.0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        weights[c] = std::exp((scores[c] - best) / temperature);
        total += weights[c];
    }
    double r = rng.uniform_double() * total;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        r -= weights[c];
        if (r <= 0.0) return static_cast<NameId>(c);
    }
    return static_cast<NameId>(scores.size() - 1);
}

} // namespace detail

// Score-based choice over the fixed pool: epsilon-uniform exploration,
// then strict argmax (temperature 0, uniform tie-breaking) or softmax.
inline NameId memory_choose(const PolicyView& view, Rng& rng) {
    const auto& p = *view.params;
    if (p.epsilon > 0.0 && rng.uniform_double() < p.epsilon)
        return rng.uniform_int(view.pool_size);
    const auto scores = memory_scores(view);
    if (p.temperature > 0.0)
        return detail::softmax_sample(scores, p.temperature, rng);
    return detail::argmax_with_uniform_ties(scores, rng);
}

// The noise-free choice used by consensus detection: the unique argmax,
// or nullopt when the top score is tied.
inline std::optional<NameId> memory_argmax(const PolicyView& view) {
    const auto scores = memory_scores(view);
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) {
            best = c;
            tie = false;
        } else if (scores[c] == scores[best]) {
            tie = true;
        }
    }
    if (tie) return std::nullopt;
    return static_cast<NameId>(best);
}

// Appends the record (evicting the oldest past capacity) and folds both
// observed choices into the inventory.
inline void memory_update(AgentState& agent, const InteractionRecord& record, int capacity) {
    agent.memory.push_back(record);
    if (agent.memory.size() > static_cast<std::size_t>(capacity))
        agent.memory.erase(agent.memory.begin());
    if (record.own_choice != kNoName) agent.learn(record.own_choice);
    if (record.partner_choice != kNoName) agent.learn(record.partner_choice);
}

// Speaker rule of the minimal naming game: uniform draw from the
// inventory; an empty inventory invents a fresh name from the unbounded
// pool and keeps it.
inline NameId minimal_ng_choose(AgentState& speaker, NamePool& pool, Rng& rng) {
    if (speaker.inventory.empty()) {
        const NameId fresh = pool.invent();
        speaker.inventory.push_back(fresh);
        return fresh;
    }
    return rng.pick(speaker.inventory);
}

// Inventory pruning: on success both sides collapse to the matched name;
// on failure the listener learns it.
inline void minimal_ng_update(AgentState& speaker, AgentState& listener, NameId name, bool success) {
    if (success) {
        if (!speaker.committed_to) speaker.inventory.assign(1, name);
        if (!listener.committed_to) listener.inventory.assign(1, name);
    } else {
        if (!listener.committed_to) listener.learn(name);
    }
}

inline NameId committed_choose(const AgentState& agent) {
    return *agent.committed_to;
}

} // namespace ngsim
