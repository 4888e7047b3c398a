#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ngsim/names.hpp"
#include "ngsim/policy.hpp"

using namespace ngsim;

namespace {

InteractionRecord rec(NameId own, NameId partner, bool success, double payoff) {
    return InteractionRecord{0, own, partner, success, payoff};
}

AgentState memory_agent(std::vector<InteractionRecord> memory, PolicyParams params = {}) {
    AgentState agent;
    agent.policy = params;
    agent.memory = std::move(memory);
    return agent;
}

} // namespace

TEST_CASE("minimal-NG: singleton inventory is chosen with probability 1") {
    NamePool pool({"A", "B"});
    AgentState agent;
    agent.inventory = {0};
    Rng rng(1);
    for (int i = 0; i < 100; ++i) REQUIRE(minimal_ng_choose(agent, pool, rng) == 0);
}

TEST_CASE("minimal-NG: empty inventory invents and keeps a fresh name") {
    NamePool pool({"A", "B"});
    AgentState agent;
    Rng rng(2);
    const NameId fresh = minimal_ng_choose(agent, pool, rng);
    REQUIRE(fresh >= pool.base_size());
    REQUIRE(agent.inventory == std::vector<NameId>{fresh});
    REQUIRE(pool.label(fresh) == "n2");
}

TEST_CASE("minimal-NG: two-name inventory is drawn uniformly") {
    NamePool pool({"A", "B"});
    AgentState agent;
    agent.inventory = {0, 1};
    Rng rng(3);
    long count_a = 0;
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i)
        if (minimal_ng_choose(agent, pool, rng) == 0) ++count_a;
    const double freq = static_cast<double>(count_a) / draws;
    REQUIRE(std::abs(freq - 0.5) < 0.01);
}

TEST_CASE("minimal-NG update: success collapses both inventories") {
    AgentState speaker, listener;
    speaker.inventory = {0, 1};
    listener.inventory = {1, 2};
    minimal_ng_update(speaker, listener, 1, true);
    REQUIRE(speaker.inventory == std::vector<NameId>{1});
    REQUIRE(listener.inventory == std::vector<NameId>{1});
}

TEST_CASE("minimal-NG update: failure teaches only the listener") {
    AgentState speaker, listener;
    speaker.inventory = {0};
    listener.inventory = {1};
    minimal_ng_update(speaker, listener, 0, false);
    REQUIRE(speaker.inventory == std::vector<NameId>{0});
    REQUIRE(listener.inventory == std::vector<NameId>{1, 0});
}

TEST_CASE("memory choice: empty memory with uniform priors is uniform over W=10") {
    PolicyParams params;
    AgentState agent = memory_agent({}, params);
    Rng rng(5);
    std::vector<long> counts(10, 0);
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(memory_choose(view_of(agent, 10), rng))];
    for (long c : counts)
        REQUIRE(std::abs(static_cast<double>(c) / draws - 0.10) < 0.005);
}

TEST_CASE("memory choice: one success makes a unique argmax") {
    AgentState agent = memory_agent({rec(5, 5, true, 1.0)});
    Rng rng(6);
    for (int i = 0; i < 50; ++i) REQUIRE(memory_choose(view_of(agent, 10), rng) == 5);
    REQUIRE(memory_argmax(view_of(agent, 10)) == 5);
}

TEST_CASE("memory choice: repeated failure against a unanimous partner flips the argmax") {
    // score(A) = 2 * S_failure = -2, score(B) = 2 * kappa = 2 with defaults
    AgentState agent = memory_agent({rec(0, 1, false, -1.0), rec(0, 1, false, -1.0)});
    Rng rng(7);
    REQUIRE(memory_choose(view_of(agent, 2), rng) == 1);

    // minimal flipping streak from the score formula: one failure leaves a
    // tie-free flip already (kappa - S_failure > 0), so a single record
    // suffices when kappa exceeds |S_failure| contributions... verify the
    // general construction: k failures flip iff k*(kappa - s_failure) > 0
    // and beat any prior success surplus.
    AgentState prior = memory_agent({rec(0, 0, true, 1.0)});
    const double kappa = prior.policy.kappa;
    const double s_failure = -1.0;
    // after the success, score(A) = 1 + kappa = 2; each failure playing A
    // against partner B adds s_failure to A and kappa to B.
    const int k_flip = static_cast<int>(std::floor((1.0 + kappa) / (kappa - s_failure))) + 1;
    for (int k = 0; k < k_flip; ++k)
        prior.memory.push_back(rec(0, 1, false, s_failure));
    REQUIRE(memory_argmax(view_of(prior, 2)) == 1);
}

TEST_CASE("memory choice: greedy repetition after a success") {
    for (NameId c = 0; c < 4; ++c) {
        AgentState agent = memory_agent({rec(c, c, true, 1.0)});
        Rng rng(8);
        REQUIRE(memory_choose(view_of(agent, 4), rng) == c);
    }
}

TEST_CASE("memory choice: label equivariance under pool permutation") {
    // permutation pi = reverse over W=3
    auto pi = [](NameId id) { return static_cast<NameId>(2 - id); };
    std::vector<InteractionRecord> memory = {
        rec(0, 0, true, 1.0), rec(1, 2, false, -1.0)};  // argmax A, pi-image C
    std::vector<InteractionRecord> mapped;
    for (auto r : memory) {
        r.own_choice = pi(r.own_choice);
        r.partner_choice = pi(r.partner_choice);
        mapped.push_back(r);
    }
    AgentState a = memory_agent(memory);
    AgentState b = memory_agent(mapped);
    const auto pick_a = memory_argmax(view_of(a, 3));
    const auto pick_b = memory_argmax(view_of(b, 3));
    REQUIRE(pick_a.has_value());
    REQUIRE(pick_b.has_value());
    REQUIRE(*pick_b == pi(*pick_a));
}

TEST_CASE("memory choice: tie produces no deterministic argmax") {
    AgentState agent = memory_agent({});
    REQUIRE_FALSE(memory_argmax(view_of(agent, 2)).has_value());
}

TEST_CASE("memory choice: pseudo-count bias is monotone") {
    const int draws = 20'000;
    double last_freq = -1.0;
    for (double bias : {0.0, 0.5, 1.5}) {
        PolicyParams params;
        params.temperature = 1.0;
        params.pseudo_counts = {bias, 0.0};
        AgentState agent = memory_agent({}, params);
        Rng rng(9);
        long count_a = 0;
        for (int i = 0; i < draws; ++i)
            if (memory_choose(view_of(agent, 2), rng) == 0) ++count_a;
        const double freq = static_cast<double>(count_a) / draws;
        REQUIRE(freq > last_freq);
        last_freq = freq;
    }
}

TEST_CASE("memory update: FIFO capacity keeps the most recent records") {
    AgentState agent;
    for (long t = 1; t <= 7; ++t) {
        InteractionRecord r = rec(0, 0, true, 1.0);
        r.step = t;
        memory_update(agent, r, 5);
        REQUIRE(agent.memory.size() <= 5);
    }
    REQUIRE(agent.memory.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        REQUIRE(agent.memory[i].step == static_cast<long>(i) + 3);
}

TEST_CASE("memory update: inventory stays duplicate-free") {
    AgentState agent;
    memory_update(agent, rec(0, 0, true, 1.0), 5);
    memory_update(agent, rec(0, 0, true, 1.0), 5);
    REQUIRE(agent.inventory == std::vector<NameId>{0});
}

TEST_CASE("committed choice ignores memory entirely") {
    AgentState agent;
    agent.committed_to = 1;
    for (int i = 0; i < 1000; ++i) {
        agent.memory.push_back(rec(1, 0, false, -1.0));
        if (agent.memory.size() > 5) agent.memory.erase(agent.memory.begin());
        REQUIRE(committed_choose(agent) == 1);
    }
}

TEST_CASE("epsilon exploration hits every name") {
    PolicyParams params;
    params.epsilon = 1.0;
    AgentState agent = memory_agent({rec(0, 0, true, 1.0)}, params);
    Rng rng(10);
    std::vector<long> counts(4, 0);
    for (int i = 0; i < 10'000; ++i)
        ++counts[static_cast<std::size_t>(memory_choose(view_of(agent, 4), rng))];
    for (long c : counts) REQUIRE(c > 2000);
}
