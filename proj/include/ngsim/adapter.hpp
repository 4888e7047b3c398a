#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ngsim/chat.hpp"
#include "ngsim/engine.hpp"
#include "ngsim/parse.hpp"
#include "ngsim/policy.hpp"
#include "ngsim/prompt.hpp"
#include "ngsim/rng.hpp"

namespace ngsim {

// Bridges external chat models into the engine: renders the two-player
// prompt from the agent's own state, queries the endpoint, and parses
// the reply back into a pool name. A reply that cannot be parsed is
// re-requested up to `parse_retries` times before the step fails.
class ChatModelChooser : public ExternalChooser {
public:
    ChatModelChooser(ChatEndpoint& endpoint, PromptTemplate tmpl, std::string model_id,
                     double temperature = 0.0, int parse_retries = 2)
        : endpoint_(endpoint),
          tmpl_(std::move(tmpl)),
          model_id_(std::move(model_id)),
          temperature_(temperature),
          parse_retries_(parse_retries) {}

    NameId choose(const AgentState& agent, const NamePool& pool) override {
        const std::string prompt = render_prompt(agent, pool, tmpl_);
        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(pool.base_size()));
        for (NameId i = 0; i < pool.base_size(); ++i) labels.push_back(pool.label(i));

        ChatRequest request;
        request.model = model_id_;
        request.temperature = temperature_;
        request.session = "agent-" + std::to_string(agent.id);
        request.messages = {{"user", prompt}};

        for (int attempt = 0;; ++attempt) {
            const ChatResult result = endpoint_.complete(request);
            try {
                return parse_choice(result.text, labels);
            } catch (const ParseError&) {
                if (attempt >= parse_retries_)
                    throw StepError("step: unparseable model reply for agent " +
                                        std::to_string(agent.id),
                                    agent.id);
            }
        }
    }

private:
    ChatEndpoint& endpoint_;
    PromptTemplate tmpl_;
    std::string model_id_;
    double temperature_;
    int parse_retries_;
};

// Mock endpoint that implements the memory-coordination decision rule by
// reconstructing the agent's memory from the rendered prompt. With RNG
// streams matching the engine's per-agent streams, an engine run through
// this mock reproduces the pure-simulation trajectory byte for byte.
class MemoryPolicyMock : public ChatEndpoint {
public:
    MemoryPolicyMock(std::vector<std::string> pool_labels, PolicyParams params,
                     double s_success, double s_failure, std::uint64_t engine_seed)
        : labels_(std::move(pool_labels)),
          params_(std::move(params)),
          s_success_(s_success),
          s_failure_(s_failure),
          seed_(engine_seed) {}

    ChatResult complete(const ChatRequest& request) override {
        if (request.messages.empty())
            throw ProviderError("mock: empty message list", 400);
        const std::string& prompt = request.messages.back().content;

        AgentState ghost;
        ghost.policy = params_;
        ghost.memory = parse_history(prompt);

        auto [it, inserted] = sessions_.try_emplace(request.session, Rng(0));
        if (inserted) {
            const int agent_id = session_agent_id(request.session);
            it->second = Rng(derive_seed(seed_, stream::kAgent, static_cast<std::uint64_t>(agent_id)));
        }
        const NameId pick = memory_choose(view_of(ghost, static_cast<int>(labels_.size())),
                                          it->second);
        return ChatResult{labels_[static_cast<std::size_t>(pick)], 0};
    }

private:
    static int session_agent_id(const std::string& session) {
        const std::size_t dash = session.rfind('-');
        if (dash == std::string::npos)
            throw ProviderError("mock: session key without agent id", 400);
        return std::stoi(session.substr(dash + 1));
    }

    NameId label_to_id(const std::string& label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return static_cast<NameId>(i);
        throw ProviderError("mock: unknown label '" + label + "' in prompt", 400);
    }

    std::vector<InteractionRecord> parse_history(const std::string& prompt) const {
        std::vector<InteractionRecord> records;
        std::istringstream lines(prompt);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.rfind("Round ", 0) != 0) continue;
            // Round <n>: you picked <x>, your partner picked <y>. Outcome: ...
            const std::size_t you = line.find("you picked ");
            const std::size_t partner = line.find(", your partner picked ");
            const std::size_t outcome = line.find(". Outcome: ");
            if (you == std::string::npos || partner == std::string::npos ||
                outcome == std::string::npos)
                continue;
            InteractionRecord rec;
            rec.step = std::stol(line.substr(6));
            const std::size_t own_at = you + std::string("you picked ").size();
            rec.own_choice = label_to_id(line.substr(own_at, partner - own_at));
            const std::size_t partner_at = partner + std::string(", your partner picked ").size();
            rec.partner_choice = label_to_id(line.substr(partner_at, outcome - partner_at));
            rec.success = line.find("Outcome: match") != std::string::npos;
            rec.payoff = rec.success ? s_success_ : s_failure_;
            records.push_back(rec);
        }
        return records;
    }

    std::vector<std::string> labels_;
    PolicyParams params_;
    double s_success_;
    double s_failure_;
    std::uint64_t seed_;
    std::map<std::string, Rng> sessions_;
};

} // namespace ngsim
