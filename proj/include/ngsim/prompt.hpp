#pragma once

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "ngsim/errors.hpp"
#include "ngsim/names.hpp"
#include "ngsim/rng.hpp"
#include "ngsim/textutil.hpp"
#include "ngsim/types.hpp"

namespace ngsim {

// Two-player framing for external model agents. The rendered text must
// read as a game against one partner: nothing about how partners are
// drawn, how many exist, or any aggregate of their behavior may appear.
struct PromptTemplate {
    std::string system_text =
        "You are a player in a multi-round name matching game. Answer with a "
        "single name and nothing else.";
    int memory_render_limit = 16;  // at most this many recent records shown
    double s_success = 1.0;
    double s_failure = -1.0;
    std::uint64_t shuffle_seed = 0;  // order of the rendered name options
};

namespace detail {

inline const std::vector<std::string>& population_denylist() {
    static const std::vector<std::string> words = {
        "population", "other players", "many players", "all players",
        "everyone",   "agents",        "opponents",    "community",
        "majority",   "aggregate",     "whole group",
    };
    return words;
}

inline bool mentions_count_of_players(const std::string& lower) {
    // digit(s) directly followed by "players"/"partners"/"opponents"
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(lower[i]))) continue;
        std::size_t j = i;
        while (j < lower.size() && std::isdigit(static_cast<unsigned char>(lower[j]))) ++j;
        while (j < lower.size() && lower[j] == ' ') ++j;
        for (const char* w : {"players", "partners", "opponents"})
            if (lower.compare(j, std::string(w).size(), w) == 0) return true;
        i = j;
    }
    return false;
}

} // namespace detail

// Returns the offending phrase, or empty when the text is clean.
inline std::string denylist_violation(const std::string& text) {
    const std::string lower = detail::lowercase(text);
    for (const auto& word : detail::population_denylist())
        if (lower.find(word) != std::string::npos) return word;
    if (detail::mentions_count_of_players(lower)) return "player count";
    return "";
}

inline std::vector<std::string> rendered_pool_order(const NamePool& pool,
                                                    const PromptTemplate& tmpl) {
    std::vector<std::string> order;
    order.reserve(static_cast<std::size_t>(pool.base_size()));
    for (NameId i = 0; i < pool.base_size(); ++i) order.push_back(pool.label(i));
    Rng rng(derive_seed(tmpl.shuffle_seed, 0x9d5f));
    rng.shuffle(order);
    return order;
}

namespace detail {

inline std::string format_points(double v) {
    std::ostringstream out;
    if (v == static_cast<long>(v))
        out << (v >= 0 ? "+" : "") << static_cast<long>(v);
    else
        out << (v >= 0 ? "+" : "") << v;
    return out.str();
}

} // namespace detail

// Pure function of (agent state, template, pool): identical inputs yield
// identical bytes. Fails closed on any denylist hit.
inline std::string render_prompt(const AgentState& agent, const NamePool& pool,
                                 const PromptTemplate& tmpl) {
    std::ostringstream out;
    out << tmpl.system_text << "\n\n";
    out << "Rules: each round, you and your partner simultaneously pick one "
           "name from the options below. If you both pick the same name, you "
           "each score " << detail::format_points(tmpl.s_success)
        << " points; if you pick different names, you each score "
        << detail::format_points(tmpl.s_failure) << " points.\n\n";
    out << "Name options: ";
    const auto order = rendered_pool_order(pool, tmpl);
    for (std::size_t i = 0; i < order.size(); ++i)
        out << (i ? ", " : "") << order[i];
    out << "\n";

    const int limit = std::min<int>(tmpl.memory_render_limit,
                                    static_cast<int>(agent.memory.size()));
    if (limit > 0) {
        out << "\nYour recent rounds (oldest first):\n";
        const std::size_t first = agent.memory.size() - static_cast<std::size_t>(limit);
        for (std::size_t i = first; i < agent.memory.size(); ++i) {
            const auto& rec = agent.memory[i];
            out << "Round " << rec.step << ": you picked " << pool.label(rec.own_choice)
                << ", your partner picked " << pool.label(rec.partner_choice)
                << ". Outcome: " << (rec.success ? "match" : "mismatch")
                << " (payoff " << detail::format_points(rec.payoff) << ").\n";
        }
    }
    out << "\nWhich name do you pick this round? Reply with exactly one name "
           "from the options.\n";

    std::string text = out.str();
    if (const std::string hit = denylist_violation(text); !hit.empty())
        throw TemplateError("prompt: rendered text mentions '" + hit + "'");
    return text;
}

} // namespace ngsim
