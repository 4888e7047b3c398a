#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ngsim/errors.hpp"
#include "ngsim/names.hpp"
#include "ngsim/textutil.hpp"

namespace ngsim {

namespace detail {

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

inline std::string trim_punct(const std::string& text) {
    std::size_t lo = 0, hi = text.size();
    auto strip = [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == ',' ||
               c == '!' || c == '"' || c == '\'' || c == '`' || c == ':' || c == ';' ||
               c == '*';
    };
    while (lo < hi && strip(text[lo])) ++lo;
    while (hi > lo && strip(text[hi - 1])) --hi;
    return text.substr(lo, hi - lo);
}

// All positions where `label` occurs as a standalone word.
inline std::vector<std::size_t> word_occurrences(const std::string& text, const std::string& label) {
    std::vector<std::size_t> hits;
    std::size_t pos = 0;
    while ((pos = text.find(label, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
        const std::size_t end = pos + label.size();
        const bool right_ok = end >= text.size() || !is_word_char(text[end]);
        if (left_ok && right_ok) hits.push_back(pos);
        pos = end;
    }
    return hits;
}

inline bool quoted_at(const std::string& text, std::size_t pos, std::size_t len) {
    const bool left_quote = pos > 0 && (text[pos - 1] == '\'' || text[pos - 1] == '"' || text[pos - 1] == '`');
    const std::size_t end = pos + len;
    const bool right_quote = end < text.size() &&
        (text[end] == '\'' || text[end] == '"' || text[end] == '`');
    return left_quote && right_quote;
}

inline bool after_answer_marker(const std::string& text, std::size_t pos) {
    static const std::vector<std::string> markers = {
        "answer:", "answer is", "i choose", "i pick", "i will choose", "i will pick",
        "my choice is", "choice:", "final answer:",
    };
    const std::string lower = [&] {
        std::string s = text.substr(0, pos);
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    }();
    for (const auto& m : markers) {
        const std::size_t at = lower.rfind(m);
        if (at != std::string::npos && pos - (at + m.size()) <= 24) return true;
    }
    return false;
}

} // namespace detail

// Extraction ladder: (1) the whole reply is one label; (2) exactly one
// label appears as a standalone word; (3) exactly one label is quoted or
// follows an answer marker. A rung with zero or several candidates falls
// through; exhausting the ladder is a parse error.
inline NameId parse_choice(const std::string& text, const std::vector<std::string>& labels) {
    if (labels.empty()) throw ConfigError("pool: empty label set");

    const std::string bare = detail::trim_punct(text);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (bare == labels[i]) return static_cast<NameId>(i);

    std::vector<NameId> word_hits;
    std::vector<NameId> marked_hits;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto occurrences = detail::word_occurrences(text, labels[i]);
        if (!occurrences.empty()) word_hits.push_back(static_cast<NameId>(i));
        for (std::size_t pos : occurrences) {
            if (detail::quoted_at(text, pos, labels[i].size()) ||
                detail::after_answer_marker(text, pos)) {
                marked_hits.push_back(static_cast<NameId>(i));
                break;
            }
        }
    }
    if (word_hits.size() == 1) return word_hits[0];
    if (marked_hits.size() == 1) return marked_hits[0];
    throw ParseError("parse: could not extract exactly one name", text);
}

// ---------------------------------------------------------------------
// Meta-probe stance classification
// ---------------------------------------------------------------------

enum class Stance { Single, Population, Unclear };

inline const char* to_string(Stance s) {
    switch (s) {
        case Stance::Single: return "single";
        case Stance::Population: return "population";
        case Stance::Unclear: return "unclear";
    }
    return "?";
}

namespace detail {

inline const std::vector<std::string>& single_cues() {
    static const std::vector<std::string> cues = {
        "single player",     "single opponent",  "single other player",
        "one opponent",      "one other agent",  "one other player",
        "player 2",          "two players",      "two-player",
        "both players",      "same partner",     "a single partner",
        "single, repeated partner",
    };
    return cues;
}

inline const std::vector<std::string>& population_cues() {
    static const std::vector<std::string> cues = {
        "population",        "whole population",   "many players",
        "different opponent each round",           "different partners",
        "many different partners",                 "community",
        "a group of players",                      "randomly drawn member",
        "different partner each round",
    };
    return cues;
}

// Phrases that mention a population only to rule it out.
inline const std::vector<std::string>& population_negations() {
    static const std::vector<std::string> cues = {
        "not against a whole population", "not against a population",
        "no indication of a population",  "rather than a population",
        "not a population",               "not with a population",
        "rather than against a population",
    };
    return cues;
}

inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        current += c;
        if (c == '.' || c == '!' || c == '?') {
            out.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

inline bool is_hypothetical(const std::string& lower_sentence) {
    return lower_sentence.find("if ") != std::string::npos ||
           lower_sentence.rfind("if", 0) == 0;
}

} // namespace detail

// Rule-based opponent-cardinality classification of a model reply.
// Hypothetical sentences ("If it was against a population, ...") are
// skipped; explicit negations of a population reading count as evidence
// for the single-opponent stance.
inline Stance classify_stance(const std::string& text) {
    int single = 0;
    int population = 0;
    for (const auto& sentence : detail::split_sentences(text)) {
        std::string lower = detail::lowercase(sentence);
        if (detail::is_hypothetical(lower)) continue;
        for (const auto& neg : detail::population_negations()) {
            std::size_t at;
            while ((at = lower.find(neg)) != std::string::npos) {
                lower.erase(at, neg.size());
                ++single;
            }
        }
        for (const auto& cue : detail::single_cues())
            if (lower.find(cue) != std::string::npos) ++single;
        for (const auto& cue : detail::population_cues())
            if (lower.find(cue) != std::string::npos) ++population;
    }
    if (single > 0 && population == 0) return Stance::Single;
    if (population > 0 && single == 0) return Stance::Population;
    return Stance::Unclear;
}

} // namespace ngsim
