#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ngsim/errors.hpp"

namespace ngsim {

// Index of an interned name. The fixed pool occupies [0, W); freshly
// invented names (minimal naming game) receive indices >= W.
using NameId = int;
inline constexpr NameId kNoName = -1;

// Interned, stable name pool. Labels are payoff-equivalent tokens; only
// the identity of a name matters to the dynamics.
class NamePool {
public:
    explicit NamePool(std::vector<std::string> labels) {
        for (auto& label : labels) intern(std::move(label));
        base_size_ = size();
    }

    // Default pool: single letters A.., then A1, B1, ... past 26.
    static NamePool with_default_labels(int w) {
        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(w));
        for (int i = 0; i < w; ++i) labels.push_back(default_label(i));
        return NamePool(std::move(labels));
    }

    static std::string default_label(int i) {
        std::string s(1, static_cast<char>('A' + i % 26));
        if (i >= 26) s += std::to_string(i / 26);
        return s;
    }

    // Number of names in the fixed pool (W).
    int base_size() const { return base_size_; }
    // Total interned names, including inventions.
    int size() const { return static_cast<int>(labels_.size()); }

    const std::string& label(NameId id) const { return labels_.at(static_cast<std::size_t>(id)); }

    NameId find(const std::string& label) const {
        auto it = index_.find(label);
        return it == index_.end() ? kNoName : it->second;
    }

    // Fresh never-before-used name for the minimal-NG invention rule.
    NameId invent() {
        return intern("n" + std::to_string(labels_.size()));
    }

private:
    NameId intern(std::string label) {
        if (label.empty()) throw ConfigError("pool: empty label");
        auto [it, inserted] = index_.emplace(std::move(label), static_cast<NameId>(labels_.size()));
        if (!inserted) throw ConfigError("pool: duplicate label '" + it->first + "'");
        labels_.push_back(it->first);
        return it->second;
    }

    std::vector<std::string> labels_;
    std::unordered_map<std::string, NameId> index_;
    int base_size_ = 0;
};

} // namespace ngsim
