#pragma once

#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ngsim/types.hpp"

namespace ngsim {

inline std::string hash_hex(std::uint64_t h) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

// JSONL trajectory format: a header object with config hash and seed,
// then one object per step with fields exactly
// (step, a, b, choice_a, choice_b, success). Stable across versions.
inline std::string trajectory_to_jsonl(const Trajectory& traj) {
    using json = nlohmann::ordered_json;
    std::string out;
    json header;
    header["config_hash"] = hash_hex(traj.config_hash);
    header["seed"] = traj.seed;
    out += header.dump();
    out += '\n';
    auto label_of = [&traj](NameId id) -> std::string {
        if (id == kNoName) return "";
        return traj.labels.at(static_cast<std::size_t>(id));
    };
    for (const auto& rec : traj.steps) {
        json line;
        line["step"] = rec.step;
        line["a"] = rec.agent_a;
        line["b"] = rec.agent_b;
        line["choice_a"] = label_of(rec.choice_a);
        line["choice_b"] = label_of(rec.choice_b);
        line["success"] = rec.success;
        out += line.dump();
        out += '\n';
    }
    return out;
}

} // namespace ngsim
