#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ngsim/errors.hpp"
#include "ngsim/experiments.hpp"

namespace ngsim {

// CSV emitters. Deterministic row order, header row always present.

inline std::string winners_csv(const WinnerHistogram& hist) {
    std::ostringstream out;
    out << "name,count\n";
    for (const auto& [label, count] : hist.counts) out << label << "," << count << "\n";
    return out.str();
}

inline std::string tipping_csv(const TippingCurve& curve) {
    std::ostringstream out;
    out << "p,takeover,runs\n";
    for (const auto& pt : curve.points)
        out << pt.p << "," << pt.takeover_freq << "," << pt.runs << "\n";
    return out.str();
}

inline std::string scaling_csv(const ScalingResult& result) {
    std::ostringstream out;
    out << "N,median_t,mean_t\n";
    for (const auto& pt : result.points)
        out << pt.n << "," << pt.median_t << "," << pt.mean_t << "\n";
    return out.str();
}

inline std::string frequencies_csv(const BiasProbeResult& result,
                                   const std::vector<std::string>& labels) {
    std::ostringstream out;
    out << "name,count\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << labels[i] << "," << result.counts[i] << "\n";
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output: cannot write '" + path + "'");
    out << content;
    if (!out) throw ConfigError("output: write failed for '" + path + "'");
}

} // namespace ngsim
