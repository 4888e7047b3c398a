#pragma once

#include <stdexcept>
#include <string>

namespace ngsim {

// Invalid PopulationConfig / experiment configuration. Message names the field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Prompt rendering produced text that violates the isolation denylist.
class TemplateError : public std::runtime_error {
public:
    explicit TemplateError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model reply could not be reduced to exactly one pool label.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg, std::string raw)
        : std::runtime_error(msg), raw_text(std::move(raw)) {}
    std::string raw_text;
};

// Network-level failure after the retry budget was exhausted.
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

// The endpoint answered with a non-success status.
class ProviderError : public std::runtime_error {
public:
    ProviderError(const std::string& msg, int status_code)
        : std::runtime_error(msg), status(status_code) {}
    int status;
};

// A simulation step could not be completed; carries the offending agent.
class StepError : public std::runtime_error {
public:
    StepError(const std::string& msg, int agent)
        : std::runtime_error(msg), agent_id(agent) {}
    int agent_id;
};

} // namespace ngsim
