#pragma once

// Flat key = value run configuration.
//
// Grammar: one `key = value` per line; blank lines and lines starting with
// '#' or ';' are ignored; whitespace around keys and values is trimmed.
// Unknown keys, duplicate keys and values of the wrong type are errors.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "ct/pipeline.hpp"

namespace ct::config {

/// Invalid configuration (bad key, value or combination).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    pipeline::AgentConfig agent;

    // Second agent for transfer experiments: same recipe, every seed except
    // the k-means seed shifted by target_seed_offset, own demo budget.
    std::uint64_t target_seed_offset = 1;
    int target_demo_games = 250;

    std::string opponent = "heuristic";  // heuristic | random
    double komi = 8.5;

    int eval_seeds = 5;
    int eval_games = 100;
    std::uint64_t eval_base_seed = 1;

    /// Target agent recipe derived from `agent`.
    pipeline::AgentConfig target_agent() const;
};

/// Sets one key from its text value.
void set(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse(const std::string& text);
RunConfig load(const std::filesystem::path& path);

/// Every key with its current value, in the file grammar.
std::string format(const RunConfig& cfg);

}  // namespace ct::config
