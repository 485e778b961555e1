#pragma once

// Concept validation experiments: causal intervention, ablation and the K sweep.

#include <cstdint>
#include <span>
#include <vector>

#include "ct/bottleneck.hpp"
#include "ct/pipeline.hpp"

namespace ct::analysis {

struct InterventionRecord {
    std::uint64_t position_hash = 0;
    int true_concept = 0;
    int base_action = 0;
    std::vector<int> alternatives;
    std::vector<int> actions;  // greedy action under each alternative
};

struct InterventionReport {
    int n_states = 0;
    int alternatives_per_state = 0;
    long total_interventions = 0;
    long change_count = 0;
    double change_rate = 0.0;
    std::vector<double> per_state_change_rates;
    double median_rate = 0.0;
    double rate_std = 0.0;
    double p0 = 0.0;
    int null_draws = 0;
    double p_value = 1.0;
    std::vector<InterventionRecord> records;
};

struct InterventionOptions {
    int n_states = 500;
    int n_alternatives = 5;
    std::uint64_t seed = 0;
    int null_draws = 10000;
    /// Test hook: every override uses the state's own concept_id.
    bool self_override = false;
};

/// Bottleneck trained on the agent's demonstrations with concept_id labels
/// shuffled across samples, so that the concept_id carries no state information.
bottleneck::BottleneckPolicy label_shuffled_policy(const bottleneck::Agent& ag, const encoder::DemoDataset& demos,
                                                   const bottleneck::TrainOptions& opts, std::uint64_t shuffle_seed);

/// Overrides each sampled state's concept_id with distinct alternatives and counts
/// greedy-action changes. p0 is the change probability of `null_policy` for two
/// distinct uniformly drawn concepts on the same states.
InterventionReport intervene(const bottleneck::Agent& ag, const bottleneck::BottleneckPolicy& null_policy,
                             const InterventionOptions& opts);

/// Rebuilds the summary fields of a report from its per-state records.
InterventionReport summarize_interventions(std::vector<InterventionRecord> records, int alternatives_per_state,
                                           double p0, int null_draws);

struct AblationRow {
    int concept_id = -1;  // -1 when every concept_id is ablated at once
    double frequency = 0.0;
    double baseline_win_rate = 0.0;
    double ablated_win_rate = 0.0;
    double drop = 0.0;
    std::vector<std::uint8_t> outcomes;  // 1 = agent win, per game
};

struct AblationReport {
    int games = 0;
    double baseline_win_rate = 0.0;
    std::vector<std::uint8_t> baseline_outcomes;
    std::vector<double> frequencies;  // usage of every concept_id over the baseline games
    std::vector<AblationRow> rows;
};

struct AblationOptions {
    std::vector<int> concepts;  // empty = every concept_id, one at a time
    bool all_at_once = false;   // ablate the whole list (or all concepts) simultaneously
    int games_per_concept = 500;
    std::uint64_t seed = 0;
};

/// Replays evaluation games against the heuristic opponent with the ablated
/// concept_id's moves replaced by uniform random legal moves. Games are paired
/// with the baseline by seed stream.
AblationReport ablate(const bottleneck::Agent& ag, const AblationOptions& opts);

/// Standard error of the mean per-game difference of two paired outcome lists.
double paired_standard_error(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

struct SweepRow {
    int k = 0;
    double direct_win_rate = 0.0;
    double transfer_win_rate = 0.0;
};

struct SweepConfig {
    pipeline::AgentConfig source;
    pipeline::AgentConfig target;
    int eval_seeds = 3;
    int eval_games = 50;
    std::uint64_t eval_seed = 0;
};

/// For each k: trains source and target agents, evaluates the source directly
/// and the Hungarian transfer source -> target, both against the heuristic opponent.
std::vector<SweepRow> k_sweep(std::span<const int> k_values, const SweepConfig& cfg);

}  // namespace ct::analysis
