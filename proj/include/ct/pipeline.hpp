#pragma once

#include <cstdint>
#include <vector>

#include "ct/bottleneck.hpp"

namespace ct::pipeline {

/// Everything needed to train one agent end to end.
struct AgentConfig {
    int demo_games = 300;
    std::uint64_t demo_seed = 1;
    int encoder_epochs = 8;
    double encoder_lr = 0.01;
    std::uint64_t encoder_seed = 1;
    int feature_games = 40;
    std::uint64_t feature_seed = 1;
    int k = concepts::kDefaultK;
    std::uint64_t kmeans_seed = concepts::kDefaultFitSeed;
    int bottleneck_epochs = 20;
    double bottleneck_lr = 0.01;
    std::uint64_t bottleneck_seed = 1;
    int embedding_dim = bottleneck::kEmbeddingDim;
    // REINFORCE stage after cloning; 0 generations skips it.
    int rl_generations = 40;
    int rl_games_per_gen = 50;
    double rl_lr = 0.003;
    std::uint64_t rl_seed = 1;

    /// Same agent with demo games, epoch budgets and RL generations scaled by
    /// `fraction` (at least 1 each unless the stage is disabled).
    AgentConfig scaled(double fraction) const;

    /// Bottleneck cloning options derived from this config.
    bottleneck::TrainOptions bottleneck_options() const;
};

struct TrainedAgent {
    bottleneck::Agent agent;
    encoder::DemoDataset demos;
    concepts::FeatureMatrix features;
    std::vector<double> bottleneck_loss;
    /// Policy after behavioral cloning, before the REINFORCE stage.
    bottleneck::BottleneckPolicy cloned_policy;
    std::vector<double> rl_curve;
};

encoder::Encoder train_encoder_stage(const AgentConfig& cfg, const encoder::DemoDataset& demos);

/// Discovery, cloning and REINFORCE stages on a given encoder.
TrainedAgent build_on_encoder(const AgentConfig& cfg, const encoder::Encoder& enc, encoder::DemoDataset demos);

TrainedAgent train_agent(const AgentConfig& cfg);

}  // namespace ct::pipeline
