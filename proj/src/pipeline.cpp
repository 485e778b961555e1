#include "ct/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace ct::pipeline {

AgentConfig AgentConfig::scaled(double fraction) const {
    AgentConfig c = *this;
    auto scale = [fraction](int v) { return std::max(1, static_cast<int>(std::lround(v * fraction))); };
    c.demo_games = scale(demo_games);
    c.encoder_epochs = scale(encoder_epochs);
    c.bottleneck_epochs = scale(bottleneck_epochs);
    if (rl_generations > 0) c.rl_generations = scale(rl_generations);
    return c;
}

bottleneck::TrainOptions AgentConfig::bottleneck_options() const {
    bottleneck::TrainOptions o;
    o.epochs = bottleneck_epochs;
    o.lr = bottleneck_lr;
    o.seed = bottleneck_seed;
    o.embedding_dim = embedding_dim;
    return o;
}

encoder::Encoder train_encoder_stage(const AgentConfig& cfg, const encoder::DemoDataset& demos) {
    encoder::TrainOptions opts;
    opts.epochs = cfg.encoder_epochs;
    opts.lr = cfg.encoder_lr;
    opts.seed = cfg.encoder_seed;
    return encoder::train_encoder(demos, opts);
}

TrainedAgent build_on_encoder(const AgentConfig& cfg, const encoder::Encoder& enc, encoder::DemoDataset demos) {
    TrainedAgent out;
    out.features = concepts::collect_features(enc, cfg.feature_games, cfg.feature_seed);
    const auto cm = concepts::fit_kmeans(out.features, cfg.k, cfg.kmeans_seed);
    auto trained = bottleneck::train_bottleneck(enc, cm, demos, cfg.bottleneck_options());
    out.cloned_policy = trained.policy;
    out.agent = bottleneck::Agent{enc, cm, std::move(trained.policy)};
    out.bottleneck_loss = std::move(trained.loss_history);
    if (cfg.rl_generations > 0) {
        bottleneck::ReinforceOptions ropts;
        ropts.generations = cfg.rl_generations;
        ropts.games_per_gen = cfg.rl_games_per_gen;
        ropts.lr = cfg.rl_lr;
        ropts.seed = cfg.rl_seed;
        auto tuned = bottleneck::finetune_reinforce(out.agent, ropts);
        out.agent.policy = std::move(tuned.policy);
        out.rl_curve = std::move(tuned.learning_curve);
    }
    out.demos = std::move(demos);
    return out;
}

TrainedAgent train_agent(const AgentConfig& cfg) {
    auto demos = encoder::collect_demos(cfg.demo_games, cfg.demo_seed);
    const auto enc = train_encoder_stage(cfg, demos);
    return build_on_encoder(cfg, enc, std::move(demos));
}

}  // namespace ct::pipeline
