#include <stdexcept>

#include "ct/bottleneck.hpp"

namespace ct::bottleneck {

FinetuneResult finetune_reinforce(const Agent& ag, const ReinforceOptions& opts) {
    if (opts.generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (opts.games_per_gen < 1) throw std::invalid_argument("games_per_gen must be >= 1");
    ag.validate();

    FinetuneResult result;
    result.policy = ag.policy;
    auto& net = result.policy.net;
    double baseline = 0.0;
    const go::Player opponent = go::heuristic_opponent;

    for (int gen = 0; gen < opts.generations; ++gen) {
        int wins = 0;
        for (int g = 0; g < opts.games_per_gen; ++g) {
            std::vector<Step> steps;
            const go::Player learner = [&](const go::BoardState& s, Rng& rng) {
                const auto mask = go::move_mask(s);
                const int c = ag.concept_of(s).value;
                const go::Action a = act_on_concept(result.policy, c, mask, ActMode::Sample, rng);
                steps.push_back(Step{c, mask, a.index});
                return a;
            };
            const GameResult game = play_evaluation_game(learner, opponent, opts.seed, gen, g);
            const double ret = game.win ? 1.0 : -1.0;
            if (game.win) ++wins;
            const double advantage = ret - baseline;
            baseline = opts.baseline_decay * baseline + (1.0 - opts.baseline_decay) * ret;
            if (steps.empty() || advantage == 0.0) continue;
            const auto grad = reinforce_gradient<float>(net, steps, advantage);
            const auto lr = static_cast<float>(opts.lr);
            net.embedding -= lr * grad.embedding;
            net.hidden.weight -= lr * grad.hidden.weight;
            net.hidden.bias -= lr * grad.hidden.bias;
            net.out.weight -= lr * grad.out.weight;
            net.out.bias -= lr * grad.out.bias;
        }
        result.learning_curve.push_back(static_cast<double>(wins) / opts.games_per_gen);
    }
    result.policy.provenance = Provenance::Finetuned;
    return result;
}

}  // namespace ct::bottleneck
