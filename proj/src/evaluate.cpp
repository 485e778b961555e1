#include <stdexcept>

#include "ct/bottleneck.hpp"
#include "ct/stats.hpp"

namespace ct::bottleneck {

GameResult play_evaluation_game(const go::Player& agent, const go::Player& opponent, std::uint64_t base_seed,
                                int seed_index, int game_index, const go::MoveObserver& observer) {
    const auto si = static_cast<std::uint64_t>(seed_index);
    const auto gi = static_cast<std::uint64_t>(game_index);
    Rng agent_rng(derive_seed(base_seed, {si, gi, 0}));
    Rng opponent_rng(derive_seed(base_seed, {si, gi, 1}));
    const bool agent_black = game_index % 2 == 0;
    const go::Outcome out = agent_black ? go::play_out(agent, opponent, agent_rng, opponent_rng, observer)
                                        : go::play_out(opponent, agent, opponent_rng, agent_rng, observer);
    const go::Color agent_color = agent_black ? go::Color::Black : go::Color::White;
    return GameResult{out.result.winner == agent_color, out.moves};
}

EvaluationReport evaluate_player(const go::Player& agent, const go::Player& opponent, const std::string& opponent_tag,
                                 int n_seeds, int games_per_seed, std::uint64_t base_seed) {
    if (n_seeds < 1 || games_per_seed < 1) throw std::invalid_argument("evaluate: need >= 1 seed and game");
    EvaluationReport r;
    r.opponent = opponent_tag;
    r.games_per_seed = games_per_seed;
    r.base_seed = base_seed;
    long total_moves = 0;
    for (int s = 0; s < n_seeds; ++s) {
        int wins = 0;
        for (int g = 0; g < games_per_seed; ++g) {
            const GameResult res = play_evaluation_game(agent, opponent, base_seed, s, g);
            wins += res.win ? 1 : 0;
            total_moves += res.moves;
        }
        r.wins.push_back(wins);
        r.win_rates.push_back(static_cast<double>(wins) / games_per_seed);
    }
    r.n_games = n_seeds * games_per_seed;
    r.mean = stats::mean(r.win_rates);
    r.std = stats::sample_std(r.win_rates);
    r.mean_game_length = static_cast<double>(total_moves) / r.n_games;
    if (n_seeds >= 2 && r.std > 0.0) {
        const auto t = stats::t_test_one_sample(r.win_rates, 0.5);
        r.t_statistic = t.t;
        r.p_value = t.p;
    }
    return r;
}

EvaluationReport evaluate(const Agent& ag, const go::Player& opponent, const std::string& opponent_tag, int n_seeds,
                          int games_per_seed, std::uint64_t base_seed) {
    ag.validate();
    const go::Player player = [&ag](const go::BoardState& s, Rng& rng) { return act(ag, s, ActMode::Greedy, rng); };
    return evaluate_player(player, opponent, opponent_tag, n_seeds, games_per_seed, base_seed);
}

}  // namespace ct::bottleneck
