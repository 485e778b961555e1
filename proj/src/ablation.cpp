#include <cmath>
#include <stdexcept>

#include "ct/analysis.hpp"
#include "ct/stats.hpp"

namespace ct::analysis {

double paired_standard_error(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("paired_standard_error: bad lengths");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    return stats::sample_std(diff) / std::sqrt(static_cast<double>(diff.size()));
}

namespace {

double win_rate(const std::vector<std::uint8_t>& outcomes) {
    double w = 0.0;
    for (auto o : outcomes) w += o;
    return w / static_cast<double>(outcomes.size());
}

/// Plays the paired game series with the given concepts ablated.
std::vector<std::uint8_t> run_games(const bottleneck::Agent& ag, const std::vector<char>& ablated, int games,
                                    std::uint64_t seed, std::vector<long>* usage) {
    const go::Player agent = [&](const go::BoardState& s, Rng& rng) {
        const auto c = ag.concept_of(s).value;
        if (usage) ++(*usage)[static_cast<std::size_t>(c)];
        if (ablated[static_cast<std::size_t>(c)]) return go::random_opponent(s, rng);
        return bottleneck::act_on_concept(ag.policy, c, go::move_mask(s), bottleneck::ActMode::Greedy, rng);
    };
    const go::Player opponent = go::heuristic_opponent;
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(games));
    for (int g = 0; g < games; ++g)
        out.push_back(bottleneck::play_evaluation_game(agent, opponent, seed, 0, g).win ? 1 : 0);
    return out;
}

}  // namespace

AblationReport ablate(const bottleneck::Agent& ag, const AblationOptions& opts) {
    ag.validate();
    if (opts.games_per_concept < 1) throw std::invalid_argument("games_per_concept must be >= 1");
    const int k = ag.concepts.k;
    std::vector<int> targets = opts.concepts;
    if (targets.empty())
        for (int c = 0; c < k; ++c) targets.push_back(c);
    for (int c : targets)
        if (c < 0 || c >= k) throw std::invalid_argument("ablate: concept id out of range");

    AblationReport r;
    r.games = opts.games_per_concept;
    std::vector<long> usage(static_cast<std::size_t>(k), 0);
    const std::vector<char> none(static_cast<std::size_t>(k), 0);
    r.baseline_outcomes = run_games(ag, none, r.games, opts.seed, &usage);
    r.baseline_win_rate = win_rate(r.baseline_outcomes);
    long total = 0;
    for (long u : usage) total += u;
    for (long u : usage) r.frequencies.push_back(total > 0 ? static_cast<double>(u) / static_cast<double>(total) : 0.0);

    auto add_row = [&](int concept_id, const std::vector<char>& mask, double frequency) {
        AblationRow row;
        row.concept_id = concept_id;
        row.frequency = frequency;
        row.baseline_win_rate = r.baseline_win_rate;
        row.outcomes = run_games(ag, mask, r.games, opts.seed, nullptr);
        row.ablated_win_rate = win_rate(row.outcomes);
        row.drop = row.baseline_win_rate - row.ablated_win_rate;
        r.rows.push_back(std::move(row));
    };

    if (opts.all_at_once) {
        std::vector<char> mask(static_cast<std::size_t>(k), 0);
        double freq = 0.0;
        for (int c : targets) {
            mask[static_cast<std::size_t>(c)] = 1;
            freq += r.frequencies[static_cast<std::size_t>(c)];
        }
        add_row(-1, mask, freq);
    } else {
        for (int c : targets) {
            std::vector<char> mask(static_cast<std::size_t>(k), 0);
            mask[static_cast<std::size_t>(c)] = 1;
            add_row(c, mask, r.frequencies[static_cast<std::size_t>(c)]);
        }
    }
    return r;
}

}  // namespace ct::analysis
