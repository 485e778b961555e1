#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "ct/analysis.hpp"
#include "ct/stats.hpp"

namespace ct::analysis {

namespace {

struct SampledState {
    go::BoardState state;
    int concept_id = 0;
    go::LegalMask mask;
};

/// Unique (by position hash) agent-to-move states from greedy games against
/// the heuristic opponent, then a uniform sample of n of them.
std::vector<SampledState> sample_states(const bottleneck::Agent& ag, int n, std::uint64_t seed) {
    std::vector<SampledState> pool;
    std::unordered_set<std::uint64_t> seen;
    const go::Player agent = [&ag](const go::BoardState& s, Rng& rng) {
        return bottleneck::act(ag, s, bottleneck::ActMode::Greedy, rng);
    };
    const go::Player opponent = go::heuristic_opponent;
    const std::size_t wanted = static_cast<std::size_t>(n) * 3;
    const int max_games = std::max(20, n * 10);
    for (int g = 0; g < max_games && pool.size() < wanted; ++g) {
        const bool agent_black = g % 2 == 0;
        const go::Color agent_color = agent_black ? go::Color::Black : go::Color::White;
        bottleneck::play_evaluation_game(agent, opponent, seed, 0, g, [&](const go::BoardState& s, go::Action) {
            if (s.to_move() != agent_color) return;
            const std::uint64_t h = mix64(s.key().hash() ^ static_cast<std::uint64_t>(s.to_move()));
            if (!seen.insert(h).second) return;
            pool.push_back(SampledState{s, ag.concept_of(s).value, go::move_mask(s)});
        });
    }
    Rng rng(derive_seed(seed, {1}));
    rng.shuffle(pool);
    if (pool.size() > static_cast<std::size_t>(n)) pool.resize(static_cast<std::size_t>(n));
    return pool;
}

/// n distinct concepts drawn uniformly from [0, k) without `excluded`.
std::vector<int> draw_alternatives(int k, int excluded, int n, Rng& rng) {
    std::vector<int> others;
    for (int c = 0; c < k; ++c)
        if (c != excluded) others.push_back(c);
    for (int i = 0; i < n; ++i) {
        const auto j = i + static_cast<int>(rng.below(others.size() - static_cast<std::size_t>(i)));
        std::swap(others[static_cast<std::size_t>(i)], others[static_cast<std::size_t>(j)]);
    }
    others.resize(static_cast<std::size_t>(n));
    return others;
}

int greedy(const bottleneck::BottleneckPolicy& p, int concept_id, const go::LegalMask& mask) {
    return nn::masked_argmax<float>(p.net.logits(concept_id), mask);
}

}  // namespace

bottleneck::BottleneckPolicy label_shuffled_policy(const bottleneck::Agent& ag, const encoder::DemoDataset& demos,
                                                   const bottleneck::TrainOptions& opts, std::uint64_t shuffle_seed) {
    std::vector<int> labels;
    labels.reserve(demos.size());
    for (const auto& s : demos.samples) labels.push_back(concepts::assign(ag.concepts, ag.encoder.encode(s.obs)).value);
    Rng rng(shuffle_seed);
    rng.shuffle(labels);
    return bottleneck::train_bottleneck_on_concepts(labels, demos.samples, ag.concepts.k, opts).policy;
}

InterventionReport summarize_interventions(std::vector<InterventionRecord> records, int alternatives_per_state,
                                           double p0, int null_draws) {
    InterventionReport r;
    r.n_states = static_cast<int>(records.size());
    r.alternatives_per_state = alternatives_per_state;
    r.total_interventions = static_cast<long>(r.n_states) * alternatives_per_state;
    for (const auto& rec : records) {
        int changes = 0;
        for (int a : rec.actions) changes += a != rec.base_action ? 1 : 0;
        r.change_count += changes;
        r.per_state_change_rates.push_back(static_cast<double>(changes) / alternatives_per_state);
    }
    r.change_rate = r.total_interventions > 0
                        ? static_cast<double>(r.change_count) / static_cast<double>(r.total_interventions)
                        : 0.0;
    if (!r.per_state_change_rates.empty()) {
        std::vector<double> sorted = r.per_state_change_rates;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size();
        r.median_rate = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        r.rate_std = stats::sample_std(r.per_state_change_rates);
    }
    r.p0 = p0;
    r.null_draws = null_draws;
    r.p_value = r.total_interventions > 0 ? stats::binomial_test(r.change_count, r.total_interventions, p0) : 1.0;
    r.records = std::move(records);
    return r;
}

InterventionReport intervene(const bottleneck::Agent& ag, const bottleneck::BottleneckPolicy& null_policy,
                             const InterventionOptions& opts) {
    ag.validate();
    const int k = ag.concepts.k;
    if (opts.n_alternatives >= k) throw std::invalid_argument("n_alternatives must be < K");
    if (opts.n_alternatives < 1 || opts.n_states < 1) throw std::invalid_argument("need >= 1 state and alternative");
    if (null_policy.k() != k) throw std::invalid_argument("null policy has a different K");

    const auto states = sample_states(ag, opts.n_states, opts.seed);
    Rng rng(derive_seed(opts.seed, {2}));
    std::vector<InterventionRecord> records;
    for (const auto& st : states) {
        InterventionRecord rec;
        rec.position_hash = st.state.key().hash();
        rec.true_concept = st.concept_id;
        rec.base_action = greedy(ag.policy, st.concept_id, st.mask);
        rec.alternatives = opts.self_override ? std::vector<int>(static_cast<std::size_t>(opts.n_alternatives), st.concept_id)
                                              : draw_alternatives(k, st.concept_id, opts.n_alternatives, rng);
        for (int c : rec.alternatives) rec.actions.push_back(greedy(ag.policy, c, st.mask));
        records.push_back(std::move(rec));
    }

    // Null: same states, two distinct uniform concepts, label-shuffled policy.
    Rng null_rng(derive_seed(opts.seed, {3}));
    long null_changes = 0;
    for (int d = 0; d < opts.null_draws && !states.empty(); ++d) {
        const auto& st = states[static_cast<std::size_t>(null_rng.below(states.size()))];
        const int a = static_cast<int>(null_rng.below(static_cast<std::uint64_t>(k)));
        int b = static_cast<int>(null_rng.below(static_cast<std::uint64_t>(k - 1)));
        if (b >= a) ++b;
        if (greedy(null_policy, a, st.mask) != greedy(null_policy, b, st.mask)) ++null_changes;
    }
    // Half-count smoothing keeps p0 strictly inside (0, 1).
    const double p0 = (static_cast<double>(null_changes) + 0.5) / (static_cast<double>(opts.null_draws) + 1.0);
    return summarize_interventions(std::move(records), opts.n_alternatives, p0, opts.null_draws);
}

}  // namespace ct::analysis
