#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ct/concepts.hpp"
#include "ct/encoder.hpp"
#include "ct/nn.hpp"

namespace ct::bottleneck {

inline constexpr int kEmbeddingDim = 64;
inline constexpr int kHiddenDim = 128;

/// Embedding lookup followed by a one-hidden-layer MLP over the 50 actions.
template <class T>
struct PolicyNet {
    nn::Mat<T> embedding;  // k x d, row c is the embedding of concept_id c
    nn::Dense<T> hidden;   // d -> hidden
    nn::Dense<T> out;      // hidden -> 50

    static PolicyNet init(int k, int embedding_dim, int hidden_dim, Rng& rng) {
        PolicyNet n;
        n.embedding = nn::glorot_uniform<T>(k, embedding_dim, k, embedding_dim, rng);
        n.hidden = nn::Dense<T>::init(embedding_dim, hidden_dim, rng);
        n.out = nn::Dense<T>::init(hidden_dim, go::kNumActions, rng);
        return n;
    }

    int k() const { return static_cast<int>(embedding.rows()); }

    nn::Mat<T> gather(std::span<const int> concepts) const {
        nn::Mat<T> x(embedding.cols(), static_cast<Eigen::Index>(concepts.size()));
        for (std::size_t j = 0; j < concepts.size(); ++j)
            x.col(static_cast<Eigen::Index>(j)) = embedding.row(concepts[j]).transpose();
        return x;
    }

    nn::Mat<T> logits(std::span<const int> concepts) const {
        return out.forward(nn::relu<T>(hidden.forward(gather(concepts))));
    }

    nn::Vec<T> logits(int concept_id) const {
        const int c[1] = {concept_id};
        return logits(std::span<const int>(c)).col(0);
    }

    struct Gradient {
        double loss = 0.0;
        nn::Mat<T> embedding;
        nn::DenseGrad<T> hidden;
        nn::DenseGrad<T> out;
    };

    /// Weighted masked cross-entropy over (concept_id, action) pairs and its gradient.
    Gradient loss_and_grad(std::span<const int> concepts, std::span<const go::LegalMask> masks,
                           std::span<const int> actions, std::span<const double> weights) const {
        const nn::Mat<T> x = gather(concepts);
        const nn::Mat<T> pre = hidden.forward(x);
        const nn::Mat<T> h = nn::relu<T>(pre);
        auto ce = nn::weighted_masked_cross_entropy<T>(out.forward(h), masks, actions, weights);
        Gradient g;
        g.loss = ce.loss;
        g.out = nn::dense_backward<T>(h, ce.dlogits);
        const nn::Mat<T> dpre = nn::relu_backward<T>(pre, out.weight.transpose() * ce.dlogits);
        g.hidden = nn::dense_backward<T>(x, dpre);
        const nn::Mat<T> dx = hidden.weight.transpose() * dpre;
        g.embedding = nn::Mat<T>::Zero(embedding.rows(), embedding.cols());
        for (std::size_t j = 0; j < concepts.size(); ++j)
            g.embedding.row(concepts[j]) += dx.col(static_cast<Eigen::Index>(j)).transpose();
        return g;
    }

    friend bool operator==(const PolicyNet&, const PolicyNet&) = default;
};

enum class Provenance { Trained, Transferred, Finetuned };

const char* provenance_name(Provenance p);
Provenance parse_provenance(const std::string& s);

struct BottleneckPolicy {
    PolicyNet<float> net;
    std::uint64_t seed = 0;
    Provenance provenance = Provenance::Trained;

    int k() const { return net.k(); }
    friend bool operator==(const BottleneckPolicy&, const BottleneckPolicy&) = default;
};

struct Agent {
    encoder::Encoder encoder;
    concepts::ConceptModel concepts;
    BottleneckPolicy policy;

    /// Throws std::invalid_argument when the parts do not fit together.
    void validate() const;
    concepts::ConceptId concept_of(const go::BoardState& s) const;
};

enum class ActMode { Greedy, Sample };

/// Action of a policy for a given concept_id under a legal mask.
go::Action act_on_concept(const BottleneckPolicy& p, int concept_id, const go::LegalMask& mask, ActMode mode, Rng& rng);

go::Action act(const Agent& ag, const go::BoardState& s, ActMode mode, Rng& rng);

/// The agent as a go::Player. The agent is copied into the closure.
go::Player as_player(Agent ag, ActMode mode = ActMode::Greedy);

struct TrainOptions {
    int epochs = 10;
    double lr = 0.01;
    std::uint64_t seed = 0;
    int batch_size = 32;
    int embedding_dim = kEmbeddingDim;
    int hidden_dim = kHiddenDim;
    double momentum = 0.9;
};

struct TrainResult {
    BottleneckPolicy policy;
    std::vector<double> loss_history;  // mean loss per epoch
};

/// Behavioral cloning on (concept_id(obs), action) pairs; encoder and centroids stay frozen.
TrainResult train_bottleneck(const encoder::Encoder& enc, const concepts::ConceptModel& cm,
                             const encoder::DemoDataset& data, const TrainOptions& opts);

/// Same as train_bottleneck with the concept_id of each sample given explicitly.
TrainResult train_bottleneck_on_concepts(std::span<const int> concept_ids, std::span<const encoder::Sample> samples,
                                         int k, const TrainOptions& opts);

struct ReinforceOptions {
    int generations = 10;
    int games_per_gen = 20;
    double lr = 0.003;
    std::uint64_t seed = 0;
    double baseline_decay = 0.9;
};

struct FinetuneResult {
    BottleneckPolicy policy;
    std::vector<double> learning_curve;  // win rate of each generation's games
};

/// REINFORCE against the heuristic opponent with +1/-1 returns and a running-mean baseline.
FinetuneResult finetune_reinforce(const Agent& ag, const ReinforceOptions& opts);

/// One recorded agent decision inside an episode.
struct Step {
    int concept_id = 0;
    go::LegalMask mask;
    int action = 0;
};

/// Gradient of -sum_t advantage * log pi(a_t | c_t) (descent direction for REINFORCE).
template <class T>
typename PolicyNet<T>::Gradient reinforce_gradient(const PolicyNet<T>& net, std::span<const Step> steps,
                                                   double advantage) {
    std::vector<int> cs, as;
    std::vector<go::LegalMask> ms;
    for (const auto& s : steps) {
        cs.push_back(s.concept_id);
        ms.push_back(s.mask);
        as.push_back(s.action);
    }
    const std::vector<double> w(steps.size(), advantage);
    return net.loss_and_grad(cs, ms, as, w);
}

struct GameResult {
    bool win = false;
    int moves = 0;
};

/// Game `game_index` of seed `seed_index`: the agent plays Black on even games,
/// White on odd ones, with per-game streams derived from base_seed.
GameResult play_evaluation_game(const go::Player& agent, const go::Player& opponent, std::uint64_t base_seed,
                                int seed_index, int game_index, const go::MoveObserver& observer = {});

struct EvaluationReport {
    std::vector<double> win_rates;  // one per seed
    std::vector<int> wins;
    int games_per_seed = 0;
    int n_games = 0;
    double mean = 0.0;
    double std = 0.0;
    double mean_game_length = 0.0;
    std::string opponent;
    std::optional<double> t_statistic;  // absent when the per-seed rates have zero variance
    std::optional<double> p_value;
    std::uint64_t base_seed = 0;
};

EvaluationReport evaluate_player(const go::Player& agent, const go::Player& opponent, const std::string& opponent_tag,
                                 int n_seeds, int games_per_seed, std::uint64_t base_seed);

EvaluationReport evaluate(const Agent& ag, const go::Player& opponent, const std::string& opponent_tag, int n_seeds,
                          int games_per_seed, std::uint64_t base_seed);

}  // namespace ct::bottleneck
