#pragma once

#include <cstdint>
#include <vector>

#include "ct/go.hpp"
#include "ct/nn.hpp"

namespace ct::encoder {

inline constexpr int kFeatureDim = 128;
inline constexpr int kHiddenDim = 256;

using FeatureVector = Eigen::VectorXf;

/// 147 -> hidden (ReLU) -> features (linear) -> 50-way action head.
template <class T>
struct EncoderNet {
    nn::Dense<T> hidden;
    nn::Dense<T> feature;
    nn::Dense<T> head;

    static EncoderNet init(int hidden_dim, int feature_dim, Rng& rng) {
        EncoderNet n;
        n.hidden = nn::Dense<T>::init(go::kObservationSize, hidden_dim, rng);
        n.feature = nn::Dense<T>::init(hidden_dim, feature_dim, rng);
        n.head = nn::Dense<T>::init(feature_dim, go::kNumActions, rng);
        return n;
    }

    struct Activations {
        nn::Mat<T> hidden_pre;
        nn::Mat<T> hidden;
        nn::Mat<T> features;
        nn::Mat<T> logits;
    };

    Activations forward(const nn::Mat<T>& x) const {
        Activations a;
        a.hidden_pre = hidden.forward(x);
        a.hidden = nn::relu(a.hidden_pre);
        a.features = feature.forward(a.hidden);
        a.logits = head.forward(a.features);
        return a;
    }

    nn::Mat<T> features(const nn::Mat<T>& x) const { return feature.forward(nn::relu(hidden.forward(x))); }

    struct Gradient {
        double loss = 0.0;
        nn::DenseGrad<T> hidden;
        nn::DenseGrad<T> feature;
        nn::DenseGrad<T> head;
    };

    /// Weighted masked cross-entropy of the action head and its gradient.
    Gradient loss_and_grad(const nn::Mat<T>& x, std::span<const go::LegalMask> masks, std::span<const int> actions,
                           std::span<const double> weights) const {
        const Activations a = forward(x);
        auto ce = nn::weighted_masked_cross_entropy<T>(a.logits, masks, actions, weights);
        Gradient g;
        g.loss = ce.loss;
        g.head = nn::dense_backward<T>(a.features, ce.dlogits);
        const nn::Mat<T> dfeatures = head.weight.transpose() * ce.dlogits;
        g.feature = nn::dense_backward<T>(a.hidden, dfeatures);
        const nn::Mat<T> dhidden = nn::relu_backward<T>(a.hidden_pre, feature.weight.transpose() * dfeatures);
        g.hidden = nn::dense_backward<T>(x, dhidden);
        return g;
    }

    friend bool operator==(const EncoderNet&, const EncoderNet&) = default;
};

/// Frozen feature extractor: either a trained network or the handcrafted
/// training-free feature map.
class Encoder {
public:
    enum class Kind { Network, Handcrafted };

    static Encoder handcrafted();
    static Encoder from_network(EncoderNet<float> net, std::uint64_t seed, long training_steps,
                                std::vector<double> loss_history);

    Kind kind() const { return kind_; }
    bool has_head() const { return kind_ == Kind::Network; }
    int feature_dim() const;

    FeatureVector encode(const go::Observation& o) const;
    /// Action-head logits. Throws std::logic_error for the handcrafted encoder.
    nn::Vec<float> head_logits(const go::Observation& o) const;

    const EncoderNet<float>& net() const { return net_; }
    std::uint64_t seed() const { return seed_; }
    long training_steps() const { return training_steps_; }
    const std::vector<double>& loss_history() const { return loss_history_; }

    friend bool operator==(const Encoder&, const Encoder&) = default;

private:
    Kind kind_ = Kind::Handcrafted;
    EncoderNet<float> net_;
    std::uint64_t seed_ = 0;
    long training_steps_ = 0;
    std::vector<double> loss_history_;
};

inline FeatureVector encode(const Encoder& e, const go::Observation& o) { return e.encode(o); }

/// Occupancy planes, stone counts and liberty histograms, zero-padded to 128.
FeatureVector handcrafted_encode(const go::Observation& o);

struct Sample {
    go::Observation obs;
    go::Action action;
    go::LegalMask mask;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct DemoDataset {
    std::vector<Sample> samples;
    int n_games = 0;
    std::uint64_t seed = 0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    friend bool operator==(const DemoDataset&, const DemoDataset&) = default;
};

/// Every (observation, move, mask) from n_games heuristic-vs-heuristic games.
DemoDataset collect_demos(int n_games, std::uint64_t seed);

struct TrainOptions {
    int epochs = 10;
    double lr = 0.01;
    std::uint64_t seed = 0;
    int batch_size = 32;
    int hidden_dim = kHiddenDim;
    int feature_dim = kFeatureDim;
    double momentum = 0.9;
};

/// Behavioral cloning of the demonstrated moves through the action head.
/// Loss history holds the mean loss of each epoch.
Encoder train_encoder(const DemoDataset& data, const TrainOptions& opts);

/// Observations of a dataset packed as a 147 x n batch.
nn::Mat<float> observation_batch(std::span<const Sample> samples);

}  // namespace ct::encoder
