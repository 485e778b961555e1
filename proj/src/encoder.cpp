#include "ct/encoder.hpp"

#include <numeric>
#include <stdexcept>

namespace ct::encoder {

using go::bits::count;
using go::bits::flood;
using go::bits::neighbors;

Encoder Encoder::handcrafted() { return Encoder{}; }

Encoder Encoder::from_network(EncoderNet<float> net, std::uint64_t seed, long training_steps,
                              std::vector<double> loss_history) {
    Encoder e;
    e.kind_ = Kind::Network;
    e.net_ = std::move(net);
    e.seed_ = seed;
    e.training_steps_ = training_steps;
    e.loss_history_ = std::move(loss_history);
    return e;
}

int Encoder::feature_dim() const { return kind_ == Kind::Network ? net_.feature.out() : kFeatureDim; }

namespace {
nn::Mat<float> as_column(const go::Observation& o) {
    return Eigen::Map<const nn::Mat<float>>(o.planes.data(), go::kObservationSize, 1);
}
}  // namespace

FeatureVector Encoder::encode(const go::Observation& o) const {
    if (kind_ == Kind::Handcrafted) return handcrafted_encode(o);
    return net_.features(as_column(o)).col(0);
}

nn::Vec<float> Encoder::head_logits(const go::Observation& o) const {
    if (!has_head()) throw std::logic_error("handcrafted encoder has no action head");
    return net_.head.forward(net_.features(as_column(o))).col(0);
}

FeatureVector handcrafted_encode(const go::Observation& o) {
    FeatureVector f = FeatureVector::Zero(kFeatureDim);
    go::Bitboard own = 0, opp = 0;
    for (int p = 0; p < go::kNumPoints; ++p) {
        if (o.at(0, p) > 0.5f) own |= go::bits::bit(p);
        if (o.at(1, p) > 0.5f) opp |= go::bits::bit(p);
    }
    const go::Bitboard empty = go::bits::kBoardMask & ~(own | opp);
    for (int p = 0; p < go::kNumPoints; ++p) {
        f(p) = o.at(0, p);
        f(go::kNumPoints + p) = o.at(1, p);
    }
    int idx = 2 * go::kNumPoints;
    f(idx++) = static_cast<float>(count(own));
    f(idx++) = static_cast<float>(count(opp));
    // Stones per group-liberty bucket {1, 2, 3, 4+}, own then opponent.
    for (const go::Bitboard side : {own, opp}) {
        go::Bitboard rest = side;
        while (rest) {
            const go::Bitboard grp = flood(rest & (0 - rest), side);
            rest &= ~grp;
            const int libs = count(neighbors(grp) & empty);
            if (libs > 0) f(idx + std::min(libs, 4) - 1) += static_cast<float>(count(grp));
        }
        idx += 4;
    }
    return f;
}

DemoDataset collect_demos(int n_games, std::uint64_t seed) {
    if (n_games < 1) throw std::invalid_argument("n_games must be >= 1");
    DemoDataset data;
    data.n_games = n_games;
    data.seed = seed;
    const go::Player heuristic = go::heuristic_opponent;
    for (int g = 0; g < n_games; ++g) {
        Rng black_rng(derive_seed(seed, {static_cast<std::uint64_t>(g), 0}));
        Rng white_rng(derive_seed(seed, {static_cast<std::uint64_t>(g), 1}));
        go::play_out(heuristic, heuristic, black_rng, white_rng, [&](const go::BoardState& s, go::Action a) {
            data.samples.push_back(Sample{go::observe(s), a, go::move_mask(s)});
        });
    }
    return data;
}

nn::Mat<float> observation_batch(std::span<const Sample> samples) {
    nn::Mat<float> x(go::kObservationSize, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j)
        x.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Eigen::VectorXf>(samples[j].obs.planes.data(), go::kObservationSize);
    return x;
}

Encoder train_encoder(const DemoDataset& data, const TrainOptions& opts) {
    if (data.empty()) throw std::invalid_argument("train_encoder: empty dataset");
    if (opts.epochs < 1 || opts.batch_size < 1) throw std::invalid_argument("train_encoder: bad options");
    Rng rng(opts.seed);
    auto net = EncoderNet<float>::init(opts.hidden_dim, opts.feature_dim, rng);
    nn::Momentum<float> optimizer(opts.momentum);

    const std::size_t n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> history;
    long steps = 0;

    std::vector<Sample> batch;
    std::vector<go::LegalMask> masks;
    std::vector<int> actions;
    std::vector<double> weights;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        const double lr = (opts.epochs >= 2 && epoch >= opts.epochs / 2) ? 0.5 * opts.lr : opts.lr;
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(opts.batch_size)) {
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(opts.batch_size));
            batch.clear();
            masks.clear();
            actions.clear();
            for (std::size_t i = start; i < end; ++i) {
                const Sample& s = data.samples[order[i]];
                batch.push_back(s);
                masks.push_back(s.mask);
                actions.push_back(s.action.index);
            }
            weights.assign(batch.size(), 1.0 / static_cast<double>(batch.size()));
            const auto g = net.loss_and_grad(observation_batch(batch), masks, actions, weights);
            epoch_loss += g.loss * static_cast<double>(batch.size());
            nn::Mat<float>* params[] = {&net.hidden.weight, &net.hidden.bias, &net.feature.weight,
                                        &net.feature.bias,  &net.head.weight,   &net.head.bias};
            const nn::Mat<float>* grads[] = {&g.hidden.weight, &g.hidden.bias, &g.feature.weight,
                                             &g.feature.bias,  &g.head.weight,   &g.head.bias};
            optimizer.step(params, grads, lr);
            ++steps;
        }
        history.push_back(epoch_loss / static_cast<double>(n));
    }
    return Encoder::from_network(std::move(net), opts.seed, steps, std::move(history));
}

}  // namespace ct::encoder
