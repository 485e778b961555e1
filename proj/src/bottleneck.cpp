#include "ct/bottleneck.hpp"

#include <numeric>
#include <stdexcept>

namespace ct::bottleneck {

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Trained: return "trained";
        case Provenance::Transferred: return "transferred";
        case Provenance::Finetuned: return "finetuned";
    }
    return "trained";
}

Provenance parse_provenance(const std::string& s) {
    if (s == "trained") return Provenance::Trained;
    if (s == "transferred") return Provenance::Transferred;
    if (s == "finetuned") return Provenance::Finetuned;
    throw std::invalid_argument("unknown provenance '" + s + "'");
}

void Agent::validate() const {
    if (concepts.k != policy.k()) throw std::invalid_argument("agent: concept count differs from policy k");
    if (encoder.feature_dim() != concepts.dim()) throw std::invalid_argument("agent: encoder/centroid dim mismatch");
}

concepts::ConceptId Agent::concept_of(const go::BoardState& s) const {
    return concepts::assign(concepts, encoder.encode(go::observe(s)));
}

go::Action act_on_concept(const BottleneckPolicy& p, int concept_id, const go::LegalMask& mask, ActMode mode, Rng& rng) {
    const nn::Vec<float> logits = p.net.logits(concept_id);
    if (mode == ActMode::Greedy) return go::Action{nn::masked_argmax<float>(logits, mask)};
    return go::Action{nn::masked_sample<float>(logits, mask, rng)};
}

go::Action act(const Agent& ag, const go::BoardState& s, ActMode mode, Rng& rng) {
    return act_on_concept(ag.policy, ag.concept_of(s).value, go::move_mask(s), mode, rng);
}

go::Player as_player(Agent ag, ActMode mode) {
    return [ag = std::move(ag), mode](const go::BoardState& s, Rng& rng) { return act(ag, s, mode, rng); };
}

TrainResult train_bottleneck_on_concepts(std::span<const int> concept_ids, std::span<const encoder::Sample> samples,
                                         int k, const TrainOptions& opts) {
    if (samples.empty()) throw std::invalid_argument("train_bottleneck: empty dataset");
    if (concept_ids.size() != samples.size()) throw std::invalid_argument("train_bottleneck: label count mismatch");
    if (opts.epochs < 1 || opts.batch_size < 1 || k < 1) throw std::invalid_argument("train_bottleneck: bad options");
    Rng rng(opts.seed);
    TrainResult result;
    auto net = PolicyNet<float>::init(k, opts.embedding_dim, opts.hidden_dim, rng);
    nn::Momentum<float> optimizer(opts.momentum);

    const std::size_t n = samples.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<int> cs, as;
    std::vector<go::LegalMask> ms;
    std::vector<double> ws;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        const double lr = (opts.epochs >= 2 && epoch >= opts.epochs / 2) ? 0.5 * opts.lr : opts.lr;
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(opts.batch_size)) {
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(opts.batch_size));
            cs.clear();
            as.clear();
            ms.clear();
            for (std::size_t i = start; i < end; ++i) {
                cs.push_back(concept_ids[order[i]]);
                as.push_back(samples[order[i]].action.index);
                ms.push_back(samples[order[i]].mask);
            }
            ws.assign(cs.size(), 1.0 / static_cast<double>(cs.size()));
            const auto g = net.loss_and_grad(cs, ms, as, ws);
            epoch_loss += g.loss * static_cast<double>(cs.size());
            nn::Mat<float>* params[] = {&net.embedding, &net.hidden.weight, &net.hidden.bias, &net.out.weight,
                                        &net.out.bias};
            const nn::Mat<float>* grads[] = {&g.embedding, &g.hidden.weight, &g.hidden.bias, &g.out.weight,
                                             &g.out.bias};
            optimizer.step(params, grads, lr);
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(n));
    }
    result.policy = BottleneckPolicy{std::move(net), opts.seed, Provenance::Trained};
    return result;
}

TrainResult train_bottleneck(const encoder::Encoder& enc, const concepts::ConceptModel& cm,
                             const encoder::DemoDataset& data, const TrainOptions& opts) {
    if (data.empty()) throw std::invalid_argument("train_bottleneck: empty dataset");
    if (enc.feature_dim() != cm.dim()) throw std::invalid_argument("train_bottleneck: encoder/centroid dim mismatch");
    std::vector<int> concept_ids;
    concept_ids.reserve(data.size());
    for (const auto& s : data.samples) concept_ids.push_back(concepts::assign(cm, enc.encode(s.obs)).value);
    return train_bottleneck_on_concepts(concept_ids, data.samples, cm.k, opts);
}

}  // namespace ct::bottleneck
