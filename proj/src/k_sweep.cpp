#include <stdexcept>

#include "ct/alignment.hpp"
#include "ct/analysis.hpp"

namespace ct::analysis {

std::vector<SweepRow> k_sweep(std::span<const int> k_values, const SweepConfig& cfg) {
    if (k_values.empty()) throw std::invalid_argument("k_sweep: empty k list");
    // Encoders do not depend on k; train them once.
    auto source_demos = encoder::collect_demos(cfg.source.demo_games, cfg.source.demo_seed);
    auto target_demos = encoder::collect_demos(cfg.target.demo_games, cfg.target.demo_seed);
    const auto source_enc = pipeline::train_encoder_stage(cfg.source, source_demos);
    const auto target_enc = pipeline::train_encoder_stage(cfg.target, target_demos);
    const go::Player opponent = go::heuristic_opponent;

    std::vector<SweepRow> rows;
    for (int k : k_values) {
        auto sc = cfg.source;
        auto tc = cfg.target;
        sc.k = k;
        tc.k = k;
        const auto source = pipeline::build_on_encoder(sc, source_enc, source_demos);
        const auto target = pipeline::build_on_encoder(tc, target_enc, target_demos);
        const auto moved = alignment::transfer(source.agent, target.agent, alignment::Method::Hungarian);
        SweepRow row;
        row.k = k;
        row.direct_win_rate =
            bottleneck::evaluate(source.agent, opponent, "heuristic", cfg.eval_seeds, cfg.eval_games, cfg.eval_seed).mean;
        row.transfer_win_rate =
            bottleneck::evaluate(moved, opponent, "heuristic", cfg.eval_seeds, cfg.eval_games, cfg.eval_seed).mean;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ct::analysis
