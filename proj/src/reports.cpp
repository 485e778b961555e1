#include "ct/reports.hpp"

#include <cstdio>
#include <sstream>

namespace ct::reports {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json summary(const bottleneck::EvaluationReport& r) {
    return {{"opponent", r.opponent},
            {"n_seeds", r.win_rates.size()},
            {"games_per_seed", r.games_per_seed},
            {"n_games", r.n_games},
            {"win_rates", r.win_rates},
            {"mean", r.mean},
            {"std", r.std},
            {"mean_game_length", r.mean_game_length},
            {"t_statistic", optional_number(r.t_statistic)},
            {"p_value", optional_number(r.p_value)},
            {"base_seed", r.base_seed}};
}

std::string csv(const bottleneck::EvaluationReport& r) {
    std::ostringstream out;
    out << "seed,wins,games,win_rate\n";
    for (std::size_t i = 0; i < r.win_rates.size(); ++i)
        out << i << ',' << r.wins[i] << ',' << r.games_per_seed << ',' << num(r.win_rates[i]) << '\n';
    return out.str();
}

Json summary(const analysis::InterventionReport& r) {
    return {{"n_states", r.n_states},
            {"alternatives_per_state", r.alternatives_per_state},
            {"total_interventions", r.total_interventions},
            {"change_count", r.change_count},
            {"change_rate", r.change_rate},
            {"median_state_rate", r.median_rate},
            {"state_rate_std", r.rate_std},
            {"p0", r.p0},
            {"null_draws", r.null_draws},
            {"p_value", r.p_value}};
}

std::string csv(const analysis::InterventionReport& r) {
    std::ostringstream out;
    out << "state_index,position_hash,true_concept,base_action,alternative,action,changed\n";
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const auto& rec = r.records[i];
        for (std::size_t j = 0; j < rec.alternatives.size(); ++j) {
            out << i << ',' << rec.position_hash << ',' << rec.true_concept << ',' << rec.base_action << ','
                << rec.alternatives[j] << ',' << rec.actions[j] << ',' << (rec.actions[j] != rec.base_action) << '\n';
        }
    }
    return out.str();
}

Json summary(const analysis::AblationReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"concept", row.concept_id},
                        {"frequency", row.frequency},
                        {"ablated_win_rate", row.ablated_win_rate},
                        {"drop", row.drop}});
    }
    return {{"games", r.games}, {"baseline_win_rate", r.baseline_win_rate}, {"frequencies", r.frequencies},
            {"rows", rows}};
}

std::string csv(const analysis::AblationReport& r) {
    std::ostringstream out;
    out << "concept,frequency,baseline_win_rate,ablated_win_rate,drop,paired_se\n";
    for (const auto& row : r.rows) {
        const double se =
            r.baseline_outcomes.size() >= 2 ? analysis::paired_standard_error(r.baseline_outcomes, row.outcomes) : 0.0;
        out << (row.concept_id < 0 ? std::string("all") : std::to_string(row.concept_id)) << ','
            << num(row.frequency) << ',' << num(row.baseline_win_rate) << ',' << num(row.ablated_win_rate) << ','
            << num(row.drop) << ',' << num(se) << '\n';
    }
    return out.str();
}

std::string curve_csv(std::span<const double> curve) {
    std::ostringstream out;
    out << "generation,win_rate\n";
    for (std::size_t g = 0; g < curve.size(); ++g) out << g + 1 << ',' << num(curve[g]) << '\n';
    return out.str();
}

std::string csv(std::span<const analysis::SweepRow> rows) {
    std::ostringstream out;
    out << "k,direct_win_rate,transfer_win_rate\n";
    for (const auto& r : rows) out << r.k << ',' << num(r.direct_win_rate) << ',' << num(r.transfer_win_rate) << '\n';
    return out.str();
}

}  // namespace ct::reports
