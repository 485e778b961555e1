// ct: command-line driver for the concept transfer pipeline.
//
// Every subcommand runs one pipeline stage, writes its outputs atomically and
// prints a one-line JSON result. Exit codes: 0 success, 2 missing or corrupt
// artifact, 3 invalid configuration or flags, 1 anything else.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "ct/alignment.hpp"
#include "ct/analysis.hpp"
#include "ct/artifact.hpp"
#include "ct/reports.hpp"
#include "ct/run_config.hpp"

namespace {

using namespace ct;
using artifact::ArtifactError;
using artifact::Json;
using config::ConfigError;
namespace fs = std::filesystem;

constexpr int kExitArtifact = 2;
constexpr int kExitConfig = 3;

void emit(Json j) {
    j["status"] = "ok";
    std::cout << j.dump() << std::endl;
}

std::string short_hash(const std::string& h) { return h.substr(0, 8); }

/// Config file values, if any; flags given on the command line win.
config::RunConfig base_config(const std::string& path) {
    return path.empty() ? config::RunConfig{} : config::load(path);
}

go::Player opponent_player(const std::string& name) {
    if (name == "heuristic") return go::heuristic_opponent;
    if (name == "random") return go::random_opponent;
    throw ConfigError("unknown opponent '" + name + "'");
}

/// An agent directory stands for its concept model.
fs::path concepts_dir(const fs::path& p) { return fs::exists(p / "concepts") ? p / "concepts" : p; }

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(flag + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(flag + ": empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concept discovery, alignment and transfer on 7x7 Go"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ct 1.0");

    // collect
    int collect_games = 300;
    std::uint64_t collect_seed = 1;
    std::string collect_out;
    auto* collect = app.add_subcommand("collect", "Record heuristic self-play demonstrations");
    collect->add_option("--games", collect_games, "Number of games")->required();
    collect->add_option("--seed", collect_seed, "Seed")->required();
    collect->add_option("--out", collect_out, "Output artifact directory")->required();

    // train-encoder
    std::string te_data, te_out, te_config;
    int te_epochs = 0;
    double te_lr = 0.0;
    std::uint64_t te_seed = 0;
    bool te_handcrafted = false;
    auto* train_enc = app.add_subcommand("train-encoder", "Train the feature encoder by behavioral cloning");
    train_enc->add_option("--data", te_data, "Demo dataset artifact");
    auto* te_epochs_opt = train_enc->add_option("--epochs", te_epochs, "Training epochs");
    auto* te_lr_opt = train_enc->add_option("--lr", te_lr, "Learning rate");
    auto* te_seed_opt = train_enc->add_option("--seed", te_seed, "Initialization and shuffling seed");
    train_enc->add_option("--out", te_out, "Output artifact directory")->required();
    train_enc->add_option("--config", te_config, "Run configuration file");
    train_enc->add_flag("--handcrafted", te_handcrafted, "Write the training-free handcrafted encoder instead");

    // discover
    std::string di_encoder, di_out, di_config;
    int di_games = 0, di_k = 0;
    std::uint64_t di_seed = 0, di_feature_seed = 0;
    auto* discover = app.add_subcommand("discover", "Collect features and fit the concept model");
    discover->add_option("--encoder", di_encoder, "Encoder artifact")->required();
    auto* di_games_opt = discover->add_option("--games", di_games, "Feature collection games");
    auto* di_k_opt = discover->add_option("--k", di_k, "Number of concepts");
    auto* di_seed_opt = discover->add_option("--seed", di_seed, "K-means seed");
    auto* di_fseed_opt = discover->add_option("--feature-seed", di_feature_seed, "Feature collection seed");
    discover->add_option("--out", di_out, "Output artifact directory")->required();
    discover->add_option("--config", di_config, "Run configuration file");

    // train-bottleneck
    std::string tb_encoder, tb_concepts, tb_data, tb_out, tb_config;
    int tb_epochs = 0, tb_d = 0;
    double tb_lr = 0.0;
    std::uint64_t tb_seed = 0;
    auto* train_bn = app.add_subcommand("train-bottleneck", "Train the concept bottleneck policy; writes an agent");
    train_bn->add_option("--encoder", tb_encoder, "Encoder artifact")->required();
    train_bn->add_option("--concepts", tb_concepts, "Concept model artifact")->required();
    train_bn->add_option("--data", tb_data, "Demo dataset artifact")->required();
    train_bn->add_option("--out", tb_out, "Output agent directory")->required();
    auto* tb_epochs_opt = train_bn->add_option("--epochs", tb_epochs, "Training epochs");
    auto* tb_lr_opt = train_bn->add_option("--lr", tb_lr, "Learning rate");
    auto* tb_seed_opt = train_bn->add_option("--seed", tb_seed, "Seed");
    auto* tb_d_opt = train_bn->add_option("--d", tb_d, "Embedding dimension");
    train_bn->add_option("--config", tb_config, "Run configuration file");

    // align
    std::string al_source, al_target, al_method, al_out;
    std::uint64_t al_seed = 0;
    auto* align = app.add_subcommand("align", "Match source concepts to target concepts");
    align->add_option("--source", al_source, "Source agent or concept model")->required();
    align->add_option("--target", al_target, "Target agent or concept model")->required();
    align->add_option("--method", al_method, "hungarian|greedy|procrustes|random|identity")->required();
    auto* al_seed_opt = align->add_option("--seed", al_seed, "Seed (required for random)");
    align->add_option("--out", al_out, "Output artifact directory")->required();

    // transfer
    std::string tr_source, tr_target, tr_alignment, tr_out;
    auto* transfer = app.add_subcommand("transfer", "Remap a source policy into a target concept space");
    transfer->add_option("--source-agent", tr_source, "Source agent directory")->required();
    transfer->add_option("--target-agent", tr_target, "Target agent directory")->required();
    transfer->add_option("--alignment", tr_alignment, "Alignment map artifact")->required();
    transfer->add_option("--out", tr_out, "Output agent directory")->required();

    // evaluate
    std::string ev_agent, ev_opponent, ev_out, ev_config;
    int ev_seeds = 0, ev_games = 0;
    std::uint64_t ev_base_seed = 0;
    auto* evaluate = app.add_subcommand("evaluate", "Play an agent against a scripted opponent");
    evaluate->add_option("--agent", ev_agent, "Agent directory")->required();
    auto* ev_opp_opt = evaluate->add_option("--opponent", ev_opponent, "heuristic|random");
    auto* ev_seeds_opt = evaluate->add_option("--seeds", ev_seeds, "Number of seeds");
    auto* ev_games_opt = evaluate->add_option("--games", ev_games, "Games per seed");
    auto* ev_base_opt = evaluate->add_option("--base-seed", ev_base_seed, "Base seed");
    evaluate->add_option("--out", ev_out, "Output report directory")->required();
    evaluate->add_option("--config", ev_config, "Run configuration file");

    // intervene
    std::string in_agent, in_out, in_data;
    int in_states = 500, in_alternatives = 5, in_null_games = 300;
    std::uint64_t in_seed = 0;
    auto* intervene = app.add_subcommand("intervene", "Concept override experiment");
    intervene->add_option("--agent", in_agent, "Agent directory")->required();
    intervene->add_option("--states", in_states, "Sampled states");
    intervene->add_option("--alternatives", in_alternatives, "Overrides per state");
    intervene->add_option("--seed", in_seed, "Seed")->required();
    intervene->add_option("--out", in_out, "Output report directory")->required();
    intervene->add_option("--data", in_data, "Demos for the label-shuffled null policy (collected if absent)");
    intervene->add_option("--null-games", in_null_games, "Demo games collected when --data is absent");

    // ablate
    std::string ab_agent, ab_concepts = "all", ab_out;
    int ab_games = 500;
    std::uint64_t ab_seed = 0;
    auto* ablate = app.add_subcommand("ablate", "Per-concept ablation experiment");
    ablate->add_option("--agent", ab_agent, "Agent directory")->required();
    ablate->add_option("--concepts", ab_concepts, "all or a comma-separated list");
    ablate->add_option("--games", ab_games, "Games per condition");
    ablate->add_option("--seed", ab_seed, "Seed")->required();
    ablate->add_option("--out", ab_out, "Output report directory")->required();

    // finetune
    std::string ft_agent, ft_out, ft_config;
    int ft_generations = 0, ft_games = 0;
    double ft_lr = 0.0;
    std::uint64_t ft_seed = 0;
    auto* finetune = app.add_subcommand("finetune", "REINFORCE fine-tuning of an agent's policy");
    finetune->add_option("--agent", ft_agent, "Agent directory")->required();
    auto* ft_gen_opt = finetune->add_option("--generations", ft_generations, "Generations");
    auto* ft_games_opt = finetune->add_option("--games-per-gen", ft_games, "Games per generation");
    auto* ft_lr_opt = finetune->add_option("--lr", ft_lr, "Learning rate");
    auto* ft_seed_opt = finetune->add_option("--seed", ft_seed, "Seed");
    finetune->add_option("--out", ft_out, "Output agent directory")->required();
    finetune->add_option("--config", ft_config, "Run configuration file");

    // sweep-k
    std::string sw_k = "8,16,32,64,128", sw_config, sw_out;
    auto* sweep = app.add_subcommand("sweep-k", "Direct and transfer win rate across concept counts");
    sweep->add_option("--k", sw_k, "Comma-separated concept counts");
    sweep->add_option("--config", sw_config, "Run configuration file");
    sweep->add_option("--out", sw_out, "Output report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*collect) {
            if (collect_games < 1) throw ConfigError("--games must be >= 1");
            const auto demos = encoder::collect_demos(collect_games, collect_seed);
            const auto h = artifact::save_demos(collect_out, demos);
            emit({{"command", "collect"}, {"out", collect_out}, {"hash", h}, {"samples", demos.size()}});
        } else if (*train_enc) {
            auto cfg = base_config(te_config);
            if (te_epochs_opt->count()) cfg.agent.encoder_epochs = te_epochs;
            if (te_lr_opt->count()) cfg.agent.encoder_lr = te_lr;
            if (te_seed_opt->count()) cfg.agent.encoder_seed = te_seed;
            if (cfg.agent.encoder_epochs < 1 || !(cfg.agent.encoder_lr > 0.0))
                throw ConfigError("encoder epochs must be >= 1 and lr > 0");
            if (te_handcrafted) {
                const auto h = artifact::save_encoder(te_out, encoder::Encoder::handcrafted(), {});
                emit({{"command", "train-encoder"}, {"out", te_out}, {"hash", h}, {"type", "handcrafted"}});
            } else {
                if (te_data.empty()) throw ConfigError("--data is required unless --handcrafted is given");
                const auto demos = artifact::load_demos(te_data);
                encoder::TrainOptions opts;
                opts.epochs = cfg.agent.encoder_epochs;
                opts.lr = cfg.agent.encoder_lr;
                opts.seed = cfg.agent.encoder_seed;
                const auto enc = encoder::train_encoder(demos, opts);
                const Json hp = {{"epochs", opts.epochs}, {"lr", opts.lr}};
                const auto h = artifact::save_encoder(te_out, enc, {artifact::hash_of(te_data)}, hp);
                emit({{"command", "train-encoder"},
                      {"out", te_out},
                      {"hash", h},
                      {"initial_loss", enc.loss_history().front()},
                      {"final_loss", enc.loss_history().back()}});
            }
        } else if (*discover) {
            auto cfg = base_config(di_config);
            if (di_games_opt->count()) cfg.agent.feature_games = di_games;
            if (di_k_opt->count()) cfg.agent.k = di_k;
            if (di_seed_opt->count()) cfg.agent.kmeans_seed = di_seed;
            if (di_fseed_opt->count()) cfg.agent.feature_seed = di_feature_seed;
            if (cfg.agent.feature_games < 1 || cfg.agent.k < 1) throw ConfigError("--games and --k must be >= 1");
            const auto enc = artifact::load_encoder(di_encoder);
            const auto features = concepts::collect_features(enc, cfg.agent.feature_games, cfg.agent.feature_seed);
            const auto cm = concepts::fit_kmeans(features, cfg.agent.k, cfg.agent.kmeans_seed);
            const Json hp = {{"feature_games", cfg.agent.feature_games}, {"feature_seed", cfg.agent.feature_seed}};
            const auto h = artifact::save_concepts(di_out, cm, {artifact::hash_of(di_encoder)}, hp);
            emit({{"command", "discover"},
                  {"out", di_out},
                  {"hash", h},
                  {"k", cm.k},
                  {"features", cm.feature_count},
                  {"inertia", cm.inertia}});
        } else if (*train_bn) {
            auto cfg = base_config(tb_config);
            if (tb_epochs_opt->count()) cfg.agent.bottleneck_epochs = tb_epochs;
            if (tb_lr_opt->count()) cfg.agent.bottleneck_lr = tb_lr;
            if (tb_seed_opt->count()) cfg.agent.bottleneck_seed = tb_seed;
            if (tb_d_opt->count()) cfg.agent.embedding_dim = tb_d;
            if (cfg.agent.bottleneck_epochs < 1 || cfg.agent.embedding_dim < 1 || !(cfg.agent.bottleneck_lr > 0.0))
                throw ConfigError("bottleneck epochs and d must be >= 1 and lr > 0");
            const auto enc = artifact::load_encoder(tb_encoder);
            const auto cm = artifact::load_concepts(tb_concepts);
            const auto demos = artifact::load_demos(tb_data);
            if (cm.dim() != enc.feature_dim()) throw ConfigError("concept model does not match the encoder");
            const auto opts = cfg.agent.bottleneck_options();
            auto trained = bottleneck::train_bottleneck(enc, cm, demos, opts);
            const Json hp = {{"epochs", opts.epochs}, {"lr", opts.lr}, {"d", opts.embedding_dim}};
            const auto h = artifact::save_agent_from(tb_out, tb_encoder, tb_concepts, trained.policy,
                                                     {artifact::hash_of(tb_data)}, hp);
            emit({{"command", "train-bottleneck"},
                  {"out", tb_out},
                  {"policy_hash", h.policy},
                  {"initial_loss", trained.loss_history.front()},
                  {"final_loss", trained.loss_history.back()}});
        } else if (*align) {
            const auto method = [&] {
                try {
                    return alignment::parse_method(al_method);
                } catch (const std::exception& e) {
                    throw ConfigError(e.what());
                }
            }();
            if (method == alignment::Method::Random && !al_seed_opt->count())
                throw ConfigError("--method random requires --seed");
            const fs::path src = concepts_dir(al_source), tgt = concepts_dir(al_target);
            const auto a = artifact::load_concepts(src);
            const auto b = artifact::load_concepts(tgt);
            std::optional<std::uint64_t> seed;
            if (al_seed_opt->count()) seed = al_seed;
            if (a.k != b.k || a.dim() != b.dim()) throw ConfigError("source and target concept models differ in shape");
            const auto map = alignment::align(a, b, method, seed);
            const auto h = artifact::save_alignment(al_out, map, {artifact::hash_of(src), artifact::hash_of(tgt)});
            emit({{"command", "align"},
                  {"out", al_out},
                  {"hash", h},
                  {"method", alignment::method_name(map.method)},
                  {"mean_matched_similarity", map.mean_matched_similarity}});
        } else if (*transfer) {
            const auto source = artifact::load_agent(tr_source);
            const auto target = artifact::load_agent(tr_target);
            const auto map = artifact::load_alignment(tr_alignment);
            if (map.k != source.policy.k() || map.k != target.concepts.k)
                throw ConfigError("alignment map does not fit the agents");
            const auto moved = alignment::transfer_with_map(source, target, map);
            const fs::path tdir = tr_target;
            const auto h = artifact::save_agent_from(
                tr_out, tdir / "encoder", tdir / "concepts", moved.policy,
                {artifact::hash_of(fs::path(tr_source) / "policy"), artifact::hash_of(tr_alignment)});
            emit({{"command", "transfer"}, {"out", tr_out}, {"policy_hash", h.policy}});
        } else if (*evaluate) {
            auto cfg = base_config(ev_config);
            if (ev_opp_opt->count()) config::set(cfg, "opponent", ev_opponent);
            if (ev_seeds_opt->count()) cfg.eval_seeds = ev_seeds;
            if (ev_games_opt->count()) cfg.eval_games = ev_games;
            if (ev_base_opt->count()) cfg.eval_base_seed = ev_base_seed;
            if (cfg.eval_seeds < 1 || cfg.eval_games < 1) throw ConfigError("--seeds and --games must be >= 1");
            const auto opponent = opponent_player(cfg.opponent);
            const auto ag = artifact::load_agent(ev_agent);
            const auto hashes = artifact::agent_hashes(ev_agent);
            const auto report =
                bottleneck::evaluate(ag, opponent, cfg.opponent, cfg.eval_seeds, cfg.eval_games, cfg.eval_base_seed);
            const std::string csv_name = "evaluate_" + cfg.opponent + "_s" + std::to_string(cfg.eval_base_seed) +
                                         "_" + short_hash(hashes.policy) + ".csv";
            const auto h = artifact::save_report(ev_out, "evaluate", reports::summary(report),
                                                 {{csv_name, reports::csv(report)}},
                                                 {hashes.encoder, hashes.concepts, hashes.policy},
                                                 {{"base", cfg.eval_base_seed}});
            Json j = reports::summary(report);
            j["command"] = "evaluate";
            j["out"] = ev_out;
            j["csv"] = (fs::path(ev_out) / csv_name).string();
            j["hash"] = h;
            emit(j);
        } else if (*intervene) {
            if (in_states < 1 || in_alternatives < 1 || in_null_games < 1)
                throw ConfigError("--states, --alternatives and --null-games must be >= 1");
            const auto ag = artifact::load_agent(in_agent);
            if (in_alternatives >= ag.concepts.k) throw ConfigError("--alternatives must be smaller than k");
            const auto hashes = artifact::agent_hashes(in_agent);
            std::vector<std::string> from = {hashes.encoder, hashes.concepts, hashes.policy};
            encoder::DemoDataset demos;
            if (!in_data.empty()) {
                demos = artifact::load_demos(in_data);
                from.push_back(artifact::hash_of(in_data));
            } else {
                demos = encoder::collect_demos(in_null_games, in_seed);
            }
            bottleneck::TrainOptions null_opts;
            null_opts.epochs = 20;
            null_opts.seed = in_seed;
            const auto null_policy = analysis::label_shuffled_policy(ag, demos, null_opts, in_seed);
            analysis::InterventionOptions opts;
            opts.n_states = in_states;
            opts.n_alternatives = in_alternatives;
            opts.seed = in_seed;
            const auto report = analysis::intervene(ag, null_policy, opts);
            const std::string csv_name =
                "intervene_s" + std::to_string(in_seed) + "_" + short_hash(hashes.policy) + ".csv";
            const auto h = artifact::save_report(in_out, "intervene", reports::summary(report),
                                                 {{csv_name, reports::csv(report)}}, from, {{"seed", in_seed}});
            Json j = reports::summary(report);
            j["command"] = "intervene";
            j["out"] = in_out;
            j["hash"] = h;
            emit(j);
        } else if (*ablate) {
            if (ab_games < 1) throw ConfigError("--games must be >= 1");
            analysis::AblationOptions opts;
            if (ab_concepts != "all") opts.concepts = parse_int_list(ab_concepts, "--concepts");
            opts.games_per_concept = ab_games;
            opts.seed = ab_seed;
            const auto ag = artifact::load_agent(ab_agent);
            for (int c : opts.concepts)
                if (c < 0 || c >= ag.concepts.k) throw ConfigError("--concepts: id out of range");
            const auto hashes = artifact::agent_hashes(ab_agent);
            const auto report = analysis::ablate(ag, opts);
            const std::string csv_name = "ablate_s" + std::to_string(ab_seed) + "_" + short_hash(hashes.policy) + ".csv";
            const auto h = artifact::save_report(ab_out, "ablate", reports::summary(report),
                                                 {{csv_name, reports::csv(report)}},
                                                 {hashes.encoder, hashes.concepts, hashes.policy}, {{"seed", ab_seed}});
            emit({{"command", "ablate"},
                  {"out", ab_out},
                  {"hash", h},
                  {"baseline_win_rate", report.baseline_win_rate},
                  {"conditions", report.rows.size()}});
        } else if (*finetune) {
            auto cfg = base_config(ft_config);
            bottleneck::ReinforceOptions opts;
            opts.generations = cfg.agent.rl_generations;
            opts.games_per_gen = cfg.agent.rl_games_per_gen;
            opts.lr = cfg.agent.rl_lr;
            opts.seed = cfg.agent.rl_seed;
            if (ft_gen_opt->count()) opts.generations = ft_generations;
            if (ft_games_opt->count()) opts.games_per_gen = ft_games;
            if (ft_lr_opt->count()) opts.lr = ft_lr;
            if (ft_seed_opt->count()) opts.seed = ft_seed;
            if (opts.generations < 1 || opts.games_per_gen < 1 || opts.lr < 0.0)
                throw ConfigError("--generations and --games-per-gen must be >= 1 and lr >= 0");
            const auto ag = artifact::load_agent(ft_agent);
            const auto result = bottleneck::finetune_reinforce(ag, opts);
            const fs::path adir = ft_agent;
            const Json hp = {{"generations", opts.generations}, {"games_per_gen", opts.games_per_gen}, {"lr", opts.lr}};
            const auto h = artifact::save_agent_from(ft_out, adir / "encoder", adir / "concepts", result.policy,
                                                     {artifact::hash_of(adir / "policy")}, hp);
            const auto rh = artifact::save_report(
                fs::path(ft_out) / "learning_curve", "finetune", Json{{"learning_curve", result.learning_curve}},
                {{"finetune_s" + std::to_string(opts.seed) + "_" + short_hash(h.policy) + ".csv",
                  reports::curve_csv(result.learning_curve)}},
                {h.policy}, {{"seed", opts.seed}});
            emit({{"command", "finetune"},
                  {"out", ft_out},
                  {"policy_hash", h.policy},
                  {"report_hash", rh},
                  {"learning_curve", result.learning_curve}});
        } else if (*sweep) {
            const auto cfg = base_config(sw_config);
            const auto ks = parse_int_list(sw_k, "--k");
            for (int k : ks)
                if (k < 1) throw ConfigError("--k values must be >= 1");
            analysis::SweepConfig sc;
            sc.source = cfg.agent;
            sc.target = cfg.target_agent();
            sc.eval_seeds = cfg.eval_seeds;
            sc.eval_games = cfg.eval_games;
            sc.eval_seed = cfg.eval_base_seed;
            const auto rows = analysis::k_sweep(ks, sc);
            Json table = Json::array();
            for (const auto& r : rows)
                table.push_back({{"k", r.k}, {"direct_win_rate", r.direct_win_rate}, {"transfer_win_rate", r.transfer_win_rate}});
            const auto cfg_hash = artifact::hex64(artifact::fnv1a64(config::format(cfg)));
            const auto h = artifact::save_report(sw_out, "sweep-k", Json{{"rows", table}, {"config", config::format(cfg)}},
                                                 {{"sweep_k_s" + std::to_string(cfg.eval_base_seed) + "_" +
                                                       short_hash(cfg_hash) + ".csv",
                                                   reports::csv(rows)}},
                                                 {}, {{"eval", cfg.eval_base_seed}});
            emit({{"command", "sweep-k"}, {"out", sw_out}, {"hash", h}, {"rows", table}});
        }
    } catch (const ArtifactError& e) {
        std::cerr << "ct: " << e.what() << '\n';
        return kExitArtifact;
    } catch (const ConfigError& e) {
        std::cerr << "ct: invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ct: invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "ct: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
