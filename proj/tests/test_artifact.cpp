#include <unistd.h>

#include <algorithm>
#include <fstream>

#include "doctest.h"
#include "support.hpp"
#include "tiny_agent.hpp"

#include "ct/artifact.hpp"
#include "ct/reports.hpp"
#include "ct/run_config.hpp"

using namespace ct;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ct_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

void flip_byte(const fs::path& p, std::size_t offset) {
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(static_cast<std::streamoff>(offset));
    char c = 0;
    f.get(c);
    f.seekp(static_cast<std::streamoff>(offset));
    f.put(static_cast<char>(c ^ 0x5a));
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
    CHECK(artifact::fnv1a64(std::string()) == 0xcbf29ce484222325ULL);
    CHECK(artifact::fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cULL);
    CHECK(artifact::fnv1a64(std::string("foobar")) == 0x85944171f73967e8ULL);
    CHECK(artifact::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("agent round trip is exact") {
    TempDir tmp;
    const auto& t = testing::tiny_agent();
    const auto hashes = artifact::save_agent(tmp.path / "agent", t.agent, {"abc"});
    const auto back = artifact::load_agent(tmp.path / "agent");
    CHECK(back.encoder == t.agent.encoder);
    CHECK(back.concepts == t.agent.concepts);
    CHECK(back.policy == t.agent.policy);
    const auto again = artifact::agent_hashes(tmp.path / "agent");
    CHECK(again.encoder == hashes.encoder);
    CHECK(again.policy == hashes.policy);

    // Saving the same agent again produces identical bytes.
    artifact::save_agent(tmp.path / "agent2", t.agent, {"abc"});
    for (const char* part : {"encoder", "concepts", "policy"})
        for (const char* file : {artifact::kManifestFile, artifact::kBlobFile})
            CHECK(testing::read_file(tmp.path / "agent" / part / file) ==
                  testing::read_file(tmp.path / "agent2" / part / file));

    const auto policy = artifact::read(tmp.path / "agent" / "policy", "bottleneck_policy");
    CHECK(policy.manifest().created_from == std::vector<std::string>{hashes.encoder, hashes.concepts, "abc"});
}

TEST_CASE("save_agent_from keeps the parent hashes") {
    TempDir tmp;
    const auto& t = testing::tiny_agent();
    const auto h = artifact::save_agent(tmp.path / "a", t.agent, {});
    const auto h2 = artifact::save_agent_from(tmp.path / "b", tmp.path / "a" / "encoder", tmp.path / "a" / "concepts",
                                              t.agent.policy, {h.policy});
    CHECK(h2.encoder == h.encoder);
    CHECK(h2.concepts == h.concepts);
    CHECK(artifact::load_agent(tmp.path / "b").policy == t.agent.policy);
}

TEST_CASE("other artifact kinds round trip") {
    TempDir tmp;
    const auto& t = testing::tiny_agent();
    artifact::save_demos(tmp.path / "demos", t.demos);
    CHECK(artifact::load_demos(tmp.path / "demos") == t.demos);
    artifact::save_encoder(tmp.path / "hand", encoder::Encoder::handcrafted(), {});
    CHECK(artifact::load_encoder(tmp.path / "hand") == encoder::Encoder::handcrafted());
    const auto map = alignment::align(t.agent.concepts, t.agent.concepts, alignment::Method::Random, 4);
    artifact::save_alignment(tmp.path / "map", map, {});
    CHECK(artifact::load_alignment(tmp.path / "map") == map);
    artifact::save_report(tmp.path / "report", "demo", {{"x", 1}}, {{"rows.csv", "a,b\n1,2\n"}}, {}, {{"seed", 3}});
    CHECK(testing::read_file(tmp.path / "report" / "rows.csv") == "a,b\n1,2\n");
    CHECK(artifact::read(tmp.path / "report", "report").manifest().seeds.at("seed") == 3);
}

TEST_CASE("corrupt or missing artifacts are rejected") {
    TempDir tmp;
    const auto& t = testing::tiny_agent();
    const fs::path dir = tmp.path / "enc";
    artifact::save_encoder(dir, t.agent.encoder, {});
    CHECK_THROWS_AS(artifact::load_concepts(dir), artifact::ArtifactError);
    CHECK_THROWS_AS(artifact::load_encoder(tmp.path / "missing"), artifact::ArtifactError);

    flip_byte(dir / artifact::kBlobFile, 100);
    CHECK_THROWS_AS(artifact::load_encoder(dir), artifact::ArtifactError);

    artifact::save_encoder(dir, t.agent.encoder, {});
    fs::resize_file(dir / artifact::kBlobFile, fs::file_size(dir / artifact::kBlobFile) - 4);
    CHECK_THROWS_AS(artifact::load_encoder(dir), artifact::ArtifactError);

    artifact::save_encoder(dir, t.agent.encoder, {});
    std::string manifest = testing::read_file(dir / artifact::kManifestFile);
    const auto pos = manifest.find("\"encoder\"");
    REQUIRE(pos != std::string::npos);
    manifest.replace(pos, 9, "\"encodex\"");
    std::ofstream(dir / artifact::kManifestFile) << manifest;
    CHECK_THROWS_AS(artifact::load_encoder(dir), artifact::ArtifactError);

    std::ofstream(dir / artifact::kManifestFile) << "{not json";
    CHECK_THROWS_AS(artifact::load_encoder(dir), artifact::ArtifactError);
}

TEST_CASE("no temporary directories are left behind") {
    TempDir tmp;
    artifact::save_encoder(tmp.path / "enc", encoder::Encoder::handcrafted(), {});
    artifact::save_encoder(tmp.path / "enc", encoder::Encoder::handcrafted(), {});
    int entries = 0;
    for (const auto& e : fs::directory_iterator(tmp.path)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);
}

TEST_CASE("run config parsing") {
    const auto cfg = config::parse(
        "# comment\n"
        "; another\n"
        "k = 16\n"
        "  encoder_lr=0.02  \n"
        "rl_generations = 0\n"
        "opponent = random\n"
        "komi = 8.5\n");
    CHECK(cfg.agent.k == 16);
    CHECK(cfg.agent.encoder_lr == 0.02);
    CHECK(cfg.agent.rl_generations == 0);
    CHECK(cfg.opponent == "random");
    CHECK(cfg.agent.demo_games == pipeline::AgentConfig{}.demo_games);

    CHECK_THROWS_AS(config::parse("kk = 3\n"), config::ConfigError);
    CHECK_THROWS_AS(config::parse("k = 3\nk = 4\n"), config::ConfigError);
    CHECK_THROWS_AS(config::parse("k = three\n"), config::ConfigError);
    CHECK_THROWS_AS(config::parse("k = 0\n"), config::ConfigError);
    CHECK_THROWS_AS(config::parse("encoder_lr = -1\n"), config::ConfigError);
    CHECK_THROWS_AS(config::parse("komi = 7.5\n"), config::ConfigError);
    CHECK_THROWS_AS(config::parse("opponent = gnugo\n"), config::ConfigError);
    CHECK_THROWS_AS(config::parse("just a line\n"), config::ConfigError);

    // format() output parses back to the same values.
    const auto round = config::parse(config::format(cfg));
    CHECK(config::format(round) == config::format(cfg));
}

TEST_CASE("target agent shifts seeds except k-means") {
    config::RunConfig cfg;
    cfg.target_seed_offset = 10;
    const auto t = cfg.target_agent();
    CHECK(t.encoder_seed == cfg.agent.encoder_seed + 10);
    CHECK(t.demo_seed == cfg.agent.demo_seed + 10);
    CHECK(t.rl_seed == cfg.agent.rl_seed + 10);
    CHECK(t.kmeans_seed == cfg.agent.kmeans_seed);
    CHECK(t.demo_games == cfg.target_demo_games);
}

TEST_CASE("report tables") {
    bottleneck::EvaluationReport r;
    r.win_rates = {0.5, 0.25};
    r.wins = {2, 1};
    r.games_per_seed = 4;
    r.n_games = 8;
    r.opponent = "heuristic";
    const std::string csv = reports::csv(r);
    CHECK(csv.find("seed") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    const std::vector<double> curve = {0.1, 0.2};
    const std::string curve_text = reports::curve_csv(curve);
    CHECK(std::count(curve_text.begin(), curve_text.end(), '\n') == 3);
    CHECK(reports::summary(r)["opponent"] == "heuristic");
}
