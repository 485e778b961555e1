#include "ct/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace ct::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || v.empty())
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
    return out;
}

int positive_int(const std::string& key, const std::string& v) {
    const int x = parse_number<int>(key, v);
    if (x < 1) throw ConfigError("config key '" + key + "' must be >= 1");
    return x;
}

int non_negative_int(const std::string& key, const std::string& v) {
    const int x = parse_number<int>(key, v);
    if (x < 0) throw ConfigError("config key '" + key + "' must be >= 0");
    return x;
}

double positive_real(const std::string& key, const std::string& v) {
    const double x = parse_number<double>(key, v);
    if (!(x > 0.0)) throw ConfigError("config key '" + key + "' must be > 0");
    return x;
}

std::string num(double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
}

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class M>
Field int_field(M member, bool allow_zero = false) {
    return {[member, allow_zero](RunConfig& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = allow_zero ? non_negative_int(k, v) : positive_int(k, v);
            },
            [member](const RunConfig& c) { return std::to_string(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

template <class M>
Field seed_field(M member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = parse_number<std::uint64_t>(k, v);
            },
            [member](const RunConfig& c) { return std::to_string(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

template <class M>
Field real_field(M member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = positive_real(k, v);
            },
            [member](const RunConfig& c) { return num(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["demo_games"] = int_field([](RunConfig& c) -> auto& { return c.agent.demo_games; });
        t["demo_seed"] = seed_field([](RunConfig& c) -> auto& { return c.agent.demo_seed; });
        t["encoder_epochs"] = int_field([](RunConfig& c) -> auto& { return c.agent.encoder_epochs; });
        t["encoder_lr"] = real_field([](RunConfig& c) -> auto& { return c.agent.encoder_lr; });
        t["encoder_seed"] = seed_field([](RunConfig& c) -> auto& { return c.agent.encoder_seed; });
        t["feature_games"] = int_field([](RunConfig& c) -> auto& { return c.agent.feature_games; });
        t["feature_seed"] = seed_field([](RunConfig& c) -> auto& { return c.agent.feature_seed; });
        t["k"] = int_field([](RunConfig& c) -> auto& { return c.agent.k; });
        t["kmeans_seed"] = seed_field([](RunConfig& c) -> auto& { return c.agent.kmeans_seed; });
        t["d"] = int_field([](RunConfig& c) -> auto& { return c.agent.embedding_dim; });
        t["bottleneck_epochs"] = int_field([](RunConfig& c) -> auto& { return c.agent.bottleneck_epochs; });
        t["bottleneck_lr"] = real_field([](RunConfig& c) -> auto& { return c.agent.bottleneck_lr; });
        t["bottleneck_seed"] = seed_field([](RunConfig& c) -> auto& { return c.agent.bottleneck_seed; });
        t["rl_generations"] = int_field([](RunConfig& c) -> auto& { return c.agent.rl_generations; }, true);
        t["rl_games_per_gen"] = int_field([](RunConfig& c) -> auto& { return c.agent.rl_games_per_gen; });
        t["rl_lr"] = real_field([](RunConfig& c) -> auto& { return c.agent.rl_lr; });
        t["rl_seed"] = seed_field([](RunConfig& c) -> auto& { return c.agent.rl_seed; });
        t["target_seed_offset"] = seed_field([](RunConfig& c) -> auto& { return c.target_seed_offset; });
        t["target_demo_games"] = int_field([](RunConfig& c) -> auto& { return c.target_demo_games; });
        t["eval_seeds"] = int_field([](RunConfig& c) -> auto& { return c.eval_seeds; });
        t["eval_games"] = int_field([](RunConfig& c) -> auto& { return c.eval_games; });
        t["eval_base_seed"] = seed_field([](RunConfig& c) -> auto& { return c.eval_base_seed; });
        t["opponent"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             if (v != "heuristic" && v != "random")
                                 throw ConfigError("config key '" + k + "' must be heuristic or random");
                             c.opponent = v;
                         },
                         [](const RunConfig& c) { return c.opponent; }};
        t["komi"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                         const double x = parse_number<double>(k, v);
                         // The engine scores with a fixed komi; the key exists so configs state it.
                         if (x != go::kKomi) throw ConfigError("komi is fixed at " + num(go::kKomi));
                         c.komi = x;
                     },
                     [](const RunConfig& c) { return num(c.komi); }};
        return t;
    }();
    return table;
}

}  // namespace

pipeline::AgentConfig RunConfig::target_agent() const {
    pipeline::AgentConfig t = agent;
    t.demo_games = target_demo_games;
    t.demo_seed += target_seed_offset;
    t.encoder_seed += target_seed_offset;
    t.feature_seed += target_seed_offset;
    t.bottleneck_seed += target_seed_offset;
    t.rl_seed += target_seed_offset;
    return t;
}

void set(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(cfg, key, value);
}

RunConfig parse(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError("duplicate config key '" + key + "'");
        set(cfg, key, value);
    }
    return cfg;
}

RunConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string format(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, f] : fields()) out += key + " = " + f.get(cfg) + "\n";
    return out;
}

}  // namespace ct::config
