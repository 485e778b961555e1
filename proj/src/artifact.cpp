#include "ct/artifact.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ct::artifact {

namespace {

Json manifest_body(const Manifest& m) {
    Json tensors = Json::array();
    for (const auto& t : m.tensors)
        tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", t.offset}, {"length", t.length}});
    return Json{{"artifact_kind", m.artifact_kind},
                {"format_version", m.format_version},
                {"created_from", m.created_from},
                {"seeds", m.seeds},
                {"hyperparameters", m.hyperparameters},
                {"metadata", m.metadata},
                {"tensors", tensors},
                {"blob_hash", m.blob_hash}};
}

std::string compute_hash(const Manifest& m) { return hex64(fnv1a64(manifest_body(m).dump())); }

Manifest parse_manifest(const Json& j) {
    Manifest m;
    m.artifact_kind = j.at("artifact_kind").get<std::string>();
    m.format_version = j.at("format_version").get<int>();
    m.created_from = j.at("created_from").get<std::vector<std::string>>();
    m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    m.hyperparameters = j.at("hyperparameters");
    m.metadata = j.at("metadata");
    for (const auto& t : j.at("tensors")) {
        m.tensors.push_back(TensorEntry{t.at("name").get<std::string>(), t.at("shape").get<std::vector<long>>(),
                                        t.at("offset").get<std::uint64_t>(), t.at("length").get<std::uint64_t>()});
    }
    m.blob_hash = j.at("blob_hash").get<std::string>();
    m.hash = j.at("hash").get<std::string>();
    return m;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ArtifactError("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const void* data, std::size_t n) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot write " + p.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw ArtifactError("write failed: " + p.string());
}

fs::path temp_sibling(const fs::path& target) {
    fs::path parent = target.parent_path();
    if (parent.empty()) parent = ".";
    fs::create_directories(parent);
    return parent / (".tmp-" + target.filename().string());
}

/// Moves a finished temporary file or directory over `target`.
void commit(const fs::path& tmp, const fs::path& target) {
    std::error_code ec;
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(tmp, target, ec);
    if (ec) throw ArtifactError("cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
}

/// Writes manifest and blob into an existing directory (no rename).
std::string write_into(const fs::path& dir, Manifest m, const Blob& blob) {
    m.format_version = kFormatVersion;
    m.tensors = blob.entries();
    m.blob_hash = hex64(fnv1a64(blob.bytes()));
    m.hash = compute_hash(m);
    Json j = manifest_body(m);
    j["hash"] = m.hash;
    write_bytes(dir / kBlobFile, blob.bytes().data(), blob.bytes().size());
    const std::string text = j.dump(2) + "\n";
    write_bytes(dir / kManifestFile, text.data(), text.size());
    return m.hash;
}

Json loss_json(const std::vector<double>& v) { return Json(v); }

nn::Dense<float> load_dense(const Loaded& a, const std::string& prefix) {
    nn::Dense<float> d;
    d.weight = a.matrix(prefix + ".weight");
    d.bias = a.matrix(prefix + ".bias");
    if (d.bias.rows() != d.weight.rows() || d.bias.cols() != 1)
        throw ArtifactError("layer " + prefix + " has inconsistent shapes");
    return d;
}

void add_dense(Blob& b, const std::string& prefix, const nn::Dense<float>& d) {
    b.add_matrix(prefix + ".weight", d.weight);
    b.add_matrix(prefix + ".bias", d.bias);
}

template <class F>
auto guarded(const fs::path& dir, F f) -> decltype(f()) {
    try {
        return f();
    } catch (const ArtifactError&) {
        throw;
    } catch (const std::exception& e) {
        throw ArtifactError(dir.string() + ": " + e.what());
    }
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t h) {
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t h) {
    return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()), h);
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void Blob::add(const std::string& name, std::vector<long> shape, std::span<const float> values) {
    long n = 1;
    for (long d : shape) n *= d;
    if (n != static_cast<long>(values.size())) throw std::invalid_argument("Blob::add: shape does not match data");
    TensorEntry e{name, std::move(shape), bytes_.size(), values.size() * 4};
    for (float v : values) {
        const auto u = std::bit_cast<std::uint32_t>(v);
        for (int k = 0; k < 4; ++k) bytes_.push_back(static_cast<std::uint8_t>(u >> (8 * k)));
    }
    entries_.push_back(std::move(e));
}

Loaded::Loaded(Manifest m, std::vector<std::uint8_t> bytes) : manifest_(std::move(m)), bytes_(std::move(bytes)) {}

bool Loaded::has(const std::string& name) const {
    for (const auto& t : manifest_.tensors)
        if (t.name == name) return true;
    return false;
}

const TensorEntry& Loaded::entry(const std::string& name) const {
    for (const auto& t : manifest_.tensors)
        if (t.name == name) return t;
    throw ArtifactError("missing tensor " + name);
}

std::vector<float> Loaded::values(const std::string& name) const {
    const auto& t = entry(name);
    std::vector<float> v(t.length / 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint32_t u = 0;
        for (int k = 0; k < 4; ++k) u |= static_cast<std::uint32_t>(bytes_[t.offset + i * 4 + k]) << (8 * k);
        v[i] = std::bit_cast<float>(u);
    }
    return v;
}

nn::Mat<float> Loaded::matrix(const std::string& name) const {
    const auto& t = entry(name);
    if (t.shape.size() != 2) throw ArtifactError("tensor " + name + " is not a matrix");
    const auto v = values(name);
    nn::Mat<float> m(t.shape[0], t.shape[1]);
    for (long i = 0; i < t.shape[0]; ++i)
        for (long j = 0; j < t.shape[1]; ++j) m(i, j) = v[static_cast<std::size_t>(i * t.shape[1] + j)];
    return m;
}

std::string write(const fs::path& dir, Manifest m, const Blob& blob) {
    const fs::path tmp = temp_sibling(dir);
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    const std::string h = write_into(tmp, std::move(m), blob);
    commit(tmp, dir);
    return h;
}

Loaded read(const fs::path& dir, const std::string& expected_kind) {
    if (!fs::is_directory(dir)) throw ArtifactError("artifact not found: " + dir.string());
    Manifest m;
    try {
        const auto text = read_bytes(dir / kManifestFile);
        m = parse_manifest(Json::parse(text.begin(), text.end()));
    } catch (const ArtifactError&) {
        throw;
    } catch (const std::exception& e) {
        throw ArtifactError("corrupt manifest in " + dir.string() + ": " + e.what());
    }
    if (m.format_version != kFormatVersion)
        throw ArtifactError(dir.string() + ": unsupported format version " + std::to_string(m.format_version));
    if (!expected_kind.empty() && m.artifact_kind != expected_kind)
        throw ArtifactError(dir.string() + ": expected a " + expected_kind + " artifact, found " + m.artifact_kind);
    if (compute_hash(m) != m.hash) throw ArtifactError(dir.string() + ": manifest hash mismatch");
    auto bytes = read_bytes(dir / kBlobFile);
    if (hex64(fnv1a64(bytes)) != m.blob_hash) throw ArtifactError(dir.string() + ": blob hash mismatch");
    for (const auto& t : m.tensors) {
        long n = 1;
        for (long d : t.shape) n *= d;
        if (t.length != static_cast<std::uint64_t>(n) * 4 || t.offset + t.length > bytes.size())
            throw ArtifactError(dir.string() + ": tensor " + t.name + " does not fit the blob");
    }
    return Loaded(std::move(m), std::move(bytes));
}

std::string hash_of(const fs::path& dir) { return read(dir).manifest().hash; }

void write_text(const fs::path& path, const std::string& text) {
    const fs::path tmp = temp_sibling(path);
    write_bytes(tmp, text.data(), text.size());
    commit(tmp, path);
}

// ---- demos

std::string save_demos(const fs::path& dir, const encoder::DemoDataset& d) {
    const long n = static_cast<long>(d.size());
    std::vector<float> obs, actions, masks;
    obs.reserve(static_cast<std::size_t>(n) * go::kObservationSize);
    for (const auto& s : d.samples) {
        obs.insert(obs.end(), s.obs.planes.begin(), s.obs.planes.end());
        actions.push_back(static_cast<float>(s.action.index));
        for (int a = 0; a < go::kNumActions; ++a) masks.push_back(s.mask[a] ? 1.0f : 0.0f);
    }
    Blob b;
    b.add("observations", {n, go::kObservationSize}, obs);
    b.add("actions", {n}, actions);
    b.add("masks", {n, go::kNumActions}, masks);
    Manifest m;
    m.artifact_kind = "demo_dataset";
    m.seeds = {{"collect", d.seed}};
    m.hyperparameters = {{"games", d.n_games}};
    m.metadata = {{"samples", n}};
    return write(dir, std::move(m), b);
}

encoder::DemoDataset load_demos(const fs::path& dir) {
    const Loaded a = read(dir, "demo_dataset");
    return guarded(dir, [&] {
        encoder::DemoDataset d;
        d.n_games = a.manifest().hyperparameters.at("games").get<int>();
        d.seed = a.manifest().seeds.at("collect");
        const auto obs = a.values("observations");
        const auto actions = a.values("actions");
        const auto masks = a.values("masks");
        const std::size_t n = actions.size();
        if (obs.size() != n * go::kObservationSize || masks.size() != n * go::kNumActions)
            throw ArtifactError("demo tensors disagree on sample count");
        d.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = d.samples[i];
            std::copy_n(obs.begin() + static_cast<long>(i * go::kObservationSize), go::kObservationSize,
                        s.obs.planes.begin());
            s.action = go::Action{static_cast<int>(actions[i])};
            for (int k = 0; k < go::kNumActions; ++k) s.mask[k] = masks[i * go::kNumActions + k] != 0.0f;
            if (s.action.index < 0 || s.action.index >= go::kNumActions || !s.mask[s.action.index])
                throw ArtifactError("demo sample with an action outside its mask");
        }
        return d;
    });
}

// ---- encoder

std::string save_encoder(const fs::path& dir, const encoder::Encoder& e, const std::vector<std::string>& created_from,
                         const Json& hyperparameters) {
    Blob b;
    Manifest m;
    m.artifact_kind = "encoder";
    m.created_from = created_from;
    m.seeds = {{"init", e.seed()}};
    m.hyperparameters = hyperparameters;
    m.metadata = {{"type", e.kind() == encoder::Encoder::Kind::Network ? "network" : "handcrafted"},
                  {"feature_dim", e.feature_dim()},
                  {"training_steps", e.training_steps()},
                  {"loss_history", loss_json(e.loss_history())}};
    if (e.kind() == encoder::Encoder::Kind::Network) {
        add_dense(b, "hidden", e.net().hidden);
        add_dense(b, "feature", e.net().feature);
        add_dense(b, "head", e.net().head);
    }
    return write(dir, std::move(m), b);
}

encoder::Encoder load_encoder(const fs::path& dir) {
    const Loaded a = read(dir, "encoder");
    return guarded(dir, [&] {
        const auto& md = a.manifest().metadata;
        if (md.at("type").get<std::string>() == "handcrafted") return encoder::Encoder::handcrafted();
        encoder::EncoderNet<float> net;
        net.hidden = load_dense(a, "hidden");
        net.feature = load_dense(a, "feature");
        net.head = load_dense(a, "head");
        if (net.hidden.in() != go::kObservationSize || net.feature.in() != net.hidden.weight.rows() ||
            net.head.in() != net.feature.weight.rows() || net.head.weight.rows() != go::kNumActions)
            throw ArtifactError("encoder layers do not chain");
        return encoder::Encoder::from_network(std::move(net), a.manifest().seeds.at("init"),
                                              md.at("training_steps").get<long>(),
                                              md.at("loss_history").get<std::vector<double>>());
    });
}

// ---- concepts

std::string save_concepts(const fs::path& dir, const concepts::ConceptModel& cm,
                          const std::vector<std::string>& created_from, const Json& hyperparameters) {
    Blob b;
    b.add_matrix("centroids", cm.centroids);
    Manifest m;
    m.artifact_kind = "concept_model";
    m.created_from = created_from;
    m.seeds = {{"fit", cm.fit_seed}};
    m.hyperparameters = hyperparameters;
    m.hyperparameters["k"] = cm.k;
    m.metadata = {{"inertia", cm.inertia}, {"feature_count", cm.feature_count}};
    return write(dir, std::move(m), b);
}

concepts::ConceptModel load_concepts(const fs::path& dir) {
    const Loaded a = read(dir, "concept_model");
    return guarded(dir, [&] {
        concepts::ConceptModel cm;
        cm.centroids = a.matrix("centroids");
        cm.k = a.manifest().hyperparameters.at("k").get<int>();
        cm.fit_seed = a.manifest().seeds.at("fit");
        cm.inertia = a.manifest().metadata.at("inertia").get<double>();
        cm.feature_count = a.manifest().metadata.at("feature_count").get<long>();
        if (cm.centroids.rows() != cm.k) throw ArtifactError("centroid count differs from k");
        return cm;
    });
}

// ---- policy

std::string save_policy(const fs::path& dir, const bottleneck::BottleneckPolicy& p,
                        const std::vector<std::string>& created_from, const Json& hyperparameters) {
    Blob b;
    b.add_matrix("embedding", p.net.embedding);
    add_dense(b, "hidden", p.net.hidden);
    add_dense(b, "out", p.net.out);
    Manifest m;
    m.artifact_kind = "bottleneck_policy";
    m.created_from = created_from;
    m.seeds = {{"init", p.seed}};
    m.hyperparameters = hyperparameters;
    m.hyperparameters["k"] = p.k();
    m.metadata = {{"provenance", bottleneck::provenance_name(p.provenance)}};
    return write(dir, std::move(m), b);
}

bottleneck::BottleneckPolicy load_policy(const fs::path& dir) {
    const Loaded a = read(dir, "bottleneck_policy");
    return guarded(dir, [&] {
        bottleneck::BottleneckPolicy p;
        p.net.embedding = a.matrix("embedding");
        p.net.hidden = load_dense(a, "hidden");
        p.net.out = load_dense(a, "out");
        p.seed = a.manifest().seeds.at("init");
        p.provenance = bottleneck::parse_provenance(a.manifest().metadata.at("provenance").get<std::string>());
        if (p.net.hidden.in() != p.net.embedding.cols() || p.net.out.in() != p.net.hidden.weight.rows() ||
            p.net.out.weight.rows() != go::kNumActions)
            throw ArtifactError("policy layers do not chain");
        if (p.k() != a.manifest().hyperparameters.at("k").get<int>()) throw ArtifactError("embedding rows differ from k");
        return p;
    });
}

// ---- alignment

std::string save_alignment(const fs::path& dir, const alignment::AlignmentMap& map,
                           const std::vector<std::string>& created_from) {
    Manifest m;
    m.artifact_kind = "alignment_map";
    m.created_from = created_from;
    if (map.seed) m.seeds = {{"align", *map.seed}};
    m.hyperparameters = {{"method", alignment::method_name(map.method)}, {"k", map.k}};
    Json pairs = Json::array();
    for (const auto& [s, t] : map.pairs) pairs.push_back({s, t});
    m.metadata = {{"pairs", pairs}, {"mean_matched_similarity", map.mean_matched_similarity}};
    return write(dir, std::move(m), Blob{});
}

alignment::AlignmentMap load_alignment(const fs::path& dir) {
    const Loaded a = read(dir, "alignment_map");
    return guarded(dir, [&] {
        alignment::AlignmentMap map;
        const auto& man = a.manifest();
        map.method = alignment::parse_method(man.hyperparameters.at("method").get<std::string>());
        map.k = man.hyperparameters.at("k").get<int>();
        if (auto it = man.seeds.find("align"); it != man.seeds.end()) map.seed = it->second;
        for (const auto& p : man.metadata.at("pairs")) map.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        map.mean_matched_similarity = man.metadata.at("mean_matched_similarity").get<double>();
        std::vector<char> seen(static_cast<std::size_t>(map.k), 0);
        for (const auto& [s, t] : map.pairs) {
            if (s < 0 || s >= map.k || t < 0 || t >= map.k || seen[static_cast<std::size_t>(t)]++)
                throw ArtifactError("alignment pairs are not a valid matching");
        }
        return map;
    });
}

// ---- reports

std::string save_report(const fs::path& dir, const std::string& name, const Json& summary,
                        const std::map<std::string, std::string>& csv_files,
                        const std::vector<std::string>& created_from,
                        const std::map<std::string, std::uint64_t>& seeds) {
    const fs::path tmp = temp_sibling(dir);
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    Manifest m;
    m.artifact_kind = "report";
    m.created_from = created_from;
    m.seeds = seeds;
    m.metadata = {{"name", name}, {"summary", summary}, {"files", Json::object()}};
    for (const auto& [file, text] : csv_files) {
        write_bytes(tmp / file, text.data(), text.size());
        m.metadata["files"][file] = hex64(fnv1a64(text));
    }
    const std::string h = write_into(tmp, std::move(m), Blob{});
    commit(tmp, dir);
    return h;
}

// ---- agents

AgentHashes save_agent(const fs::path& dir, const bottleneck::Agent& ag, const std::vector<std::string>& policy_from,
                       const Json& policy_hyperparameters) {
    ag.validate();
    const fs::path tmp = temp_sibling(dir);
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    AgentHashes h;
    h.encoder = save_encoder(tmp / "encoder", ag.encoder, {});
    h.concepts = save_concepts(tmp / "concepts", ag.concepts, {h.encoder});
    std::vector<std::string> from = {h.encoder, h.concepts};
    from.insert(from.end(), policy_from.begin(), policy_from.end());
    h.policy = save_policy(tmp / "policy", ag.policy, from, policy_hyperparameters);
    commit(tmp, dir);
    return h;
}

AgentHashes save_agent_from(const fs::path& dir, const fs::path& encoder_dir, const fs::path& concepts_dir,
                            const bottleneck::BottleneckPolicy& policy, const std::vector<std::string>& policy_from,
                            const Json& policy_hyperparameters) {
    bottleneck::Agent ag{load_encoder(encoder_dir), load_concepts(concepts_dir), policy};
    ag.validate();
    const fs::path tmp = temp_sibling(dir);
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    for (const auto& [src, name] : {std::pair{encoder_dir, "encoder"}, std::pair{concepts_dir, "concepts"}}) {
        fs::create_directories(tmp / name);
        for (const char* f : {kManifestFile, kBlobFile}) fs::copy_file(src / f, tmp / name / f);
    }
    AgentHashes h{hash_of(tmp / "encoder"), hash_of(tmp / "concepts"), {}};
    std::vector<std::string> from = {h.encoder, h.concepts};
    from.insert(from.end(), policy_from.begin(), policy_from.end());
    h.policy = save_policy(tmp / "policy", policy, from, policy_hyperparameters);
    commit(tmp, dir);
    return h;
}

bottleneck::Agent load_agent(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ArtifactError("agent directory not found: " + dir.string());
    bottleneck::Agent ag{load_encoder(dir / "encoder"), load_concepts(dir / "concepts"), load_policy(dir / "policy")};
    try {
        ag.validate();
    } catch (const std::exception& e) {
        throw ArtifactError(dir.string() + ": " + e.what());
    }
    return ag;
}

AgentHashes agent_hashes(const fs::path& dir) {
    return {hash_of(dir / "encoder"), hash_of(dir / "concepts"), hash_of(dir / "policy")};
}

}  // namespace ct::artifact
