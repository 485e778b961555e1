#pragma once

// On-disk artifacts. Every artifact is a directory holding manifest.json and
// tensors.bin, a blob of little-endian float32 tensors located by the
// manifest's tensor index. Directories are written next to the destination
// and renamed into place.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ct/alignment.hpp"
#include "ct/bottleneck.hpp"
#include "ct/encoder.hpp"

namespace ct::artifact {

namespace fs = std::filesystem;
using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kBlobFile = "tensors.bin";

/// Missing, unreadable or corrupt artifact.
class ArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t h);

struct TensorEntry {
    std::string name;
    std::vector<long> shape;
    std::uint64_t offset = 0;  // bytes
    std::uint64_t length = 0;  // bytes
};

struct Manifest {
    std::string artifact_kind;
    int format_version = kFormatVersion;
    std::vector<std::string> created_from;
    std::map<std::string, std::uint64_t> seeds;
    Json hyperparameters = Json::object();
    Json metadata = Json::object();
    std::vector<TensorEntry> tensors;
    std::string blob_hash;
    std::string hash;  // over every other field, so it covers the blob too
};

/// Collects tensors in order and lays them out back to back.
class Blob {
public:
    void add(const std::string& name, std::vector<long> shape, std::span<const float> values);
    /// Row-major copy of an Eigen matrix.
    template <class M>
    void add_matrix(const std::string& name, const M& m) {
        std::vector<float> v;
        v.reserve(static_cast<std::size_t>(m.size()));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(static_cast<float>(m(i, j)));
        add(name, {static_cast<long>(m.rows()), static_cast<long>(m.cols())}, v);
    }

    const std::vector<TensorEntry>& entries() const { return entries_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<TensorEntry> entries_;
    std::vector<std::uint8_t> bytes_;
};

/// A loaded artifact: verified manifest plus tensor access.
class Loaded {
public:
    Loaded(Manifest m, std::vector<std::uint8_t> bytes);

    const Manifest& manifest() const { return manifest_; }
    bool has(const std::string& name) const;
    std::vector<float> values(const std::string& name) const;
    nn::Mat<float> matrix(const std::string& name) const;

private:
    const TensorEntry& entry(const std::string& name) const;

    Manifest manifest_;
    std::vector<std::uint8_t> bytes_;
};

/// Writes manifest and blob atomically into `dir`, replacing any previous
/// artifact there. Fills in the blob hash and artifact hash; returns the latter.
std::string write(const fs::path& dir, Manifest m, const Blob& blob);

/// Reads and verifies an artifact. `expected_kind` empty accepts any kind.
Loaded read(const fs::path& dir, const std::string& expected_kind = {});

/// Artifact hash recorded in a manifest on disk (verified).
std::string hash_of(const fs::path& dir);

/// Writes a text file atomically.
void write_text(const fs::path& path, const std::string& text);

// Typed save/load. `created_from` lists hashes of the input artifacts.

std::string save_demos(const fs::path& dir, const encoder::DemoDataset& d);
encoder::DemoDataset load_demos(const fs::path& dir);

std::string save_encoder(const fs::path& dir, const encoder::Encoder& e, const std::vector<std::string>& created_from,
                         const Json& hyperparameters = Json::object());
encoder::Encoder load_encoder(const fs::path& dir);

std::string save_concepts(const fs::path& dir, const concepts::ConceptModel& cm,
                          const std::vector<std::string>& created_from, const Json& hyperparameters = Json::object());
concepts::ConceptModel load_concepts(const fs::path& dir);

std::string save_policy(const fs::path& dir, const bottleneck::BottleneckPolicy& p,
                        const std::vector<std::string>& created_from, const Json& hyperparameters = Json::object());
bottleneck::BottleneckPolicy load_policy(const fs::path& dir);

std::string save_alignment(const fs::path& dir, const alignment::AlignmentMap& map,
                           const std::vector<std::string>& created_from);
alignment::AlignmentMap load_alignment(const fs::path& dir);

/// Report artifact: a manifest whose metadata holds the summary, plus CSV
/// files copied alongside it.
std::string save_report(const fs::path& dir, const std::string& name, const Json& summary,
                        const std::map<std::string, std::string>& csv_files,
                        const std::vector<std::string>& created_from, const std::map<std::string, std::uint64_t>& seeds);

/// Agent directory: encoder/, concepts/ and policy/ sub-artifacts.
struct AgentHashes {
    std::string encoder, concepts, policy;
};
AgentHashes save_agent(const fs::path& dir, const bottleneck::Agent& ag, const std::vector<std::string>& policy_from,
                       const Json& policy_hyperparameters = Json::object());
/// Agent directory whose encoder and concept model are byte copies of existing
/// artifacts (hashes preserved) and whose policy is new.
AgentHashes save_agent_from(const fs::path& dir, const fs::path& encoder_dir, const fs::path& concepts_dir,
                            const bottleneck::BottleneckPolicy& policy, const std::vector<std::string>& policy_from,
                            const Json& policy_hyperparameters = Json::object());
bottleneck::Agent load_agent(const fs::path& dir);
AgentHashes agent_hashes(const fs::path& dir);

}  // namespace ct::artifact
