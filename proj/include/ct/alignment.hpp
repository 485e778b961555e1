#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ct/bottleneck.hpp"
#include "ct/concepts.hpp"

namespace ct::alignment {

using Matrix = Eigen::MatrixXd;

/// Entry (i, j) is the cosine similarity of source centroid i and target centroid j.
/// A zero-norm centroid has similarity 0 with everything.
Matrix similarity(const concepts::ConceptModel& source, const concepts::ConceptModel& target);
Matrix cosine_similarity(const Matrix& source_rows, const Matrix& target_rows);

struct Assignment {
    std::vector<int> columns;  // row i is assigned column columns[i]
    double cost = 0.0;
};

/// Minimum-cost perfect assignment of a square cost matrix, O(n^3). Among
/// optimal assignments the lexicographically smallest column vector is returned.
/// Throws std::invalid_argument on non-square or non-finite input.
Assignment hungarian(const Matrix& cost);

enum class Method { Hungarian, GreedyNN, Procrustes, Random, Identity };

const char* method_name(Method m);
/// Accepts "hungarian", "greedy" / "greedy_nn", "procrustes", "random", "identity".
Method parse_method(const std::string& s);

struct AlignmentMap {
    std::vector<std::pair<int, int>> pairs;  // (source concept_id, target concept_id)
    Method method = Method::Hungarian;
    double mean_matched_similarity = 0.0;
    std::optional<std::uint64_t> seed;
    int k = 0;

    friend bool operator==(const AlignmentMap&, const AlignmentMap&) = default;
};

/// Orthogonal R minimizing ||A R - B||_F (no centering).
Matrix procrustes_rotation(const Matrix& source_rows, const Matrix& target_rows);

/// Throws std::invalid_argument for Method::Random without a seed or mismatched models.
AlignmentMap align(const concepts::ConceptModel& source, const concepts::ConceptModel& target, Method method,
                   std::optional<std::uint64_t> seed = std::nullopt);

/// Target row j becomes the mean of the source rows mapped to j; rows with no
/// preimage get the mean of all source rows. MLP weights are copied.
bottleneck::BottleneckPolicy remap_policy(const bottleneck::BottleneckPolicy& source, const AlignmentMap& map);

/// Target encoder and concepts with the source policy remapped into them.
bottleneck::Agent transfer(const bottleneck::Agent& source, const bottleneck::Agent& target, Method method,
                           std::optional<std::uint64_t> seed = std::nullopt);

/// Same as transfer with a precomputed map.
bottleneck::Agent transfer_with_map(const bottleneck::Agent& source, const bottleneck::Agent& target,
                                    const AlignmentMap& map);

}  // namespace ct::alignment
