#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ct/encoder.hpp"

namespace ct::concepts {

/// One feature vector per row.
using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kDefaultK = 64;
inline constexpr std::uint64_t kDefaultFitSeed = 42;

struct ConceptId {
    int value = 0;
    friend constexpr bool operator==(ConceptId, ConceptId) = default;
};

struct ConceptModel {
    FeatureMatrix centroids;  // k x dim
    int k = 0;
    std::uint64_t fit_seed = 0;
    double inertia = 0.0;
    long feature_count = 0;

    int dim() const { return static_cast<int>(centroids.cols()); }
    friend bool operator==(const ConceptModel&, const ConceptModel&) = default;
};

/// Features of every state visited in n_games self-play games of the
/// encoder's greedy action head (heuristic self-play for encoders without a
/// head). The first few plies of each game are random so that games differ.
FeatureMatrix collect_features(const encoder::Encoder& e, int n_games, std::uint64_t seed);

inline constexpr int kRandomOpeningPlies = 4;

struct KMeansOptions {
    int batch_size = 256;
    int passes = 10;
    int max_lloyd_iterations = 100;
};

struct FitTrace {
    /// Full-batch inertia after each Lloyd assignment step.
    std::vector<double> lloyd_inertia;
    int lloyd_iterations = 0;
    bool converged = false;
};

/// Seeded k-means++ initialization, minibatch passes, then Lloyd refinement
/// to an assignment fixpoint. Throws std::invalid_argument("insufficient data")
/// when there are fewer features than k.
ConceptModel fit_kmeans(const FeatureMatrix& features, int k, std::uint64_t seed, const KMeansOptions& opts = {},
                        FitTrace* trace = nullptr);

/// Nearest centroid in Euclidean distance; lowest index on ties.
ConceptId assign(const ConceptModel& m, const Eigen::Ref<const Eigen::VectorXf>& f);

std::vector<int> assign_all(const ConceptModel& m, const FeatureMatrix& features);

double ari(std::span<const int> a, std::span<const int> b);
double nmi(std::span<const int> a, std::span<const int> b);

/// Fraction of (feature, trial) pairs whose assignment survives isotropic
/// Gaussian noise of standard deviation sigma.
double perturbation_robustness(const ConceptModel& m, const FeatureMatrix& features, double sigma, int trials,
                               std::uint64_t seed);

struct Stability {
    double mean_ari = 0.0;
    double std_ari = 0.0;
    double mean_nmi = 0.0;
    double std_nmi = 0.0;
};

/// Pairwise ARI/NMI between fits that differ only in seed.
Stability cross_seed_stability(const FeatureMatrix& features, int k, std::span<const std::uint64_t> seeds);

}  // namespace ct::concepts
