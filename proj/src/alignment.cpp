#include "ct/alignment.hpp"

#include <Eigen/SVD>
#include <numeric>
#include <stdexcept>

namespace ct::alignment {

const char* method_name(Method m) {
    switch (m) {
        case Method::Hungarian: return "hungarian";
        case Method::GreedyNN: return "greedy_nn";
        case Method::Procrustes: return "procrustes";
        case Method::Random: return "random";
        case Method::Identity: return "identity";
    }
    return "hungarian";
}

Method parse_method(const std::string& s) {
    if (s == "hungarian") return Method::Hungarian;
    if (s == "greedy" || s == "greedy_nn") return Method::GreedyNN;
    if (s == "procrustes") return Method::Procrustes;
    if (s == "random") return Method::Random;
    if (s == "identity") return Method::Identity;
    throw std::invalid_argument("unknown alignment method '" + s + "'");
}

Matrix cosine_similarity(const Matrix& source_rows, const Matrix& target_rows) {
    if (source_rows.cols() != target_rows.cols()) throw std::invalid_argument("similarity: dimension mismatch");
    const Eigen::VectorXd ns = source_rows.rowwise().norm();
    const Eigen::VectorXd nt = target_rows.rowwise().norm();
    Matrix s = source_rows * target_rows.transpose();
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            if (ns(i) == 0.0 || nt(j) == 0.0) {
                s(i, j) = 0.0;
                continue;
            }
            s(i, j) = std::clamp(s(i, j) / (ns(i) * nt(j)), -1.0, 1.0);
        }
    return s;
}

Matrix similarity(const concepts::ConceptModel& source, const concepts::ConceptModel& target) {
    if (source.k != target.k) throw std::invalid_argument("similarity: models have different k");
    if (source.dim() != target.dim()) throw std::invalid_argument("similarity: feature dimension mismatch");
    return cosine_similarity(source.centroids.cast<double>(), target.centroids.cast<double>());
}

Matrix procrustes_rotation(const Matrix& source_rows, const Matrix& target_rows) {
    if (source_rows.rows() != target_rows.rows() || source_rows.cols() != target_rows.cols())
        throw std::invalid_argument("procrustes: shape mismatch");
    const Eigen::JacobiSVD<Matrix> svd(source_rows.transpose() * target_rows, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

namespace {

double mean_matched(const Matrix& sim, const std::vector<std::pair<int, int>>& pairs) {
    double total = 0.0;
    for (const auto& [s, t] : pairs) total += sim(s, t);
    return pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
}

std::vector<std::pair<int, int>> optimal_pairs(const Matrix& sim) {
    const Assignment a = hungarian(-sim);
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < a.columns.size(); ++i) pairs.emplace_back(static_cast<int>(i), a.columns[i]);
    return pairs;
}

}  // namespace

AlignmentMap align(const concepts::ConceptModel& source, const concepts::ConceptModel& target, Method method,
                   std::optional<std::uint64_t> seed) {
    if (method == Method::Random && !seed) throw std::invalid_argument("random alignment requires a seed");
    const Matrix sim = similarity(source, target);
    const int k = source.k;
    AlignmentMap map;
    map.method = method;
    map.seed = seed;
    map.k = k;
    switch (method) {
        case Method::Hungarian:
            map.pairs = optimal_pairs(sim);
            break;
        case Method::Procrustes: {
            const Matrix a = source.centroids.cast<double>();
            const Matrix b = target.centroids.cast<double>();
            const Matrix rotated_sim = cosine_similarity(a * procrustes_rotation(a, b), b);
            map.pairs = optimal_pairs(rotated_sim);
            map.mean_matched_similarity = mean_matched(rotated_sim, map.pairs);
            return map;
        }
        case Method::GreedyNN:
            // Each target concept fetches its most similar source concept.
            for (int j = 0; j < k; ++j) {
                int best = 0;
                for (int i = 1; i < k; ++i)
                    if (sim(i, j) > sim(best, j)) best = i;
                map.pairs.emplace_back(best, j);
            }
            break;
        case Method::Random: {
            std::vector<int> perm(static_cast<std::size_t>(k));
            std::iota(perm.begin(), perm.end(), 0);
            Rng rng(*seed);
            rng.shuffle(perm);
            for (int i = 0; i < k; ++i) map.pairs.emplace_back(i, perm[static_cast<std::size_t>(i)]);
            break;
        }
        case Method::Identity:
            for (int i = 0; i < k; ++i) map.pairs.emplace_back(i, i);
            break;
    }
    map.mean_matched_similarity = mean_matched(sim, map.pairs);
    return map;
}

bottleneck::BottleneckPolicy remap_policy(const bottleneck::BottleneckPolicy& source, const AlignmentMap& map) {
    const int k = source.k();
    if (map.k != k) throw std::invalid_argument("remap_policy: map size differs from policy k");
    const auto& src = source.net.embedding;
    nn::Mat<float> table(k, src.cols());
    std::vector<std::vector<int>> preimage(static_cast<std::size_t>(k));
    for (const auto& [s, t] : map.pairs) {
        if (s < 0 || s >= k || t < 0 || t >= k) throw std::invalid_argument("remap_policy: concept id out of range");
        preimage[static_cast<std::size_t>(t)].push_back(s);
    }
    Eigen::RowVectorXd global_mean = src.cast<double>().colwise().mean();
    for (int j = 0; j < k; ++j) {
        const auto& pre = preimage[static_cast<std::size_t>(j)];
        if (pre.size() == 1) {
            table.row(j) = src.row(pre.front());
            continue;
        }
        if (pre.empty()) {
            table.row(j) = global_mean.cast<float>();
            continue;
        }
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(src.cols());
        for (int s : pre) acc += src.row(s).cast<double>();
        table.row(j) = (acc / static_cast<double>(pre.size())).cast<float>();
    }
    bottleneck::BottleneckPolicy out = source;
    out.net.embedding = std::move(table);
    out.provenance = bottleneck::Provenance::Transferred;
    return out;
}

bottleneck::Agent transfer_with_map(const bottleneck::Agent& source, const bottleneck::Agent& target,
                                    const AlignmentMap& map) {
    source.validate();
    target.validate();
    if (source.concepts.k != target.concepts.k) throw std::invalid_argument("transfer: k mismatch");
    return bottleneck::Agent{target.encoder, target.concepts, remap_policy(source.policy, map)};
}

bottleneck::Agent transfer(const bottleneck::Agent& source, const bottleneck::Agent& target, Method method,
                           std::optional<std::uint64_t> seed) {
    if (source.concepts.k != target.concepts.k) throw std::invalid_argument("transfer: k mismatch");
    if (source.concepts.dim() != target.concepts.dim()) throw std::invalid_argument("transfer: dimension mismatch");
    return transfer_with_map(source, target, align(source.concepts, target.concepts, method, seed));
}

}  // namespace ct::alignment
