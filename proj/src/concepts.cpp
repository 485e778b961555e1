#include "ct/concepts.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace ct::concepts {

namespace {

using DMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Squared distances (rows x k) via the expanded form. Clamped at zero.
DMatrix squared_distances(const DMatrix& x, const Eigen::VectorXd& x_norms, const DMatrix& c) {
    DMatrix d = -2.0 * (x * c.transpose());
    d.colwise() += x_norms;
    d.rowwise() += c.rowwise().squaredNorm().transpose();
    return d.cwiseMax(0.0);
}

int row_argmin(const DMatrix& d, Eigen::Index row) {
    int best = 0;
    for (Eigen::Index j = 1; j < d.cols(); ++j)
        if (d(row, j) < d(row, best)) best = static_cast<int>(j);
    return best;
}

DMatrix kmeans_plus_plus(const DMatrix& x, int k, Rng& rng) {
    const Eigen::Index n = x.rows();
    DMatrix c(k, x.cols());
    auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    c.row(0) = x.row(first);
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (x.row(i) - c.row(0)).squaredNorm();
    for (int j = 1; j < k; ++j) {
        const auto pick = static_cast<Eigen::Index>(rng.weighted(d2));
        c.row(j) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (x.row(i) - c.row(j)).squaredNorm();
            auto& cur = d2[static_cast<std::size_t>(i)];
            if (d < cur) cur = d;
        }
    }
    return c;
}

void minibatch_passes(const DMatrix& x, const Eigen::VectorXd& x_norms, DMatrix& c, const KMeansOptions& opts,
                      Rng& rng) {
    const Eigen::Index n = x.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::vector<double> counts(static_cast<std::size_t>(c.rows()), 0.0);
    for (int pass = 0; pass < opts.passes; ++pass) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opts.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
            DMatrix batch(static_cast<Eigen::Index>(end - start), x.cols());
            Eigen::VectorXd norms(batch.rows());
            for (std::size_t i = start; i < end; ++i) {
                batch.row(static_cast<Eigen::Index>(i - start)) = x.row(order[i]);
                norms(static_cast<Eigen::Index>(i - start)) = x_norms(order[i]);
            }
            // Assignments are computed against the centres at the start of the batch.
            const DMatrix d = squared_distances(batch, norms, c);
            for (Eigen::Index i = 0; i < batch.rows(); ++i) {
                const int j = row_argmin(d, i);
                auto& cnt = counts[static_cast<std::size_t>(j)];
                cnt += 1.0;
                const double eta = 1.0 / cnt;
                c.row(j) = (1.0 - eta) * c.row(j) + eta * batch.row(i);
            }
        }
    }
}

}  // namespace

ConceptModel fit_kmeans(const FeatureMatrix& features, int k, std::uint64_t seed, const KMeansOptions& opts,
                        FitTrace* trace) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (features.rows() < k) throw std::invalid_argument("insufficient data");
    const DMatrix x = features.cast<double>();
    const Eigen::VectorXd x_norms = x.rowwise().squaredNorm();
    const Eigen::Index n = x.rows();
    Rng rng(seed);

    DMatrix c = kmeans_plus_plus(x, k, rng);
    minibatch_passes(x, x_norms, c, opts, rng);

    FitTrace local;
    FitTrace& tr = trace ? *trace : local;
    tr = FitTrace{};

    std::vector<int> labels(static_cast<std::size_t>(n));
    std::vector<double> nearest(static_cast<std::size_t>(n));
    auto assign_step = [&]() {
        const DMatrix d = squared_distances(x, x_norms, c);
        bool changed = false;
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int j = row_argmin(d, i);
            auto& lab = labels[static_cast<std::size_t>(i)];
            if (lab != j) changed = true;
            lab = j;
            const double exact = (x.row(i) - c.row(j)).squaredNorm();
            nearest[static_cast<std::size_t>(i)] = exact;
            inertia += exact;
        }
        tr.lloyd_inertia.push_back(inertia);
        return changed;
    };

    std::fill(labels.begin(), labels.end(), -1);
    assign_step();
    for (int it = 0; it < opts.max_lloyd_iterations; ++it) {
        DMatrix sums = DMatrix::Zero(k, x.cols());
        std::vector<long> sizes(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int j = labels[static_cast<std::size_t>(i)];
            sums.row(j) += x.row(i);
            ++sizes[static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < k; ++j) {
            if (sizes[static_cast<std::size_t>(j)] > 0) {
                c.row(j) = sums.row(j) / static_cast<double>(sizes[static_cast<std::size_t>(j)]);
                continue;
            }
            // Empty cluster: move it onto the point farthest from its centre.
            Eigen::Index far = 0;
            for (Eigen::Index i = 1; i < n; ++i)
                if (nearest[static_cast<std::size_t>(i)] > nearest[static_cast<std::size_t>(far)]) far = i;
            c.row(j) = x.row(far);
            nearest[static_cast<std::size_t>(far)] = 0.0;
        }
        ++tr.lloyd_iterations;
        if (!assign_step()) {
            tr.converged = true;
            break;
        }
    }

    ConceptModel m;
    m.centroids = c.cast<float>();
    m.k = k;
    m.fit_seed = seed;
    m.feature_count = static_cast<long>(n);
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        inertia += (features.row(i).cast<double>() -
                    m.centroids.row(labels[static_cast<std::size_t>(i)]).cast<double>())
                       .squaredNorm();
    m.inertia = inertia;
    return m;
}

ConceptId assign(const ConceptModel& m, const Eigen::Ref<const Eigen::VectorXf>& f) {
    if (f.size() != m.centroids.cols()) throw std::invalid_argument("assign: feature dimension mismatch");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m.k; ++j) {
        double d = 0.0;
        for (Eigen::Index t = 0; t < f.size(); ++t) {
            const double diff = static_cast<double>(f(t)) - static_cast<double>(m.centroids(j, t));
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return ConceptId{best};
}

std::vector<int> assign_all(const ConceptModel& m, const FeatureMatrix& features) {
    std::vector<int> out(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index i = 0; i < features.rows(); ++i)
        out[static_cast<std::size_t>(i)] = assign(m, features.row(i).transpose()).value;
    return out;
}

double perturbation_robustness(const ConceptModel& m, const FeatureMatrix& features, double sigma, int trials,
                               std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (features.rows() == 0) throw std::invalid_argument("no features");
    Rng rng(seed);
    long kept = 0;
    Eigen::VectorXf noisy(features.cols());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const Eigen::VectorXf f = features.row(i).transpose();
        const ConceptId base = assign(m, f);
        for (int t = 0; t < trials; ++t) {
            for (Eigen::Index d = 0; d < f.size(); ++d)
                noisy(d) = f(d) + static_cast<float>(sigma * rng.normal());
            if (assign(m, noisy) == base) ++kept;
        }
    }
    return static_cast<double>(kept) / (static_cast<double>(features.rows()) * trials);
}

Stability cross_seed_stability(const FeatureMatrix& features, int k, std::span<const std::uint64_t> seeds) {
    if (seeds.size() < 2) throw std::invalid_argument("cross_seed_stability needs at least two seeds");
    std::vector<std::vector<int>> labels;
    for (auto s : seeds) labels.push_back(assign_all(fit_kmeans(features, k, s), features));
    std::vector<double> aris, nmis;
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            aris.push_back(ari(labels[i], labels[j]));
            nmis.push_back(nmi(labels[i], labels[j]));
        }
    auto mean_std = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };
    Stability st;
    std::tie(st.mean_ari, st.std_ari) = mean_std(aris);
    std::tie(st.mean_nmi, st.std_nmi) = mean_std(nmis);
    return st;
}

FeatureMatrix collect_features(const encoder::Encoder& e, int n_games, std::uint64_t seed) {
    if (n_games < 1) throw std::invalid_argument("n_games must be >= 1");
    std::vector<encoder::FeatureVector> rows;
    go::Player player;
    if (e.has_head()) {
        player = [&e](const go::BoardState& s, Rng& rng) {
            const auto mask = go::move_mask(s);
            if (s.move_count() < kRandomOpeningPlies) return go::random_opponent(s, rng);
            return go::Action{nn::masked_argmax<float>(e.head_logits(go::observe(s)), mask)};
        };
    } else {
        player = go::heuristic_opponent;
    }
    for (int g = 0; g < n_games; ++g) {
        Rng black_rng(derive_seed(seed, {static_cast<std::uint64_t>(g), 0}));
        Rng white_rng(derive_seed(seed, {static_cast<std::uint64_t>(g), 1}));
        go::play_out(player, player, black_rng, white_rng,
                     [&](const go::BoardState& s, go::Action) { rows.push_back(e.encode(go::observe(s))); });
    }
    FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), e.feature_dim());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
}

}  // namespace ct::concepts
