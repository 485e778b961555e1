#pragma once

// Small dense-network toolkit shared by the encoder and the bottleneck policy.
// Batches are column-major: one sample per column.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "ct/go.hpp"
#include "ct/random.hpp"

namespace ct::nn {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Logit assigned to illegal actions before the softmax.
inline constexpr double kMaskedLogit = -1e9;

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
template <class T>
Mat<T> glorot_uniform(int rows, int cols, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Mat<T> m(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<T>(rng.uniform(-limit, limit));
    return m;
}

template <class T>
struct Dense {
    Mat<T> weight;  // out x in
    Mat<T> bias;    // out x 1

    static Dense init(int in, int out, Rng& rng) {
        Dense d;
        d.weight = glorot_uniform<T>(out, in, in, out, rng);
        d.bias = Mat<T>::Zero(out, 1);
        return d;
    }

    int in() const { return static_cast<int>(weight.cols()); }
    int out() const { return static_cast<int>(weight.rows()); }

    Mat<T> forward(const Mat<T>& x) const { return (weight * x).colwise() + bias.col(0); }

    template <class U>
    Dense<U> cast() const {
        return Dense<U>{weight.template cast<U>(), bias.template cast<U>()};
    }

    friend bool operator==(const Dense& a, const Dense& b) { return a.weight == b.weight && a.bias == b.bias; }
};

template <class T>
struct DenseGrad {
    Mat<T> weight;
    Mat<T> bias;
};

/// Gradient of a dense layer given its input and the upstream gradient.
template <class T>
DenseGrad<T> dense_backward(const Mat<T>& input, const Mat<T>& upstream) {
    return DenseGrad<T>{upstream * input.transpose(), Mat<T>(upstream.rowwise().sum())};
}

template <class T>
Mat<T> relu(const Mat<T>& x) {
    return x.cwiseMax(T(0));
}

template <class T>
Mat<T> relu_backward(const Mat<T>& pre_activation, const Mat<T>& upstream) {
    return (pre_activation.array() > T(0)).select(upstream, T(0));
}

/// Overwrites illegal-action logits with kMaskedLogit.
template <class T>
void apply_mask(Mat<T>& logits, std::span<const go::LegalMask> masks) {
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const auto& m = masks[static_cast<std::size_t>(j)];
        for (int a = 0; a < go::kNumActions; ++a)
            if (!m[a]) logits(a, j) = static_cast<T>(kMaskedLogit);
    }
}

/// Column-wise softmax.
template <class T>
Mat<T> softmax(const Mat<T>& logits) {
    Mat<T> p(logits.rows(), logits.cols());
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const T mx = logits.col(j).maxCoeff();
        p.col(j) = (logits.col(j).array() - mx).exp().matrix();
        p.col(j) /= p.col(j).sum();
    }
    return p;
}

template <class T>
struct LossAndGrad {
    double loss = 0.0;
    Mat<T> dlogits;
};

/// sum_j w_j * (-log softmax(masked logits_j)[action_j]) and its gradient
/// with respect to the (unmasked) logits. Illegal logits get zero gradient.
template <class T>
LossAndGrad<T> weighted_masked_cross_entropy(Mat<T> logits, std::span<const go::LegalMask> masks,
                                             std::span<const int> actions, std::span<const double> weights) {
    apply_mask(logits, masks);
    LossAndGrad<T> out;
    out.dlogits = softmax(logits);
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const int a = actions[jj];
        const double w = weights[jj];
        const T p = out.dlogits(a, j);
        out.loss += w * -std::log(std::max(static_cast<double>(p), 1e-300));
        out.dlogits(a, j) -= T(1);
        out.dlogits.col(j) *= static_cast<T>(w);
        for (int b = 0; b < go::kNumActions; ++b)
            if (!masks[jj][b]) out.dlogits(b, j) = T(0);
    }
    return out;
}

/// Index of the largest legal logit; lowest index wins ties.
template <class T>
int masked_argmax(const Vec<T>& logits, const go::LegalMask& mask) {
    int best = -1;
    for (int a = 0; a < go::kNumActions; ++a) {
        if (!mask[a]) continue;
        if (best < 0 || logits(a) > logits(best)) best = a;
    }
    return best;
}

/// Draw from the masked softmax of a single logit vector.
template <class T>
int masked_sample(const Vec<T>& logits, const go::LegalMask& mask, Rng& rng) {
    Mat<T> l = logits;
    const go::LegalMask masks[1] = {mask};
    apply_mask(l, masks);
    const Mat<T> p = softmax(l);
    std::vector<double> w(go::kNumActions);
    for (int a = 0; a < go::kNumActions; ++a) w[static_cast<std::size_t>(a)] = mask[a] ? static_cast<double>(p(a, 0)) : 0.0;
    return static_cast<int>(rng.weighted(w));
}

/// SGD with classical momentum: v <- mu v + g; p <- p - lr v.
template <class T>
class Momentum {
public:
    explicit Momentum(double momentum = 0.9) : momentum_(momentum) {}

    /// Parameters must be passed in the same order on every call.
    void step(std::span<Mat<T>* const> params, std::span<const Mat<T>* const> grads, double lr) {
        if (velocity_.empty())
            for (auto* p : params) velocity_.push_back(Mat<T>::Zero(p->rows(), p->cols()));
        for (std::size_t i = 0; i < params.size(); ++i) {
            velocity_[i] = static_cast<T>(momentum_) * velocity_[i] + *grads[i];
            *params[i] -= static_cast<T>(lr) * velocity_[i];
        }
    }

private:
    double momentum_;
    std::vector<Mat<T>> velocity_;
};

}  // namespace ct::nn
