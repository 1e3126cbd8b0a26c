#ifndef LANDMARK_HEAD_BACKWARD_HPP
#define LANDMARK_HEAD_BACKWARD_HPP

#include <cstdint>
#include <vector>

#include "head/losses.hpp"

namespace landmark {

struct Gradients {
    Matrix projection;
    EmbeddingVector bn_gamma, bn_beta;
    Matrix classifier;
};

Gradients zero_gradients(const MetricHead& head, const ClassifierWeights& weights);

struct BatchLosses {
    double total = 0.0;
    double base = 0.0;
    double mix = 0.0;
};

// Single-stream batch: mean over samples of CE(logits(e_i; y_i), y_i).
// Runs a train-mode forward (batch statistics; running stats updated) and
// fills analytic gradients of the batch loss w.r.t. projection, bn_gamma,
// bn_beta and the classifier rows.
BatchLosses backward(MetricHead& head, const ClassifierWeights& weights, const Matrix& x,
                     const std::vector<std::uint64_t>& labels, const LossConfig& cfg,
                     Gradients& grads);

// Dual-stream batch: base stream CE against y_a plus the mixed stream's
// fixed-0.5 pair of CE terms. Both streams share every parameter, so their
// gradients sum. In ArcFace mode each mixed CE term applies the margin to
// its own label.
BatchLosses backward_dual(MetricHead& head, const ClassifierWeights& weights,
                          const Matrix& x_base, const Matrix& x_mixed,
                          const std::vector<std::uint64_t>& labels_a,
                          const std::vector<std::uint64_t>& labels_b,
                          const LossConfig& cfg, Gradients& grads);

} // namespace landmark

#endif
