#ifndef LANDMARK_HEAD_LOSSES_HPP
#define LANDMARK_HEAD_LOSSES_HPP

#include "head/metric_head.hpp"

namespace landmark {

enum class LossKind {
    kSoftmax, // plain inner-product logits, the pre-training loss
    kArcFace, // scaled cosine with additive angular margin on the target
};

struct LossConfig {
    LossKind kind = LossKind::kSoftmax;
    ArcFaceParams arcface{};
};

// logit_j = cos(angle(emb, W_j)), rows normalized, output clamped to [-1, 1].
// emb must already be unit-norm.
EmbeddingVector cosine_logits(const EmbeddingVector& emb, const ClassifierWeights& weights);

// logit_target = s * cos(theta_target + m); logit_j = s * cos(theta_j) otherwise.
EmbeddingVector arcface_logits(const EmbeddingVector& emb, const ClassifierWeights& weights,
                               std::size_t target, const ArcFaceParams& params);

// Unnormalized inner products W * emb, the "ordinary softmax" logits.
EmbeddingVector dot_logits(const EmbeddingVector& emb, const ClassifierWeights& weights);

// -log softmax(logits)[target], max-subtracted for stability.
double softmax_ce(const EmbeddingVector& logits, std::size_t target);

struct DualLoss {
    double total = 0.0;
    double base = 0.0;
    double mix = 0.0;
};

// L_base = CE(logits_base, y_a);
// L_mix  = 0.5 * CE(logits_mix, y_a) + 0.5 * CE(logits_mix, y_b);
// total is computed as base + mix so the identity holds exactly.
DualLoss dual_stream_loss(const EmbeddingVector& logits_base,
                          const EmbeddingVector& logits_mix, std::size_t y_a,
                          std::size_t y_b);

// lr = lr0 * (1 - t/T)^power
double poly_lr(std::size_t step, double lr0, std::size_t total_steps, double power);

} // namespace landmark

#endif
