#include "head/losses.hpp"

#include <algorithm>
#include <cmath>

#include "core/vector_ops.hpp"

namespace landmark {

EmbeddingVector cosine_logits(const EmbeddingVector& emb, const ClassifierWeights& weights) {
    const std::size_t classes = weights.class_count();
    const std::size_t dim = weights.rows.cols;
    if (emb.size() != dim) raise(Errc::kDimMismatch, "cosine_logits: dim mismatch");

    EmbeddingVector out(classes);
    for (std::size_t j = 0; j < classes; ++j) {
        const double* w = weights.rows.row(j);
        double norm_sq = 0.0, prod = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            norm_sq += w[c] * w[c];
            prod += w[c] * emb[c];
        }
        const double norm = std::sqrt(norm_sq);
        if (norm <= kZeroNormThreshold)
            raise(Errc::kZeroVector, "cosine_logits: zero class weight row");
        out[j] = std::clamp(prod / norm, -1.0, 1.0);
    }
    return out;
}

EmbeddingVector arcface_logits(const EmbeddingVector& emb, const ClassifierWeights& weights,
                               std::size_t target, const ArcFaceParams& params) {
    params.validate();
    if (target >= weights.class_count())
        raise(Errc::kInvalidTarget, "arcface_logits: target out of range");

    EmbeddingVector logits = cosine_logits(emb, weights);
    const double theta = std::acos(logits[target]);
    logits[target] = std::cos(theta + params.margin);
    for (double& z : logits) z *= params.scale;
    return logits;
}

EmbeddingVector dot_logits(const EmbeddingVector& emb, const ClassifierWeights& weights) {
    const std::size_t classes = weights.class_count();
    const std::size_t dim = weights.rows.cols;
    if (emb.size() != dim) raise(Errc::kDimMismatch, "dot_logits: dim mismatch");

    EmbeddingVector out(classes, 0.0);
    for (std::size_t j = 0; j < classes; ++j) {
        const double* w = weights.rows.row(j);
        for (std::size_t c = 0; c < dim; ++c) out[j] += w[c] * emb[c];
    }
    return out;
}

double softmax_ce(const EmbeddingVector& logits, std::size_t target) {
    if (target >= logits.size()) raise(Errc::kInvalidTarget, "softmax_ce: target out of range");
    for (double z : logits)
        if (!std::isfinite(z)) raise(Errc::kInvalidArgument, "softmax_ce: non-finite logit");

    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - zmax);
    return -(logits[target] - zmax) + std::log(sum);
}

DualLoss dual_stream_loss(const EmbeddingVector& logits_base,
                          const EmbeddingVector& logits_mix, std::size_t y_a,
                          std::size_t y_b) {
    if (logits_base.size() != logits_mix.size())
        raise(Errc::kDimMismatch, "dual_stream_loss: class counts differ");
    DualLoss loss;
    loss.base = softmax_ce(logits_base, y_a);
    loss.mix = 0.5 * softmax_ce(logits_mix, y_a) + 0.5 * softmax_ce(logits_mix, y_b);
    loss.total = loss.base + loss.mix;
    return loss;
}

double poly_lr(std::size_t step, double lr0, std::size_t total_steps, double power) {
    if (total_steps < 1) raise(Errc::kInvalidArgument, "poly_lr: total_steps must be >= 1");
    if (step > total_steps) raise(Errc::kInvalidArgument, "poly_lr: step beyond schedule");
    const double frac = 1.0 - static_cast<double>(step) / static_cast<double>(total_steps);
    return lr0 * std::pow(frac, power);
}

} // namespace landmark
