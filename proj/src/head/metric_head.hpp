#ifndef LANDMARK_HEAD_METRIC_HEAD_HPP
#define LANDMARK_HEAD_METRIC_HEAD_HPP

#include <cstdint>

#include "core/types.hpp"

namespace landmark {

struct ArcFaceParams {
    double margin = 0.3;
    double scale = 30.0;

    void validate() const;
};

// Projection (the 1x1-conv analog on pooled features) -> batch norm -> L2
// normalization. Running statistics are population statistics tracked with
// momentum.
struct MetricHead {
    std::size_t input_dim = 0;
    std::size_t embedding_dim = 0;
    Matrix projection; // input_dim x embedding_dim
    EmbeddingVector bn_gamma, bn_beta;
    EmbeddingVector bn_running_mean, bn_running_var;
    double bn_momentum = 0.1;
    double bn_epsilon = 1e-5;
};

// Class-center rows, class_count x embedding_dim. Rows are L2-normalized on
// the fly for cosine/ArcFace logits.
struct ClassifierWeights {
    Matrix rows;

    std::size_t class_count() const { return rows.rows; }
};

enum class Mode { kTrain, kEval };

// Everything the analytic backward pass needs from the forward pass.
struct ForwardCache {
    Matrix z;    // post-projection
    EmbeddingVector mean, var, inv_std;
    Matrix xhat; // normalized, pre-affine
    Matrix y;    // post-affine
    EmbeddingVector y_norm;
    Matrix embeddings; // unit rows
};

MetricHead make_head(std::size_t input_dim, std::size_t embedding_dim,
                     double bn_momentum, double bn_epsilon, std::uint64_t init_seed);

ClassifierWeights make_classifier(std::size_t class_count, std::size_t embedding_dim,
                                  std::uint64_t init_seed);

// Train mode uses batch statistics (batch >= 2) and folds them into the
// running statistics; eval mode reads the running statistics and leaves the
// head untouched.
ForwardCache head_forward(MetricHead& head, const Matrix& features, Mode mode);

// Eval-mode forward for a frozen head.
Matrix head_embed(const MetricHead& head, const Matrix& features);

} // namespace landmark

#endif
