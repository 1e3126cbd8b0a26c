#ifndef LANDMARK_CORE_VECTOR_OPS_HPP
#define LANDMARK_CORE_VECTOR_OPS_HPP

#include "core/types.hpp"

namespace landmark {

inline constexpr double kZeroNormThreshold = 1e-12;

double l2_norm(const EmbeddingVector& v);

double dot(const EmbeddingVector& a, const EmbeddingVector& b);

// Throws ZeroVector when the norm is at or below kZeroNormThreshold.
EmbeddingVector l2_normalize(const EmbeddingVector& v);

// Cosine similarity in [-1, 1]. The clamp protects downstream arccos from
// values like 1 + 2e-16 produced by rounding.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Global average pooling: output dim = channels.
EmbeddingVector gap_pool(const FeatureGrid& g);

// Generalized-mean pooling with exponent p >= 1. Negative activations are
// clamped to zero before exponentiation. p = 1 reduces to gap_pool exactly.
EmbeddingVector gem_pool(const FeatureGrid& g, double p);

// Concatenate a ++ b; with renorm the result is L2-normalized (512 + 512
// giving a unit-norm 1024-d fused embedding).
EmbeddingVector concat_embeddings(const EmbeddingVector& a, const EmbeddingVector& b,
                                  bool renorm);

} // namespace landmark

#endif
