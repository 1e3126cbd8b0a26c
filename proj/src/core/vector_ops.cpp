#include "core/vector_ops.hpp"

#include <algorithm>
#include <cmath>

namespace landmark {

double l2_norm(const EmbeddingVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

EmbeddingVector l2_normalize(const EmbeddingVector& v) {
    const double n = l2_norm(v);
    if (n <= kZeroNormThreshold)
        raise(Errc::kZeroVector, "cannot normalize a zero vector");
    EmbeddingVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size())
        raise(Errc::kDimMismatch, "cosine_similarity: dims differ");
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na <= kZeroNormThreshold || nb <= kZeroNormThreshold)
        raise(Errc::kZeroVector, "cosine_similarity: zero vector");
    double c = dot(a, b) / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

EmbeddingVector gap_pool(const FeatureGrid& g) {
    const std::size_t cells = static_cast<std::size_t>(g.height) * g.width;
    EmbeddingVector out(static_cast<std::size_t>(g.channels), 0.0);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c)
            for (int ch = 0; ch < g.channels; ++ch)
                out[static_cast<std::size_t>(ch)] += g.at(r, c, ch);
    for (double& x : out) x /= static_cast<double>(cells);
    return out;
}

EmbeddingVector gem_pool(const FeatureGrid& g, double p) {
    if (!(p >= 1.0))
        raise(Errc::kInvalidP, "gem_pool: p must be >= 1");
    const std::size_t cells = static_cast<std::size_t>(g.height) * g.width;
    EmbeddingVector out(static_cast<std::size_t>(g.channels), 0.0);
    if (p == 1.0) {
        // Same summation order as gap_pool so p = 1 matches it bit for bit
        // on non-negative grids.
        for (int r = 0; r < g.height; ++r)
            for (int c = 0; c < g.width; ++c)
                for (int ch = 0; ch < g.channels; ++ch)
                    out[static_cast<std::size_t>(ch)] += std::max(g.at(r, c, ch), 0.0);
        for (double& x : out) x /= static_cast<double>(cells);
        return out;
    }
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c)
            for (int ch = 0; ch < g.channels; ++ch)
                out[static_cast<std::size_t>(ch)] += std::pow(std::max(g.at(r, c, ch), 0.0), p);
    for (double& x : out) x = std::pow(x / static_cast<double>(cells), 1.0 / p);
    return out;
}

EmbeddingVector concat_embeddings(const EmbeddingVector& a, const EmbeddingVector& b,
                                  bool renorm) {
    EmbeddingVector out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    if (renorm) return l2_normalize(out);
    return out;
}

} // namespace landmark
