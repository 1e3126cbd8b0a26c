#include "head/metric_head.hpp"

#include <cmath>

#include "common/rng.hpp"
#include "core/vector_ops.hpp"

namespace landmark {

void ArcFaceParams::validate() const {
    if (margin < 0.0 || margin >= 1.5707963267948966)
        raise(Errc::kConfigError, "arcface: margin must be in [0, pi/2)");
    if (!(scale > 0.0)) raise(Errc::kConfigError, "arcface: scale must be > 0");
}

MetricHead make_head(std::size_t input_dim, std::size_t embedding_dim,
                     double bn_momentum, double bn_epsilon, std::uint64_t init_seed) {
    if (input_dim < 1 || embedding_dim < 1)
        raise(Errc::kInvalidArgument, "make_head: dims must be >= 1");
    if (!(bn_epsilon > 0.0)) raise(Errc::kConfigError, "make_head: bn_epsilon must be > 0");

    MetricHead head;
    head.input_dim = input_dim;
    head.embedding_dim = embedding_dim;
    head.bn_momentum = bn_momentum;
    head.bn_epsilon = bn_epsilon;
    head.projection = Matrix(input_dim, embedding_dim);
    Rng rng(init_seed);
    const double bound = std::sqrt(6.0 / static_cast<double>(input_dim + embedding_dim));
    for (double& w : head.projection.data) w = rng.uniform(-bound, bound);
    head.bn_gamma.assign(embedding_dim, 1.0);
    head.bn_beta.assign(embedding_dim, 0.0);
    head.bn_running_mean.assign(embedding_dim, 0.0);
    head.bn_running_var.assign(embedding_dim, 1.0);
    return head;
}

ClassifierWeights make_classifier(std::size_t class_count, std::size_t embedding_dim,
                                  std::uint64_t init_seed) {
    if (class_count < 1) raise(Errc::kInvalidArgument, "make_classifier: need >= 1 class");
    ClassifierWeights w;
    w.rows = Matrix(class_count, embedding_dim);
    Rng rng(init_seed);
    const double bound = std::sqrt(6.0 / static_cast<double>(class_count + embedding_dim));
    for (double& x : w.rows.data) x = rng.uniform(-bound, bound);
    return w;
}

ForwardCache head_forward(MetricHead& head, const Matrix& features, Mode mode) {
    const std::size_t batch = features.rows;
    const std::size_t emb = head.embedding_dim;
    if (features.cols != head.input_dim)
        raise(Errc::kDimMismatch, "head_forward: feature dim mismatch");
    if (mode == Mode::kTrain && batch < 2)
        raise(Errc::kBatchTooSmall, "head_forward: train mode needs batch >= 2");
    if (batch == 0) raise(Errc::kBatchTooSmall, "head_forward: empty batch");

    ForwardCache cache;
    cache.z = Matrix(batch, emb);
    for (std::size_t i = 0; i < batch; ++i) {
        const double* x = features.row(i);
        double* z = cache.z.row(i);
        for (std::size_t f = 0; f < head.input_dim; ++f) {
            const double xf = x[f];
            if (xf == 0.0) continue;
            const double* p = head.projection.row(f);
            for (std::size_t c = 0; c < emb; ++c) z[c] += xf * p[c];
        }
    }

    if (mode == Mode::kTrain) {
        cache.mean.assign(emb, 0.0);
        cache.var.assign(emb, 0.0);
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t c = 0; c < emb; ++c) cache.mean[c] += cache.z.at(i, c);
        for (double& m : cache.mean) m /= static_cast<double>(batch);
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t c = 0; c < emb; ++c) {
                const double d = cache.z.at(i, c) - cache.mean[c];
                cache.var[c] += d * d;
            }
        for (double& v : cache.var) v /= static_cast<double>(batch);
        for (std::size_t c = 0; c < emb; ++c) {
            head.bn_running_mean[c] = (1.0 - head.bn_momentum) * head.bn_running_mean[c] +
                                      head.bn_momentum * cache.mean[c];
            head.bn_running_var[c] = (1.0 - head.bn_momentum) * head.bn_running_var[c] +
                                     head.bn_momentum * cache.var[c];
        }
    } else {
        cache.mean = head.bn_running_mean;
        cache.var = head.bn_running_var;
    }

    cache.inv_std.resize(emb);
    for (std::size_t c = 0; c < emb; ++c)
        cache.inv_std[c] = 1.0 / std::sqrt(cache.var[c] + head.bn_epsilon);

    cache.xhat = Matrix(batch, emb);
    cache.y = Matrix(batch, emb);
    for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t c = 0; c < emb; ++c) {
            const double xh = (cache.z.at(i, c) - cache.mean[c]) * cache.inv_std[c];
            cache.xhat.at(i, c) = xh;
            cache.y.at(i, c) = head.bn_gamma[c] * xh + head.bn_beta[c];
        }

    cache.y_norm.resize(batch);
    cache.embeddings = Matrix(batch, emb);
    for (std::size_t i = 0; i < batch; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < emb; ++c) s += cache.y.at(i, c) * cache.y.at(i, c);
        const double n = std::sqrt(s);
        if (n <= kZeroNormThreshold)
            raise(Errc::kZeroVector, "head_forward: zero embedding before normalization");
        cache.y_norm[i] = n;
        for (std::size_t c = 0; c < emb; ++c) cache.embeddings.at(i, c) = cache.y.at(i, c) / n;
    }
    return cache;
}

Matrix head_embed(const MetricHead& head, const Matrix& features) {
    MetricHead frozen = head;
    return head_forward(frozen, features, Mode::kEval).embeddings;
}

} // namespace landmark
