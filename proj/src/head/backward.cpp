#include "head/backward.hpp"

#include <algorithm>
#include <cmath>

namespace landmark {

namespace {

struct CeTerm {
    std::size_t target;
    double weight;
};

// Normalized classifier rows with their original norms, shared per batch.
struct NormalizedRows {
    Matrix unit; // K x emb
    EmbeddingVector norm;
};

NormalizedRows normalize_rows(const ClassifierWeights& weights) {
    const std::size_t classes = weights.class_count();
    const std::size_t dim = weights.rows.cols;
    NormalizedRows out;
    out.unit = Matrix(classes, dim);
    out.norm.resize(classes);
    for (std::size_t j = 0; j < classes; ++j) {
        const double* w = weights.rows.row(j);
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) s += w[c] * w[c];
        const double n = std::sqrt(s);
        if (n <= 1e-12) raise(Errc::kZeroVector, "backward: zero class weight row");
        out.norm[j] = n;
        for (std::size_t c = 0; c < dim; ++c) out.unit.at(j, c) = w[c] / n;
    }
    return out;
}

double ce_from_logits(const EmbeddingVector& z, std::size_t target, EmbeddingVector& probs) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    probs.resize(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        probs[j] = std::exp(z[j] - zmax);
        sum += probs[j];
    }
    for (double& p : probs) p /= sum;
    return -(z[target] - zmax) + std::log(sum);
}

// One stream: forward, per-sample CE terms, gradient accumulation.
// Returns the stream's mean loss (sum of per-sample weighted terms / batch).
double stream_backward(MetricHead& head, const ClassifierWeights& weights,
                       const NormalizedRows& rows, const Matrix& x,
                       const std::vector<std::vector<CeTerm>>& terms,
                       const LossConfig& cfg, Gradients& grads) {
    const std::size_t batch = x.rows;
    const std::size_t emb = head.embedding_dim;
    const std::size_t classes = weights.class_count();
    const double inv_batch = 1.0 / static_cast<double>(batch);

    const ForwardCache cache = head_forward(head, x, Mode::kTrain);

    Matrix g_emb(batch, emb);
    double loss = 0.0;
    EmbeddingVector z(classes), probs, cosines(classes);

    for (std::size_t i = 0; i < batch; ++i) {
        const double* e = cache.embeddings.row(i);

        if (cfg.kind == LossKind::kSoftmax) {
            // z_j = <W_j, e> on the raw rows
            for (std::size_t j = 0; j < classes; ++j) {
                const double* w = weights.rows.row(j);
                double s = 0.0;
                for (std::size_t c = 0; c < emb; ++c) s += w[c] * e[c];
                z[j] = s;
            }
            for (const CeTerm& term : terms[i]) {
                loss += term.weight * inv_batch * ce_from_logits(z, term.target, probs);
                for (std::size_t j = 0; j < classes; ++j) {
                    const double dz =
                        term.weight * inv_batch * (probs[j] - (j == term.target ? 1.0 : 0.0));
                    if (dz == 0.0) continue;
                    const double* w = weights.rows.row(j);
                    double* gw = grads.classifier.row(j);
                    double* ge = g_emb.row(i);
                    for (std::size_t c = 0; c < emb; ++c) {
                        gw[c] += dz * e[c];
                        ge[c] += dz * w[c];
                    }
                }
            }
        } else {
            const double s = cfg.arcface.scale;
            const double m = cfg.arcface.margin;
            const double cos_m = std::cos(m);
            const double sin_m = std::sin(m);
            for (std::size_t j = 0; j < classes; ++j) {
                const double* w = rows.unit.row(j);
                double c = 0.0;
                for (std::size_t d = 0; d < emb; ++d) c += w[d] * e[d];
                cosines[j] = std::clamp(c, -1.0, 1.0);
            }
            for (const CeTerm& term : terms[i]) {
                const std::size_t t = term.target;
                for (std::size_t j = 0; j < classes; ++j) z[j] = s * cosines[j];
                const double ct = cosines[t];
                const double sin_t = std::sqrt(std::max(1.0 - ct * ct, 1e-24));
                z[t] = s * (ct * cos_m - sin_t * sin_m);
                loss += term.weight * inv_batch * ce_from_logits(z, t, probs);

                for (std::size_t j = 0; j < classes; ++j) {
                    const double dz =
                        term.weight * inv_batch * (probs[j] - (j == t ? 1.0 : 0.0));
                    if (dz == 0.0) continue;
                    // d z_t / d cos = s * (cos m + sin m * cos / sin theta)
                    const double dc =
                        j == t ? dz * s * (cos_m + sin_m * ct / sin_t) : dz * s;
                    const double* w_unit = rows.unit.row(j);
                    double* gw = grads.classifier.row(j);
                    double* ge = g_emb.row(i);
                    const double inv_norm = 1.0 / rows.norm[j];
                    const double cj = cosines[j];
                    for (std::size_t c = 0; c < emb; ++c) {
                        ge[c] += dc * w_unit[c];
                        gw[c] += dc * (e[c] - cj * w_unit[c]) * inv_norm;
                    }
                }
            }
        }
    }

    // L2-normalization backward: g_y = (g_e - e <e, g_e>) / ||y||
    Matrix g_y(batch, emb);
    for (std::size_t i = 0; i < batch; ++i) {
        const double* e = cache.embeddings.row(i);
        const double* ge = g_emb.row(i);
        double proj = 0.0;
        for (std::size_t c = 0; c < emb; ++c) proj += e[c] * ge[c];
        for (std::size_t c = 0; c < emb; ++c)
            g_y.at(i, c) = (ge[c] - e[c] * proj) / cache.y_norm[i];
    }

    // Batch-norm backward over batch statistics.
    Matrix g_z(batch, emb);
    const double inv_b = 1.0 / static_cast<double>(batch);
    for (std::size_t c = 0; c < emb; ++c) {
        double sum_ghat = 0.0, sum_ghat_xhat = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
            const double gy = g_y.at(i, c);
            grads.bn_gamma[c] += gy * cache.xhat.at(i, c);
            grads.bn_beta[c] += gy;
            const double ghat = gy * head.bn_gamma[c];
            sum_ghat += ghat;
            sum_ghat_xhat += ghat * cache.xhat.at(i, c);
        }
        for (std::size_t i = 0; i < batch; ++i) {
            const double ghat = g_y.at(i, c) * head.bn_gamma[c];
            g_z.at(i, c) = cache.inv_std[c] *
                           (ghat - inv_b * sum_ghat - cache.xhat.at(i, c) * inv_b * sum_ghat_xhat);
        }
    }

    // Projection backward: g_P = X^T g_Z
    for (std::size_t i = 0; i < batch; ++i) {
        const double* xi = x.row(i);
        const double* gz = g_z.row(i);
        for (std::size_t f = 0; f < head.input_dim; ++f) {
            const double xf = xi[f];
            if (xf == 0.0) continue;
            double* gp = grads.projection.row(f);
            for (std::size_t c = 0; c < emb; ++c) gp[c] += xf * gz[c];
        }
    }

    return loss;
}

void check_labels(const std::vector<std::uint64_t>& labels, std::size_t classes,
                  std::size_t batch) {
    if (labels.size() != batch)
        raise(Errc::kInvalidArgument, "backward: label count != batch size");
    for (std::uint64_t y : labels)
        if (y >= classes) raise(Errc::kInvalidTarget, "backward: label out of range");
}

} // namespace

Gradients zero_gradients(const MetricHead& head, const ClassifierWeights& weights) {
    Gradients g;
    g.projection = Matrix(head.input_dim, head.embedding_dim);
    g.bn_gamma.assign(head.embedding_dim, 0.0);
    g.bn_beta.assign(head.embedding_dim, 0.0);
    g.classifier = Matrix(weights.class_count(), weights.rows.cols);
    return g;
}

BatchLosses backward(MetricHead& head, const ClassifierWeights& weights, const Matrix& x,
                     const std::vector<std::uint64_t>& labels, const LossConfig& cfg,
                     Gradients& grads) {
    check_labels(labels, weights.class_count(), x.rows);
    const NormalizedRows rows = normalize_rows(weights);

    std::vector<std::vector<CeTerm>> terms(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        terms[i] = {{static_cast<std::size_t>(labels[i]), 1.0}};

    BatchLosses losses;
    losses.base = stream_backward(head, weights, rows, x, terms, cfg, grads);
    losses.mix = 0.0;
    losses.total = losses.base;
    return losses;
}

BatchLosses backward_dual(MetricHead& head, const ClassifierWeights& weights,
                          const Matrix& x_base, const Matrix& x_mixed,
                          const std::vector<std::uint64_t>& labels_a,
                          const std::vector<std::uint64_t>& labels_b,
                          const LossConfig& cfg, Gradients& grads) {
    if (x_base.rows != x_mixed.rows)
        raise(Errc::kInvalidArgument, "backward_dual: stream batch sizes differ");
    check_labels(labels_a, weights.class_count(), x_base.rows);
    check_labels(labels_b, weights.class_count(), x_mixed.rows);
    const NormalizedRows rows = normalize_rows(weights);

    std::vector<std::vector<CeTerm>> base_terms(x_base.rows);
    std::vector<std::vector<CeTerm>> mix_terms(x_mixed.rows);
    for (std::size_t i = 0; i < x_base.rows; ++i) {
        base_terms[i] = {{static_cast<std::size_t>(labels_a[i]), 1.0}};
        mix_terms[i] = {{static_cast<std::size_t>(labels_a[i]), 0.5},
                        {static_cast<std::size_t>(labels_b[i]), 0.5}};
    }

    BatchLosses losses;
    losses.base = stream_backward(head, weights, rows, x_base, base_terms, cfg, grads);
    losses.mix = stream_backward(head, weights, rows, x_mixed, mix_terms, cfg, grads);
    losses.total = losses.base + losses.mix;
    return losses;
}

} // namespace landmark
