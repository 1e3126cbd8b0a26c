#include "head/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "common/rng.hpp"
#include "core/vector_ops.hpp"

namespace landmark {

namespace {

std::size_t class_count_of(const std::vector<std::uint64_t>& labels) {
    std::uint64_t max_label = 0;
    for (std::uint64_t y : labels) max_label = std::max(max_label, y);
    return static_cast<std::size_t>(max_label) + 1;
}

// Batches of at least 2 samples (train-mode BN needs batch statistics);
// a size-1 remainder is skipped.
std::size_t batches_per_epoch(std::size_t n, std::size_t batch_size) {
    const std::size_t full = n / batch_size;
    const std::size_t rem = n % batch_size;
    return full + (rem >= 2 ? 1 : 0);
}

struct SgdState {
    Gradients velocity;
    bool initialized = false;
};

void sgd_step(MetricHead& head, ClassifierWeights& weights, const Gradients& grads,
              SgdState& state, double lr, double momentum, double weight_decay) {
    if (!state.initialized) {
        state.velocity = zero_gradients(head, weights);
        state.initialized = true;
    }
    auto update = [&](double& param, double& vel, double grad) {
        const double g = grad + weight_decay * param;
        vel = momentum * vel + g;
        param -= lr * vel;
    };
    for (std::size_t i = 0; i < head.projection.data.size(); ++i)
        update(head.projection.data[i], state.velocity.projection.data[i],
               grads.projection.data[i]);
    for (std::size_t c = 0; c < head.embedding_dim; ++c) {
        update(head.bn_gamma[c], state.velocity.bn_gamma[c], grads.bn_gamma[c]);
        update(head.bn_beta[c], state.velocity.bn_beta[c], grads.bn_beta[c]);
    }
    for (std::size_t i = 0; i < weights.rows.data.size(); ++i)
        update(weights.rows.data[i], state.velocity.classifier.data[i],
               grads.classifier.data[i]);
}

// Shared SGD loop. fill_batch copies the samples at the given indices into
// stream matrices and label vectors; run_backward produces losses+gradients.
template <typename FillBatch, typename RunBackward>
void run_sgd(MetricHead& head, ClassifierWeights& weights, std::size_t n,
             const TrainConfig& cfg, std::size_t epochs, std::uint64_t order_seed,
             FillBatch fill_batch, RunBackward run_backward,
             std::vector<TraceRow>* trace) {
    if (n < 2) raise(Errc::kBatchTooSmall, "train: need at least 2 samples");
    const std::size_t batch_size = std::min(cfg.batch_size, n);
    const std::size_t per_epoch = batches_per_epoch(n, batch_size);
    const std::size_t total_steps = epochs * per_epoch;

    Rng order_rng(order_seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    SgdState state;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        order_rng.shuffle(order);
        for (std::size_t b = 0; b < per_epoch; ++b) {
            const std::size_t begin = b * batch_size;
            const std::size_t end = std::min(begin + batch_size, n);
            Gradients grads = zero_gradients(head, weights);
            const BatchLosses losses =
                run_backward(head, weights,
                             fill_batch(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                        order.begin() + static_cast<std::ptrdiff_t>(end)),
                             grads);
            const double lr = poly_lr(step, cfg.lr0, total_steps, cfg.poly_power);
            sgd_step(head, weights, grads, state, lr, cfg.momentum, cfg.weight_decay);
            if (trace)
                trace->push_back({step, lr, losses.base, losses.mix, losses.total});
            ++step;
        }
    }
}

struct SingleBatch {
    Matrix x;
    std::vector<std::uint64_t> labels;
};

struct DualBatch {
    Matrix x_base, x_mixed;
    std::vector<std::uint64_t> labels_a, labels_b;
};

void run_single_stage(TrainedHead& trained, const std::vector<TrainSample>& data,
                      const TrainConfig& cfg, std::size_t epochs, const LossConfig& loss,
                      std::uint64_t order_seed, std::vector<TraceRow>* trace) {
    const std::size_t fdim = trained.head.input_dim;
    for (const auto& s : data)
        if (s.feature.size() != fdim)
            raise(Errc::kDimMismatch, "train: feature dim mismatch");

    auto fill = [&](auto first, auto last) {
        SingleBatch batch;
        const std::size_t b = static_cast<std::size_t>(last - first);
        batch.x = Matrix(b, fdim);
        batch.labels.resize(b);
        for (std::size_t i = 0; first + static_cast<std::ptrdiff_t>(i) != last; ++i) {
            const TrainSample& s = data[*(first + static_cast<std::ptrdiff_t>(i))];
            std::copy(s.feature.begin(), s.feature.end(), batch.x.row(i));
            batch.labels[i] = s.label;
        }
        return batch;
    };
    auto run = [&](MetricHead& head, const ClassifierWeights& weights,
                   const SingleBatch& batch, Gradients& grads) {
        return backward(head, weights, batch.x, batch.labels, loss, grads);
    };
    run_sgd(trained.head, trained.classifier, data.size(), cfg, epochs, order_seed, fill,
            run, trace);
}

} // namespace

void TrainConfig::validate() const {
    if (!(lr0 > 0.0)) raise(Errc::kConfigError, "train: lr0 must be > 0");
    if (!(poly_power >= 0.0)) raise(Errc::kConfigError, "train: poly_power must be >= 0");
    if (batch_size < 2) raise(Errc::kConfigError, "train: batch_size must be >= 2");
    if (stage1_epochs < 1 || stage2_epochs < 1)
        raise(Errc::kConfigError, "train: epochs must be >= 1");
    if (embedding_dim < 1) raise(Errc::kConfigError, "train: embedding_dim must be >= 1");
    if (!(bn_epsilon > 0.0)) raise(Errc::kConfigError, "train: bn_epsilon must be > 0");
    if (bn_momentum <= 0.0 || bn_momentum > 1.0)
        raise(Errc::kConfigError, "train: bn_momentum must be in (0, 1]");
    arcface.validate();
}

TrainedHead train_stage1(const std::vector<TrainSample>& data, const TrainConfig& cfg,
                         std::vector<TraceRow>* trace) {
    cfg.validate();
    if (data.empty()) raise(Errc::kBatchTooSmall, "train_stage1: empty dataset");

    std::vector<std::uint64_t> labels;
    labels.reserve(data.size());
    for (const auto& s : data) labels.push_back(s.label);

    TrainedHead trained;
    trained.head = make_head(data.front().feature.size(), cfg.embedding_dim,
                             cfg.bn_momentum, cfg.bn_epsilon,
                             derive_seed(cfg.seed, "stage1-head"));
    trained.classifier = make_classifier(class_count_of(labels), cfg.embedding_dim,
                                         derive_seed(cfg.seed, "stage1-classifier"));
    trained.loss = {LossKind::kSoftmax, cfg.arcface};

    run_single_stage(trained, data, cfg, cfg.stage1_epochs, trained.loss,
                     derive_seed(cfg.seed, "stage1-order"), trace);
    return trained;
}

void train_stage2(TrainedHead& trained, const std::vector<TrainSample>& data,
                  const TrainConfig& cfg, std::vector<TraceRow>* trace) {
    cfg.validate();
    if (data.empty()) raise(Errc::kBatchTooSmall, "train_stage2: empty dataset");

    std::vector<std::uint64_t> labels;
    labels.reserve(data.size());
    for (const auto& s : data) labels.push_back(s.label);

    trained.classifier = make_classifier(class_count_of(labels), trained.head.embedding_dim,
                                         derive_seed(cfg.seed, "stage2-classifier"));
    trained.loss = {LossKind::kArcFace, cfg.arcface};

    run_single_stage(trained, data, cfg, cfg.stage2_epochs, trained.loss,
                     derive_seed(cfg.seed, "stage2-order"), trace);
}

void train_stage2_dual(TrainedHead& trained, const std::vector<DualFeatureSample>& data,
                       const TrainConfig& cfg, std::vector<TraceRow>* trace) {
    cfg.validate();
    if (data.empty()) raise(Errc::kBatchTooSmall, "train_stage2_dual: empty dataset");

    const std::size_t fdim = trained.head.input_dim;
    std::vector<std::uint64_t> labels;
    for (const auto& s : data) {
        if (s.base.size() != fdim || s.mixed.size() != fdim)
            raise(Errc::kDimMismatch, "train_stage2_dual: feature dim mismatch");
        labels.push_back(s.label_a);
        labels.push_back(s.label_b);
    }

    trained.classifier = make_classifier(class_count_of(labels), trained.head.embedding_dim,
                                         derive_seed(cfg.seed, "stage2-classifier"));
    trained.loss = {LossKind::kArcFace, cfg.arcface};

    auto fill = [&](auto first, auto last) {
        DualBatch batch;
        const std::size_t b = static_cast<std::size_t>(last - first);
        batch.x_base = Matrix(b, fdim);
        batch.x_mixed = Matrix(b, fdim);
        batch.labels_a.resize(b);
        batch.labels_b.resize(b);
        for (std::size_t i = 0; first + static_cast<std::ptrdiff_t>(i) != last; ++i) {
            const DualFeatureSample& s = data[*(first + static_cast<std::ptrdiff_t>(i))];
            std::copy(s.base.begin(), s.base.end(), batch.x_base.row(i));
            std::copy(s.mixed.begin(), s.mixed.end(), batch.x_mixed.row(i));
            batch.labels_a[i] = s.label_a;
            batch.labels_b[i] = s.label_b;
        }
        return batch;
    };
    auto run = [&](MetricHead& head, const ClassifierWeights& weights,
                   const DualBatch& batch, Gradients& grads) {
        return backward_dual(head, weights, batch.x_base, batch.x_mixed, batch.labels_a,
                             batch.labels_b, trained.loss, grads);
    };
    run_sgd(trained.head, trained.classifier, data.size(), cfg, cfg.stage2_epochs,
            derive_seed(cfg.seed, "stage2-order"), fill, run, trace);
}

TwoStageResult train_two_stage(const std::vector<TrainSample>& stage1_data,
                               const std::vector<TrainSample>& stage2_data,
                               const std::vector<DualFeatureSample>& stage2_dual,
                               const TrainConfig& cfg) {
    TwoStageResult result;
    result.trained = train_stage1(stage1_data, cfg, &result.stage1_trace);
    if (cfg.use_cutmix)
        train_stage2_dual(result.trained, stage2_dual, cfg, &result.stage2_trace);
    else
        train_stage2(result.trained, stage2_data, cfg, &result.stage2_trace);
    return result;
}

std::vector<LabeledEmbedding> embed_dataset(const TrainedHead& trained,
                                            const std::vector<LabeledEmbedding>& features) {
    std::vector<LabeledEmbedding> out;
    out.reserve(features.size());
    if (features.empty()) return out;

    Matrix x(features.size(), trained.head.input_dim);
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].vector.size() != trained.head.input_dim)
            raise(Errc::kDimMismatch, "embed_dataset: feature dim mismatch");
        std::copy(features[i].vector.begin(), features[i].vector.end(), x.row(i));
    }
    const Matrix emb = head_embed(trained.head, x);
    for (std::size_t i = 0; i < features.size(); ++i) {
        LabeledEmbedding row;
        row.id = features[i].id;
        row.label = features[i].label;
        row.vector.assign(emb.row(i), emb.row(i) + trained.head.embedding_dim);
        out.push_back(std::move(row));
    }
    return out;
}

double classification_accuracy(const TrainedHead& trained,
                               const std::vector<TrainSample>& data) {
    if (data.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& s : data) {
        Matrix x(1, trained.head.input_dim);
        std::copy(s.feature.begin(), s.feature.end(), x.row(0));
        const Matrix emb = head_embed(trained.head, x);
        EmbeddingVector e(emb.row(0), emb.row(0) + trained.head.embedding_dim);
        const EmbeddingVector logits = trained.loss.kind == LossKind::kSoftmax
                                           ? dot_logits(e, trained.classifier)
                                           : cosine_logits(e, trained.classifier);
        const std::size_t pred = static_cast<std::size_t>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (pred == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

double mean_intra_class_cosine(const TrainedHead& trained,
                               const std::vector<TrainSample>& data) {
    std::vector<LabeledEmbedding> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        rows.push_back({std::to_string(i), data[i].label, data[i].feature});
    const auto embedded = embed_dataset(trained, rows);

    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < embedded.size(); ++i)
        for (std::size_t j = i + 1; j < embedded.size(); ++j)
            if (embedded[i].label == embedded[j].label) {
                sum += dot(embedded[i].vector, embedded[j].vector);
                ++pairs;
            }
    return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

std::string format_loss_trace(const std::vector<TraceRow>& rows, bool include_mix) {
    std::string out = include_mix ? "step,lr,L_base,L_mix,L_total\n"
                                  : "step,lr,L_base,L_total\n";
    char line[160];
    for (const auto& r : rows) {
        if (include_mix)
            std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g,%.9g\n", r.step, r.lr,
                          r.l_base, r.l_mix, r.l_total);
        else
            std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g\n", r.step, r.lr, r.l_base,
                          r.l_total);
        out += line;
    }
    return out;
}

void write_loss_trace(const std::string& path, const std::vector<TraceRow>& rows,
                      bool include_mix) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kIoError, "cannot open for write: " + path);
    const std::string text = format_loss_trace(rows, include_mix);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(Errc::kIoError, "write failed: " + path);
}

} // namespace landmark
