#ifndef LANDMARK_HEAD_TRAINER_HPP
#define LANDMARK_HEAD_TRAINER_HPP

#include <string>
#include <vector>

#include "head/backward.hpp"

namespace landmark {

struct TrainSample {
    EmbeddingVector feature;
    std::uint64_t label = 0;
};

// Precomputed dual-stream pair: features of the untouched image and of the
// corner-composited one, with both source labels.
struct DualFeatureSample {
    EmbeddingVector base;
    EmbeddingVector mixed;
    std::uint64_t label_a = 0;
    std::uint64_t label_b = 0;
};

struct TrainConfig {
    double lr0 = 0.01;
    double poly_power = 0.9;
    std::size_t batch_size = 16;
    std::size_t stage1_epochs = 24;
    std::size_t stage2_epochs = 12;
    double momentum = 0.0;
    double weight_decay = 0.0;
    std::uint64_t seed = 42;
    std::size_t embedding_dim = 512;
    double bn_momentum = 0.1;
    double bn_epsilon = 1e-5;
    ArcFaceParams arcface{};
    bool use_cutmix = false;

    void validate() const;
};

struct TraceRow {
    std::size_t step = 0;
    double lr = 0.0;
    double l_base = 0.0;
    double l_mix = 0.0;
    double l_total = 0.0;
};

struct TrainedHead {
    MetricHead head;
    ClassifierWeights classifier;
    LossConfig loss;
};

// Stage 1: plain softmax-CE pre-training from a fresh head.
TrainedHead train_stage1(const std::vector<TrainSample>& data, const TrainConfig& cfg,
                         std::vector<TraceRow>* trace);

// Stage 2: ArcFace finetuning of an existing head. The classifier is
// re-initialized for the stage-2 label set (the cleaned labels generally
// change the class count).
void train_stage2(TrainedHead& trained, const std::vector<TrainSample>& data,
                  const TrainConfig& cfg, std::vector<TraceRow>* trace);

// Stage 2 with the dual-stream cutmix loss.
void train_stage2_dual(TrainedHead& trained, const std::vector<DualFeatureSample>& data,
                       const TrainConfig& cfg, std::vector<TraceRow>* trace);

struct TwoStageResult {
    TrainedHead trained;
    std::vector<TraceRow> stage1_trace;
    std::vector<TraceRow> stage2_trace;
};

// Full recipe: softmax pre-training on the first dataset, then ArcFace
// finetuning on the second (dual-stream when cfg.use_cutmix).
TwoStageResult train_two_stage(const std::vector<TrainSample>& stage1_data,
                               const std::vector<TrainSample>& stage2_data,
                               const std::vector<DualFeatureSample>& stage2_dual,
                               const TrainConfig& cfg);

// Eval-mode embeddings for a feature dataset; ids and labels pass through.
std::vector<LabeledEmbedding> embed_dataset(const TrainedHead& trained,
                                            const std::vector<LabeledEmbedding>& features);

// Argmax accuracy under the head's own loss geometry.
double classification_accuracy(const TrainedHead& trained,
                               const std::vector<TrainSample>& data);

// Mean cosine similarity over all same-label embedding pairs.
double mean_intra_class_cosine(const TrainedHead& trained,
                               const std::vector<TrainSample>& data);

// CSV trace: "step,lr,L_base[,L_mix],L_total"; the L_mix column is present
// only for dual-stream traces.
std::string format_loss_trace(const std::vector<TraceRow>& rows, bool include_mix);
void write_loss_trace(const std::string& path, const std::vector<TraceRow>& rows,
                      bool include_mix);

} // namespace landmark

#endif
