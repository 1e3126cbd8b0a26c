// extern-C surface over the C++ core. Exceptions are translated to status
// codes at this boundary; nothing may throw across it.

#include "landmark.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "cleaner/cleaning.hpp"
#include "core/embedding_io.hpp"
#include "cutmix/cutmix.hpp"
#include "eval/retrieval.hpp"
#include "extractor/extractor.hpp"
#include "extractor/synthetic.hpp"
#include "head/head_io.hpp"
#include "head/trainer.hpp"

namespace {

thread_local std::string g_last_error;

lm_status to_status(landmark::Errc code) {
    using landmark::Errc;
    switch (code) {
        case Errc::kZeroVector: return LM_ERR_ZERO_VECTOR;
        case Errc::kDimMismatch: return LM_ERR_DIM_MISMATCH;
        case Errc::kInvalidP: return LM_ERR_INVALID_P;
        case Errc::kIoError: return LM_ERR_IO;
        case Errc::kFormatError: return LM_ERR_FORMAT;
        case Errc::kInvalidFraction: return LM_ERR_INVALID_FRACTION;
        case Errc::kBatchTooSmall: return LM_ERR_BATCH_TOO_SMALL;
        case Errc::kInvalidTarget: return LM_ERR_INVALID_TARGET;
        case Errc::kMissingCheckpoint: return LM_ERR_MISSING_CHECKPOINT;
        case Errc::kDuplicateId: return LM_ERR_DUPLICATE_ID;
        case Errc::kIdMisalignment: return LM_ERR_ID_MISALIGNMENT;
        case Errc::kConfigError: return LM_ERR_CONFIG;
        case Errc::kInvalidArgument: return LM_ERR_INVALID_ARGUMENT;
    }
    return LM_ERR_INTERNAL;
}

template <typename Fn>
lm_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return LM_OK;
    } catch (const landmark::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return LM_ERR_INTERNAL;
    }
}

lm_status require(bool ok, const char* message) {
    if (ok) return LM_OK;
    g_last_error = message;
    return LM_ERR_INVALID_ARGUMENT;
}

landmark::TrainConfig to_train_config(const lm_train_config& cfg, size_t epochs_slot) {
    landmark::TrainConfig c;
    c.lr0 = cfg.lr0;
    c.poly_power = cfg.poly_power;
    c.batch_size = cfg.batch_size;
    c.stage1_epochs = epochs_slot;
    c.stage2_epochs = epochs_slot;
    c.momentum = cfg.momentum;
    c.weight_decay = cfg.weight_decay;
    c.seed = cfg.seed;
    c.embedding_dim = cfg.embedding_dim;
    c.bn_momentum = cfg.bn_momentum;
    c.bn_epsilon = cfg.bn_epsilon;
    c.arcface.margin = cfg.arcface_margin;
    c.arcface.scale = cfg.arcface_scale;
    return c;
}

} // namespace

struct lm_dataset {
    std::vector<landmark::LabeledEmbedding> rows;
};

struct lm_clean_report {
    landmark::RelabelReport report;
};

struct lm_image {
    landmark::ImageGrid img;
};

struct lm_head {
    landmark::TrainedHead trained;
};

struct lm_index {
    landmark::RetrievalIndex index;
};

struct lm_summary {
    landmark::EvalSummary summary;
    size_t k = 100;
};

namespace {

std::vector<landmark::TrainSample> to_samples(const lm_dataset& ds) {
    std::vector<landmark::TrainSample> samples;
    samples.reserve(ds.rows.size());
    for (const auto& row : ds.rows) samples.push_back({row.vector, row.label});
    return samples;
}

} // namespace

extern "C" {

const char* lm_error_message(void) { return g_last_error.c_str(); }

/* ---------------- datasets ---------------- */

lm_status lm_dataset_create(lm_dataset** out) {
    if (lm_status s = require(out != nullptr, "out is NULL")) return s;
    return guarded([&] { *out = new lm_dataset(); });
}

lm_status lm_dataset_add(lm_dataset* ds, const char* id, uint64_t label,
                         const double* values, size_t dim) {
    if (lm_status s = require(ds && id && values && dim > 0, "bad argument")) return s;
    return guarded([&] {
        landmark::LabeledEmbedding row;
        row.id = id;
        row.label = label;
        row.vector.assign(values, values + dim);
        ds->rows.push_back(std::move(row));
    });
}

lm_status lm_dataset_read(const char* path, lm_dataset** out) {
    if (lm_status s = require(path && out, "bad argument")) return s;
    return guarded([&] {
        auto ds = std::make_unique<lm_dataset>();
        ds->rows = landmark::read_embeddings(path);
        *out = ds.release();
    });
}

lm_status lm_dataset_write(const lm_dataset* ds, const char* path) {
    if (lm_status s = require(ds && path, "bad argument")) return s;
    return guarded([&] { landmark::write_embeddings(path, ds->rows); });
}

size_t lm_dataset_size(const lm_dataset* ds) { return ds ? ds->rows.size() : 0; }

size_t lm_dataset_dim(const lm_dataset* ds) {
    return ds && !ds->rows.empty() ? ds->rows.front().vector.size() : 0;
}

const char* lm_dataset_id(const lm_dataset* ds, size_t row) {
    return ds && row < ds->rows.size() ? ds->rows[row].id.c_str() : nullptr;
}

uint64_t lm_dataset_label(const lm_dataset* ds, size_t row) {
    return ds && row < ds->rows.size() ? ds->rows[row].label : 0;
}

const double* lm_dataset_values(const lm_dataset* ds, size_t row) {
    return ds && row < ds->rows.size() ? ds->rows[row].vector.data() : nullptr;
}

void lm_dataset_free(lm_dataset* ds) { delete ds; }

/* ---------------- synthetic ---------------- */

void lm_synthetic_config_default(lm_synthetic_config* cfg) {
    if (!cfg) return;
    landmark::SyntheticWorldConfig d;
    cfg->category_count = d.category_count;
    cfg->modes_per_category = d.modes_per_category;
    cfg->points_per_mode = d.points_per_mode;
    cfg->gallery_per_mode = d.gallery_per_mode;
    cfg->queries_per_mode = d.queries_per_mode;
    cfg->mode_separation = d.mode_separation;
    cfg->mode_sigma = d.mode_sigma;
    cfg->noise_fraction = d.noise_fraction;
    cfg->feature_dim = d.feature_dim;
    cfg->seed = d.seed;
}

lm_status lm_generate_synthetic(const lm_synthetic_config* cfg, lm_dataset** train,
                                lm_dataset** gallery, lm_dataset** queries) {
    if (lm_status s = require(cfg && train && gallery && queries, "bad argument")) return s;
    return guarded([&] {
        landmark::SyntheticWorldConfig c;
        c.category_count = cfg->category_count;
        c.modes_per_category = cfg->modes_per_category;
        c.points_per_mode = cfg->points_per_mode;
        c.gallery_per_mode = cfg->gallery_per_mode;
        c.queries_per_mode = cfg->queries_per_mode;
        c.mode_separation = cfg->mode_separation;
        c.mode_sigma = cfg->mode_sigma;
        c.noise_fraction = cfg->noise_fraction;
        c.feature_dim = cfg->feature_dim;
        c.seed = cfg->seed;
        auto data = landmark::generate_synthetic_dataset(c);
        auto tr = std::make_unique<lm_dataset>();
        auto ga = std::make_unique<lm_dataset>();
        auto qu = std::make_unique<lm_dataset>();
        tr->rows = std::move(data.train);
        ga->rows = std::move(data.gallery);
        qu->rows = std::move(data.queries);
        *train = tr.release();
        *gallery = ga.release();
        *queries = qu.release();
    });
}

/* ---------------- cleaning ---------------- */

void lm_dbscan_params_default(lm_dbscan_params* params) {
    if (!params) return;
    landmark::DbscanParams d;
    params->eps = d.eps;
    params->relaxed_eps = d.relaxed_eps;
    params->min_pts = d.min_pts;
    params->min_cluster_size = d.min_cluster_size;
}

lm_status lm_clean_dataset(const lm_dataset* manifest, const lm_dbscan_params* params,
                           lm_dataset** cleaned, lm_clean_report** report) {
    if (lm_status s = require(manifest && params && cleaned, "bad argument")) return s;
    return guarded([&] {
        landmark::DbscanParams p;
        p.eps = params->eps;
        p.relaxed_eps = params->relaxed_eps;
        p.min_pts = params->min_pts;
        p.min_cluster_size = params->min_cluster_size;
        auto [rows, rep] = landmark::clean_dataset(manifest->rows, p);
        auto ds = std::make_unique<lm_dataset>();
        ds->rows = std::move(rows);
        *cleaned = ds.release();
        if (report) *report = new lm_clean_report{std::move(rep)};
    });
}

size_t lm_clean_report_input(const lm_clean_report* r) {
    return r ? r->report.input_size : 0;
}
size_t lm_clean_report_kept(const lm_clean_report* r) {
    return r ? r->report.total_kept : 0;
}
size_t lm_clean_report_rescued(const lm_clean_report* r) {
    return r ? r->report.total_rescued : 0;
}
size_t lm_clean_report_dropped(const lm_clean_report* r) {
    return r ? r->report.total_dropped : 0;
}
size_t lm_clean_report_old_categories(const lm_clean_report* r) {
    return r ? r->report.old_category_count : 0;
}
size_t lm_clean_report_new_categories(const lm_clean_report* r) {
    return r ? r->report.new_category_count : 0;
}

lm_status lm_clean_report_write(const lm_clean_report* report, const char* path) {
    if (lm_status s = require(report && path, "bad argument")) return s;
    return guarded([&] { landmark::write_relabel_report(path, report->report); });
}

void lm_clean_report_free(lm_clean_report* report) { delete report; }

/* ---------------- images ---------------- */

lm_status lm_image_create(size_t height, size_t width, size_t channels, lm_image** out) {
    if (lm_status s = require(out != nullptr, "out is NULL")) return s;
    return guarded([&] {
        *out = new lm_image{landmark::ImageGrid(static_cast<int>(height),
                                                static_cast<int>(width),
                                                static_cast<int>(channels))};
    });
}

lm_status lm_image_read(const char* path, lm_image** out) {
    if (lm_status s = require(path && out, "bad argument")) return s;
    return guarded([&] { *out = new lm_image{landmark::read_image(path)}; });
}

lm_status lm_image_write(const lm_image* img, const char* path) {
    if (lm_status s = require(img && path, "bad argument")) return s;
    return guarded([&] { landmark::write_image(path, img->img); });
}

size_t lm_image_height(const lm_image* img) {
    return img ? static_cast<size_t>(img->img.height) : 0;
}
size_t lm_image_width(const lm_image* img) {
    return img ? static_cast<size_t>(img->img.width) : 0;
}
size_t lm_image_channels(const lm_image* img) {
    return img ? static_cast<size_t>(img->img.channels) : 0;
}
double* lm_image_pixels(lm_image* img) { return img ? img->img.pixels.data() : nullptr; }
const double* lm_image_pixels_const(const lm_image* img) {
    return img ? img->img.pixels.data() : nullptr;
}

void lm_image_free(lm_image* img) { delete img; }

lm_status lm_resize_bilinear(const lm_image* img, size_t out_h, size_t out_w,
                             lm_image** out) {
    if (lm_status s = require(img && out, "bad argument")) return s;
    return guarded([&] {
        *out = new lm_image{landmark::resize_bilinear(img->img, static_cast<int>(out_h),
                                                      static_cast<int>(out_w))};
    });
}

lm_status lm_corner_cutmix(const lm_image* img_a, const lm_image* img_b, lm_corner corner,
                           double fraction, lm_image** out) {
    if (lm_status s = require(img_a && img_b && out, "bad argument")) return s;
    if (lm_status s = require(corner >= LM_CORNER_TOP_LEFT &&
                                  corner <= LM_CORNER_BOTTOM_RIGHT,
                              "bad corner"))
        return s;
    return guarded([&] {
        *out = new lm_image{landmark::corner_cutmix(
            img_a->img, img_b->img, static_cast<landmark::Corner>(corner), fraction)};
    });
}

lm_status lm_make_mixed_sample(const lm_image* img_a, const lm_image* img_b,
                               double fraction_lo, double fraction_hi, uint64_t seed,
                               lm_image** base, lm_image** mixed, int* corner,
                               double* fraction) {
    if (lm_status s = require(img_a && img_b && base && mixed, "bad argument")) return s;
    return guarded([&] {
        landmark::MixedSample sample = landmark::make_mixed_sample(
            img_a->img, 0, img_b->img, 1, fraction_lo, fraction_hi, seed);
        *base = new lm_image{std::move(sample.base)};
        *mixed = new lm_image{std::move(sample.mixed)};
        if (corner) *corner = static_cast<int>(sample.corner);
        if (fraction) *fraction = sample.fraction;
    });
}

/* ---------------- extractor ---------------- */

lm_status lm_toy_extract_pooled(const lm_image* img, double* out) {
    if (lm_status s = require(img && out, "bad argument")) return s;
    return guarded([&] {
        static const landmark::ToyExtractor extractor;
        const landmark::EmbeddingVector f = extractor.extract_pooled(img->img);
        std::memcpy(out, f.data(), sizeof(double) * LM_TOY_FEATURE_DIM);
    });
}

/* ---------------- training ---------------- */

void lm_train_config_default(lm_train_config* cfg) {
    if (!cfg) return;
    landmark::TrainConfig d;
    cfg->lr0 = d.lr0;
    cfg->poly_power = d.poly_power;
    cfg->batch_size = d.batch_size;
    cfg->epochs = 1;
    cfg->momentum = d.momentum;
    cfg->weight_decay = d.weight_decay;
    cfg->seed = d.seed;
    cfg->embedding_dim = d.embedding_dim;
    cfg->bn_momentum = d.bn_momentum;
    cfg->bn_epsilon = d.bn_epsilon;
    cfg->arcface_margin = d.arcface.margin;
    cfg->arcface_scale = d.arcface.scale;
}

lm_status lm_train_stage1(const lm_dataset* features, const lm_train_config* cfg,
                          lm_head** out, const char* trace_path) {
    if (lm_status s = require(features && cfg && out, "bad argument")) return s;
    return guarded([&] {
        const auto config = to_train_config(*cfg, cfg->epochs);
        std::vector<landmark::TraceRow> trace;
        auto head = std::make_unique<lm_head>();
        head->trained = landmark::train_stage1(to_samples(*features), config,
                                               trace_path ? &trace : nullptr);
        if (trace_path) landmark::write_loss_trace(trace_path, trace, false);
        *out = head.release();
    });
}

lm_status lm_train_stage2(lm_head* head, const lm_dataset* features,
                          const lm_train_config* cfg, const char* trace_path) {
    if (lm_status s = require(head && features && cfg, "bad argument")) return s;
    return guarded([&] {
        const auto config = to_train_config(*cfg, cfg->epochs);
        std::vector<landmark::TraceRow> trace;
        landmark::train_stage2(head->trained, to_samples(*features), config,
                               trace_path ? &trace : nullptr);
        if (trace_path) landmark::write_loss_trace(trace_path, trace, false);
    });
}

lm_status lm_train_stage2_dual(lm_head* head, const double* base, const double* mixed,
                               const uint64_t* labels_a, const uint64_t* labels_b,
                               size_t n, size_t dim, const lm_train_config* cfg,
                               const char* trace_path) {
    if (lm_status s = require(head && base && mixed && labels_a && labels_b && cfg &&
                                  n > 0 && dim > 0,
                              "bad argument"))
        return s;
    return guarded([&] {
        std::vector<landmark::DualFeatureSample> samples(n);
        for (size_t i = 0; i < n; ++i) {
            samples[i].base.assign(base + i * dim, base + (i + 1) * dim);
            samples[i].mixed.assign(mixed + i * dim, mixed + (i + 1) * dim);
            samples[i].label_a = labels_a[i];
            samples[i].label_b = labels_b[i];
        }
        const auto config = to_train_config(*cfg, cfg->epochs);
        std::vector<landmark::TraceRow> trace;
        landmark::train_stage2_dual(head->trained, samples, config,
                                    trace_path ? &trace : nullptr);
        if (trace_path) landmark::write_loss_trace(trace_path, trace, true);
    });
}

lm_status lm_head_save(const lm_head* head, const char* path) {
    if (lm_status s = require(head && path, "bad argument")) return s;
    return guarded([&] { landmark::save_head(path, head->trained); });
}

lm_status lm_head_load(const char* path, lm_head** out) {
    if (lm_status s = require(path && out, "bad argument")) return s;
    return guarded([&] {
        auto head = std::make_unique<lm_head>();
        head->trained = landmark::load_head(path);
        *out = head.release();
    });
}

lm_status lm_head_embed(const lm_head* head, const lm_dataset* features,
                        lm_dataset** embeddings) {
    if (lm_status s = require(head && features && embeddings, "bad argument")) return s;
    return guarded([&] {
        auto ds = std::make_unique<lm_dataset>();
        ds->rows = landmark::embed_dataset(head->trained, features->rows);
        *embeddings = ds.release();
    });
}

size_t lm_head_input_dim(const lm_head* head) {
    return head ? head->trained.head.input_dim : 0;
}
size_t lm_head_embedding_dim(const lm_head* head) {
    return head ? head->trained.head.embedding_dim : 0;
}

void lm_head_free(lm_head* head) { delete head; }

/* ---------------- evaluation ---------------- */

lm_status lm_index_build(const lm_dataset* gallery, lm_index** out) {
    if (lm_status s = require(gallery && out, "bad argument")) return s;
    return guarded([&] { *out = new lm_index{landmark::build_index(gallery->rows)}; });
}

void lm_index_free(lm_index* index) { delete index; }

lm_status lm_evaluate(const lm_index* index, const lm_dataset* queries, size_t k,
                      lm_summary** out) {
    if (lm_status s = require(index && queries && out && k > 0, "bad argument")) return s;
    return guarded([&] {
        *out = new lm_summary{landmark::evaluate(index->index, queries->rows, k), k};
    });
}

lm_status lm_ensemble_evaluate(const lm_dataset* gallery_a, const lm_dataset* gallery_b,
                               const lm_dataset* queries_a, const lm_dataset* queries_b,
                               size_t k, lm_summary** out) {
    if (lm_status s = require(gallery_a && gallery_b && queries_a && queries_b && out &&
                                  k > 0,
                              "bad argument"))
        return s;
    return guarded([&] {
        *out = new lm_summary{landmark::ensemble_evaluate(gallery_a->rows, gallery_b->rows,
                                                          queries_a->rows, queries_b->rows,
                                                          k),
                              k};
    });
}

double lm_summary_map(const lm_summary* summary) {
    return summary ? summary->summary.mean_ap : 0.0;
}
size_t lm_summary_query_count(const lm_summary* summary) {
    return summary ? summary->summary.query_count : 0;
}
size_t lm_summary_defined_count(const lm_summary* summary) {
    return summary ? summary->summary.defined_count : 0;
}

lm_status lm_summary_write_report(const lm_summary* summary, const char* path) {
    if (lm_status s = require(summary && path, "bad argument")) return s;
    return guarded(
        [&] { landmark::write_eval_report(path, summary->summary, summary->k); });
}

size_t lm_summary_result_line(const lm_summary* summary, char* buf, size_t buf_size) {
    if (!summary) return 0;
    const std::string line = landmark::format_result_line(summary->summary, summary->k);
    if (buf && buf_size > 0) {
        const size_t n = line.size() < buf_size - 1 ? line.size() : buf_size - 1;
        std::memcpy(buf, line.data(), n);
        buf[n] = '\0';
    }
    return line.size();
}

void lm_summary_free(lm_summary* summary) { delete summary; }

} // extern "C"
