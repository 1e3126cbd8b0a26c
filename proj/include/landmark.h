/*
 * landmark.h - C API for the landmark retrieval pipeline library.
 *
 * All functions return LM_OK (0) on success or an error status; the message
 * for the most recent failure on the calling thread is available through
 * lm_error_message(). Objects returned through out-parameters are owned by
 * the caller and released with the matching *_free function. Handles are
 * opaque; a freed or NULL handle must not be passed back in.
 */

#ifndef LANDMARK_H
#define LANDMARK_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lm_status {
    LM_OK = 0,
    LM_ERR_ZERO_VECTOR = 1,
    LM_ERR_DIM_MISMATCH = 2,
    LM_ERR_INVALID_P = 3,
    LM_ERR_IO = 4,
    LM_ERR_FORMAT = 5,
    LM_ERR_INVALID_FRACTION = 6,
    LM_ERR_BATCH_TOO_SMALL = 7,
    LM_ERR_INVALID_TARGET = 8,
    LM_ERR_MISSING_CHECKPOINT = 9,
    LM_ERR_DUPLICATE_ID = 10,
    LM_ERR_ID_MISALIGNMENT = 11,
    LM_ERR_CONFIG = 12,
    LM_ERR_INVALID_ARGUMENT = 13,
    LM_ERR_INTERNAL = 14
} lm_status;

/* Last error message for the calling thread ("" if none). */
const char* lm_error_message(void);

/* ------------------------------------------------------------------ */
/* Labeled embedding datasets (EMB1 container on disk)                 */
/* ------------------------------------------------------------------ */

typedef struct lm_dataset lm_dataset;

lm_status lm_dataset_create(lm_dataset** out);
lm_status lm_dataset_add(lm_dataset* ds, const char* id, uint64_t label,
                         const double* values, size_t dim);
lm_status lm_dataset_read(const char* path, lm_dataset** out);
lm_status lm_dataset_write(const lm_dataset* ds, const char* path);
size_t lm_dataset_size(const lm_dataset* ds);
size_t lm_dataset_dim(const lm_dataset* ds);
/* Row accessors; valid while the dataset lives and is not modified. */
const char* lm_dataset_id(const lm_dataset* ds, size_t row);
uint64_t lm_dataset_label(const lm_dataset* ds, size_t row);
const double* lm_dataset_values(const lm_dataset* ds, size_t row);
void lm_dataset_free(lm_dataset* ds);

/* ------------------------------------------------------------------ */
/* Synthetic world generation                                          */
/* ------------------------------------------------------------------ */

typedef struct lm_synthetic_config {
    size_t category_count;
    size_t modes_per_category;
    size_t points_per_mode;
    size_t gallery_per_mode;
    size_t queries_per_mode;
    double mode_separation;
    double mode_sigma;
    double noise_fraction;
    size_t feature_dim;
    uint64_t seed;
} lm_synthetic_config;

/* Defaults: 10 categories x 2 modes, 20/5/2 points, separation 0.9,
 * sigma 0.05, noise 0.1, dim 64, seed 42. */
void lm_synthetic_config_default(lm_synthetic_config* cfg);

lm_status lm_generate_synthetic(const lm_synthetic_config* cfg, lm_dataset** train,
                                lm_dataset** gallery, lm_dataset** queries);

/* ------------------------------------------------------------------ */
/* Embedding-cluster cleaning                                          */
/* ------------------------------------------------------------------ */

typedef struct lm_dbscan_params {
    double eps;          /* cosine-distance radius, strict pass */
    double relaxed_eps;  /* rescue pass radius, must exceed eps */
    size_t min_pts;      /* core-point threshold, self counted */
    size_t min_cluster_size; /* smaller surviving clusters are dropped */
} lm_dbscan_params;

/* Defaults: eps 0.3, relaxed 0.5, min_pts 5, min_cluster_size 2. */
void lm_dbscan_params_default(lm_dbscan_params* params);

typedef struct lm_clean_report lm_clean_report;

lm_status lm_clean_dataset(const lm_dataset* manifest, const lm_dbscan_params* params,
                           lm_dataset** cleaned, lm_clean_report** report);
size_t lm_clean_report_input(const lm_clean_report* report);
size_t lm_clean_report_kept(const lm_clean_report* report);
size_t lm_clean_report_rescued(const lm_clean_report* report);
size_t lm_clean_report_dropped(const lm_clean_report* report);
size_t lm_clean_report_old_categories(const lm_clean_report* report);
size_t lm_clean_report_new_categories(const lm_clean_report* report);
lm_status lm_clean_report_write(const lm_clean_report* report, const char* path);
void lm_clean_report_free(lm_clean_report* report);

/* ------------------------------------------------------------------ */
/* Images and Corner-Cutmix                                            */
/* ------------------------------------------------------------------ */

typedef struct lm_image lm_image;

typedef enum lm_corner {
    LM_CORNER_TOP_LEFT = 0,
    LM_CORNER_TOP_RIGHT = 1,
    LM_CORNER_BOTTOM_LEFT = 2,
    LM_CORNER_BOTTOM_RIGHT = 3
} lm_corner;

lm_status lm_image_create(size_t height, size_t width, size_t channels, lm_image** out);
/* PPM (P6) for 3 channels, PGM (P5) for 1; maxval 255. */
lm_status lm_image_read(const char* path, lm_image** out);
lm_status lm_image_write(const lm_image* img, const char* path);
size_t lm_image_height(const lm_image* img);
size_t lm_image_width(const lm_image* img);
size_t lm_image_channels(const lm_image* img);
/* Row-major H x W x C pixel buffer in [0, 1]. */
double* lm_image_pixels(lm_image* img);
const double* lm_image_pixels_const(const lm_image* img);
void lm_image_free(lm_image* img);

lm_status lm_resize_bilinear(const lm_image* img, size_t out_h, size_t out_w,
                             lm_image** out);
lm_status lm_corner_cutmix(const lm_image* img_a, const lm_image* img_b, lm_corner corner,
                           double fraction, lm_image** out);
/* Seeded draw of corner and fraction; base is image A brought to B's
 * geometry, mixed is the composited image. corner/fraction report the draw. */
lm_status lm_make_mixed_sample(const lm_image* img_a, const lm_image* img_b,
                               double fraction_lo, double fraction_hi, uint64_t seed,
                               lm_image** base, lm_image** mixed, int* corner,
                               double* fraction);

/* ------------------------------------------------------------------ */
/* Toy feature extractor (backbone stand-in)                           */
/* ------------------------------------------------------------------ */

#define LM_TOY_FEATURE_DIM 64

/* Deterministic pooled feature of an image: 4x4 patch statistics through a
 * fixed random projection, then global average pooling. out must hold
 * LM_TOY_FEATURE_DIM doubles. */
lm_status lm_toy_extract_pooled(const lm_image* img, double* out);

/* ------------------------------------------------------------------ */
/* Metric head training                                                */
/* ------------------------------------------------------------------ */

typedef struct lm_train_config {
    double lr0;
    double poly_power;
    size_t batch_size;
    size_t epochs; /* epochs for the stage being run */
    double momentum;
    double weight_decay;
    uint64_t seed;
    size_t embedding_dim;
    double bn_momentum;
    double bn_epsilon;
    double arcface_margin;
    double arcface_scale;
} lm_train_config;

/* Defaults: lr0 0.01, power 0.9, batch 16, 1 epoch, momentum/decay 0,
 * seed 42, dim 512, bn 0.1/1e-5, margin 0.3, scale 30. */
void lm_train_config_default(lm_train_config* cfg);

typedef struct lm_head lm_head;

/* Stage 1: softmax pre-training from scratch on (feature, label) rows.
 * trace_path is optional (NULL for no trace). */
lm_status lm_train_stage1(const lm_dataset* features, const lm_train_config* cfg,
                          lm_head** out, const char* trace_path);

/* Stage 2: ArcFace finetuning of an existing head; the classifier is
 * re-initialized for the dataset's label set. */
lm_status lm_train_stage2(lm_head* head, const lm_dataset* features,
                          const lm_train_config* cfg, const char* trace_path);

/* Stage 2 with the dual-stream cutmix loss. base/mixed are n x dim row-major
 * feature matrices; labels_a/labels_b are the two source labels per row. */
lm_status lm_train_stage2_dual(lm_head* head, const double* base, const double* mixed,
                               const uint64_t* labels_a, const uint64_t* labels_b,
                               size_t n, size_t dim, const lm_train_config* cfg,
                               const char* trace_path);

lm_status lm_head_save(const lm_head* head, const char* path);
lm_status lm_head_load(const char* path, lm_head** out);
/* Eval-mode embeddings of a feature dataset; ids and labels pass through. */
lm_status lm_head_embed(const lm_head* head, const lm_dataset* features,
                        lm_dataset** embeddings);
size_t lm_head_input_dim(const lm_head* head);
size_t lm_head_embedding_dim(const lm_head* head);
void lm_head_free(lm_head* head);

/* ------------------------------------------------------------------ */
/* Retrieval evaluation                                                */
/* ------------------------------------------------------------------ */

typedef struct lm_index lm_index;
typedef struct lm_summary lm_summary;

lm_status lm_index_build(const lm_dataset* gallery, lm_index** out);
void lm_index_free(lm_index* index);

/* mAP@k with per-query APs; same-label gallery items are relevant, the
 * query's own id is excluded from candidates and relevance. */
lm_status lm_evaluate(const lm_index* index, const lm_dataset* queries, size_t k,
                      lm_summary** out);

/* Concatenation ensemble of two id-aligned models. */
lm_status lm_ensemble_evaluate(const lm_dataset* gallery_a, const lm_dataset* gallery_b,
                               const lm_dataset* queries_a, const lm_dataset* queries_b,
                               size_t k, lm_summary** out);

double lm_summary_map(const lm_summary* summary);
size_t lm_summary_query_count(const lm_summary* summary);
size_t lm_summary_defined_count(const lm_summary* summary);
lm_status lm_summary_write_report(const lm_summary* summary, const char* path);
/* The machine-readable line "RESULT map@k=<value> queries=<defined>".
 * Returns the number of bytes (excluding the terminator) that buf would
 * need; writes at most buf_size bytes including the terminator. */
size_t lm_summary_result_line(const lm_summary* summary, char* buf, size_t buf_size);
void lm_summary_free(lm_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* LANDMARK_H */
