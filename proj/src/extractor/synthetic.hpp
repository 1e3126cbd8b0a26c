#ifndef LANDMARK_EXTRACTOR_SYNTHETIC_HPP
#define LANDMARK_EXTRACTOR_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace landmark {

// Embedding-space world generator. The true visual entities are the
// category_count * modes_per_category sub-modes (Gaussian blobs on the unit
// sphere); the train manifest carries the corrupted observation that merges
// each category's modes under one label (the indoor/outdoor failure mode)
// plus uniform noise points mislabeled into random categories. Gallery and
// query draws are clean and carry the true per-mode labels
// (category * modes_per_category + mode), so retrieval measures recovery of
// the true entities.
struct SyntheticWorldConfig {
    std::size_t category_count = 10;
    std::size_t modes_per_category = 2;
    std::size_t points_per_mode = 20; // train points
    std::size_t gallery_per_mode = 5;
    std::size_t queries_per_mode = 2;
    double mode_separation = 0.9; // min pairwise cosine distance between mode centers
    double mode_sigma = 0.05;     // within-mode spread before renormalization
    double noise_fraction = 0.1;  // fraction of the train manifest that is noise
    std::size_t feature_dim = 64;
    std::uint64_t seed = 42;

    void validate() const;
};

struct SyntheticDataset {
    std::vector<LabeledEmbedding> train;
    std::vector<LabeledEmbedding> gallery;
    std::vector<LabeledEmbedding> queries;
};

SyntheticDataset generate_synthetic_dataset(const SyntheticWorldConfig& cfg);

} // namespace landmark

#endif
