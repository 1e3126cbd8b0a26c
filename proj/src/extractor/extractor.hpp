#ifndef LANDMARK_EXTRACTOR_EXTRACTOR_HPP
#define LANDMARK_EXTRACTOR_EXTRACTOR_HPP

#include <cstdint>

#include "core/types.hpp"
#include "cutmix/image.hpp"

namespace landmark {

// Backbone seam: anything that deterministically maps an image to a feature
// grid with a fixed channel count can stand in for the CNN.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual FeatureGrid extract(const ImageGrid& img) const = 0;
    virtual int channels() const = 0;
};

// Deterministic stand-in backbone: the image is split into a 4x4 cell grid,
// each cell summarized by per-channel means and variances (plus a constant
// slot so features never vanish), and the statistics are pushed through one
// fixed seeded linear map into 64 channels. Each output cell depends only on
// its own pixel cell.
class ToyExtractor : public FeatureExtractor {
public:
    static constexpr int kGrid = 4;
    static constexpr int kChannels = 64;
    static constexpr std::uint64_t kDefaultSeed = 0x746f79u; // weights fixed at build time

    explicit ToyExtractor(std::uint64_t seed = kDefaultSeed);

    FeatureGrid extract(const ImageGrid& img) const override;
    int channels() const override { return kChannels; }

    // extract + global average pooling, the feature the head consumes.
    EmbeddingVector extract_pooled(const ImageGrid& img) const;

private:
    // kChannels x (3 means + 3 variances + 1)
    std::vector<double> weights_;
};

} // namespace landmark

#endif
