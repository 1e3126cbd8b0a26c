#ifndef LANDMARK_CUTMIX_CUTMIX_HPP
#define LANDMARK_CUTMIX_CUTMIX_HPP

#include <cstdint>

#include "cutmix/image.hpp"

namespace landmark {

enum class Corner { kTopLeft = 0, kTopRight = 1, kBottomLeft = 2, kBottomRight = 3 };

// Dual-stream training sample: the untouched base image and the
// corner-composited one, carrying both source labels. The label weight is
// fixed at 0.5 by construction, never sampled.
struct MixedSample {
    ImageGrid base;
    ImageGrid mixed;
    std::uint64_t label_a = 0;
    std::uint64_t label_b = 0;
    Corner corner = Corner::kTopLeft;
    double fraction = 0.0;

    static constexpr double kLabelWeight = 0.5;
};

// Bilinear resize with half-pixel-centered sampling:
// src = (dst + 0.5) * scale - 0.5, clamped to the source rectangle.
ImageGrid resize_bilinear(const ImageGrid& img, int out_h, int out_w);

// Paste a resized copy of img_a flush over the chosen corner of img_b. The
// patch is round(fraction * (H_b, W_b)), floored at 1x1. Pixels outside the
// patch are bit-identical to img_b; inside, bit-identical to the resized
// img_a. No blending.
ImageGrid corner_cutmix(const ImageGrid& img_a, const ImageGrid& img_b, Corner corner,
                        double fraction);

// Seeded draw: corner uniform over the four choices, fraction uniform in
// [lo, hi]. base keeps img_a (resized to img_b's geometry if they differ, so
// the two streams always share geometry).
MixedSample make_mixed_sample(const ImageGrid& img_a, std::uint64_t label_a,
                              const ImageGrid& img_b, std::uint64_t label_b,
                              double fraction_lo, double fraction_hi,
                              std::uint64_t seed);

} // namespace landmark

#endif
