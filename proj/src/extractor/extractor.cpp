#include "extractor/extractor.hpp"

#include "common/rng.hpp"
#include "core/vector_ops.hpp"

namespace landmark {

namespace {
constexpr int kStats = 7; // 3 means, 3 variances, 1 constant
}

ToyExtractor::ToyExtractor(std::uint64_t seed) {
    Rng rng(seed);
    weights_.resize(static_cast<std::size_t>(kChannels) * kStats);
    for (double& w : weights_) w = rng.uniform(-1.0, 1.0);
}

FeatureGrid ToyExtractor::extract(const ImageGrid& img) const {
    FeatureGrid out(kGrid, kGrid, kChannels);
    for (int gr = 0; gr < kGrid; ++gr) {
        const int r0 = gr * img.height / kGrid;
        const int r1 = (gr + 1) * img.height / kGrid;
        for (int gc = 0; gc < kGrid; ++gc) {
            const int c0 = gc * img.width / kGrid;
            const int c1 = (gc + 1) * img.width / kGrid;

            double stats[kStats] = {0, 0, 0, 0, 0, 0, 1.0};
            const int count = (r1 - r0) * (c1 - c0);
            if (count > 0) {
                for (int r = r0; r < r1; ++r)
                    for (int c = c0; c < c1; ++c)
                        for (int ch = 0; ch < 3; ++ch) {
                            // grayscale replicates its single channel
                            const double v = img.at(r, c, img.channels == 3 ? ch : 0);
                            stats[ch] += v;
                        }
                for (int ch = 0; ch < 3; ++ch) stats[ch] /= count;
                for (int r = r0; r < r1; ++r)
                    for (int c = c0; c < c1; ++c)
                        for (int ch = 0; ch < 3; ++ch) {
                            const double v = img.at(r, c, img.channels == 3 ? ch : 0);
                            const double d = v - stats[ch];
                            stats[3 + ch] += d * d;
                        }
                for (int ch = 0; ch < 3; ++ch) stats[3 + ch] /= count;
            }

            for (int oc = 0; oc < kChannels; ++oc) {
                double acc = 0.0;
                const double* w = weights_.data() + static_cast<std::size_t>(oc) * kStats;
                for (int s = 0; s < kStats; ++s) acc += w[s] * stats[s];
                out.at(gr, gc, oc) = acc;
            }
        }
    }
    return out;
}

EmbeddingVector ToyExtractor::extract_pooled(const ImageGrid& img) const {
    return gap_pool(extract(img));
}

} // namespace landmark
