#include "cutmix/cutmix.hpp"

#include <algorithm>
#include <cmath>

#include "common/rng.hpp"

namespace landmark {

ImageGrid resize_bilinear(const ImageGrid& img, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1)
        raise(Errc::kInvalidArgument, "resize_bilinear: output dims must be >= 1");
    if (out_h == img.height && out_w == img.width) return img;

    ImageGrid out(out_h, out_w, img.channels);
    const double scale_y = static_cast<double>(img.height) / out_h;
    const double scale_x = static_cast<double>(img.width) / out_w;

    for (int r = 0; r < out_h; ++r) {
        double sy = (r + 0.5) * scale_y - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(std::floor(sy));
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int c = 0; c < out_w; ++c) {
            double sx = (c + 0.5) * scale_x - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(std::floor(sx));
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            for (int ch = 0; ch < img.channels; ++ch) {
                const double top = img.at(y0, x0, ch) * (1.0 - fx) + img.at(y0, x1, ch) * fx;
                const double bot = img.at(y1, x0, ch) * (1.0 - fx) + img.at(y1, x1, ch) * fx;
                out.at(r, c, ch) = std::clamp(top * (1.0 - fy) + bot * fy, 0.0, 1.0);
            }
        }
    }
    return out;
}

ImageGrid corner_cutmix(const ImageGrid& img_a, const ImageGrid& img_b, Corner corner,
                        double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0)
        raise(Errc::kInvalidFraction, "corner_cutmix: fraction must be in (0, 1]");
    if (img_a.channels != img_b.channels)
        raise(Errc::kDimMismatch, "corner_cutmix: channel count differs");

    // round-half-up, floored at one pixel
    const int patch_h =
        std::max(1, static_cast<int>(std::floor(fraction * img_b.height + 0.5)));
    const int patch_w =
        std::max(1, static_cast<int>(std::floor(fraction * img_b.width + 0.5)));

    const ImageGrid patch = resize_bilinear(img_a, patch_h, patch_w);

    const int r0 = (corner == Corner::kTopLeft || corner == Corner::kTopRight)
                       ? 0
                       : img_b.height - patch_h;
    const int c0 = (corner == Corner::kTopLeft || corner == Corner::kBottomLeft)
                       ? 0
                       : img_b.width - patch_w;

    ImageGrid out = img_b;
    for (int r = 0; r < patch_h; ++r)
        for (int c = 0; c < patch_w; ++c)
            for (int ch = 0; ch < out.channels; ++ch)
                out.at(r0 + r, c0 + c, ch) = patch.at(r, c, ch);
    return out;
}

MixedSample make_mixed_sample(const ImageGrid& img_a, std::uint64_t label_a,
                              const ImageGrid& img_b, std::uint64_t label_b,
                              double fraction_lo, double fraction_hi,
                              std::uint64_t seed) {
    if (!(fraction_lo > 0.0) || fraction_lo > fraction_hi || fraction_hi > 1.0)
        raise(Errc::kInvalidFraction, "make_mixed_sample: need 0 < lo <= hi <= 1");

    Rng rng(seed);
    const Corner corner = static_cast<Corner>(rng.index(4));
    const double fraction =
        fraction_lo == fraction_hi ? fraction_lo : rng.uniform(fraction_lo, fraction_hi);

    MixedSample sample;
    sample.base = img_a.same_geometry(img_b)
                      ? img_a
                      : resize_bilinear(img_a, img_b.height, img_b.width);
    sample.mixed = corner_cutmix(img_a, img_b, corner, fraction);
    sample.label_a = label_a;
    sample.label_b = label_b;
    sample.corner = corner;
    sample.fraction = fraction;
    return sample;
}

} // namespace landmark
