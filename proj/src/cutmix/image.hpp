#ifndef LANDMARK_CUTMIX_IMAGE_HPP
#define LANDMARK_CUTMIX_IMAGE_HPP

#include <string>
#include <vector>

#include "common/error.hpp"

namespace landmark {

// Row-major H x W x C image, pixels in [0, 1], 1 or 3 channels.
struct ImageGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> pixels;

    ImageGrid() = default;
    ImageGrid(int h, int w, int c)
        : height(h), width(w), channels(c),
          pixels(static_cast<std::size_t>(h) * w * c, 0.0) {
        if (h < 1 || w < 1 || (c != 1 && c != 3))
            raise(Errc::kInvalidArgument, "ImageGrid: bad geometry");
    }

    double at(int r, int c, int ch) const {
        return pixels[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double& at(int r, int c, int ch) {
        return pixels[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    bool same_geometry(const ImageGrid& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// Binary PPM (P6) for 3 channels, PGM (P5) for 1 channel; maxval 255, pixel
// value v stored as round(v * 255) and read back as byte / 255.
void write_image(const std::string& path, const ImageGrid& img);
ImageGrid read_image(const std::string& path);

} // namespace landmark

#endif
