#ifndef LANDMARK_CORE_TYPES_HPP
#define LANDMARK_CORE_TYPES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace landmark {

// All internal arithmetic runs in double; the on-disk embedding format stores
// float32 (see embedding_io).
using EmbeddingVector = std::vector<double>;

struct LabeledEmbedding {
    std::string id;
    std::uint64_t label = 0;
    EmbeddingVector vector;
};

// Pre-pooling activation grid, H x W x C row-major.
struct FeatureGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> values;

    FeatureGrid() = default;
    FeatureGrid(int h, int w, int c)
        : height(h), width(w), channels(c),
          values(static_cast<std::size_t>(h) * w * c, 0.0) {
        if (h < 1 || w < 1 || c < 1)
            raise(Errc::kInvalidArgument, "FeatureGrid dimensions must be positive");
    }

    double at(int r, int c, int ch) const {
        return values[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double& at(int r, int c, int ch) {
        return values[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
};

// Dense row-major matrix used for batched head math.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }
};

} // namespace landmark

#endif
