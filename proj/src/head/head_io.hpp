#ifndef LANDMARK_HEAD_HEAD_IO_HPP
#define LANDMARK_HEAD_HEAD_IO_HPP

#include <string>

#include "head/trainer.hpp"

namespace landmark {

// HEAD checkpoint container (little-endian):
//   magic "HEAD", u32 version = 1,
//   u32 input_dim, u32 embedding_dim, u32 class_count, u32 loss_kind,
//   f64 bn_momentum, f64 bn_epsilon, f64 margin, f64 scale,
//   then f64 blocks: projection (input_dim x embedding_dim, row-major),
//   bn_gamma, bn_beta, bn_running_mean, bn_running_var (embedding_dim each),
//   classifier (class_count x embedding_dim, row-major).
void save_head(const std::string& path, const TrainedHead& trained);

TrainedHead load_head(const std::string& path);

} // namespace landmark

#endif
