#ifndef LANDMARK_CORE_EMBEDDING_IO_HPP
#define LANDMARK_CORE_EMBEDDING_IO_HPP

#include <string>
#include <vector>

#include "core/types.hpp"

namespace landmark {

// EMB1 container, bit-exact:
//   magic "EMB1"
//   u32le row count N
//   u32le dim D
//   N records: u16le id length L, L bytes UTF-8 id,
//              u64le label, D float32le values.
//
// Values are stored at float32 resolution; read(write(x)) is bit-exact for
// float32-representable payloads.

void write_embeddings(const std::string& path, const std::vector<LabeledEmbedding>& rows);

std::vector<LabeledEmbedding> read_embeddings(const std::string& path);

} // namespace landmark

#endif
