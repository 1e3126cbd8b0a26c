#include "core/embedding_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace landmark {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

class Reader {
public:
    Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

    bool need(std::size_t n) const { return pos_ + n <= size_; }

    std::uint16_t u16() {
        check(2);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        check(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        check(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    std::string bytes(std::size_t n) {
        check(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return size_ - pos_; }

private:
    void check(std::size_t n) const {
        if (!need(n)) raise(Errc::kFormatError, "EMB1: truncated payload");
    }

    const unsigned char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

} // namespace

void write_embeddings(const std::string& path, const std::vector<LabeledEmbedding>& rows) {
    const std::size_t dim = rows.empty() ? 0 : rows.front().vector.size();
    if (!rows.empty() && dim == 0)
        raise(Errc::kFormatError, "EMB1: dim must be >= 1");
    for (const auto& row : rows) {
        if (row.vector.size() != dim)
            raise(Errc::kFormatError, "EMB1: non-uniform dim in row " + row.id);
        if (row.id.size() > std::numeric_limits<std::uint16_t>::max())
            raise(Errc::kFormatError, "EMB1: id too long");
        for (double v : row.vector)
            if (!std::isfinite(v))
                raise(Errc::kFormatError, "EMB1: non-finite value in row " + row.id);
    }

    std::string buf;
    buf.reserve(12 + rows.size() * (14 + dim * 4));
    buf += "EMB1";
    put_u32(buf, static_cast<std::uint32_t>(rows.size()));
    put_u32(buf, static_cast<std::uint32_t>(dim));
    for (const auto& row : rows) {
        put_u16(buf, static_cast<std::uint16_t>(row.id.size()));
        buf += row.id;
        put_u64(buf, row.label);
        for (double v : row.vector) put_f32(buf, static_cast<float>(v));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kIoError, "cannot open for write: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) raise(Errc::kIoError, "write failed: " + path);
}

std::vector<LabeledEmbedding> read_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::kIoError, "cannot open for read: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) raise(Errc::kIoError, "read failed: " + path);

    Reader r(reinterpret_cast<const unsigned char*>(raw.data()), raw.size());
    if (r.bytes(4) != "EMB1") raise(Errc::kFormatError, "EMB1: bad magic in " + path);
    const std::uint32_t count = r.u32();
    const std::uint32_t dim = r.u32();
    if (count > 0 && dim == 0) raise(Errc::kFormatError, "EMB1: dim must be >= 1");

    std::vector<LabeledEmbedding> rows;
    rows.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        LabeledEmbedding row;
        const std::uint16_t id_len = r.u16();
        row.id = r.bytes(id_len);
        row.label = r.u64();
        row.vector.resize(dim);
        for (std::uint32_t d = 0; d < dim; ++d) {
            const float v = r.f32();
            if (!std::isfinite(v))
                raise(Errc::kFormatError, "EMB1: non-finite value in row " + row.id);
            row.vector[d] = static_cast<double>(v);
        }
        rows.push_back(std::move(row));
    }
    if (r.remaining() != 0) raise(Errc::kFormatError, "EMB1: trailing bytes in " + path);
    return rows;
}

} // namespace landmark
