#include "head/head_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace landmark {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

void put_block(std::string& out, const std::vector<double>& values) {
    for (double v : values) put_f64(out, v);
}

struct Reader {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos = 0;

    void check(std::size_t n) const {
        if (pos + n > size) raise(Errc::kFormatError, "HEAD: truncated payload");
    }
    std::uint32_t u32() {
        check(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        check(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    void block(std::vector<double>& out, std::size_t n) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = f64();
    }
    std::string bytes(std::size_t n) {
        check(n);
        std::string s(reinterpret_cast<const char*>(data + pos), n);
        pos += n;
        return s;
    }
};

} // namespace

void save_head(const std::string& path, const TrainedHead& trained) {
    const MetricHead& h = trained.head;
    std::string buf;
    buf += "HEAD";
    put_u32(buf, 1);
    put_u32(buf, static_cast<std::uint32_t>(h.input_dim));
    put_u32(buf, static_cast<std::uint32_t>(h.embedding_dim));
    put_u32(buf, static_cast<std::uint32_t>(trained.classifier.class_count()));
    put_u32(buf, trained.loss.kind == LossKind::kSoftmax ? 0u : 1u);
    put_f64(buf, h.bn_momentum);
    put_f64(buf, h.bn_epsilon);
    put_f64(buf, trained.loss.arcface.margin);
    put_f64(buf, trained.loss.arcface.scale);
    put_block(buf, h.projection.data);
    put_block(buf, h.bn_gamma);
    put_block(buf, h.bn_beta);
    put_block(buf, h.bn_running_mean);
    put_block(buf, h.bn_running_var);
    put_block(buf, trained.classifier.rows.data);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kIoError, "cannot open for write: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) raise(Errc::kIoError, "write failed: " + path);
}

TrainedHead load_head(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::kIoError, "cannot open for read: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Reader r{reinterpret_cast<const unsigned char*>(raw.data()), raw.size()};
    if (r.bytes(4) != "HEAD") raise(Errc::kFormatError, "HEAD: bad magic in " + path);
    if (r.u32() != 1) raise(Errc::kFormatError, "HEAD: unsupported version");

    TrainedHead trained;
    MetricHead& h = trained.head;
    h.input_dim = r.u32();
    h.embedding_dim = r.u32();
    const std::uint32_t classes = r.u32();
    const std::uint32_t kind = r.u32();
    if (h.input_dim < 1 || h.embedding_dim < 1 || classes < 1 || kind > 1)
        raise(Errc::kFormatError, "HEAD: bad header fields");
    trained.loss.kind = kind == 0 ? LossKind::kSoftmax : LossKind::kArcFace;
    h.bn_momentum = r.f64();
    h.bn_epsilon = r.f64();
    trained.loss.arcface.margin = r.f64();
    trained.loss.arcface.scale = r.f64();

    h.projection = Matrix(h.input_dim, h.embedding_dim);
    r.block(h.projection.data, h.input_dim * h.embedding_dim);
    r.block(h.bn_gamma, h.embedding_dim);
    r.block(h.bn_beta, h.embedding_dim);
    r.block(h.bn_running_mean, h.embedding_dim);
    r.block(h.bn_running_var, h.embedding_dim);
    trained.classifier.rows = Matrix(classes, h.embedding_dim);
    r.block(trained.classifier.rows.data, classes * h.embedding_dim);
    if (r.pos != r.size) raise(Errc::kFormatError, "HEAD: trailing bytes in " + path);

    for (double v : h.bn_running_var)
        if (!(v >= 0.0)) raise(Errc::kFormatError, "HEAD: negative running variance");
    if (!(h.bn_epsilon > 0.0)) raise(Errc::kFormatError, "HEAD: bad bn_epsilon");
    return trained;
}

} // namespace landmark
