#include "cutmix/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

namespace landmark {

namespace {

// Reads one whitespace-delimited token, skipping '#' comments per the netpbm
// grammar.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int parse_positive(const std::string& tok, const char* what) {
    if (tok.empty()) raise(Errc::kFormatError, std::string("PPM: missing ") + what);
    int v = 0;
    for (char ch : tok) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            raise(Errc::kFormatError, std::string("PPM: bad ") + what);
        v = v * 10 + (ch - '0');
        if (v > 1 << 20) raise(Errc::kFormatError, std::string("PPM: oversized ") + what);
    }
    if (v < 1) raise(Errc::kFormatError, std::string("PPM: bad ") + what);
    return v;
}

} // namespace

void write_image(const std::string& path, const ImageGrid& img) {
    if (img.height < 1 || img.width < 1 || (img.channels != 1 && img.channels != 3))
        raise(Errc::kInvalidArgument, "write_image: bad geometry");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::kIoError, "cannot open for write: " + path);
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n255\n";
    std::string payload;
    payload.reserve(img.pixels.size());
    for (double v : img.pixels) {
        double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        payload.push_back(static_cast<char>(
            static_cast<unsigned char>(std::lround(clamped * 255.0))));
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) raise(Errc::kIoError, "write failed: " + path);
}

ImageGrid read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::kIoError, "cannot open for read: " + path);

    const std::string magic = next_token(in);
    int channels;
    if (magic == "P6") {
        channels = 3;
    } else if (magic == "P5") {
        channels = 1;
    } else {
        raise(Errc::kFormatError, "PPM: bad magic in " + path);
    }
    const int width = parse_positive(next_token(in), "width");
    const int height = parse_positive(next_token(in), "height");
    const int maxval = parse_positive(next_token(in), "maxval");
    if (maxval != 255) raise(Errc::kFormatError, "PPM: only maxval 255 supported");

    ImageGrid img(height, width, channels);
    const std::size_t count = img.pixels.size();
    std::string raw(count, '\0');
    in.read(raw.data(), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        raise(Errc::kFormatError, "PPM: truncated pixel data in " + path);
    for (std::size_t i = 0; i < count; ++i)
        img.pixels[i] = static_cast<unsigned char>(raw[i]) / 255.0;
    return img;
}

} // namespace landmark
