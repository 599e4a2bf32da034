#include "sublift/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace sublift {

std::vector<double> ImageBuffer::plane(int c) const {
    std::vector<double> out(pixels());
    for (std::size_t p = 0; p < out.size(); ++p) {
        out[p] = values[p * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
    }
    return out;
}

void ImageBuffer::set_plane(int c, const std::vector<double>& data) {
    if (data.size() != pixels()) {
        throw std::invalid_argument("set_plane: size mismatch");
    }
    for (std::size_t p = 0; p < data.size(); ++p) {
        values[p * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)] = data[p];
    }
}

ImageBuffer ImageBuffer::from_planes(int width, int height,
                                     const std::vector<std::vector<double>>& planes) {
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = static_cast<int>(planes.size());
    img.values.assign(img.pixels() * planes.size(), 0.0);
    for (int c = 0; c < img.channels; ++c) {
        img.set_plane(c, planes[static_cast<std::size_t>(c)]);
    }
    return img;
}

namespace {

class HeaderReader {
public:
    explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

    long next_number() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw MalformedHeaderError("netpbm: expected a decimal number in the header");
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1L << 30) {
                throw MalformedHeaderError("netpbm: header number out of range");
            }
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw MalformedHeaderError("netpbm: missing whitespace before the raster");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 2;
};

}  // namespace

ImageBuffer decode_netpbm(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
        throw MalformedHeaderError("netpbm: magic must be P5 or P6");
    }
    HeaderReader reader(bytes);
    const long width = reader.next_number();
    const long height = reader.next_number();
    const long maxval = reader.next_number();
    if (width <= 0 || height <= 0) {
        throw MalformedHeaderError("netpbm: width and height must be positive");
    }
    if (maxval < 1 || maxval > 65535) {
        throw UnsupportedMaxvalError("netpbm: maxval " + std::to_string(maxval) +
                                     " outside 1..65535");
    }
    const std::size_t start = reader.raster_start();

    ImageBuffer img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.channels = bytes[1] == '5' ? 1 : 3;
    const std::size_t samples = img.pixels() * static_cast<std::size_t>(img.channels);
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (bytes.size() < start + samples * bytes_per) {
        throw TruncatedPayloadError("netpbm: raster holds " + std::to_string(bytes.size() - start) +
                                    " bytes, expected " + std::to_string(samples * bytes_per));
    }
    img.values.resize(samples);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t s = 0; s < samples; ++s) {
        unsigned value = bytes[start + s * bytes_per];
        if (bytes_per == 2) {
            value = (value << 8) | bytes[start + 2 * s + 1];
        }
        img.values[s] = std::min(1.0, value * scale);
    }
    return img;
}

std::vector<unsigned char> encode_netpbm(const ImageBuffer& image) {
    if (image.channels != 1 && image.channels != 3) {
        throw std::invalid_argument("netpbm: only 1 or 3 channels can be written");
    }
    if (image.values.size() != image.pixels() * static_cast<std::size_t>(image.channels)) {
        throw std::invalid_argument("netpbm: value count does not match the dimensions");
    }
    const std::string header = std::string(image.channels == 1 ? "P5" : "P6") + "\n" +
                               std::to_string(image.width) + " " + std::to_string(image.height) +
                               "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    out.reserve(out.size() + image.values.size());
    for (double v : image.values) {
        const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<unsigned char>(std::lround(clamped * 255.0)));
    }
    return out;
}

ImageBuffer load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageAccessError("cannot open image " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_netpbm(bytes);
}

void save_image(const ImageBuffer& image, const std::filesystem::path& path) {
    const auto bytes = encode_netpbm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ImageAccessError("cannot write image " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw ImageAccessError("write failed for " + path.string());
    }
}

}  // namespace sublift
