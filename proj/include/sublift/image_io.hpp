#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace sublift {

/// Interleaved image with values in [0, 1]: values[(y * width + x) * channels + c].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> values;

    [[nodiscard]] std::size_t pixels() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    /// One channel as a row-major plane.
    [[nodiscard]] std::vector<double> plane(int c) const;
    void set_plane(int c, const std::vector<double>& data);

    static ImageBuffer from_planes(int width, int height, const std::vector<std::vector<double>>& planes);
};

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
/// File could not be opened for reading or writing.
class ImageAccessError : public ImageError {
public:
    using ImageError::ImageError;
};
class MalformedHeaderError : public ImageError {
public:
    using ImageError::ImageError;
};
class TruncatedPayloadError : public ImageError {
public:
    using ImageError::ImageError;
};
class UnsupportedMaxvalError : public ImageError {
public:
    using ImageError::ImageError;
};

/// Reads binary PGM (P5) or PPM (P6); 16-bit samples are big-endian.
ImageBuffer load_image(const std::filesystem::path& path);
/// Writes 8-bit P5 for one channel, P6 for three. Values are clamped.
void save_image(const ImageBuffer& image, const std::filesystem::path& path);

ImageBuffer decode_netpbm(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> encode_netpbm(const ImageBuffer& image);

}  // namespace sublift
