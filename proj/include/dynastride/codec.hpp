#ifndef DYNASTRIDE_CODEC_HPP
#define DYNASTRIDE_CODEC_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dynastride/types.hpp"

namespace dynastride {

// Decodes a PNG or JPEG file (dispatch on magic bytes). Grayscale sources
// decode to 1 channel, color sources to 3; alpha is composited away.
Frame decode_image_file(const std::filesystem::path& path);
Frame decode_image(const std::vector<std::uint8_t>& bytes, const std::string& origin = "");

// Lossless PNG round-trip, used for the wire payload and the synthetic
// corpus. Encoding a frame and decoding the bytes yields the same pixels.
std::vector<std::uint8_t> encode_png(const Frame& frame);
void write_png_file(const std::filesystem::path& path, const Frame& frame);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace dynastride

#endif  // DYNASTRIDE_CODEC_HPP
