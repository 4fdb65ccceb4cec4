#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "t1forge/image.hpp"

namespace t1forge {

enum class RawDtype { Float32, Float64, UInt8 };
enum class RawEncoding { Base64, Csv };

// Raw interchange format: one line of JSON header
//   {"width", "height", "spacing_x", "spacing_y", "dtype", "encoding"}
// followed by the body. Base64 bodies are a single line of little-endian
// samples; CSV bodies are `height` lines of `width` comma-separated values.

std::string encode_raw(const ImageGrid& image, RawDtype dtype = RawDtype::Float32,
                       RawEncoding encoding = RawEncoding::Base64);
std::string encode_raw(const LabelMask& mask, RawEncoding encoding = RawEncoding::Base64);
std::string encode_raw(const BinaryMask& mask, RawEncoding encoding = RawEncoding::Base64);

ImageGrid decode_raw_image(std::string_view text);
LabelMask decode_raw_labels(std::string_view text);

void write_raw(const std::filesystem::path& path, const ImageGrid& image, RawDtype dtype = RawDtype::Float32,
               RawEncoding encoding = RawEncoding::Base64);
void write_raw(const std::filesystem::path& path, const LabelMask& mask,
               RawEncoding encoding = RawEncoding::Base64);
void write_raw(const std::filesystem::path& path, const BinaryMask& mask,
               RawEncoding encoding = RawEncoding::Base64);

ImageGrid read_raw_image(const std::filesystem::path& path);
LabelMask read_raw_labels(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace t1forge
