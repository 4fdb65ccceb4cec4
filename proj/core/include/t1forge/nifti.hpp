#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

#include "t1forge/image.hpp"

namespace t1forge {

/// Header fields read from a single-file NIfTI-1 image.
struct NiftiMetadata {
    std::array<std::int16_t, 8> dim{};
    std::array<float, 8> pixdim{};
    std::int16_t datatype = 0;
    std::int16_t bitpix = 0;
    float vox_offset = 0.0f;
    float scl_slope = 0.0f;
    float scl_inter = 0.0f;
    bool byte_swapped = false;
    int slice = 0;
};

struct NiftiImage {
    ImageGrid image;
    NiftiMetadata metadata;
};

namespace nifti {
inline constexpr std::int16_t kInt16 = 4;
inline constexpr std::int16_t kFloat32 = 16;
inline constexpr std::int16_t kFloat64 = 64;
inline constexpr std::int16_t kUInt16 = 512;
inline constexpr std::size_t kHeaderSize = 348;
}  // namespace nifti

/// Decodes an uncompressed single-file NIfTI-1 image ("n+1\0" magic) held in memory.
///
/// Supported datatypes are int16, uint16, float32 and float64, in 2D or 3D.
/// For 3D volumes `slice` selects the z index. Values are scaled as
/// stored * scl_slope + scl_inter whenever scl_slope is non-zero.
///
/// Errors: GzipUnsupported, BadMagic, UnsupportedDatatype, TruncatedFile,
/// SliceOutOfRange.
NiftiImage parse_nifti(std::span<const std::byte> bytes, int slice = 0);

NiftiImage read_nifti(const std::filesystem::path& path, int slice = 0);

}  // namespace t1forge
