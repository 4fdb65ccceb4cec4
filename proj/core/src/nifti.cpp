#include "t1forge/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace t1forge {

namespace {

// Byte offsets in the NIfTI-1 header.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffMagic = 344;

class Reader {
public:
    Reader(std::span<const std::byte> bytes, bool swap) : bytes_(bytes), swap_(swap) {}

    template <typename T>
    T get(std::size_t offset) const {
        std::array<std::byte, sizeof(T)> raw{};
        std::memcpy(raw.data(), bytes_.data() + offset, sizeof(T));
        if (swap_) std::reverse(raw.begin(), raw.end());
        return std::bit_cast<T>(raw);
    }

private:
    std::span<const std::byte> bytes_;
    bool swap_;
};

std::size_t datatype_size(std::int16_t datatype) {
    switch (datatype) {
        case nifti::kInt16:
        case nifti::kUInt16: return 2;
        case nifti::kFloat32: return 4;
        case nifti::kFloat64: return 8;
        default:
            throw Error(ErrorCode::UnsupportedDatatype, "NIfTI datatype " + std::to_string(datatype));
    }
}

double read_sample(const Reader& r, std::int16_t datatype, std::size_t offset) {
    switch (datatype) {
        case nifti::kInt16: return r.get<std::int16_t>(offset);
        case nifti::kUInt16: return r.get<std::uint16_t>(offset);
        case nifti::kFloat32: return r.get<float>(offset);
        default: return r.get<double>(offset);
    }
}

}  // namespace

NiftiImage parse_nifti(std::span<const std::byte> bytes, int slice) {
    if (bytes.size() >= 2 && bytes[0] == std::byte{0x1f} && bytes[1] == std::byte{0x8b}) {
        throw Error(ErrorCode::GzipUnsupported, "gzip-compressed NIfTI is not supported");
    }
    if (bytes.size() < nifti::kHeaderSize) {
        throw Error(ErrorCode::TruncatedFile, "file shorter than the 348-byte NIfTI-1 header");
    }
    const char* magic = reinterpret_cast<const char*>(bytes.data() + kOffMagic);
    if (std::memcmp(magic, "n+1\0", 4) != 0) {
        throw Error(ErrorCode::BadMagic, "expected single-file magic \"n+1\"");
    }

    NiftiMetadata meta;
    const std::int32_t hdr_native = Reader(bytes, false).get<std::int32_t>(kOffSizeofHdr);
    if (hdr_native != static_cast<std::int32_t>(nifti::kHeaderSize)) {
        if (Reader(bytes, true).get<std::int32_t>(kOffSizeofHdr) != static_cast<std::int32_t>(nifti::kHeaderSize)) {
            throw Error(ErrorCode::FormatError, "sizeof_hdr is not 348 in either byte order");
        }
        meta.byte_swapped = true;
    }
    const Reader r(bytes, meta.byte_swapped);

    for (std::size_t i = 0; i < 8; ++i) {
        meta.dim[i] = r.get<std::int16_t>(kOffDim + 2 * i);
        meta.pixdim[i] = r.get<float>(kOffPixdim + 4 * i);
    }
    meta.datatype = r.get<std::int16_t>(kOffDatatype);
    meta.bitpix = r.get<std::int16_t>(kOffBitpix);
    meta.vox_offset = r.get<float>(kOffVoxOffset);
    meta.scl_slope = r.get<float>(kOffSclSlope);
    meta.scl_inter = r.get<float>(kOffSclInter);
    meta.slice = slice;

    const std::size_t sample_size = datatype_size(meta.datatype);

    const int ndim = meta.dim[0];
    if (ndim < 2 || ndim > 7) throw Error(ErrorCode::FormatError, "dim[0] must be in 2..7");
    for (int i = 4; i <= ndim; ++i) {
        if (meta.dim[static_cast<std::size_t>(i)] > 1) {
            throw Error(ErrorCode::FormatError, "only 2D and 3D images are supported");
        }
    }
    const int width = meta.dim[1];
    const int height = meta.dim[2];
    const int depth = ndim >= 3 ? std::max<int>(meta.dim[3], 1) : 1;
    if (width < 1 || height < 1) throw Error(ErrorCode::FormatError, "non-positive image dimension");
    if (slice < 0 || slice >= depth) {
        throw Error(ErrorCode::SliceOutOfRange,
                    "slice " + std::to_string(slice) + " outside [0, " + std::to_string(depth) + ")");
    }
    if (meta.vox_offset < static_cast<float>(nifti::kHeaderSize)) {
        throw Error(ErrorCode::FormatError, "vox_offset points inside the header");
    }

    const std::size_t plane = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t start = static_cast<std::size_t>(meta.vox_offset) + static_cast<std::size_t>(slice) * plane * sample_size;
    if (bytes.size() < start + plane * sample_size) {
        throw Error(ErrorCode::TruncatedFile, "image data shorter than dim/datatype require");
    }

    const bool scale = meta.scl_slope != 0.0f;
    const double slope = meta.scl_slope;
    const double inter = meta.scl_inter;
    std::vector<double> values(plane);
    for (std::size_t i = 0; i < plane; ++i) {
        const double stored = read_sample(r, meta.datatype, start + i * sample_size);
        values[i] = scale ? stored * slope + inter : stored;
    }

    const double sx = meta.pixdim[1] > 0.0f ? meta.pixdim[1] : 1.0;
    const double sy = meta.pixdim[2] > 0.0f ? meta.pixdim[2] : 1.0;
    return {ImageGrid(width, height, std::move(values), sx, sy), meta};
}

NiftiImage read_nifti(const std::filesystem::path& path, int slice) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_nifti(std::as_bytes(std::span<const char>(raw)), slice);
}

}  // namespace t1forge
