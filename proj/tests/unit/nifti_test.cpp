#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <fstream>
#include <random>

#include "support/oracles.hpp"
#include "t1forge/error.hpp"
#include "t1forge/nifti.hpp"
#include "t1forge/raw_io.hpp"

using namespace t1forge;

namespace {

NiftiImage parse(const std::vector<std::uint8_t>& bytes, int slice = 0) {
    return parse_nifti(std::as_bytes(std::span(bytes)), slice);
}

std::vector<double> ramp(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

ErrorCode code_of(const std::vector<std::uint8_t>& bytes, int slice = 0) {
    try {
        parse(bytes, slice);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Nifti, Float32IdentityScaling) {
    const auto bytes = oracle::nifti_file({{4, 4}}, ramp(16));
    const NiftiImage img = parse(bytes);
    ASSERT_EQ(img.image.width(), 4);
    ASSERT_EQ(img.image.height(), 4);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(img.image.values()[static_cast<std::size_t>(i)], i);
}

TEST(Nifti, SlopeAndInterceptApplied) {
    oracle::NiftiSpec s{{4, 4}};
    s.scl_slope = 2.0f;
    s.scl_inter = 10.0f;
    const NiftiImage img = parse(oracle::nifti_file(s, ramp(16)));
    for (int i = 0; i < 16; ++i) EXPECT_EQ(img.image.values()[static_cast<std::size_t>(i)], 10.0 + 2.0 * i);
    EXPECT_EQ(img.image.values().front(), 10.0);
    EXPECT_EQ(img.image.values().back(), 40.0);
    EXPECT_EQ(img.metadata.scl_slope, 2.0f);
    EXPECT_EQ(img.metadata.scl_inter, 10.0f);
}

TEST(Nifti, ZeroSlopeMeansUnscaled) {
    oracle::NiftiSpec s{{4, 4}};
    s.scl_slope = 0.0f;
    s.scl_inter = 99.0f;
    const NiftiImage img = parse(oracle::nifti_file(s, ramp(16)));
    EXPECT_EQ(img.image.values()[5], 5.0);
}

TEST(Nifti, HeaderFieldsExposed) {
    oracle::NiftiSpec s{{5, 3, 2}};
    s.pixdim = {0.9f, 0.8f, 8.0f};
    const NiftiImage img = parse(oracle::nifti_file(s, ramp(30)), 1);
    EXPECT_EQ(img.metadata.dim[0], 3);
    EXPECT_EQ(img.metadata.dim[1], 5);
    EXPECT_EQ(img.metadata.dim[2], 3);
    EXPECT_EQ(img.metadata.dim[3], 2);
    EXPECT_EQ(img.metadata.datatype, nifti::kFloat32);
    EXPECT_EQ(img.metadata.bitpix, 32);
    EXPECT_EQ(img.metadata.vox_offset, 352.0f);
    EXPECT_EQ(img.metadata.pixdim[1], 0.9f);
    EXPECT_EQ(img.metadata.pixdim[2], 0.8f);
    EXPECT_FALSE(img.metadata.byte_swapped);
    EXPECT_DOUBLE_EQ(img.image.spacing_x(), static_cast<double>(0.9f));
    EXPECT_DOUBLE_EQ(img.image.spacing_y(), static_cast<double>(0.8f));
    // Slice 1 holds values 15..29.
    EXPECT_EQ(img.image.at(0, 0), 15.0);
    EXPECT_EQ(img.image.at(4, 2), 29.0);
}

TEST(Nifti, SliceOutOfRange) {
    const auto bytes = oracle::nifti_file({{4, 4, 2}}, ramp(32));
    EXPECT_EQ(code_of(bytes, 2), ErrorCode::SliceOutOfRange);
    EXPECT_EQ(code_of(bytes, -1), ErrorCode::SliceOutOfRange);
    EXPECT_EQ(code_of(oracle::nifti_file({{4, 4}}, ramp(16)), 1), ErrorCode::SliceOutOfRange);
}

TEST(Nifti, TwoFileMagicRejected) {
    oracle::NiftiSpec s{{4, 4}};
    s.magic = "ni1";
    EXPECT_EQ(code_of(oracle::nifti_file(s, ramp(16))), ErrorCode::BadMagic);
}

TEST(Nifti, GzipStreamRejected) {
    auto bytes = oracle::nifti_file({{4, 4}}, ramp(16));
    bytes[0] = 0x1f;
    bytes[1] = 0x8b;
    EXPECT_EQ(code_of(bytes), ErrorCode::GzipUnsupported);
}

TEST(Nifti, TruncatedHeaderAndBody) {
    auto bytes = oracle::nifti_file({{4, 4}}, ramp(16));
    EXPECT_EQ(code_of(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 200)), ErrorCode::TruncatedFile);
    bytes.resize(bytes.size() - 3);
    EXPECT_EQ(code_of(bytes), ErrorCode::TruncatedFile);
}

TEST(Nifti, UnsupportedDatatype) {
    oracle::NiftiSpec s{{4, 4}};
    s.datatype = 2;  // uint8
    EXPECT_EQ(code_of(oracle::nifti_file(s, ramp(16))), ErrorCode::UnsupportedDatatype);
}

TEST(Nifti, IntegerAndDoubleDatatypes) {
    const std::vector<double> vals{-3, 0, 7, 1200, 15, 2, 9, 31};
    for (std::int16_t dt : {nifti::kInt16, nifti::kFloat64}) {
        oracle::NiftiSpec s{{4, 2}};
        s.datatype = dt;
        const NiftiImage img = parse(oracle::nifti_file(s, vals));
        for (std::size_t i = 0; i < vals.size(); ++i) EXPECT_EQ(img.image.values()[i], vals[i]) << dt;
    }
    oracle::NiftiSpec s{{4, 2}};
    s.datatype = nifti::kUInt16;
    const std::vector<double> uvals{0, 65535, 1, 2, 3, 4, 5, 40000};
    const NiftiImage img = parse(oracle::nifti_file(s, uvals));
    for (std::size_t i = 0; i < uvals.size(); ++i) EXPECT_EQ(img.image.values()[i], uvals[i]);
}

TEST(Nifti, BigEndianFileDecoded) {
    oracle::NiftiSpec s{{4, 4}};
    s.big_endian = true;
    s.scl_slope = 2.0f;
    s.scl_inter = 10.0f;
    const NiftiImage img = parse(oracle::nifti_file(s, ramp(16)));
    EXPECT_TRUE(img.metadata.byte_swapped);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(img.image.values()[static_cast<std::size_t>(i)], 10.0 + 2.0 * i);
}

TEST(Nifti, ReadFromDiskAndMissingFile) {
    const auto path = std::filesystem::temp_directory_path() / "t1forge_nifti_test.nii";
    const auto bytes = oracle::nifti_file({{4, 4}}, ramp(16));
    std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                                static_cast<std::streamsize>(bytes.size()));
    EXPECT_EQ(read_nifti(path).image.values()[7], 7.0);
    std::filesystem::remove(path);
    try {
        read_nifti(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
}

TEST(Nifti, Float32RoundTripThroughRawWriterIsBitExact) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<float> u(-2000.0f, 3000.0f);
    std::vector<double> vals(12 * 9);
    for (auto& v : vals) v = static_cast<double>(u(rng));
    vals[3] = static_cast<double>(std::numeric_limits<float>::denorm_min());
    vals[4] = static_cast<double>(std::numeric_limits<float>::max());
    oracle::NiftiSpec s{{12, 9}};
    s.pixdim = {0.9f, 0.9f, 8.0f};
    const NiftiImage img = parse(oracle::nifti_file(s, vals));
    for (RawEncoding enc : {RawEncoding::Base64, RawEncoding::Csv}) {
        const ImageGrid back = decode_raw_image(encode_raw(img.image, RawDtype::Float32, enc));
        ASSERT_EQ(back.width(), 12);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            EXPECT_EQ(std::bit_cast<std::uint32_t>(static_cast<float>(back.values()[i])),
                      std::bit_cast<std::uint32_t>(static_cast<float>(vals[i])));
            EXPECT_EQ(back.values()[i], img.image.values()[i]);
        }
        EXPECT_EQ(back.spacing_x(), img.image.spacing_x());
    }
}
