#include "t1forge/raw_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/base64.hpp"

namespace t1forge {

using nlohmann::json;

namespace detail {

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) text.remove_suffix(1);
    if (text.size() % 4 != 0) throw Error(ErrorCode::FormatError, "base64 body length is not a multiple of 4");
    std::vector<std::uint8_t> out(3 * (text.size() / 4));
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) throw Error(ErrorCode::FormatError, "invalid base64 body");
    std::size_t padding = 0;
    if (!text.empty() && text.back() == '=') ++padding;
    if (text.size() >= 2 && text[text.size() - 2] == '=') ++padding;
    out.resize(static_cast<std::size_t>(n) - padding);
    return out;
}

}  // namespace detail

namespace {

const char* dtype_name(RawDtype d) {
    switch (d) {
        case RawDtype::Float32: return "float32";
        case RawDtype::Float64: return "float64";
        case RawDtype::UInt8: return "uint8";
    }
    return "float32";
}

RawDtype dtype_from(const std::string& s) {
    if (s == "float32") return RawDtype::Float32;
    if (s == "float64") return RawDtype::Float64;
    if (s == "uint8") return RawDtype::UInt8;
    throw Error(ErrorCode::FormatError, "unknown raw dtype '" + s + "'");
}

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T value) {
    auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    out.insert(out.end(), raw.begin(), raw.end());
}

template <typename T>
T read_le(const std::uint8_t* p) {
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
}

std::string format_value(double v, RawDtype dtype) {
    char buf[40];
    switch (dtype) {
        case RawDtype::Float32: std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(v))); break;
        case RawDtype::Float64: std::snprintf(buf, sizeof buf, "%.17g", v); break;
        case RawDtype::UInt8: std::snprintf(buf, sizeof buf, "%d", static_cast<int>(v)); break;
    }
    return buf;
}

std::string encode_values(int width, int height, double sx, double sy, std::span<const double> values,
                          RawDtype dtype, RawEncoding encoding) {
    json header = {{"width", width},
                   {"height", height},
                   {"spacing_x", sx},
                   {"spacing_y", sy},
                   {"dtype", dtype_name(dtype)},
                   {"encoding", encoding == RawEncoding::Base64 ? "base64" : "csv"}};
    std::string out = header.dump();
    out += '\n';
    if (encoding == RawEncoding::Base64) {
        std::vector<std::uint8_t> bytes;
        for (double v : values) {
            switch (dtype) {
                case RawDtype::Float32: append_le(bytes, static_cast<float>(v)); break;
                case RawDtype::Float64: append_le(bytes, v); break;
                case RawDtype::UInt8: bytes.push_back(static_cast<std::uint8_t>(v)); break;
            }
        }
        out += detail::base64_encode(bytes);
        out += '\n';
    } else {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (x) out += ',';
                out += format_value(values[static_cast<std::size_t>(y * width + x)], dtype);
            }
            out += '\n';
        }
    }
    return out;
}

struct Decoded {
    int width = 0;
    int height = 0;
    double sx = 1.0;
    double sy = 1.0;
    RawDtype dtype = RawDtype::Float32;
    std::vector<double> values;
};

Decoded decode_values(std::string_view text) {
    const auto newline = text.find('\n');
    if (newline == std::string_view::npos) throw Error(ErrorCode::FormatError, "raw file lacks a header line");
    json header;
    try {
        header = json::parse(text.substr(0, newline));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("raw header is not JSON: ") + e.what());
    }
    Decoded d;
    std::string encoding;
    try {
        d.width = header.at("width").get<int>();
        d.height = header.at("height").get<int>();
        d.sx = header.value("spacing_x", 1.0);
        d.sy = header.value("spacing_y", 1.0);
        d.dtype = dtype_from(header.at("dtype").get<std::string>());
        encoding = header.value("encoding", std::string("base64"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("raw header: ") + e.what());
    }
    if (d.width < 1 || d.height < 1) throw Error(ErrorCode::FormatError, "raw header has non-positive dimensions");
    const std::size_t n = static_cast<std::size_t>(d.width) * static_cast<std::size_t>(d.height);
    const std::string_view body = text.substr(newline + 1);
    d.values.reserve(n);

    if (encoding == "base64") {
        const auto bytes = detail::base64_decode(body);
        const std::size_t width_bytes = d.dtype == RawDtype::Float64 ? 8 : d.dtype == RawDtype::Float32 ? 4 : 1;
        if (bytes.size() != n * width_bytes) {
            throw Error(ErrorCode::DimensionMismatch, "raw body holds " + std::to_string(bytes.size()) +
                                                          " bytes, header implies " + std::to_string(n * width_bytes));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t* p = bytes.data() + i * width_bytes;
            switch (d.dtype) {
                case RawDtype::Float32: d.values.push_back(read_le<float>(p)); break;
                case RawDtype::Float64: d.values.push_back(read_le<double>(p)); break;
                case RawDtype::UInt8: d.values.push_back(*p); break;
            }
        }
    } else if (encoding == "csv") {
        std::size_t pos = 0;
        while (pos < body.size()) {
            while (pos < body.size() && (body[pos] == ',' || body[pos] == '\n' || body[pos] == '\r' || body[pos] == ' ')) ++pos;
            if (pos >= body.size()) break;
            std::size_t end = pos;
            while (end < body.size() && body[end] != ',' && body[end] != '\n' && body[end] != '\r') ++end;
            const std::string token(body.substr(pos, end - pos));
            char* stop = nullptr;
            const double v = std::strtod(token.c_str(), &stop);
            if (stop == token.c_str()) throw Error(ErrorCode::FormatError, "bad CSV value '" + token + "'");
            d.values.push_back(d.dtype == RawDtype::Float32 ? static_cast<double>(static_cast<float>(v)) : v);
            pos = end;
        }
        if (d.values.size() != n) {
            throw Error(ErrorCode::DimensionMismatch, "CSV body holds " + std::to_string(d.values.size()) +
                                                          " values, header implies " + std::to_string(n));
        }
    } else {
        throw Error(ErrorCode::FormatError, "unknown raw encoding '" + encoding + "'");
    }
    return d;
}

}  // namespace

std::string encode_raw(const ImageGrid& image, RawDtype dtype, RawEncoding encoding) {
    if (dtype == RawDtype::UInt8) throw Error(ErrorCode::InvalidArgument, "images are stored as float32 or float64");
    return encode_values(image.width(), image.height(), image.spacing_x(), image.spacing_y(), image.values(), dtype,
                         encoding);
}

std::string encode_raw(const LabelMask& mask, RawEncoding encoding) {
    std::vector<double> v(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) v[i] = static_cast<double>(mask[i]);
    return encode_values(mask.width(), mask.height(), 1.0, 1.0, v, RawDtype::UInt8, encoding);
}

std::string encode_raw(const BinaryMask& mask, RawEncoding encoding) {
    std::vector<double> v(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) v[i] = mask[i] ? 1.0 : 0.0;
    return encode_values(mask.width(), mask.height(), 1.0, 1.0, v, RawDtype::UInt8, encoding);
}

ImageGrid decode_raw_image(std::string_view text) {
    Decoded d = decode_values(text);
    return ImageGrid(d.width, d.height, std::move(d.values), d.sx, d.sy);
}

LabelMask decode_raw_labels(std::string_view text) {
    const Decoded d = decode_values(text);
    if (d.dtype != RawDtype::UInt8) throw Error(ErrorCode::FormatError, "label planes must use dtype uint8");
    std::vector<std::uint8_t> bytes(d.values.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(d.values[i]);
    return label_mask_from_bytes(d.width, d.height, bytes);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_raw(const std::filesystem::path& path, const ImageGrid& image, RawDtype dtype, RawEncoding encoding) {
    write_text_file(path, encode_raw(image, dtype, encoding));
}

void write_raw(const std::filesystem::path& path, const LabelMask& mask, RawEncoding encoding) {
    write_text_file(path, encode_raw(mask, encoding));
}

void write_raw(const std::filesystem::path& path, const BinaryMask& mask, RawEncoding encoding) {
    write_text_file(path, encode_raw(mask, encoding));
}

ImageGrid read_raw_image(const std::filesystem::path& path) { return decode_raw_image(read_text_file(path)); }

LabelMask read_raw_labels(const std::filesystem::path& path) { return decode_raw_labels(read_text_file(path)); }

}  // namespace t1forge
