#include "t1forge/image.hpp"

#include <algorithm>
#include <cmath>

namespace t1forge {

double distance(Point2 a, Point2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

ImageGrid::ImageGrid(int width, int height, double fill, double spacing_x, double spacing_y)
    : Raster<double>(width, height, fill), spacing_x_(spacing_x), spacing_y_(spacing_y) {
    validate();
}

ImageGrid::ImageGrid(int width, int height, std::vector<double> values, double spacing_x, double spacing_y)
    : Raster<double>(width, height, std::move(values)), spacing_x_(spacing_x), spacing_y_(spacing_y) {
    validate();
}

void ImageGrid::validate() const {
    if (!(spacing_x_ > 0.0) || !(spacing_y_ > 0.0) || !std::isfinite(spacing_x_) || !std::isfinite(spacing_y_)) {
        throw Error(ErrorCode::InvalidArgument, "pixel spacing must be finite and > 0");
    }
    for (double v : values()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "image contains a non-finite value");
    }
}

LabelMask label_mask_from_bytes(int width, int height, std::span<const std::uint8_t> bytes) {
    if (bytes.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::DimensionMismatch, "label plane size does not match width*height");
    }
    std::vector<Label> labels(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] >= kNumClasses) {
            throw Error(ErrorCode::FormatError, "label value " + std::to_string(bytes[i]) + " outside {0,1,2,3}");
        }
        labels[i] = static_cast<Label>(bytes[i]);
    }
    return LabelMask(width, height, std::move(labels));
}

BinaryMask select(const LabelMask& mask, Label label) {
    BinaryMask out(mask.width(), mask.height(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] == label ? 1 : 0;
    return out;
}

BinaryMask select_any(const LabelMask& mask, std::span<const Label> labels) {
    BinaryMask out(mask.width(), mask.height(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out[i] = std::find(labels.begin(), labels.end(), mask[i]) != labels.end() ? 1 : 0;
    }
    return out;
}

std::size_t area(const BinaryMask& mask) noexcept {
    return static_cast<std::size_t>(std::count_if(mask.values().begin(), mask.values().end(),
                                                  [](std::uint8_t v) { return v != 0; }));
}

Point2 centroid(const BinaryMask& mask) {
    double sx = 0.0;
    double sy = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) throw Error(ErrorCode::EmptyInput, "centroid of an empty mask");
    return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "mask dimensions differ");
}

}  // namespace

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    BinaryMask out(a.width(), a.height(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
    return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    BinaryMask out(a.width(), a.height(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
    return out;
}

bool is_subset(const BinaryMask& inner, const BinaryMask& outer) {
    require_same_shape(inner, outer);
    for (std::size_t i = 0; i < inner.size(); ++i) {
        if (inner[i] && !outer[i]) return false;
    }
    return true;
}

}  // namespace t1forge
