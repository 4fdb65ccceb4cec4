#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "t1forge/error.hpp"

namespace t1forge {

/// Integer pixel position; x is the column, y the row.
struct Pixel {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Continuous position in pixel units. Pixel (i, j) has its centre at (i, j).
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point2 a, Point2 b) noexcept;

/// Row-major 2D array. Storage is a plain vector; copies are deep.
template <typename T>
class Raster {
public:
    Raster() = default;

    Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw Error(ErrorCode::InvalidArgument, "raster dimensions must be >= 1");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Raster(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
        if (width < 1 || height < 1) {
            throw Error(ErrorCode::InvalidArgument, "raster dimensions must be >= 1");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw Error(ErrorCode::DimensionMismatch, "raster data size does not match width*height");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    template <typename U>
    bool same_shape(const Raster<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// 2D scalar field (native T1 in milliseconds for T1 maps) with pixel spacing in mm.
class ImageGrid : public Raster<double> {
public:
    ImageGrid() = default;
    ImageGrid(int width, int height, double fill = 0.0, double spacing_x = 1.0, double spacing_y = 1.0);
    ImageGrid(int width, int height, std::vector<double> values, double spacing_x = 1.0, double spacing_y = 1.0);

    double spacing_x() const noexcept { return spacing_x_; }
    double spacing_y() const noexcept { return spacing_y_; }

    /// Throws InvalidArgument if any value is non-finite.
    void validate() const;

    friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

private:
    double spacing_x_ = 1.0;
    double spacing_y_ = 1.0;
};

enum class Label : std::uint8_t {
    Background = 0,
    LVBloodPool = 1,
    LVMyocardium = 2,
    RVBloodPool = 3,
};

inline constexpr int kNumClasses = 4;

constexpr int class_index(Label l) noexcept { return static_cast<int>(l); }

using LabelMask = Raster<Label>;

/// Binary mask; any non-zero byte is foreground.
using BinaryMask = Raster<std::uint8_t>;

/// Builds a LabelMask from raw bytes, rejecting values outside {0,1,2,3}.
LabelMask label_mask_from_bytes(int width, int height, std::span<const std::uint8_t> bytes);

BinaryMask select(const LabelMask& mask, Label label);
BinaryMask select_any(const LabelMask& mask, std::span<const Label> labels);

std::size_t area(const BinaryMask& mask) noexcept;

/// Centre of mass of the foreground pixels. Throws EmptyInput for an empty mask.
Point2 centroid(const BinaryMask& mask);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);

/// True when every foreground pixel of `inner` is foreground in `outer`.
bool is_subset(const BinaryMask& inner, const BinaryMask& outer);

}  // namespace t1forge
