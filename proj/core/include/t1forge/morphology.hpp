#pragma once

#include <initializer_list>
#include <vector>

#include "t1forge/image.hpp"

namespace t1forge {

/// Small binary footprint with an anchor pixel. Defaults to the 3x3 square.
class StructuringElement {
public:
    StructuringElement();
    StructuringElement(int width, int height, std::vector<std::uint8_t> footprint, int anchor_x, int anchor_y);

    static StructuringElement square(int size);
    static StructuringElement cross();

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int anchor_x() const noexcept { return anchor_x_; }
    int anchor_y() const noexcept { return anchor_y_; }

    /// Offsets of the set footprint pixels relative to the anchor.
    const std::vector<Pixel>& offsets() const noexcept { return offsets_; }

private:
    int width_;
    int height_;
    int anchor_x_;
    int anchor_y_;
    std::vector<Pixel> offsets_;
};

/// Output pixel is set iff the element placed at it fits inside the foreground.
/// Pixels outside the image count as background.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se = StructuringElement{});

/// Output pixel is set iff the reflected element placed at it hits the foreground.
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se = StructuringElement{});

/// Erodes with the default element until area <= fraction * original area.
/// Returns the first mask meeting the bound, which may be empty.
/// Throws EmptyInput for an empty mask and InvalidArgument for fraction outside (0, 1].
BinaryMask erode_to_fraction(const BinaryMask& mask, double fraction);

/// Set of labels as a 4-bit mask.
class LabelSet {
public:
    constexpr LabelSet() = default;
    constexpr LabelSet(std::initializer_list<Label> labels) {
        for (Label l : labels) bits_ |= bit(l);
    }
    constexpr bool contains(Label l) const noexcept { return (bits_ & bit(l)) != 0; }
    constexpr unsigned bits() const noexcept { return bits_; }
    static constexpr unsigned bit(Label l) noexcept { return 1u << static_cast<unsigned>(l); }

private:
    unsigned bits_ = 0;
};

/// Hit-or-miss junction detector over 2x2 windows anchored at the top-left pixel.
/// A pixel is reported when its window (itself, right, down, down-right) contains
/// every label in `required`. Windows clipped by the border are skipped.
/// Output is sorted row-major.
std::vector<Pixel> hit_or_miss_junctions(const LabelMask& mask, LabelSet required);

struct Components {
    int count = 0;
    /// 0 for background, 1..count for components in first-encounter row-major order.
    Raster<int> labels;
};

/// 4-connected component labelling.
Components connected_components(const BinaryMask& mask);

}  // namespace t1forge
