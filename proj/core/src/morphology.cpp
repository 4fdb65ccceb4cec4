#include "t1forge/morphology.hpp"

#include <algorithm>

namespace t1forge {

StructuringElement::StructuringElement() : StructuringElement(square(3)) {}

StructuringElement::StructuringElement(int width, int height, std::vector<std::uint8_t> footprint, int anchor_x,
                                       int anchor_y)
    : width_(width), height_(height), anchor_x_(anchor_x), anchor_y_(anchor_y) {
    if (width < 1 || height < 1 || footprint.size() != static_cast<std::size_t>(width * height)) {
        throw Error(ErrorCode::InvalidArgument, "structuring element footprint does not match its size");
    }
    if (anchor_x < 0 || anchor_y < 0 || anchor_x >= width || anchor_y >= height) {
        throw Error(ErrorCode::InvalidArgument, "structuring element anchor outside footprint");
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (footprint[static_cast<std::size_t>(y * width + x)]) offsets_.push_back({x - anchor_x, y - anchor_y});
        }
    }
    if (offsets_.empty()) throw Error(ErrorCode::InvalidArgument, "structuring element has no set pixel");
}

StructuringElement StructuringElement::square(int size) {
    if (size < 1) throw Error(ErrorCode::InvalidArgument, "square element size must be >= 1");
    return StructuringElement(size, size, std::vector<std::uint8_t>(static_cast<std::size_t>(size * size), 1),
                              size / 2, size / 2);
}

StructuringElement StructuringElement::cross() {
    return StructuringElement(3, 3, {0, 1, 0, 1, 1, 1, 0, 1, 0}, 1, 1);
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
    BinaryMask out(mask.width(), mask.height(), 0);
    const auto& offsets = se.offsets();
    const bool anchor_set =
        std::any_of(offsets.begin(), offsets.end(), [](const Pixel& o) { return o.x == 0 && o.y == 0; });
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (anchor_set && !mask.at(x, y)) continue;
            bool fits = true;
            for (const Pixel& o : offsets) {
                const int xx = x + o.x;
                const int yy = y + o.y;
                if (!mask.contains(xx, yy) || !mask.at(xx, yy)) {
                    fits = false;
                    break;
                }
            }
            out.at(x, y) = fits ? 1 : 0;
        }
    }
    return out;
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
    BinaryMask out(mask.width(), mask.height(), 0);
    const auto& offsets = se.offsets();
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            for (const Pixel& o : offsets) {
                const int xx = x + o.x;
                const int yy = y + o.y;
                if (out.contains(xx, yy)) out.at(xx, yy) = 1;
            }
        }
    }
    return out;
}

BinaryMask erode_to_fraction(const BinaryMask& mask, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0, 1]");
    }
    const std::size_t original = area(mask);
    if (original == 0) throw Error(ErrorCode::EmptyInput, "cannot erode an empty mask to a fraction of its area");

    const double bound = fraction * static_cast<double>(original);
    const StructuringElement se;
    BinaryMask current = mask;
    std::size_t current_area = original;
    while (static_cast<double>(current_area) > bound) {
        current = erode(current, se);
        current_area = area(current);
        if (current_area == 0) break;
    }
    return current;
}

std::vector<Pixel> hit_or_miss_junctions(const LabelMask& mask, LabelSet required) {
    std::vector<Pixel> out;
    const unsigned want = required.bits();
    for (int y = 0; y + 1 < mask.height(); ++y) {
        for (int x = 0; x + 1 < mask.width(); ++x) {
            const unsigned seen = LabelSet::bit(mask.at(x, y)) | LabelSet::bit(mask.at(x + 1, y)) |
                                  LabelSet::bit(mask.at(x, y + 1)) | LabelSet::bit(mask.at(x + 1, y + 1));
            if ((seen & want) == want) out.push_back({x, y});
        }
    }
    return out;
}

Components connected_components(const BinaryMask& mask) {
    Components result{0, Raster<int>(mask.width(), mask.height(), 0)};
    std::vector<Pixel> stack;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y) || result.labels.at(x, y) != 0) continue;
            const int id = ++result.count;
            result.labels.at(x, y) = id;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                constexpr int dx[4] = {1, -1, 0, 0};
                constexpr int dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = p.x + dx[k];
                    const int ny = p.y + dy[k];
                    if (mask.contains(nx, ny) && mask.at(nx, ny) && result.labels.at(nx, ny) == 0) {
                        result.labels.at(nx, ny) = id;
                        stack.push_back({nx, ny});
                    }
                }
            }
        }
    }
    return result;
}

}  // namespace t1forge
