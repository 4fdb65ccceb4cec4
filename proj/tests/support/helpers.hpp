#pragma once

#include <cstdint>
#include <vector>

#include "t1forge/image.hpp"

namespace testing_helpers {

/// Independent Dice computation for a single label.
inline double dice_of(const t1forge::LabelMask& a, const t1forge::LabelMask& b, t1forge::Label l) {
    std::size_t inter = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        const bool x = a.values()[i] == l, y = b.values()[i] == l;
        inter += x && y;
        na += x;
        nb += y;
    }
    return na + nb == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace testing_helpers
