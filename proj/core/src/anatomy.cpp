#include "t1forge/anatomy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "t1forge/morphology.hpp"
#include "t1forge/stats.hpp"

namespace t1forge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Two junction clusters must be separated by at least this angle on both sides.
constexpr double kMinClusterGap = 15.0 * std::numbers::pi / 180.0;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

double angle_about(Point2 c, Point2 p) { return wrap_angle(std::atan2(p.y - c.y, p.x - c.x)); }

}  // namespace

Point2 lv_centroid(const LabelMask& mask) {
    const Label lv[] = {Label::LVBloodPool, Label::LVMyocardium};
    const BinaryMask m = select_any(mask, lv);
    if (area(m) == 0) throw Error(ErrorCode::DegenerateCentroid, "mask has no LV pixels");
    return centroid(m);
}

InsertionPoints insertion_points(const LabelMask& mask) {
    const auto junctions =
        hit_or_miss_junctions(mask, LabelSet{Label::Background, Label::LVMyocardium, Label::RVBloodPool});
    if (junctions.empty()) throw Error(ErrorCode::NoJunctions, "no background/myocardium/RV junction found");
    const Point2 c = lv_centroid(mask);

    struct Junction {
        Point2 p;
        double angle;
    };
    std::vector<Junction> js;
    js.reserve(junctions.size());
    for (const Pixel& px : junctions) {
        // Junction location is the centre of its 2x2 window.
        const Point2 p{px.x + 0.5, px.y + 0.5};
        js.push_back({p, angle_about(c, p)});
    }
    if (js.size() < 2) throw Error(ErrorCode::SingleCluster, "a single junction pixel");
    std::sort(js.begin(), js.end(), [](const Junction& a, const Junction& b) { return a.angle < b.angle; });

    // gap[i] is the angular gap following element i (circularly).
    const std::size_t n = js.size();
    std::vector<double> gap(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double next = i + 1 < n ? js[i + 1].angle : js[0].angle + kTwoPi;
        gap[i] = next - js[i].angle;
    }
    std::size_t g1 = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (gap[i] > gap[g1]) g1 = i;
    }
    std::size_t g2 = g1 == 0 ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i != g1 && gap[i] > gap[g2]) g2 = i;
    }
    if (gap[g2] < kMinClusterGap) {
        throw Error(ErrorCode::SingleCluster, "junction pixels do not form two separated clusters");
    }

    // Cluster A runs from after g1 through g2, cluster B from after g2 through g1.
    auto cluster_mean = [&](std::size_t after, std::size_t last) {
        double sx = 0.0, sy = 0.0, k = 0.0;
        std::size_t i = (after + 1) % n;
        while (true) {
            sx += js[i].p.x;
            sy += js[i].p.y;
            k += 1.0;
            if (i == last) break;
            i = (i + 1) % n;
        }
        return Point2{sx / k, sy / k};
    };
    const Point2 a = cluster_mean(g1, g2);
    const Point2 b = cluster_mean(g2, g1);
    if (angle_about(c, a) <= angle_about(c, b)) return {a, b};
    return {b, a};
}

bool lv_ring_closed(const LabelMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    bool has_pool = false;
    for (Label l : mask.values()) has_pool = has_pool || l == Label::LVBloodPool;
    if (!has_pool) return false;

    BinaryMask seen(w, h, 0);
    std::vector<Pixel> stack;
    auto push = [&](int x, int y) {
        if (!mask.contains(x, y) || seen.at(x, y) || mask.at(x, y) == Label::LVMyocardium) return;
        seen.at(x, y) = 1;
        stack.push_back({x, y});
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        if (mask.at(p.x, p.y) == Label::LVBloodPool) return false;
        push(p.x + 1, p.y);
        push(p.x - 1, p.y);
        push(p.x, p.y + 1);
        push(p.x, p.y - 1);
    }
    return true;
}

MyocardialPartition partition_myocardium(const LabelMask& mask, const InsertionPoints& points) {
    const BinaryMask myo = select(mask, Label::LVMyocardium);
    if (area(myo) == 0) throw Error(ErrorCode::DegenerateCentroid, "LV myocardium is empty");

    MyocardialPartition part;
    part.centroid = lv_centroid(mask);
    part.septum = BinaryMask(mask.width(), mask.height(), 0);
    part.free_wall = myo;
    part.ring_broken = !lv_ring_closed(mask);

    const double a1 = angle_about(part.centroid, points.rv1);
    const double a2 = angle_about(part.centroid, points.rv2);
    const double arc = wrap_angle(a2 - a1);
    if (arc == 0.0) return part;  // coincident insertion points: zero-width septum

    // The septum is whichever of the two arcs faces the RV.
    bool septum_is_ccw_arc = arc <= std::numbers::pi;
    const BinaryMask rv = select(mask, Label::RVBloodPool);
    if (area(rv) > 0) septum_is_ccw_arc = wrap_angle(angle_about(part.centroid, centroid(rv)) - a1) <= arc;

    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!myo.at(x, y)) continue;
            const bool in_ccw = wrap_angle(angle_about(part.centroid, {double(x), double(y)}) - a1) <= arc;
            if (in_ccw == septum_is_ccw_arc) {
                part.septum.at(x, y) = 1;
                part.free_wall.at(x, y) = 0;
            }
        }
    }
    return part;
}

BinaryMask blood_pool_roi(const BinaryMask& pool, const ImageGrid& image) {
    if (!pool.same_shape(image)) throw Error(ErrorCode::DimensionMismatch, "pool mask and image differ in size");
    if (area(pool) == 0) throw Error(ErrorCode::EmptyROI, "blood pool is empty");
    BinaryMask roi = erode_to_fraction(pool, 1.0 / 3.0);

    std::vector<double> values;
    for (std::size_t i = 0; i < roi.size(); ++i) {
        if (roi[i]) values.push_back(image[i]);
    }
    if (values.empty()) throw Error(ErrorCode::EmptyROI, "erosion removed the whole blood pool");

    // Papillary muscle and trabeculae are darker than blood: drop the low tail.
    const double q1 = stats::quantile(values, 0.25);
    const double q3 = stats::quantile(values, 0.75);
    const double cutoff = q1 - 1.5 * (q3 - q1);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < roi.size(); ++i) {
        if (!roi[i]) continue;
        if (image[i] < cutoff) roi[i] = 0;
        else ++kept;
    }
    if (kept == 0) throw Error(ErrorCode::EmptyROI, "outlier rejection removed the whole blood pool");
    return roi;
}

BloodRois blood_roi(const LabelMask& mask, const ImageGrid& image) {
    return {blood_pool_roi(select(mask, Label::LVBloodPool), image),
            blood_pool_roi(select(mask, Label::RVBloodPool), image)};
}

AnatomyPartition analyse_anatomy(const LabelMask& mask, const ImageGrid& image) {
    AnatomyPartition a;
    a.insertion = insertion_points(mask);
    a.myocardium = partition_myocardium(mask, a.insertion);
    a.blood = blood_roi(mask, image);
    return a;
}

}  // namespace t1forge
