#include "t1forge/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "t1forge/morphology.hpp"

namespace t1forge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

double angle_about(Point2 c, double x, double y) { return wrap_angle(std::atan2(y - c.y, x - c.x)); }

/// Half-angle of the arc of the LV outer contour lying inside the RV disk.
double septal_half_angle(double outer_radius, double offset, double rv_radius) {
    const double c = (outer_radius * outer_radius + offset * offset - rv_radius * rv_radius) /
                     (2.0 * outer_radius * offset);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

void check_geometry(const PhantomSpec& s) {
    auto fail = [](const std::string& why) { throw Error(ErrorCode::GeometryInfeasible, why); };
    if (s.width < 8 || s.height < 8) fail("grid smaller than 8x8");
    if (!(s.spacing_mm > 0.0)) fail("spacing must be > 0");
    if (!(s.blood_radius > 0.0) || !(s.outer_radius > s.blood_radius)) fail("need 0 < blood radius < outer radius");
    if (!(s.rv_radius > 0.0) || !(s.rv_offset > 0.0)) fail("RV radius and offset must be > 0");
    if (!(s.noise_sd >= 0.0)) fail("noise SD must be >= 0");
    const double R = s.outer_radius;
    if (!(s.rv_offset > std::fabs(R - s.rv_radius) && s.rv_offset < R + s.rv_radius)) {
        fail("RV disk does not cross the LV outer contour in two points");
    }
    const double sector = 2.0 * septal_half_angle(R, s.rv_offset, s.rv_radius);
    if (sector < 10.0 * std::numbers::pi / 180.0 || sector > 200.0 * std::numbers::pi / 180.0) {
        fail("septal sector outside [10, 200] degrees");
    }
    auto inside = [&](Point2 c, double r) {
        return c.x - r >= 1.0 && c.y - r >= 1.0 && c.x + r <= s.width - 2.0 && c.y + r <= s.height - 2.0;
    };
    if (!inside(s.lv_center, R)) fail("LV leaves the grid");
    if (!inside(s.rv_center(), s.rv_radius)) fail("RV leaves the grid");
}

}  // namespace

bool AngularSector::contains(double angle) const noexcept {
    return wrap_angle(angle - start) <= width;
}

Point2 PhantomSpec::rv_center() const noexcept {
    return {lv_center.x + rv_offset * std::cos(rv_angle), lv_center.y + rv_offset * std::sin(rv_angle)};
}

PhantomSpec& PhantomSpec::with_rv_geometry(double septal_sector, double thickness) {
    // Solve |c_rv| = d and rv radius so that the RV circle meets the outer LV
    // circle at +-sector/2 and reaches `thickness` beyond it along rv_angle.
    const double half = 0.5 * septal_sector;
    const double R = outer_radius;
    const double far = thickness + R;
    rv_offset = (far * far - R * R) / (2.0 * (far - R * std::cos(half)));
    rv_radius = far - rv_offset;
    return *this;
}

PhantomSpec default_phantom_spec() {
    PhantomSpec spec;
    spec.with_rv_geometry(std::numbers::pi / 2.0, 12.0);
    return spec;
}

PhantomSpec randomized_phantom_spec(std::uint64_t seed, double noise_sd) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    PhantomSpec s;
    s.lv_center = {96.0 + uniform(-8.0, 8.0), 96.0 + uniform(-8.0, 8.0)};
    s.blood_radius = uniform(16.0, 22.0);
    s.outer_radius = s.blood_radius + uniform(6.0, 10.0);
    s.rv_angle = std::numbers::pi + uniform(-0.5, 0.5);
    s.with_rv_geometry(uniform(60.0, 120.0) * std::numbers::pi / 180.0, uniform(10.0, 16.0));
    const double blood = uniform(1450.0, 1650.0);
    s.t1.lv_blood = blood;
    s.t1.rv_blood = blood + uniform(-20.0, 20.0);
    s.t1.myocardium = std::normal_distribution<double>(930.0, 40.0)(rng);
    s.t1.background = uniform(250.0, 350.0);
    s.noise_sd = noise_sd;
    s.seed = seed;
    return s;
}

LabelMask render_labels(int width, int height, Point2 lv_center, double blood_radius, double outer_radius,
                        Point2 rv_center, double rv_radius) {
    LabelMask mask(width, height, Label::Background);
    const double r2 = blood_radius * blood_radius;
    const double R2 = outer_radius * outer_radius;
    const double rv2 = rv_radius * rv_radius;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dx = x - lv_center.x;
            const double dy = y - lv_center.y;
            const double d2 = dx * dx + dy * dy;
            Label l = Label::Background;
            if (d2 <= r2) {
                l = Label::LVBloodPool;
            } else if (d2 <= R2) {
                l = Label::LVMyocardium;
            } else {
                const double ex = x - rv_center.x;
                const double ey = y - rv_center.y;
                if (ex * ex + ey * ey <= rv2) l = Label::RVBloodPool;
            }
            mask.at(x, y) = l;
        }
    }
    return mask;
}

BinaryMask PhantomTruth::septum() const {
    BinaryMask out(mask.width(), mask.height(), 0);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y) == Label::LVMyocardium && septal_sector.contains(angle_about(spec.lv_center, x, y))) {
                out.at(x, y) = 1;
            }
        }
    }
    return out;
}

PhantomTruth generate_phantom(const PhantomSpec& spec) {
    check_geometry(spec);
    PhantomTruth truth;
    truth.spec = spec;
    truth.tissue = spec.t1;
    truth.mask = render_labels(spec.width, spec.height, spec.lv_center, spec.blood_radius, spec.outer_radius,
                               spec.rv_center(), spec.rv_radius);

    std::vector<double> values(truth.mask.size());
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = spec.t1.background;
        switch (truth.mask[i]) {
            case Label::LVBloodPool: v = spec.t1.lv_blood; break;
            case Label::LVMyocardium: v = spec.t1.myocardium; break;
            case Label::RVBloodPool: v = spec.t1.rv_blood; break;
            case Label::Background: break;
        }
        if (spec.noise_sd > 0.0) v += spec.noise_sd * noise(rng);
        values[i] = v;
    }
    truth.image = ImageGrid(spec.width, spec.height, std::move(values), spec.spacing_mm, spec.spacing_mm);

    const double half = septal_half_angle(spec.outer_radius, spec.rv_offset, spec.rv_radius);
    const double a = wrap_angle(spec.rv_angle - half);
    const double b = wrap_angle(spec.rv_angle + half);
    auto on_contour = [&](double angle) {
        return Point2{spec.lv_center.x + spec.outer_radius * std::cos(angle),
                      spec.lv_center.y + spec.outer_radius * std::sin(angle)};
    };
    truth.rv1 = on_contour(std::min(a, b));
    truth.rv2 = on_contour(std::max(a, b));
    truth.septal_sector = {a, 2.0 * half};
    return truth;
}

std::string_view to_string(CorruptionMode mode) noexcept {
    switch (mode) {
        case CorruptionMode::WrongPlane: return "wrong_plane";
        case CorruptionMode::MotionGhosting: return "motion_ghosting";
        case CorruptionMode::MaskFailure: return "mask_failure";
    }
    return "unknown";
}

CorruptionMode corruption_mode_from_string(std::string_view name) {
    if (name == "wrong_plane" || name == "wrong-plane" || name == "plane") return CorruptionMode::WrongPlane;
    if (name == "motion_ghosting" || name == "motion-ghosting" || name == "motion") return CorruptionMode::MotionGhosting;
    if (name == "mask_failure" || name == "mask-failure" || name == "mask") return CorruptionMode::MaskFailure;
    throw Error(ErrorCode::InvalidArgument, "unknown corruption mode '" + std::string(name) + "'");
}

namespace {

ImageGrid wrong_plane(const PhantomTruth& truth, double severity, std::mt19937_64& rng) {
    const ImageGrid& src = truth.image;
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const int w = src.width();
    const int h = src.height();

    std::vector<double> texture(src.size(), truth.tissue.background);
    const int blobs = 6 + static_cast<int>(uniform(0.0, 5.0));
    for (int k = 0; k < blobs; ++k) {
        const double cx = uniform(0.15 * w, 0.85 * w);
        const double cy = uniform(0.15 * h, 0.85 * h);
        const double ax = uniform(6.0, 0.22 * w);
        const double ay = uniform(4.0, 0.12 * h);
        const double rot = uniform(0.0, std::numbers::pi);
        const double t1 = uniform(300.0, 1700.0);
        const double c = std::cos(rot);
        const double s = std::sin(rot);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double u = ((x - cx) * c + (y - cy) * s) / ax;
                const double v = (-(x - cx) * s + (y - cy) * c) / ay;
                if (u * u + v * v <= 1.0) texture[src.index(x, y)] = t1;
            }
        }
    }
    std::normal_distribution<double> noise(0.0, truth.spec.noise_sd > 0.0 ? truth.spec.noise_sd : 1.0);
    std::vector<double> out(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double tex = texture[i] + (truth.spec.noise_sd > 0.0 ? noise(rng) : 0.0);
        out[i] = (1.0 - severity) * src[i] + severity * tex;
    }
    return ImageGrid(w, h, std::move(out), src.spacing_x(), src.spacing_y());
}

ImageGrid motion_ghosting(const ImageGrid& src, double severity) {
    const int w = src.width();
    const int h = src.height();
    const int shift = std::max(1, h / 4);
    const double a = 0.6 * severity;
    std::vector<double> out(src.size());
    for (int y = 0; y < h; ++y) {
        const int up = (y + shift) % h;
        const int down = (y - shift % h + h) % h;
        for (int x = 0; x < w; ++x) {
            out[src.index(x, y)] =
                (1.0 - a) * src.at(x, y) + 0.5 * a * (src.at(x, up) + src.at(x, down));
        }
    }
    return ImageGrid(w, h, std::move(out), src.spacing_x(), src.spacing_y());
}

LabelMask mask_failure(const PhantomTruth& truth, double severity, std::mt19937_64& rng) {
    LabelMask mask = truth.mask;
    const PhantomSpec& s = truth.spec;

    // Blood pool leaks into the myocardium.
    const double thickness = s.outer_radius - s.blood_radius;
    const int leak = static_cast<int>(std::lround(severity * 0.75 * thickness));
    BinaryMask pool = select(mask, Label::LVBloodPool);
    for (int i = 0; i < leak; ++i) pool = dilate(pool);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (pool[i] && mask[i] == Label::LVMyocardium) mask[i] = Label::LVBloodPool;
    }

    // Part of the septum is lost to the RV.
    const double width = severity * truth.septal_sector.width;
    const double jitter = std::uniform_real_distribution<double>(-0.25, 0.25)(rng) * width;
    const AngularSector dropped{wrap_angle(s.rv_angle - 0.5 * width + jitter), width};
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y) == Label::LVMyocardium && dropped.contains(angle_about(s.lv_center, x, y))) {
                mask.at(x, y) = Label::RVBloodPool;
            }
        }
    }
    return mask;
}

}  // namespace

CorruptedPhantom corrupt(const PhantomTruth& truth, CorruptionMode mode, double severity, std::uint64_t seed) {
    if (!(severity >= 0.0 && severity <= 1.0)) throw Error(ErrorCode::InvalidArgument, "severity outside [0, 1]");
    if (severity == 0.0) return {truth.image, truth.mask};
    std::mt19937_64 rng(seed);
    switch (mode) {
        case CorruptionMode::WrongPlane: return {wrong_plane(truth, severity, rng), truth.mask};
        case CorruptionMode::MotionGhosting: return {motion_ghosting(truth.image, severity), truth.mask};
        case CorruptionMode::MaskFailure: return {truth.image, mask_failure(truth, severity, rng)};
    }
    return {truth.image, truth.mask};
}

}  // namespace t1forge
