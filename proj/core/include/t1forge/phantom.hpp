#pragma once

#include <cstdint>
#include <string_view>

#include "t1forge/image.hpp"

namespace t1forge {

/// Per-tissue native T1 in milliseconds.
struct TissueT1 {
    double lv_blood = 1550.0;
    double rv_blood = 1550.0;
    double myocardium = 930.0;
    double background = 300.0;
};

/// Geometry and contrast of a synthetic mid-ventricular short-axis slice.
///
/// The LV is an annulus (blood pool radius, myocardial outer radius) around
/// `lv_center`. The RV blood pool is the disk of `rv_radius` around a centre
/// placed `rv_offset` pixels from the LV centre in direction `rv_angle`
/// (radians, image coordinates with y pointing down), minus the LV disk.
struct PhantomSpec {
    int width = 192;
    int height = 192;
    double spacing_mm = 0.9;

    Point2 lv_center{96.0, 96.0};
    double blood_radius = 20.0;
    double outer_radius = 28.0;

    double rv_angle = 3.14159265358979323846;
    double rv_offset = 24.0;
    double rv_radius = 30.0;

    TissueT1 t1{};
    double noise_sd = 0.0;
    std::uint64_t seed = 0;

    /// Places the RV so that it covers `septal_sector` radians of the LV outer
    /// contour and is `thickness` pixels thick along `rv_angle`.
    PhantomSpec& with_rv_geometry(double septal_sector, double thickness);

    Point2 rv_center() const noexcept;
};

/// Default spec: 192x192, 90 degree septal sector, 12 px thick RV.
PhantomSpec default_phantom_spec();

/// Randomised anatomy and tissue values for cohort generation. Deterministic in `seed`.
PhantomSpec randomized_phantom_spec(std::uint64_t seed, double noise_sd);

/// Angular arc [start, start + width] (radians, counter-clockwise in image
/// coordinates, i.e. increasing atan2(y, x)).
struct AngularSector {
    double start = 0.0;
    double width = 0.0;
    bool contains(double angle) const noexcept;
};

struct PhantomTruth {
    PhantomSpec spec;
    ImageGrid image;
    LabelMask mask;
    Point2 rv1;
    Point2 rv2;
    TissueT1 tissue;
    AngularSector septal_sector;

    /// Myocardial pixels inside the true septal sector.
    BinaryMask septum() const;
};

/// Renders the phantom. Throws GeometryInfeasible when the RV does not meet the
/// LV contour in two points, the sector is outside [10, 200] degrees, or any
/// structure leaves the grid.
PhantomTruth generate_phantom(const PhantomSpec& spec);

/// Labels produced by the annulus + crescent geometry, without intensities.
LabelMask render_labels(int width, int height, Point2 lv_center, double blood_radius, double outer_radius,
                        Point2 rv_center, double rv_radius);

enum class CorruptionMode { WrongPlane, MotionGhosting, MaskFailure };

std::string_view to_string(CorruptionMode mode) noexcept;
CorruptionMode corruption_mode_from_string(std::string_view name);

struct CorruptedPhantom {
    ImageGrid image;
    LabelMask mask;
};

/// Applies an acquisition or segmentation failure of the given severity in [0, 1].
///
///  - WrongPlane blends the slice with structureless texture (random ellipses of
///    arbitrary tissue T1), removing the annulus/crescent anatomy.
///  - MotionGhosting adds replicas shifted by a quarter field of view along y.
///    Replicas are circular shifts, so the image mean is preserved.
///  - MaskFailure keeps the image and damages the mask: the blood pool leaks
///    into the myocardium and the septum is dropped.
///
/// Severity 0 returns the inputs unchanged.
CorruptedPhantom corrupt(const PhantomTruth& truth, CorruptionMode mode, double severity, std::uint64_t seed);

}  // namespace t1forge
