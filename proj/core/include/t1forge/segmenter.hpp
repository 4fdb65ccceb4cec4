#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "t1forge/image.hpp"

namespace t1forge {

/// T plausible segmentations of one image plus the backend's evidence score.
///
/// `evidence` is a badness score: larger means the image is less well explained
/// by the segmentation model. `soft` optionally carries per-sample class
/// probabilities, laid out as kNumClasses planes of width*height per sample.
struct SegmentationSampleSet {
    std::vector<LabelMask> samples;
    std::vector<std::vector<float>> soft;
    double evidence = 0.0;
    std::string backend;

    int width() const;
    int height() const;
    std::size_t count() const noexcept { return samples.size(); }
    bool has_soft() const noexcept { return !soft.empty(); }

    /// Throws DimensionMismatch / FormatError when the invariants are violated.
    void validate() const;
};

/// Parameters of the LV annulus + RV crescent shape model, in pixels.
struct ShapeModel {
    Point2 lv_center;
    double blood_radius = 0.0;
    double outer_radius = 0.0;
    Point2 rv_center;
    double rv_radius = 0.0;

    static constexpr int kDims = 7;
    std::array<double, kDims> to_array() const noexcept;
    static ShapeModel from_array(const std::array<double, kDims>& p) noexcept;

    LabelMask render(int width, int height) const;
};

struct SegmenterOptions {
    int starts = 16;
    /// Sample spread multiplier applied to sqrt(residual / curvature).
    double temperature = 1.0;
    double min_sigma = 0.05;
    double max_sigma = 4.0;
    /// Residual cost (normalised units) above which the input is declared unfittable.
    double hard_cap = 0.06;
};

/// Min-max normalises intensities to [0, 1]. Throws DegenerateImage when constant.
Raster<double> normalize_intensities(const ImageGrid& image);

/// Region-homogeneity cost: mean squared deviation of each pixel from the mean
/// of its label class, on a normalised image.
double homogeneity_cost(const Raster<double>& normalized, const LabelMask& mask);

/// Evidence score for an arbitrary segmentation of `image`.
double mask_evidence(const ImageGrid& image, const LabelMask& mask);

struct ShapeFit {
    ShapeModel model;
    double cost = 0.0;
    std::array<double, ShapeModel::kDims> sigma{};
};

/// Fits the shape model by seeded multi-start pattern search. Throws
/// DegenerateImage for constant images and NoFit when the best residual
/// exceeds options.hard_cap.
ShapeFit fit_shape_model(const ImageGrid& image, std::uint64_t seed, const SegmenterOptions& options = {});

/// Built-in Monte-Carlo backend: fits the shape model and draws T samples by
/// perturbing the fitted parameters with per-parameter Gaussian noise whose
/// scale follows the local cost curvature. Evidence is the best-fit residual.
SegmentationSampleSet segment_mc(const ImageGrid& image, int T, std::uint64_t seed,
                                 const SegmenterOptions& options = {});

/// Backend that wraps a fixed segmentation: each sample flips boundary pixels to
/// a random neighbouring label with probability `flip_probability`. Evidence is
/// mask_evidence(image, mask). Used to feed externally produced or deliberately
/// damaged masks through the same downstream path.
SegmentationSampleSet perturbed_mask_samples(const ImageGrid& image, const LabelMask& mask, int T,
                                             std::uint64_t seed, double flip_probability = 0.25);

// Sample-stack file: one JSON header line {width, height, T, evidence, backend[, soft]}
// followed by T label planes (one byte per pixel, row-major) and, when "soft"
// is "float32", T * 4 little-endian float32 probability planes.

std::string encode_samples(const SegmentationSampleSet& set);
SegmentationSampleSet decode_samples(std::string_view bytes);

void write_samples(const std::filesystem::path& path, const SegmentationSampleSet& set);

/// Throws FormatError or DimensionMismatch.
SegmentationSampleSet load_samples(const std::filesystem::path& path);

}  // namespace t1forge
