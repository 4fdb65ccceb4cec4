#pragma once

#include <array>
#include <vector>

#include "t1forge/image.hpp"
#include "t1forge/segmenter.hpp"

namespace t1forge {

/// Per-class mean probability maps.
struct ProbabilityMaps {
    std::array<Raster<double>, kNumClasses> classes;
    bool from_soft = false;

    int width() const noexcept { return classes[0].width(); }
    int height() const noexcept { return classes[0].height(); }
    double at(Label l, std::size_t i) const { return classes[class_index(l)][i]; }
};

enum class ProbabilitySource {
    Auto,        // soft maps when the stack carries them, hard labels otherwise
    HardLabels,
    Soft,
};

ProbabilityMaps mean_probability(const SegmentationSampleSet& samples,
                                 ProbabilitySource source = ProbabilitySource::Auto);

/// Per-pixel argmax; ties go to the lowest class id.
LabelMask final_mask(const ProbabilityMaps& prob);

/// Per-pixel cross-entropy in nats.
struct UncertaintyMap : Raster<double> {
    using Raster<double>::Raster;
    UncertaintyMap(Raster<double> r) : Raster<double>(std::move(r)) {}
};

/// u(x) = -(1/T) sum_t ln pbar_{s_t(x)}(x). Throws DimensionMismatch.
UncertaintyMap uncertainty_map(const ProbabilityMaps& prob, const SegmentationSampleSet& samples);

enum class MyocardialRegion { GlobalLV, Septum, FreeWall };

struct SamplingDistribution {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> per_sample;
};

/// Mean image value over each sample's region, summarised across samples.
/// Septum and free wall come from running the anatomy partition on each sample.
/// Throws EmptyRegion naming the offending sample.
SamplingDistribution t1_sampling_distribution(const ImageGrid& image, const SegmentationSampleSet& samples,
                                              MyocardialRegion region);

}  // namespace t1forge
