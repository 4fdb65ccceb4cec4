#include "t1forge/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "t1forge/anatomy.hpp"
#include "t1forge/stats.hpp"

namespace t1forge {

namespace {
constexpr double kMinProbability = 1e-12;
}  // namespace

ProbabilityMaps mean_probability(const SegmentationSampleSet& samples, ProbabilitySource source) {
    samples.validate();
    const bool soft = source == ProbabilitySource::Soft ||
                      (source == ProbabilitySource::Auto && samples.has_soft());
    if (soft && !samples.has_soft()) throw Error(ErrorCode::InvalidArgument, "sample set carries no soft maps");

    const int w = samples.width();
    const int h = samples.height();
    const std::size_t n = samples.samples.front().size();
    const double inv_t = 1.0 / static_cast<double>(samples.count());

    ProbabilityMaps prob;
    prob.from_soft = soft;
    for (auto& c : prob.classes) c = Raster<double>(w, h, 0.0);

    if (!soft) {
        // Integer counts first, so the mean is independent of sample order.
        std::vector<std::array<std::uint32_t, kNumClasses>> counts(n);
        for (const auto& s : samples.samples) {
            for (std::size_t i = 0; i < n; ++i) ++counts[i][static_cast<std::size_t>(class_index(s[i]))];
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (int k = 0; k < kNumClasses; ++k) {
                prob.classes[static_cast<std::size_t>(k)][i] = counts[i][static_cast<std::size_t>(k)] * inv_t;
            }
        }
        return prob;
    }

    for (const auto& planes : samples.soft) {
        for (int k = 0; k < kNumClasses; ++k) {
            const float* plane = planes.data() + static_cast<std::size_t>(k) * n;
            auto& out = prob.classes[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < n; ++i) out[i] += plane[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (const auto& c : prob.classes) total += c[i];
        if (!(total > 0.0)) throw Error(ErrorCode::FormatError, "soft maps sum to zero at a pixel");
        for (auto& c : prob.classes) c[i] /= total;
    }
    return prob;
}

LabelMask final_mask(const ProbabilityMaps& prob) {
    LabelMask out(prob.width(), prob.height(), Label::Background);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int best = 0;
        for (int k = 1; k < kNumClasses; ++k) {
            if (prob.classes[static_cast<std::size_t>(k)][i] > prob.classes[static_cast<std::size_t>(best)][i]) best = k;
        }
        out[i] = static_cast<Label>(best);
    }
    return out;
}

UncertaintyMap uncertainty_map(const ProbabilityMaps& prob, const SegmentationSampleSet& samples) {
    samples.validate();
    if (samples.width() != prob.width() || samples.height() != prob.height()) {
        throw Error(ErrorCode::DimensionMismatch, "probability maps and samples differ in size");
    }
    const std::size_t n = samples.samples.front().size();
    // Histogram of sample labels per pixel; ln p is evaluated once per class
    // so the sum is taken in a fixed order whatever the sample order.
    std::vector<std::array<std::uint32_t, kNumClasses>> counts(n);
    for (const auto& s : samples.samples) {
        for (std::size_t i = 0; i < n; ++i) ++counts[i][static_cast<std::size_t>(class_index(s[i]))];
    }
    const double inv_t = 1.0 / static_cast<double>(samples.count());
    UncertaintyMap u(prob.width(), prob.height(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < kNumClasses; ++k) {
            const std::uint32_t c = counts[i][static_cast<std::size_t>(k)];
            if (c == 0) continue;
            // Soft maps can give a sampled label zero mean probability; floor it.
            const double p = std::max(prob.classes[static_cast<std::size_t>(k)][i], kMinProbability);
            acc -= c * std::log(p);
        }
        u[i] = acc * inv_t;
        if (u[i] == 0.0) u[i] = 0.0;  // normalise -0
    }
    return u;
}

SamplingDistribution t1_sampling_distribution(const ImageGrid& image, const SegmentationSampleSet& samples,
                                              MyocardialRegion region) {
    samples.validate();
    if (samples.width() != image.width() || samples.height() != image.height()) {
        throw Error(ErrorCode::DimensionMismatch, "image and samples differ in size");
    }
    SamplingDistribution dist;
    dist.per_sample.reserve(samples.count());
    for (std::size_t t = 0; t < samples.count(); ++t) {
        const LabelMask& s = samples.samples[t];
        BinaryMask mask;
        try {
            if (region == MyocardialRegion::GlobalLV) {
                mask = select(s, Label::LVMyocardium);
            } else {
                const MyocardialPartition part = partition_myocardium(s, insertion_points(s));
                mask = region == MyocardialRegion::Septum ? part.septum : part.free_wall;
            }
        } catch (const Error& e) {
            throw Error(ErrorCode::EmptyRegion, "sample " + std::to_string(t) + ": " + e.what());
        }
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i]) {
                sum += image[i];
                ++count;
            }
        }
        if (count == 0) throw Error(ErrorCode::EmptyRegion, "sample " + std::to_string(t) + " has an empty region");
        dist.per_sample.push_back(sum / static_cast<double>(count));
    }
    dist.mean = stats::mean(dist.per_sample);
    dist.sd = stats::sample_sd(dist.per_sample);
    return dist;
}

}  // namespace t1forge
