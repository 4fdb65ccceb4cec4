#include "t1forge/synthetic.hpp"

#include <random>

#include "t1forge/uncertainty.hpp"

namespace t1forge::synthetic {

QcExample qc_example(const QcBenchmarkOptions& options, int i) {
    QcExample ex;
    ex.seed = options.seed * 1000003ULL + static_cast<std::uint64_t>(i);
    ex.incorrect = i >= options.clean;
    const PhantomTruth truth = generate_phantom(randomized_phantom_spec(ex.seed, options.noise_sd));

    ImageGrid image = truth.image;
    std::optional<LabelMask> forced_mask;
    if (ex.incorrect) {
        constexpr CorruptionMode modes[] = {CorruptionMode::WrongPlane, CorruptionMode::MotionGhosting,
                                            CorruptionMode::MaskFailure};
        ex.mode = modes[(i - options.clean) % 3];
        std::mt19937_64 rng(ex.seed ^ 0x5bd1e995ULL);
        ex.severity = std::uniform_real_distribution<double>(options.min_severity, options.max_severity)(rng);
        CorruptedPhantom c = corrupt(truth, *ex.mode, ex.severity, ex.seed);
        image = std::move(c.image);
        if (*ex.mode == CorruptionMode::MaskFailure) forced_mask = std::move(c.mask);
    }

    SegmentationSampleSet samples;
    try {
        samples = forced_mask ? perturbed_mask_samples(image, *forced_mask, options.samples, ex.seed)
                              : segment_mc(image, options.samples, ex.seed);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoFit && e.code() != ErrorCode::DegenerateImage) throw;
        ex.backend_failure = e.code();
        return ex;
    }
    ex.evidence = samples.evidence;
    const ProbabilityMaps prob = mean_probability(samples);
    ex.features = qc::extract_features(final_mask(prob), uncertainty_map(prob, samples), samples.evidence);
    return ex;
}

std::vector<QcExample> qc_benchmark(const QcBenchmarkOptions& options) {
    const int n = options.clean + options.corrupted;
    std::vector<QcExample> out(static_cast<std::size_t>(n));
    parallel_for(n, options.threads, [&](int i) { out[static_cast<std::size_t>(i)] = qc_example(options, i); });
    return out;
}

}  // namespace t1forge::synthetic
