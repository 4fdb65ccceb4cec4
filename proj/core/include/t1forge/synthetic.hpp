#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "t1forge/phantom.hpp"
#include "t1forge/qc.hpp"
#include "t1forge/segmenter.hpp"

namespace t1forge::synthetic {

/// One phantom subject pushed through segmentation and uncertainty estimation.
struct QcExample {
    std::uint64_t seed = 0;
    bool incorrect = false;
    std::optional<CorruptionMode> mode;
    double severity = 0.0;
    /// Set when the backend refused the image (NoFit, DegenerateImage).
    std::optional<ErrorCode> backend_failure;
    double evidence = 0.0;
    qc::Features features{};
};

struct QcBenchmarkOptions {
    int clean = 200;
    int corrupted = 200;
    double noise_sd = 30.0;
    int samples = 100;
    double min_severity = 0.5;
    double max_severity = 1.0;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Clean subjects are segmented with the built-in backend; corrupted ones cycle
/// through the corruption modes. Mask failures are fed through
/// perturbed_mask_samples so the damaged mask reaches the QC gate.
std::vector<QcExample> qc_benchmark(const QcBenchmarkOptions& options);

/// Builds the example for a single subject (index `i` of the benchmark).
QcExample qc_example(const QcBenchmarkOptions& options, int i);

/// Runs `fn(i)` for i in [0, n) on up to `threads` worker threads.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn);

}  // namespace t1forge::synthetic

#include "t1forge/detail/parallel_for.hpp"
