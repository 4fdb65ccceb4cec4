#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "t1forge/analysis.hpp"
#include "t1forge/error.hpp"
#include "t1forge/qc.hpp"
#include "t1forge/segmenter.hpp"

namespace t1forge::cli {

/// Closed set of machine-readable rejection reasons.
enum class RejectReason {
    QcEvidence,
    QcClassifier,
    ReadError,
    FormatError,
    DimensionMismatch,
    DegenerateImage,
    NoFit,
    NoJunctions,
    SingleCluster,
    DegenerateCentroid,
    BrokenRing,
    EmptyRoi,
    EmptyRegion,
    InternalError,
};

std::string_view to_string(RejectReason reason) noexcept;
RejectReason reason_from_error(ErrorCode code) noexcept;

/// Reads a `.nii` slice or a raw interchange image.
ImageGrid load_image(const std::filesystem::path& path, int slice);

/// Loads the stack when given (dimension-checked against the image),
/// otherwise runs the built-in segmenter.
SegmentationSampleSet obtain_samples(const ImageGrid& image, const std::optional<std::filesystem::path>& stack,
                                     int T, std::uint64_t seed);

struct SubjectResult {
    std::string id;
    std::string group;
    std::optional<RejectReason> reason;
    std::string detail;
    std::optional<T1Report> report;
    std::optional<LabelMask> mask;
    std::optional<Raster<double>> uncertainty;
};

SubjectResult process_subject(const SubjectEntry& entry, std::uint64_t seed, const PipelineConfig& config,
                              const qc::Model& model);

struct AnalyzeResult {
    std::vector<SubjectResult> subjects;  // sorted by subject id
    qc::Model qc_model;
    std::optional<BloodModel> blood_model;
    std::vector<std::string> warnings;

    std::size_t accepted() const;
};

/// Runs the full batch. Per-subject failures become rejection records; only
/// configuration and QC-artifact problems throw.
AnalyzeResult run_analyze(const PipelineConfig& config);

std::string cohort_csv(const AnalyzeResult& result);
std::string summary_json(const AnalyzeResult& result);

/// Writes per-subject artifacts, cohort.csv and summary.json under
/// `config.output`.
void write_analyze_outputs(const AnalyzeResult& result, const PipelineConfig& config);

// QC model fitting shared by `qc-fit` and calibration-driven `analyze`.

struct QcRecord {
    std::string id;
    bool incorrect = false;
    std::optional<ErrorCode> failure;
    double evidence = 0.0;
    qc::Features features{};
};

std::vector<QcRecord> qc_records_from_synthetic(int count, std::uint64_t seed, int T, int threads);

/// Listing columns: subject_id, image, [samples], label (correct/incorrect
/// or 0/1 with 1 meaning incorrect).
std::vector<QcRecord> qc_records_from_listing(const std::filesystem::path& listing, std::uint64_t seed, int T,
                                              int threads, int slice);

struct HoldoutSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified split; `test_fraction` of each class goes to the test side.
HoldoutSplit holdout_split(const std::vector<QcRecord>& records, double test_fraction, std::uint64_t seed);

qc::Model fit_qc_model(const std::vector<QcRecord>& records, const std::vector<std::size_t>& indices,
                       std::uint64_t seed);

qc::Metrics evaluate_qc(const qc::Model& model, const std::vector<QcRecord>& records,
                        const std::vector<std::size_t>& indices);

}  // namespace t1forge::cli
