#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "cli/config.hpp"

namespace t1forge::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kAllRejected = 3;
inline constexpr int kIo = 4;
}  // namespace exit_code

struct PhantomOptions {
    std::uint64_t seed = 0;
    int count = 1;
    std::filesystem::path output = "phantoms";
    double noise_sd = 30.0;
    bool randomize = false;
    std::optional<std::string> corrupt;
    double severity = 0.5;
    int samples = 100;
    std::string group = "all";
};

struct QcFitOptions {
    std::optional<int> synthetic;
    std::optional<std::filesystem::path> listing;
    std::uint64_t seed = 1;
    int samples = 100;
    int threads = 1;
    double holdout = 0.5;
    int slice = 0;
    std::filesystem::path output = "qc_model.json";
};

struct BloodFitOptions {
    std::filesystem::path cohort;
    std::filesystem::path output = "blood_model.json";
    std::string column = "t1_global";
};

struct AnalyzeOptions {
    std::optional<std::filesystem::path> config_file;
    std::optional<std::filesystem::path> listing;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> qc_model;
    std::optional<std::filesystem::path> calibration;
    std::optional<std::filesystem::path> blood_model;
    bool fit_blood = false;
    std::optional<std::filesystem::path> output;
    std::optional<int> threads;
    std::optional<int> slice;
    std::optional<std::string> probability;
};

struct ReportOptions {
    std::filesystem::path cohort;
    std::filesystem::path output = "report";
};

/// Each command returns a process exit code and never throws.
int cmd_phantom(const PhantomOptions& options, std::ostream& out, std::ostream& err);
int cmd_qc_fit(const QcFitOptions& options, std::ostream& out, std::ostream& err);
int cmd_blood_fit(const BloodFitOptions& options, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

/// Merges a config file (if any) with flag overrides. Throws on invalid input.
PipelineConfig resolve_analyze_config(const AnalyzeOptions& options);

}  // namespace t1forge::cli
