#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "t1forge/uncertainty.hpp"

namespace t1forge::cli {

/// Value of one `key = value` line in a TOML-style config file.
using ConfigValue = std::variant<bool, std::int64_t, double, std::string>;

/// Parses the TOML subset used by the tool: comments, `[section]` headers
/// (keys become "section.key"), and bare/quoted keys with string, integer,
/// float or boolean values. Throws Error(FormatError) with the line number.
std::map<std::string, ConfigValue> parse_toml(std::string_view text);

struct SubjectEntry {
    std::string id;
    std::filesystem::path image;
    std::optional<std::filesystem::path> samples;
    std::string group = "all";
};

struct PipelineConfig {
    std::filesystem::path listing;
    std::vector<SubjectEntry> subjects;
    int samples = 100;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> qc_model;
    std::optional<std::filesystem::path> calibration;
    std::optional<std::filesystem::path> blood_model;
    bool fit_blood = false;
    std::filesystem::path output;
    int threads = 1;
    int slice = 0;
    ProbabilitySource probability = ProbabilitySource::Auto;

    /// Throws Error(InvalidArgument) when the invariants do not hold.
    void validate() const;
};

/// Applies recognised keys from a parsed config file; unknown keys are errors.
/// Relative paths are resolved against `base_dir`.
void apply_config(PipelineConfig& config, const std::map<std::string, ConfigValue>& values,
                  const std::filesystem::path& base_dir);

/// Reads a listing CSV with columns subject_id,image[,samples][,group].
/// Relative paths are resolved against the listing's directory.
std::vector<SubjectEntry> read_listing(const std::filesystem::path& path);

/// Worker count after applying the T1FORGE_THREADS cap.
int effective_threads(int requested);

}  // namespace t1forge::cli
