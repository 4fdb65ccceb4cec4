#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "t1forge/anatomy.hpp"
#include "t1forge/image.hpp"
#include "t1forge/qc.hpp"

namespace t1forge {

struct RegionStats {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

/// Mean and sample SD of image values under the mask. Throws EmptyRegion.
RegionStats region_stats(const ImageGrid& image, const BinaryMask& region);

struct RegionalT1 {
    RegionStats global;
    RegionStats septum;
    RegionStats free_wall;
};

RegionalT1 regional_t1(const ImageGrid& image, const LabelMask& mask, const MyocardialPartition& partition);

enum class RateUnit { PerMillisecond, PerSecond };

std::string_view to_string(RateUnit unit) noexcept;
RateUnit rate_unit_from_string(std::string_view text);

/// Longitudinal relaxation rate with its unit attached.
struct RelaxationRate {
    double value = 0.0;
    RateUnit unit = RateUnit::PerMillisecond;

    static RelaxationRate from_t1_ms(double t1_ms, RateUnit unit = RateUnit::PerMillisecond);
    RelaxationRate in(RateUnit target) const;
};

struct BloodT1 {
    double lv_t1 = 0.0;
    double rv_t1 = 0.0;
    /// Mean of the LV and RV pool values.
    double t1 = 0.0;
    RelaxationRate r1;
};

/// Throws EmptyROI.
BloodT1 blood_r1(const ImageGrid& image, const BloodRois& rois);

/// Linear model of myocardial T1 (ms) on blood R1.
struct BloodModel {
    double alpha = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double mse = 0.0;
    double r_mean = 0.0;
    RateUnit predictor_unit = RateUnit::PerMillisecond;
};

struct CohortPoint {
    double myocardial_t1 = 0.0;
    RelaxationRate r1;
};

/// Ordinary least squares; all points must share one rate unit.
/// Throws TooFewSubjects (< 3), ConstantPredictor, UnitMismatch.
BloodModel fit_blood_model(std::span<const CohortPoint> cohort);

/// T1_corrected = T1_uncorrected + alpha * (R_mean - R_patient).
/// Throws UnitMismatch when `patient` is not in the model's predictor unit.
double correct_t1(double t1_uncorrected, RelaxationRate patient, const BloodModel& model);

std::string to_json(const BloodModel& model);
BloodModel blood_model_from_json(std::string_view text);
void save_blood_model(const std::filesystem::path& path, const BloodModel& model);
BloodModel load_blood_model(const std::filesystem::path& path);

struct CorrectedT1 {
    double global = 0.0;
    double septum = 0.0;
    double free_wall = 0.0;
};

struct SamplingSpread {
    std::optional<double> global;
    std::optional<double> septum;
    std::optional<double> free_wall;
};

struct T1Report {
    static constexpr int kSchemaVersion = 1;

    std::string subject_id;
    RegionalT1 myocardium;
    BloodT1 blood;
    std::optional<CorrectedT1> corrected;
    SamplingSpread sampling_sd;
    qc::Decision qc;
    std::string probability_source = "hard";
};

/// Applies the blood model to all three regions with one alpha.
CorrectedT1 correct_regions(const RegionalT1& t1, RelaxationRate patient, const BloodModel& model);

std::string to_json(const T1Report& report);

}  // namespace t1forge
