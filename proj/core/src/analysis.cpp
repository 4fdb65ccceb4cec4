#include "t1forge/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "t1forge/raw_io.hpp"

namespace t1forge {

using nlohmann::json;

RegionStats region_stats(const ImageGrid& image, const BinaryMask& region) {
    if (!image.same_shape(region)) throw Error(ErrorCode::DimensionMismatch, "image and region differ in size");
    std::vector<double> v;
    for (std::size_t i = 0; i < region.size(); ++i) {
        if (region[i]) v.push_back(image[i]);
    }
    if (v.empty()) throw Error(ErrorCode::EmptyRegion, "region has no pixels");
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0, v.size()};
}

RegionalT1 regional_t1(const ImageGrid& image, const LabelMask& mask, const MyocardialPartition& partition) {
    return {region_stats(image, select(mask, Label::LVMyocardium)), region_stats(image, partition.septum),
            region_stats(image, partition.free_wall)};
}

std::string_view to_string(RateUnit unit) noexcept {
    return unit == RateUnit::PerMillisecond ? "1/ms" : "1/s";
}

RateUnit rate_unit_from_string(std::string_view text) {
    if (text == "1/ms") return RateUnit::PerMillisecond;
    if (text == "1/s") return RateUnit::PerSecond;
    throw Error(ErrorCode::FormatError, "unknown rate unit '" + std::string(text) + "'");
}

RelaxationRate RelaxationRate::from_t1_ms(double t1_ms, RateUnit unit) {
    if (!(t1_ms > 0.0)) throw Error(ErrorCode::InvalidArgument, "T1 must be > 0 to form R1");
    return RelaxationRate{1.0 / t1_ms, RateUnit::PerMillisecond}.in(unit);
}

RelaxationRate RelaxationRate::in(RateUnit target) const {
    if (target == unit) return *this;
    return {target == RateUnit::PerSecond ? value * 1000.0 : value / 1000.0, target};
}

BloodT1 blood_r1(const ImageGrid& image, const BloodRois& rois) {
    BloodT1 b;
    try {
        b.lv_t1 = region_stats(image, rois.lv).mean;
        b.rv_t1 = region_stats(image, rois.rv).mean;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyRegion) throw Error(ErrorCode::EmptyROI, "blood ROI is empty");
        throw;
    }
    b.t1 = 0.5 * (b.lv_t1 + b.rv_t1);
    b.r1 = RelaxationRate::from_t1_ms(b.t1);
    return b;
}

BloodModel fit_blood_model(std::span<const CohortPoint> cohort) {
    if (cohort.size() < 3) throw Error(ErrorCode::TooFewSubjects, "blood model needs at least three subjects");
    const RateUnit unit = cohort.front().r1.unit;
    const double n = static_cast<double>(cohort.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : cohort) {
        if (p.r1.unit != unit) throw Error(ErrorCode::UnitMismatch, "cohort mixes R1 units");
        mx += p.r1.value;
        my += p.myocardial_t1;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : cohort) {
        const double dx = p.r1.value - mx;
        const double dy = p.myocardial_t1 - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const bool constant = std::all_of(cohort.begin(), cohort.end(),
                                      [&](const CohortPoint& p) { return p.r1.value == cohort.front().r1.value; });
    if (constant || !(sxx > 0.0)) throw Error(ErrorCode::ConstantPredictor, "blood R1 is constant across the cohort");

    BloodModel m;
    m.alpha = sxy / sxx;
    m.intercept = my - m.alpha * mx;
    m.r_mean = mx;
    m.predictor_unit = unit;
    double ss_res = 0.0;
    for (const auto& p : cohort) {
        const double e = p.myocardial_t1 - (m.intercept + m.alpha * p.r1.value);
        ss_res += e * e;
    }
    m.mse = ss_res / n;
    m.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return m;
}

double correct_t1(double t1_uncorrected, RelaxationRate patient, const BloodModel& model) {
    if (patient.unit != model.predictor_unit) {
        throw Error(ErrorCode::UnitMismatch, "patient R1 is in " + std::string(to_string(patient.unit)) +
                                                 ", model expects " + std::string(to_string(model.predictor_unit)));
    }
    return t1_uncorrected + model.alpha * (model.r_mean - patient.value);
}

CorrectedT1 correct_regions(const RegionalT1& t1, RelaxationRate patient, const BloodModel& model) {
    return {correct_t1(t1.global.mean, patient, model), correct_t1(t1.septum.mean, patient, model),
            correct_t1(t1.free_wall.mean, patient, model)};
}

std::string to_json(const BloodModel& model) {
    json j = {{"alpha", model.alpha},
              {"intercept", model.intercept},
              {"r2", model.r2},
              {"mse", model.mse},
              {"r_mean", model.r_mean},
              {"units", {{"x", std::string(to_string(model.predictor_unit))}, {"y", "ms"}}}};
    return j.dump(2) + "\n";
}

BloodModel blood_model_from_json(std::string_view text) {
    BloodModel m;
    try {
        const auto j = json::parse(text);
        m.alpha = j.at("alpha").get<double>();
        m.intercept = j.at("intercept").get<double>();
        m.r2 = j.value("r2", 0.0);
        m.mse = j.value("mse", 0.0);
        m.r_mean = j.at("r_mean").get<double>();
        m.predictor_unit = rate_unit_from_string(j.at("units").at("x").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("blood model: ") + e.what());
    }
    if (!std::isfinite(m.alpha) || !std::isfinite(m.intercept) || !(m.r_mean > 0.0)) {
        throw Error(ErrorCode::FormatError, "blood model parameters must be finite with r_mean > 0");
    }
    return m;
}

void save_blood_model(const std::filesystem::path& path, const BloodModel& model) {
    write_text_file(path, to_json(model));
}

BloodModel load_blood_model(const std::filesystem::path& path) { return blood_model_from_json(read_text_file(path)); }

namespace {

json region_json(const RegionStats& r) { return {{"mean", r.mean}, {"sd", r.sd}, {"n", r.n}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string to_json(const T1Report& report) {
    json j;
    j["schema_version"] = T1Report::kSchemaVersion;
    j["subject_id"] = report.subject_id;
    j["myocardium"] = {{"global", region_json(report.myocardium.global)},
                       {"septum", region_json(report.myocardium.septum)},
                       {"free_wall", region_json(report.myocardium.free_wall)}};
    j["blood"] = {{"lv_t1", report.blood.lv_t1},
                  {"rv_t1", report.blood.rv_t1},
                  {"t1", report.blood.t1},
                  {"r1", report.blood.r1.value},
                  {"r1_unit", std::string(to_string(report.blood.r1.unit))}};
    if (report.corrected) {
        j["corrected"] = {{"global", report.corrected->global},
                          {"septum", report.corrected->septum},
                          {"free_wall", report.corrected->free_wall}};
    } else {
        j["corrected"] = nullptr;
    }
    j["sampling_sd"] = {{"global", optional_json(report.sampling_sd.global)},
                        {"septum", optional_json(report.sampling_sd.septum)},
                        {"free_wall", optional_json(report.sampling_sd.free_wall)}};
    j["qc"] = {{"step1_score", report.qc.step1_score},
               {"step1_threshold", report.qc.step1_threshold},
               {"step1_pass", report.qc.step1_pass},
               {"step2_probability", report.qc.step2_probability},
               {"step2_pass", report.qc.step2_pass},
               {"accept", report.qc.accept}};
    j["probability_source"] = report.probability_source;
    return j.dump(2) + "\n";
}

}  // namespace t1forge
