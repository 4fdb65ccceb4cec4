#include "cli/pipeline.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <random>

#include <nlohmann/json.hpp>

#include "cli/csv.hpp"
#include "t1forge/anatomy.hpp"
#include "t1forge/nifti.hpp"
#include "t1forge/raw_io.hpp"
#include "t1forge/stats.hpp"
#include "t1forge/synthetic.hpp"
#include "t1forge/uncertainty.hpp"

namespace t1forge::cli {
namespace {

using json = nlohmann::ordered_json;

std::string number_field(std::optional<double> v) {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

json reference_range_json(const std::vector<double>& values) {
    if (values.size() < 2) return nullptr;
    const auto rr = stats::reference_range(values);
    return json{{"mean", rr.mean}, {"sd", rr.sd}, {"lower", rr.lower}, {"upper", rr.upper}, {"n", rr.n}};
}

std::string_view probability_label(const ProbabilityMaps& prob) { return prob.from_soft ? "soft" : "hard"; }

bool is_nifti(const std::filesystem::path& path) {
    const std::string name = path.filename().string();
    auto ends_with = [&](std::string_view s) {
        return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0;
    };
    return ends_with(".nii") || ends_with(".nii.gz");
}

void reject(SubjectResult& r, RejectReason reason, std::string detail) {
    r.reason = reason;
    r.detail = std::move(detail);
    r.report.reset();
}

}  // namespace

std::string_view to_string(RejectReason reason) noexcept {
    switch (reason) {
        case RejectReason::QcEvidence: return "QC_EVIDENCE";
        case RejectReason::QcClassifier: return "QC_CLASSIFIER";
        case RejectReason::ReadError: return "READ_ERROR";
        case RejectReason::FormatError: return "FORMAT_ERROR";
        case RejectReason::DimensionMismatch: return "DIMENSION_MISMATCH";
        case RejectReason::DegenerateImage: return "DEGENERATE_IMAGE";
        case RejectReason::NoFit: return "NO_FIT";
        case RejectReason::NoJunctions: return "NO_JUNCTIONS";
        case RejectReason::SingleCluster: return "SINGLE_CLUSTER";
        case RejectReason::DegenerateCentroid: return "DEGENERATE_CENTROID";
        case RejectReason::BrokenRing: return "BROKEN_RING";
        case RejectReason::EmptyRoi: return "EMPTY_ROI";
        case RejectReason::EmptyRegion: return "EMPTY_REGION";
        case RejectReason::InternalError: return "INTERNAL_ERROR";
    }
    return "INTERNAL_ERROR";
}

RejectReason reason_from_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::IoError: return RejectReason::ReadError;
        case ErrorCode::BadMagic:
        case ErrorCode::UnsupportedDatatype:
        case ErrorCode::TruncatedFile:
        case ErrorCode::GzipUnsupported:
        case ErrorCode::SliceOutOfRange:
        case ErrorCode::FormatError: return RejectReason::FormatError;
        case ErrorCode::DimensionMismatch: return RejectReason::DimensionMismatch;
        case ErrorCode::DegenerateImage: return RejectReason::DegenerateImage;
        case ErrorCode::NoFit: return RejectReason::NoFit;
        case ErrorCode::NoJunctions: return RejectReason::NoJunctions;
        case ErrorCode::SingleCluster: return RejectReason::SingleCluster;
        case ErrorCode::DegenerateCentroid:
        case ErrorCode::EmptyInput: return RejectReason::DegenerateCentroid;
        case ErrorCode::EmptyROI: return RejectReason::EmptyRoi;
        case ErrorCode::EmptyRegion: return RejectReason::EmptyRegion;
        default: return RejectReason::InternalError;
    }
}

ImageGrid load_image(const std::filesystem::path& path, int slice) {
    if (is_nifti(path)) return read_nifti(path, slice).image;
    return read_raw_image(path);
}

SegmentationSampleSet obtain_samples(const ImageGrid& image, const std::optional<std::filesystem::path>& stack,
                                     int T, std::uint64_t seed) {
    if (!stack) return segment_mc(image, T, seed);
    SegmentationSampleSet set = load_samples(*stack);
    if (set.width() != image.width() || set.height() != image.height()) {
        throw Error(ErrorCode::DimensionMismatch, stack->string() + ": sample stack does not match the image grid");
    }
    return set;
}

SubjectResult process_subject(const SubjectEntry& entry, std::uint64_t seed, const PipelineConfig& config,
                              const qc::Model& model) {
    SubjectResult r;
    r.id = entry.id;
    r.group = entry.group;
    try {
        const ImageGrid image = load_image(entry.image, config.slice);
        const SegmentationSampleSet samples = obtain_samples(image, entry.samples, config.samples, seed);
        const ProbabilityMaps prob = mean_probability(samples, config.probability);
        LabelMask mask = final_mask(prob);
        UncertaintyMap umap = uncertainty_map(prob, samples);
        const qc::Features features = qc::extract_features(mask, umap, samples.evidence);
        const qc::Decision decision = run_qc(samples.evidence, model.threshold, model.classifier, features);
        r.mask = mask;
        r.uncertainty = static_cast<const Raster<double>&>(umap);

        if (!decision.step1_pass) {
            reject(r, RejectReason::QcEvidence, "evidence above calibrated threshold");
            return r;
        }
        if (!decision.step2_pass) {
            reject(r, RejectReason::QcClassifier, "classifier probability below 0.5");
            return r;
        }

        const AnatomyPartition anatomy = analyse_anatomy(mask, image);
        if (anatomy.myocardium.ring_broken) {
            reject(r, RejectReason::BrokenRing, "myocardial ring does not enclose the blood pool");
            return r;
        }

        T1Report report;
        report.subject_id = entry.id;
        report.myocardium = regional_t1(image, mask, anatomy.myocardium);
        report.blood = blood_r1(image, anatomy.blood);
        report.qc = decision;
        report.probability_source = std::string(probability_label(prob));

        auto spread = [&](MyocardialRegion region) -> std::optional<double> {
            if (samples.count() < 2) return std::nullopt;
            try {
                return t1_sampling_distribution(image, samples, region).sd;
            } catch (const Error&) {
                return std::nullopt;
            }
        };
        report.sampling_sd.global = spread(MyocardialRegion::GlobalLV);
        report.sampling_sd.septum = spread(MyocardialRegion::Septum);
        report.sampling_sd.free_wall = spread(MyocardialRegion::FreeWall);
        r.report = std::move(report);
    } catch (const Error& e) {
        reject(r, reason_from_error(e.code()), e.what());
    } catch (const std::exception& e) {
        reject(r, RejectReason::InternalError, e.what());
    }
    return r;
}

std::size_t AnalyzeResult::accepted() const {
    return static_cast<std::size_t>(
        std::count_if(subjects.begin(), subjects.end(), [](const auto& s) { return !s.reason.has_value(); }));
}

AnalyzeResult run_analyze(const PipelineConfig& input) {
    PipelineConfig config = input;
    if (config.subjects.empty()) config.subjects = read_listing(config.listing);
    config.validate();
    std::sort(config.subjects.begin(), config.subjects.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    AnalyzeResult result;
    const int threads = effective_threads(config.threads);
    if (config.qc_model) {
        result.qc_model = qc::load_model(*config.qc_model);
    } else {
        const auto records = qc_records_from_listing(*config.calibration, config.seed, config.samples, threads,
                                                     config.slice);
        std::vector<std::size_t> all(records.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        result.qc_model = fit_qc_model(records, all, config.seed);
    }

    const int n = static_cast<int>(config.subjects.size());
    result.subjects.resize(config.subjects.size());
    synthetic::parallel_for(n, threads, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        result.subjects[idx] =
            process_subject(config.subjects[idx], config.seed ^ static_cast<std::uint64_t>(i), config, result.qc_model);
    });

    if (config.blood_model) {
        result.blood_model = load_blood_model(*config.blood_model);
    } else if (config.fit_blood) {
        std::vector<CohortPoint> cohort;
        for (const auto& s : result.subjects) {
            if (s.report) cohort.push_back({s.report->myocardium.global.mean, s.report->blood.r1});
        }
        try {
            result.blood_model = fit_blood_model(cohort);
        } catch (const Error& e) {
            result.warnings.push_back(std::string("blood model not fitted: ") + e.what());
        }
    }
    if (result.blood_model) {
        for (auto& s : result.subjects) {
            if (!s.report) continue;
            try {
                s.report->corrected = correct_regions(s.report->myocardium, s.report->blood.r1, *result.blood_model);
            } catch (const Error& e) {
                result.warnings.push_back(s.id + ": correction skipped: " + e.what());
            }
        }
    }
    return result;
}

std::string cohort_csv(const AnalyzeResult& result) {
    std::string out =
        "subject_id,group,accepted,t1_global,t1_ivs,t1_fw,t1_blood,r1,t1_global_corr,t1_ivs_corr,t1_fw_corr,"
        "t1_sd_sampling,reason\n";
    for (const auto& s : result.subjects) {
        std::vector<std::string> f{s.id, s.group, s.report ? "1" : "0"};
        if (s.report) {
            const T1Report& r = *s.report;
            f.push_back(number_field(r.myocardium.global.mean));
            f.push_back(number_field(r.myocardium.septum.mean));
            f.push_back(number_field(r.myocardium.free_wall.mean));
            f.push_back(number_field(r.blood.t1));
            f.push_back(number_field(r.blood.r1.in(RateUnit::PerMillisecond).value));
            const auto& c = r.corrected;
            f.push_back(number_field(c ? std::optional(c->global) : std::nullopt));
            f.push_back(number_field(c ? std::optional(c->septum) : std::nullopt));
            f.push_back(number_field(c ? std::optional(c->free_wall) : std::nullopt));
            f.push_back(number_field(r.sampling_sd.global));
            f.emplace_back();
        } else {
            f.resize(f.size() + 9);
            f.emplace_back(to_string(*s.reason));
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) out += ',';
            out += f[i];
        }
        out += '\n';
    }
    return out;
}

std::string summary_json(const AnalyzeResult& result) {
    json j;
    j["schema_version"] = 1;
    j["subjects"] = result.subjects.size();
    j["accepted"] = result.accepted();
    j["rejected"] = result.subjects.size() - result.accepted();

    std::map<std::string, std::size_t> reasons;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& s : result.subjects) {
        if (s.reason) {
            ++reasons[std::string(to_string(*s.reason))];
            continue;
        }
        auto& g = groups[s.group];
        g.first.push_back(s.report->myocardium.global.mean);
        if (s.report->corrected) g.second.push_back(s.report->corrected->global);
    }
    j["rejection_counts"] = json::object();
    for (const auto& [k, v] : reasons) j["rejection_counts"][k] = v;

    j["groups"] = json::object();
    for (const auto& [name, values] : groups) {
        j["groups"][name] = {{"n", values.first.size()},
                             {"t1_global", reference_range_json(values.first)},
                             {"t1_global_corr", reference_range_json(values.second)}};
    }
    j["qc"] = {{"threshold", result.qc_model.threshold}};
    j["blood_model"] = result.blood_model ? json::parse(to_json(*result.blood_model)) : json(nullptr);
    j["warnings"] = result.warnings;
    return j.dump(2) + "\n";
}

void write_analyze_outputs(const AnalyzeResult& result, const PipelineConfig& config) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output / "subjects", ec);
    if (ec) throw Error(ErrorCode::IoError, config.output.string() + ": " + ec.message());
    for (const auto& s : result.subjects) {
        const fs::path dir = config.output / "subjects" / s.id;
        fs::create_directories(dir, ec);
        if (ec) throw Error(ErrorCode::IoError, dir.string() + ": " + ec.message());
        if (s.report) write_text_file(dir / "report.json", to_json(*s.report));
        if (s.mask) write_raw(dir / "mask.raw", *s.mask);
        if (s.uncertainty) {
            const auto v = s.uncertainty->values();
            const ImageGrid u(s.uncertainty->width(), s.uncertainty->height(), std::vector<double>(v.begin(), v.end()));
            write_raw(dir / "uncertainty.raw", u, RawDtype::Float64);
        }
    }
    write_text_file(config.output / "cohort.csv", cohort_csv(result));
    write_text_file(config.output / "summary.json", summary_json(result));
    if (result.blood_model) save_blood_model(config.output / "blood_model.json", *result.blood_model);
}

std::vector<QcRecord> qc_records_from_synthetic(int count, std::uint64_t seed, int T, int threads) {
    synthetic::QcBenchmarkOptions options;
    options.clean = count / 2;
    options.corrupted = count - count / 2;
    options.samples = T;
    options.seed = seed;
    options.threads = threads;
    const auto examples = synthetic::qc_benchmark(options);
    std::vector<QcRecord> out;
    out.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& e = examples[i];
        QcRecord r;
        r.id = "synthetic_" + std::to_string(i);
        r.incorrect = e.incorrect;
        r.failure = e.backend_failure;
        r.evidence = e.evidence;
        r.features = e.features;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<QcRecord> qc_records_from_listing(const std::filesystem::path& listing, std::uint64_t seed, int T,
                                              int threads, int slice) {
    const CsvTable table = CsvTable::parse(read_text_file(listing));
    for (const char* col : {"subject_id", "image", "label"}) {
        if (!table.has_column(col)) {
            throw Error(ErrorCode::FormatError, listing.string() + ": missing column " + col);
        }
    }
    const auto base = listing.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };
    struct Row {
        std::string id;
        std::filesystem::path image;
        std::optional<std::filesystem::path> samples;
        bool incorrect;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const std::string& label = table.cell(i, "label");
        bool incorrect = false;
        if (label == "incorrect" || label == "1") incorrect = true;
        else if (label != "correct" && label != "0") {
            throw Error(ErrorCode::FormatError, listing.string() + ": label must be correct/incorrect or 0/1");
        }
        Row row{table.cell(i, "subject_id"), resolve(table.cell(i, "image")), std::nullopt, incorrect};
        if (const auto& s = table.cell(i, "samples"); !s.empty()) row.samples = resolve(s);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });

    std::vector<QcRecord> out(rows.size());
    synthetic::parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
        const Row& row = rows[static_cast<std::size_t>(i)];
        QcRecord& r = out[static_cast<std::size_t>(i)];
        r.id = row.id;
        r.incorrect = row.incorrect;
        try {
            const ImageGrid image = load_image(row.image, slice);
            const auto samples = obtain_samples(image, row.samples, T, seed ^ static_cast<std::uint64_t>(i));
            const auto prob = mean_probability(samples);
            r.evidence = samples.evidence;
            r.features = qc::extract_features(final_mask(prob), uncertainty_map(prob, samples), samples.evidence);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoFit && e.code() != ErrorCode::DegenerateImage) throw;
            r.failure = e.code();
        }
    });
    return out;
}

HoldoutSplit holdout_split(const std::vector<QcRecord>& records, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "held-out fraction must lie in (0, 1)");
    }
    std::mt19937_64 rng(seed);
    HoldoutSplit split;
    for (bool cls : {false, true}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].incorrect == cls) idx.push_back(i);
        }
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
        }
        const auto n_test = static_cast<std::size_t>(static_cast<double>(idx.size()) * test_fraction + 0.5);
        split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

qc::Model fit_qc_model(const std::vector<QcRecord>& records, const std::vector<std::size_t>& indices,
                       std::uint64_t seed) {
    std::vector<double> scores;
    std::vector<qc::LabelledFeatures> data;
    for (std::size_t i : indices) {
        const QcRecord& r = records.at(i);
        if (r.failure) continue;
        scores.push_back(r.evidence);
        data.push_back({r.features, r.incorrect});
    }
    if (data.empty()) throw Error(ErrorCode::EmptyInput, "no usable QC training examples");
    auto labels = std::make_unique<bool[]>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data[i].incorrect;

    qc::Model model;
    model.threshold = qc::calibrate_threshold(scores, std::span<const bool>(labels.get(), data.size()));
    qc::TrainingOptions options;
    options.seed = seed;
    model.classifier = qc::train_classifier(data, options);
    return model;
}

qc::Metrics evaluate_qc(const qc::Model& model, const std::vector<QcRecord>& records,
                        const std::vector<std::size_t>& indices) {
    auto rejected = std::make_unique<bool[]>(indices.size());
    auto incorrect = std::make_unique<bool[]>(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const QcRecord& r = records.at(indices[k]);
        incorrect[k] = r.incorrect;
        rejected[k] = r.failure.has_value() ||
                      !qc::run_qc(r.evidence, model.threshold, model.classifier, r.features).accept;
    }
    return qc::metrics_from_calls(std::span<const bool>(rejected.get(), indices.size()),
                                  std::span<const bool>(incorrect.get(), indices.size()));
}

}  // namespace t1forge::cli
