#include "cli/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>

#include <nlohmann/json.hpp>

#include "cli/csv.hpp"
#include "cli/pipeline.hpp"
#include "cli/report.hpp"
#include "t1forge/analysis.hpp"
#include "t1forge/phantom.hpp"
#include "t1forge/raw_io.hpp"
#include "t1forge/segmenter.hpp"

namespace t1forge::cli {
namespace {

using json = nlohmann::ordered_json;

int exit_code_for(const Error& e) { return e.code() == ErrorCode::IoError ? exit_code::kIo : exit_code::kUsage; }

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::kUsage;
    }
}

json point_json(Point2 p) { return json{{"x", p.x}, {"y", p.y}}; }

json truth_json(const PhantomTruth& t, std::optional<CorruptionMode> mode, double severity) {
    const auto& s = t.spec;
    json j;
    j["seed"] = s.seed;
    j["width"] = s.width;
    j["height"] = s.height;
    j["spacing_mm"] = s.spacing_mm;
    j["noise_sd"] = s.noise_sd;
    j["lv_center"] = point_json(s.lv_center);
    j["blood_radius"] = s.blood_radius;
    j["outer_radius"] = s.outer_radius;
    j["rv_center"] = point_json(s.rv_center());
    j["rv_radius"] = s.rv_radius;
    j["tissue_t1"] = {{"lv_blood", t.tissue.lv_blood},
                      {"rv_blood", t.tissue.rv_blood},
                      {"myocardium", t.tissue.myocardium},
                      {"background", t.tissue.background}};
    j["insertion_points"] = {{"rv1", point_json(t.rv1)}, {"rv2", point_json(t.rv2)}};
    j["septal_sector"] = {{"start", t.septal_sector.start}, {"width", t.septal_sector.width}};
    if (mode) {
        j["corruption"] = {{"mode", std::string(to_string(*mode))}, {"severity", severity}};
    } else {
        j["corruption"] = nullptr;
    }
    return j;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void print_metrics(std::ostream& out, const char* label, const qc::Metrics& m) {
    out << label << ": sensitivity " << format_number(m.sensitivity, 4) << ", specificity "
        << format_number(m.specificity, 4) << ", balanced accuracy " << format_number(m.balanced_accuracy, 4)
        << " (TP " << m.true_positive << ", FN " << m.false_negative << ", TN " << m.true_negative << ", FP "
        << m.false_positive << ")\n";
}

}  // namespace

int cmd_phantom(const PhantomOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (o.count < 1) throw Error(ErrorCode::InvalidArgument, "--count must be at least 1");
        if (o.samples < 1) throw Error(ErrorCode::InvalidArgument, "--samples must be at least 1");
        std::optional<CorruptionMode> mode;
        if (o.corrupt) mode = corruption_mode_from_string(*o.corrupt);

        std::string listing = "subject_id,image,samples,group\n";
        for (int k = 0; k < o.count; ++k) {
            const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(k);
            PhantomSpec spec = o.randomize ? randomized_phantom_spec(seed, o.noise_sd) : default_phantom_spec();
            spec.seed = seed;
            spec.noise_sd = o.noise_sd;
            const PhantomTruth truth = generate_phantom(spec);
            const std::string id = "subject_" + std::to_string(seed);
            const auto dir = o.output / id;
            std::filesystem::create_directories(dir);

            write_raw(dir / "mask.raw", truth.mask);
            std::string samples_entry;
            if (mode) {
                const CorruptedPhantom c = corrupt(truth, *mode, o.severity, seed);
                write_raw(dir / "clean_image.raw", truth.image);
                write_raw(dir / "image.raw", c.image);
                if (*mode == CorruptionMode::MaskFailure) {
                    write_raw(dir / "corrupted_mask.raw", c.mask);
                    write_samples(dir / "samples.stk", perturbed_mask_samples(c.image, c.mask, o.samples, seed));
                    samples_entry = id + "/samples.stk";
                }
            } else {
                write_raw(dir / "image.raw", truth.image);
            }
            write_text_file(dir / "truth.json", truth_json(truth, mode, o.severity).dump(2) + "\n");
            listing += id + "," + id + "/image.raw," + samples_entry + "," + o.group + "\n";
        }
        write_text_file(o.output / "listing.csv", listing);
        out << "wrote " << o.count << " phantom subject(s) to " << o.output.string() << "\n";
        return exit_code::kOk;
    });
}

int cmd_qc_fit(const QcFitOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (o.synthetic.has_value() == o.listing.has_value()) {
            throw Error(ErrorCode::InvalidArgument, "supply exactly one of --synthetic and --listing");
        }
        if (o.samples < 1) throw Error(ErrorCode::InvalidArgument, "--samples must be at least 1");
        const int threads = effective_threads(o.threads);
        std::vector<QcRecord> records;
        if (o.synthetic) {
            if (*o.synthetic < 2) throw Error(ErrorCode::EmptyInput, "synthetic dataset needs at least two examples");
            records = qc_records_from_synthetic(*o.synthetic, o.seed, o.samples, threads);
        } else {
            records = qc_records_from_listing(*o.listing, o.seed, o.samples, threads, o.slice);
        }
        if (records.empty()) throw Error(ErrorCode::EmptyInput, "labelled dataset is empty");

        const HoldoutSplit split = holdout_split(records, o.holdout, o.seed);
        const qc::Model model = fit_qc_model(records, split.train, o.seed);
        out << "examples: " << records.size() << " (train " << split.train.size() << ", held out "
            << split.test.size() << ")\n";
        out << "evidence threshold: " << model.threshold << "\n";
        print_metrics(out, "train", evaluate_qc(model, records, split.train));
        if (!split.test.empty()) print_metrics(out, "held-out", evaluate_qc(model, records, split.test));
        qc::save_model(o.output, model);
        out << "model written to " << o.output.string() << "\n";
        return exit_code::kOk;
    });
}

int cmd_blood_fit(const BloodFitOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const CsvTable table = CsvTable::parse(read_text_file(o.cohort));
        if (!table.has_column(o.column) || !table.has_column("r1")) {
            throw Error(ErrorCode::FormatError, o.cohort.string() + ": needs " + o.column + " and r1 columns");
        }
        std::vector<CohortPoint> cohort;
        for (std::size_t r = 0; r < table.rows(); ++r) {
            if (table.has_column("accepted") && table.cell(r, "accepted") != "1") continue;
            const auto t1 = table.number(r, o.column);
            const auto r1 = table.number(r, "r1");
            if (t1 && r1) cohort.push_back({*t1, RelaxationRate{*r1, RateUnit::PerMillisecond}});
        }
        const BloodModel model = fit_blood_model(cohort);
        save_blood_model(o.output, model);
        out << "subjects: " << cohort.size() << "\nalpha: " << model.alpha << "\nintercept: " << model.intercept
            << "\nr2: " << model.r2 << "\nmse: " << model.mse << "\nr_mean: " << model.r_mean << " "
            << to_string(model.predictor_unit) << "\nmodel written to " << o.output.string() << "\n";
        return exit_code::kOk;
    });
}

PipelineConfig resolve_analyze_config(const AnalyzeOptions& o) {
    PipelineConfig config;
    if (o.config_file) {
        apply_config(config, parse_toml(read_text_file(*o.config_file)), o.config_file->parent_path());
    }
    if (o.listing) config.listing = *o.listing;
    if (o.samples) config.samples = *o.samples;
    if (o.seed) config.seed = *o.seed;
    if (o.qc_model) {
        config.qc_model = *o.qc_model;
        config.calibration.reset();
    }
    if (o.calibration) {
        config.calibration = *o.calibration;
        if (!o.qc_model) config.qc_model.reset();
    }
    if (o.blood_model) config.blood_model = *o.blood_model;
    if (o.fit_blood) config.fit_blood = true;
    if (o.output) config.output = *o.output;
    if (o.threads) config.threads = *o.threads;
    if (o.slice) config.slice = *o.slice;
    if (o.probability) {
        std::map<std::string, ConfigValue> v{{"probability", *o.probability}};
        apply_config(config, v, {});
    }
    config.validate();
    return config;
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::string started = timestamp();
        const PipelineConfig config = resolve_analyze_config(o);
        const AnalyzeResult result = run_analyze(config);
        write_analyze_outputs(result, config);

        const std::size_t accepted = result.accepted();
        std::ofstream log(config.output / "run.log", std::ios::app);
        log << "started " << started << " finished " << timestamp() << " subjects " << result.subjects.size()
            << " accepted " << accepted << " threads " << effective_threads(config.threads) << "\n";
        for (const auto& w : result.warnings) err << "warning: " << w << "\n";
        out << "subjects: " << result.subjects.size() << ", accepted: " << accepted
            << ", rejected: " << result.subjects.size() - accepted << "\n";
        if (!result.subjects.empty() && accepted == 0) return exit_code::kAllRejected;
        return exit_code::kOk;
    });
}

int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const CohortReport report = build_report(CsvTable::parse(read_text_file(o.cohort)));
        write_report(report, o.output);
        out << "box plots: " << report.boxes.size() << ", agreement series: " << report.agreement.size()
            << ", reference ranges: " << report.ranges.size() << "\n";
        return exit_code::kOk;
    });
}

}  // namespace t1forge::cli
