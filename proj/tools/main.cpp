#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

using namespace t1forge::cli;

int main(int argc, char** argv) {
    CLI::App app{"t1forge: native T1 map segmentation, quality control and quantification"};
    app.require_subcommand(1);

    PhantomOptions phantom;
    auto* ph = app.add_subcommand("phantom", "Generate synthetic phantom images with ground truth");
    ph->add_option("--seed", phantom.seed, "First seed");
    ph->add_option("--count", phantom.count, "Number of subjects (consecutive seeds)");
    ph->add_option("-o,--out", phantom.output, "Output directory");
    ph->add_option("--noise", phantom.noise_sd, "Gaussian noise SD in ms");
    ph->add_flag("--random-geometry", phantom.randomize, "Randomise geometry and tissue T1 per seed");
    ph->add_option("--corrupt", phantom.corrupt, "Corruption: wrong_plane, motion_ghosting or mask_failure");
    ph->add_option("--severity", phantom.severity, "Corruption severity in [0, 1]");
    ph->add_option("--samples", phantom.samples, "Sample count for mask_failure stacks");
    ph->add_option("--group", phantom.group, "Group label written to the listing");

    QcFitOptions qc;
    auto* qf = app.add_subcommand("qc-fit", "Calibrate and train the two-step quality-control gate");
    qf->add_option("--synthetic", qc.synthetic, "Generate N labelled phantom examples (half corrupted)");
    qf->add_option("--listing", qc.listing, "Labelled listing CSV (subject_id,image,samples,label)");
    qf->add_option("--seed", qc.seed, "Seed");
    qf->add_option("--samples", qc.samples, "Segmentation samples per subject");
    qf->add_option("--threads", qc.threads, "Worker threads");
    qf->add_option("--holdout", qc.holdout, "Held-out fraction");
    qf->add_option("--slice", qc.slice, "Slice index for NIfTI volumes");
    qf->add_option("-o,--out", qc.output, "Model output path");

    BloodFitOptions blood;
    auto* bf = app.add_subcommand("blood-fit", "Fit the blood-R1 correction model from a cohort CSV");
    bf->add_option("cohort", blood.cohort, "Cohort CSV")->required();
    bf->add_option("--column", blood.column, "Myocardial T1 column");
    bf->add_option("-o,--out", blood.output, "Model output path");

    AnalyzeOptions an;
    auto* az = app.add_subcommand("analyze", "Run the batch pipeline");
    az->add_option("-c,--config", an.config_file, "TOML-style config file");
    az->add_option("--listing", an.listing, "Listing CSV (subject_id,image,samples,group)");
    az->add_option("--samples", an.samples, "Segmentation samples per subject (T)");
    az->add_option("--seed", an.seed, "Seed");
    az->add_option("--qc-model", an.qc_model, "QC model JSON");
    az->add_option("--calibration", an.calibration, "Labelled calibration listing");
    az->add_option("--blood-model", an.blood_model, "Blood model JSON");
    az->add_flag("--fit-blood", an.fit_blood, "Fit the blood model from accepted subjects");
    az->add_option("-o,--out", an.output, "Output directory");
    az->add_option("--threads", an.threads, "Worker threads");
    az->add_option("--slice", an.slice, "Slice index for NIfTI volumes");
    az->add_option("--probability", an.probability, "Probability source: auto, hard or soft");

    ReportOptions report;
    auto* rp = app.add_subcommand("report", "Emit box plots, agreement and reference-range tables");
    rp->add_option("cohort", report.cohort, "Cohort CSV")->required();
    rp->add_option("-o,--out", report.output, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_code::kOk : exit_code::kUsage;
    }

    if (*ph) return cmd_phantom(phantom, std::cout, std::cerr);
    if (*qf) return cmd_qc_fit(qc, std::cout, std::cerr);
    if (*bf) return cmd_blood_fit(blood, std::cout, std::cerr);
    if (*az) return cmd_analyze(an, std::cout, std::cerr);
    return cmd_report(report, std::cout, std::cerr);
}
