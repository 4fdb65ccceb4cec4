#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "t1forge/image.hpp"
#include "t1forge/uncertainty.hpp"

namespace t1forge::qc {

inline constexpr std::size_t kFeatureCount = 9;

/// Fixed-order feature vector fed to the step-2 classifier:
///  0 mean uncertainty inside LV myocardium
///  1 max uncertainty inside LV myocardium
///  2 mean uncertainty in a 3 px band around the myocardial boundary
///  3 fraction of grid pixels with u > ln 2
///  4 4-connected components of LV myocardium
///  5 4-connected components of LV blood pool
///  6 LV myocardium area / grid area
///  7 1 if the myocardium encloses the blood pool, else 0
///  8 evidence score
using Features = std::array<double, kFeatureCount>;

const std::array<const char*, kFeatureCount>& feature_names();

Features extract_features(const LabelMask& mask, const UncertaintyMap& umap, double evidence);

struct Decision {
    double step1_score = 0.0;
    double step1_threshold = 0.0;
    bool step1_pass = false;
    double step2_probability = 0.0;
    bool step2_pass = false;
    bool accept = false;
};

/// Threshold among midpoints of the sorted distinct scores that maximises the
/// balanced accuracy of "reject if score > threshold". Ties go to the smaller
/// threshold. A single distinct score yields that score.
/// `incorrect[i]` marks example i as a bad segmentation. Throws OneClassOnly.
double calibrate_threshold(std::span<const double> scores, std::span<const bool> incorrect);

struct TrainingOptions {
    int iterations = 2000;
    double learning_rate = 0.5;
    double l2 = 1e-3;
    std::uint64_t seed = 0;
};

/// Logistic model of P(accurate | features).
struct Classifier {
    Features weights{};
    double bias = 0.0;
    Features feature_means{};
    Features feature_sds{};
    std::array<bool, kFeatureCount> dropped{};
    std::uint64_t seed = 0;
    int iterations = 0;
    /// Mean training loss after each iteration (not persisted).
    std::vector<double> loss_history;

    double probability(const Features& f) const;
};

struct LabelledFeatures {
    Features features;
    bool incorrect = false;
};

/// Full-batch gradient descent on the L2-regularised mean logistic loss over
/// standardised features, starting from zero weights. Zero-SD features are
/// dropped. Throws OneClassOnly, NonFiniteFeature.
Classifier train_classifier(std::span<const LabelledFeatures> data, const TrainingOptions& options = {});

Decision run_qc(double evidence, double threshold, const Classifier& classifier, const Features& features);

struct Metrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double balanced_accuracy = 0.0;
    std::size_t true_positive = 0;
    std::size_t false_negative = 0;
    std::size_t true_negative = 0;
    std::size_t false_positive = 0;
};

/// Incorrect segmentations are the positive class; rejection is a positive call.
Metrics qc_metrics(std::span<const Decision> decisions, std::span<const bool> incorrect);
Metrics metrics_from_calls(std::span<const bool> rejected, std::span<const bool> incorrect);

struct Model {
    static constexpr int kVersion = 1;
    double threshold = 0.0;
    Classifier classifier;
};

std::string to_json(const Model& model);
Model model_from_json(std::string_view text);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace t1forge::qc
