#include "t1forge/qc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "t1forge/anatomy.hpp"
#include "t1forge/morphology.hpp"
#include "t1forge/raw_io.hpp"

namespace t1forge::qc {

const std::array<const char*, kFeatureCount>& feature_names() {
    static const std::array<const char*, kFeatureCount> names = {
        "myo_mean_u", "myo_max_u", "boundary_band_mean_u", "frac_u_above_ln2", "myo_components",
        "pool_components", "myo_area_fraction", "ring_closed", "evidence"};
    return names;
}

Features extract_features(const LabelMask& mask, const UncertaintyMap& umap, double evidence) {
    if (!mask.same_shape(umap)) throw Error(ErrorCode::DimensionMismatch, "mask and uncertainty map differ in size");
    Features f{};
    const double grid = static_cast<double>(mask.size());

    std::size_t above = 0;
    for (double u : umap.values()) above += u > std::numbers::ln2;
    f[3] = static_cast<double>(above) / grid;
    f[8] = evidence;

    const BinaryMask myo = select(mask, Label::LVMyocardium);
    const std::size_t myo_area = area(myo);
    if (myo_area == 0) return f;  // sentinel: region features stay 0

    double sum = 0.0;
    double max = 0.0;
    for (std::size_t i = 0; i < myo.size(); ++i) {
        if (!myo[i]) continue;
        sum += umap[i];
        max = std::max(max, umap[i]);
    }
    f[0] = sum / static_cast<double>(myo_area);
    f[1] = max;

    // Band: pixels within 3 px (chessboard) of the myocardial boundary.
    const BinaryMask inner = erode(myo);
    BinaryMask boundary(myo.width(), myo.height(), 0);
    for (std::size_t i = 0; i < myo.size(); ++i) boundary[i] = myo[i] && !inner[i];
    const BinaryMask band = dilate(boundary, StructuringElement::square(7));
    double band_sum = 0.0;
    std::size_t band_n = 0;
    for (std::size_t i = 0; i < band.size(); ++i) {
        if (band[i]) {
            band_sum += umap[i];
            ++band_n;
        }
    }
    f[2] = band_n ? band_sum / static_cast<double>(band_n) : 0.0;
    f[4] = connected_components(myo).count;
    f[5] = connected_components(select(mask, Label::LVBloodPool)).count;
    f[6] = static_cast<double>(myo_area) / grid;
    f[7] = lv_ring_closed(mask) ? 1.0 : 0.0;
    return f;
}

namespace {

void require_both_classes(std::span<const bool> incorrect) {
    const auto bad = std::count(incorrect.begin(), incorrect.end(), true);
    if (bad == 0 || bad == static_cast<std::ptrdiff_t>(incorrect.size())) {
        throw Error(ErrorCode::OneClassOnly, "need both correct and incorrect examples");
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

template <typename IsRejected>
Metrics tally(std::size_t n, IsRejected is_rejected, std::span<const bool> incorrect) {
    Metrics m;
    for (std::size_t i = 0; i < n; ++i) {
        const bool r = is_rejected(i);
        if (incorrect[i]) (r ? m.true_positive : m.false_negative)++;
        else (r ? m.false_positive : m.true_negative)++;
    }
    m.sensitivity = static_cast<double>(m.true_positive) / static_cast<double>(m.true_positive + m.false_negative);
    m.specificity = static_cast<double>(m.true_negative) / static_cast<double>(m.true_negative + m.false_positive);
    m.balanced_accuracy = 0.5 * (m.sensitivity + m.specificity);
    return m;
}

}  // namespace

double calibrate_threshold(std::span<const double> scores, std::span<const bool> incorrect) {
    if (scores.size() != incorrect.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
    require_both_classes(incorrect);
    std::vector<double> distinct(scores.begin(), scores.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> candidates;
    if (distinct.size() == 1) candidates.push_back(distinct.front());
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));

    double best_threshold = candidates.front();
    double best_ba = -1.0;
    for (double t : candidates) {  // ascending, so a strict improvement keeps the smallest on ties
        const double ba =
            tally(scores.size(), [&](std::size_t i) { return scores[i] > t; }, incorrect).balanced_accuracy;
        if (ba > best_ba + 1e-12) {
            best_ba = ba;
            best_threshold = t;
        }
    }
    return best_threshold;
}

double Classifier::probability(const Features& f) const {
    double z = bias;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (dropped[j]) continue;
        z += weights[j] * (f[j] - feature_means[j]) / feature_sds[j];
    }
    return sigmoid(z);
}

Classifier train_classifier(std::span<const LabelledFeatures> data, const TrainingOptions& options) {
    std::size_t bad = 0;
    for (const auto& d : data) {
        bad += d.incorrect;
        for (double v : d.features) {
            if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "training features must be finite");
        }
    }
    if (bad == 0 || bad == data.size()) throw Error(ErrorCode::OneClassOnly, "need both correct and incorrect examples");
    if (options.iterations < 0 || !(options.learning_rate > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "iterations must be >= 0 and learning rate > 0");
    }

    Classifier model;
    model.seed = options.seed;
    model.iterations = options.iterations;
    const double n = static_cast<double>(data.size());

    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        double s = 0.0;
        for (const auto& d : data) s += d.features[j];
        const double m = s / n;
        double ss = 0.0;
        for (const auto& d : data) ss += (d.features[j] - m) * (d.features[j] - m);
        const double sd = std::sqrt(ss / n);
        model.feature_means[j] = m;
        if (sd > 1e-12 * std::max(1.0, std::fabs(m))) {
            model.feature_sds[j] = sd;
        } else {
            model.feature_sds[j] = 1.0;
            model.dropped[j] = true;
        }
    }

    std::vector<Features> z(data.size());
    std::vector<double> y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            z[i][j] = model.dropped[j] ? 0.0 : (data[i].features[j] - model.feature_means[j]) / model.feature_sds[j];
        }
        y[i] = data[i].incorrect ? 0.0 : 1.0;  // target is P(accurate)
    }

    auto loss = [&](const Features& w, double b) {
        double l = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double s = b;
            for (std::size_t j = 0; j < kFeatureCount; ++j) s += w[j] * z[i][j];
            // log(1 + e^s) - y s, evaluated stably
            l += (s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s))) - y[i] * s;
        }
        double reg = 0.0;
        for (double wj : w) reg += wj * wj;
        return l / n + 0.5 * options.l2 * reg;
    };

    for (int it = 0; it < options.iterations; ++it) {
        Features grad{};
        double grad_b = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double s = model.bias;
            for (std::size_t j = 0; j < kFeatureCount; ++j) s += model.weights[j] * z[i][j];
            const double r = sigmoid(s) - y[i];
            for (std::size_t j = 0; j < kFeatureCount; ++j) grad[j] += r * z[i][j];
            grad_b += r;
        }
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            model.weights[j] -= options.learning_rate * (grad[j] / n + options.l2 * model.weights[j]);
        }
        model.bias -= options.learning_rate * grad_b / n;
        model.loss_history.push_back(loss(model.weights, model.bias));
    }
    return model;
}

Decision run_qc(double evidence, double threshold, const Classifier& classifier, const Features& features) {
    Decision d;
    d.step1_score = evidence;
    d.step1_threshold = threshold;
    d.step1_pass = evidence <= threshold;
    d.step2_probability = classifier.probability(features);
    d.step2_pass = d.step2_probability >= 0.5;
    d.accept = d.step1_pass && d.step2_pass;
    return d;
}

Metrics metrics_from_calls(std::span<const bool> rejected, std::span<const bool> incorrect) {
    if (rejected.size() != incorrect.size()) throw Error(ErrorCode::LengthMismatch, "calls and labels differ in length");
    require_both_classes(incorrect);
    return tally(rejected.size(), [&](std::size_t i) { return rejected[i]; }, incorrect);
}

Metrics qc_metrics(std::span<const Decision> decisions, std::span<const bool> incorrect) {
    if (decisions.size() != incorrect.size()) {
        throw Error(ErrorCode::LengthMismatch, "decisions and labels differ in length");
    }
    require_both_classes(incorrect);
    return tally(decisions.size(), [&](std::size_t i) { return !decisions[i].accept; }, incorrect);
}

std::string to_json(const Model& model) {
    const Classifier& c = model.classifier;
    nlohmann::json features = nlohmann::json::array();
    for (const char* name : feature_names()) features.push_back(name);
    nlohmann::json dropped = nlohmann::json::array();
    for (bool d : c.dropped) dropped.push_back(d);
    nlohmann::json j = {{"version", Model::kVersion},
                        {"threshold", model.threshold},
                        {"weights", c.weights},
                        {"bias", c.bias},
                        {"feature_means", c.feature_means},
                        {"feature_sds", c.feature_sds},
                        {"dropped", dropped},
                        {"features", features},
                        {"seed", c.seed},
                        {"iterations", c.iterations}};
    return j.dump(2) + "\n";
}

Model model_from_json(std::string_view text) {
    Model m;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<int>() != Model::kVersion) {
            throw Error(ErrorCode::FormatError, "unsupported QC model version");
        }
        m.threshold = j.at("threshold").get<double>();
        m.classifier.weights = j.at("weights").get<Features>();
        m.classifier.bias = j.at("bias").get<double>();
        m.classifier.feature_means = j.at("feature_means").get<Features>();
        m.classifier.feature_sds = j.at("feature_sds").get<Features>();
        if (j.contains("dropped")) m.classifier.dropped = j.at("dropped").get<std::array<bool, kFeatureCount>>();
        m.classifier.seed = j.value("seed", std::uint64_t{0});
        m.classifier.iterations = j.value("iterations", 0);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("QC model: ") + e.what());
    }
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        if (!(m.classifier.feature_sds[k] > 0.0) || !std::isfinite(m.classifier.weights[k])) {
            throw Error(ErrorCode::FormatError, "QC model has a non-positive SD or non-finite weight");
        }
    }
    return m;
}

void save_model(const std::filesystem::path& path, const Model& model) { write_text_file(path, to_json(model)); }

Model load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

}  // namespace t1forge::qc
