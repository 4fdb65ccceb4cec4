#include "t1forge/segmenter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "t1forge/morphology.hpp"
#include "t1forge/phantom.hpp"
#include "t1forge/raw_io.hpp"

namespace t1forge {

int SegmentationSampleSet::width() const {
    if (samples.empty()) throw Error(ErrorCode::EmptyInput, "sample set is empty");
    return samples.front().width();
}

int SegmentationSampleSet::height() const {
    if (samples.empty()) throw Error(ErrorCode::EmptyInput, "sample set is empty");
    return samples.front().height();
}

void SegmentationSampleSet::validate() const {
    if (samples.empty()) throw Error(ErrorCode::FormatError, "sample set needs T >= 1");
    for (const auto& s : samples) {
        if (!s.same_shape(samples.front())) throw Error(ErrorCode::DimensionMismatch, "samples differ in size");
    }
    if (!soft.empty()) {
        if (soft.size() != samples.size()) throw Error(ErrorCode::DimensionMismatch, "soft maps do not match T");
        const std::size_t plane = samples.front().size() * kNumClasses;
        for (const auto& p : soft) {
            if (p.size() != plane) throw Error(ErrorCode::DimensionMismatch, "soft map has the wrong size");
        }
    }
    if (!std::isfinite(evidence)) throw Error(ErrorCode::FormatError, "evidence must be finite");
}

std::array<double, ShapeModel::kDims> ShapeModel::to_array() const noexcept {
    return {lv_center.x, lv_center.y, blood_radius, outer_radius, rv_center.x, rv_center.y, rv_radius};
}

ShapeModel ShapeModel::from_array(const std::array<double, kDims>& p) noexcept {
    return {{p[0], p[1]}, p[2], p[3], {p[4], p[5]}, p[6]};
}

LabelMask ShapeModel::render(int width, int height) const {
    return render_labels(width, height, lv_center, blood_radius, outer_radius, rv_center, rv_radius);
}

Raster<double> normalize_intensities(const ImageGrid& image) {
    const auto [lo, hi] = std::minmax_element(image.values().begin(), image.values().end());
    if (lo == image.values().end() || *hi - *lo <= 0.0) {
        throw Error(ErrorCode::DegenerateImage, "image is constant; cannot normalise intensities");
    }
    const double min = *lo;
    const double scale = 1.0 / (*hi - *lo);
    Raster<double> out(image.width(), image.height(), 0.0);
    for (std::size_t i = 0; i < image.size(); ++i) out[i] = (image[i] - min) * scale;
    return out;
}

double homogeneity_cost(const Raster<double>& normalized, const LabelMask& mask) {
    if (!normalized.same_shape(mask)) throw Error(ErrorCode::DimensionMismatch, "image and mask differ in size");
    std::array<double, kNumClasses> n{};
    std::array<double, kNumClasses> s{};
    std::array<double, kNumClasses> q{};
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const int k = class_index(mask[i]);
        const double v = normalized[i];
        n[k] += 1.0;
        s[k] += v;
        q[k] += v * v;
    }
    double sse = 0.0;
    for (int k = 0; k < kNumClasses; ++k) {
        if (n[k] > 0.0) sse += std::max(0.0, q[k] - s[k] * s[k] / n[k]);
    }
    return sse / static_cast<double>(mask.size());
}

double mask_evidence(const ImageGrid& image, const LabelMask& mask) {
    return homogeneity_cost(normalize_intensities(image), mask);
}

namespace {

using Params = std::array<double, ShapeModel::kDims>;

constexpr double kInfeasible = 1e9;

/// Homogeneity cost of the rendered shape model, visiting only the bounding box
/// of the model; background statistics come from image totals.
class CostEvaluator {
public:
    explicit CostEvaluator(const Raster<double>& v) : v_(v) {
        for (double x : v.values()) {
            total_s_ += x;
            total_q_ += x * x;
        }
        n_ = static_cast<double>(v.size());
    }

    double operator()(const Params& p) const {
        const double cx = p[0], cy = p[1], r = p[2], R = p[3], rx = p[4], ry = p[5], rr = p[6];
        if (!(r >= 1.0) || !(R >= r + 1.0) || !(rr >= 1.0)) return kInfeasible;
        const int w = v_.width();
        const int h = v_.height();
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(cx - R, rx - rr))));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(cx + R, rx + rr))));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(cy - R, ry - rr))));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(cy + R, ry + rr))));
        if (x0 > x1 || y0 > y1) return kInfeasible;

        const double r2 = r * r, R2 = R * R, rr2 = rr * rr;
        double n[3] = {0, 0, 0}, s[3] = {0, 0, 0}, q[3] = {0, 0, 0};
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - cy;
            const double ey = y - ry;
            const double* row = &v_[v_.index(0, y)];
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - cx;
                const double d2 = dx * dx + dy * dy;
                int k;
                if (d2 <= r2) {
                    k = 0;
                } else if (d2 <= R2) {
                    k = 1;
                } else {
                    const double ex = x - rx;
                    if (ex * ex + ey * ey > rr2) continue;
                    k = 2;
                }
                const double val = row[x];
                n[k] += 1.0;
                s[k] += val;
                q[k] += val * val;
            }
        }
        if (n[0] == 0.0 || n[1] == 0.0) return kInfeasible;
        double sse = 0.0;
        double fs = 0.0, fq = 0.0, fn = 0.0;
        for (int k = 0; k < 3; ++k) {
            if (n[k] > 0.0) sse += std::max(0.0, q[k] - s[k] * s[k] / n[k]);
            fn += n[k];
            fs += s[k];
            fq += q[k];
        }
        const double bn = n_ - fn;
        if (bn > 0.0) {
            const double bs = total_s_ - fs;
            sse += std::max(0.0, (total_q_ - fq) - bs * bs / bn);
        }
        return sse / n_;
    }

private:
    const Raster<double>& v_;
    double total_s_ = 0.0;
    double total_q_ = 0.0;
    double n_ = 0.0;
};

/// Compass search with step halving. Returns the final cost.
double pattern_search(const CostEvaluator& cost, Params& p, std::span<const double> steps) {
    double best = cost(p);
    for (double step : steps) {
        for (int sweep = 0; sweep < 60; ++sweep) {
            bool improved = false;
            for (std::size_t i = 0; i < p.size(); ++i) {
                for (double dir : {1.0, -1.0}) {
                    Params trial = p;
                    trial[i] += dir * step;
                    const double c = cost(trial);
                    if (c < best) {
                        best = c;
                        p = trial;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) break;
        }
    }
    return best;
}

struct Initialisation {
    Params params{};
    bool has_rv = false;
};

/// Three-cluster 1-D k-means on intensities; returns sorted centres.
std::array<double, 3> intensity_clusters(const Raster<double>& v) {
    std::vector<double> sorted(v.values().begin(), v.values().end());
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double p) { return sorted[static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1))]; };
    std::array<double, 3> c = {q(0.05), 0.5 * (q(0.05) + q(0.99)), q(0.99)};
    for (int it = 0; it < 30; ++it) {
        std::array<double, 3> s{}, n{};
        for (double x : sorted) {
            int k = 0;
            for (int j = 1; j < 3; ++j) {
                if (std::fabs(x - c[static_cast<std::size_t>(j)]) < std::fabs(x - c[static_cast<std::size_t>(k)])) k = j;
            }
            s[static_cast<std::size_t>(k)] += x;
            n[static_cast<std::size_t>(k)] += 1.0;
        }
        for (std::size_t j = 0; j < 3; ++j) {
            if (n[j] > 0.0) c[j] = s[j] / n[j];
        }
    }
    std::sort(c.begin(), c.end());
    return c;
}

Initialisation initialise(const Raster<double>& v) {
    const int w = v.width();
    const int h = v.height();
    const auto centres = intensity_clusters(v);
    const double blood_threshold = 0.5 * (centres[1] + centres[2]);
    const double tissue_threshold = 0.5 * (centres[0] + centres[1]);

    BinaryMask bright(w, h, 0);
    for (std::size_t i = 0; i < v.size(); ++i) bright[i] = v[i] > blood_threshold ? 1 : 0;
    const Components cc = connected_components(bright);

    struct Blob {
        double area = 0, sx = 0, sy = 0;
        std::vector<Pixel> pixels;
    };
    std::vector<Blob> blobs(static_cast<std::size_t>(cc.count));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int id = cc.labels.at(x, y);
            if (id == 0) continue;
            Blob& b = blobs[static_cast<std::size_t>(id - 1)];
            b.area += 1;
            b.sx += x;
            b.sy += y;
            b.pixels.push_back({x, y});
        }
    }
    std::sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) { return a.area > b.area; });
    if (blobs.size() > 4) blobs.resize(4);

    // The LV blood pool is the most disk-like of the large bright blobs.
    int lv = -1;
    double best_circ = -1.0;
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        const Blob& b = blobs[i];
        if (b.area < 30) continue;
        const double cx = b.sx / b.area, cy = b.sy / b.area;
        const double rad = std::sqrt(b.area / std::numbers::pi);
        double inside = 0;
        for (const Pixel& p : b.pixels) inside += std::hypot(p.x - cx, p.y - cy) <= rad ? 1.0 : 0.0;
        const double circ = inside / b.area;
        if (circ > best_circ) {
            best_circ = circ;
            lv = static_cast<int>(i);
        }
    }

    Initialisation init;
    Params& p = init.params;
    if (lv < 0) {
        p = {0.5 * w, 0.5 * h, 0.1 * w, 0.15 * w, 0.35 * w, 0.5 * h, 0.1 * w};
        return init;
    }
    const Blob& lvb = blobs[static_cast<std::size_t>(lv)];
    const Point2 c{lvb.sx / lvb.area, lvb.sy / lvb.area};
    const double r = std::sqrt(lvb.area / std::numbers::pi);

    // Outer radius: median distance at which 24 rays leave the tissue.
    std::vector<double> exits;
    for (int k = 0; k < 24; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 24.0;
        double rho = r;
        for (; rho < r + 40.0; rho += 0.5) {
            const int x = static_cast<int>(std::lround(c.x + rho * std::cos(a)));
            const int y = static_cast<int>(std::lround(c.y + rho * std::sin(a)));
            if (!v.contains(x, y) || v.at(x, y) < tissue_threshold) break;
        }
        exits.push_back(rho);
    }
    std::nth_element(exits.begin(), exits.begin() + 12, exits.end());
    const double R = std::max(r + 2.0, exits[12]);

    p = {c.x, c.y, r, R, c.x - (R + 8.0), c.y, 12.0};

    int rv = -1;
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        if (static_cast<int>(i) != lv && blobs[i].area >= 20) {
            rv = static_cast<int>(i);
            break;
        }
    }
    if (rv < 0) return init;

    const Blob& rvb = blobs[static_cast<std::size_t>(rv)];
    const double phi = std::atan2(rvb.sy / rvb.area - c.y, rvb.sx / rvb.area - c.x);
    double far = R + 1.0;
    double half = 0.1;
    for (const Pixel& px : rvb.pixels) {
        far = std::max(far, std::hypot(px.x - c.x, px.y - c.y));
        double d = std::atan2(px.y - c.y, px.x - c.x) - phi;
        d = std::remainder(d, 2.0 * std::numbers::pi);
        half = std::max(half, std::fabs(d));
    }
    half = std::min(half, 1.5);
    const double offset = (far * far - R * R) / (2.0 * (far - R * std::cos(half)));
    p[4] = c.x + offset * std::cos(phi);
    p[5] = c.y + offset * std::sin(phi);
    p[6] = far - offset;
    init.has_rv = true;
    return init;
}

}  // namespace

ShapeFit fit_shape_model(const ImageGrid& image, std::uint64_t seed, const SegmenterOptions& options) {
    if (options.starts < 1) throw Error(ErrorCode::InvalidArgument, "need at least one start");
    const Raster<double> v = normalize_intensities(image);
    const CostEvaluator cost(v);
    const Initialisation init = initialise(v);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Params jitter = {1.5, 1.5, 1.0, 1.5, 3.0, 3.0, 3.0};
    const double coarse[] = {2.0, 1.0};
    const double fine[] = {0.5, 0.25};

    struct Candidate {
        Params p;
        double c;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<std::size_t>(options.starts));
    for (int s = 0; s < options.starts; ++s) {
        Params p = init.params;
        if (s > 0) {
            const double spread = init.has_rv ? 1.0 : 3.0;
            for (std::size_t i = 0; i < p.size(); ++i) p[i] += spread * jitter[i] * gauss(rng);
            if (!init.has_rv && s % 2 == 1) {
                // Without an RV blob, also try placing the RV on a random side.
                const double a = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
                p[4] = p[0] + (p[3] + 6.0) * std::cos(a);
                p[5] = p[1] + (p[3] + 6.0) * std::sin(a);
            }
        }
        const double c = pattern_search(cost, p, coarse);
        candidates.push_back({p, c});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.c < b.c; });
    const std::size_t refine = std::min<std::size_t>(3, candidates.size());
    for (std::size_t i = 0; i < refine; ++i) candidates[i].c = pattern_search(cost, candidates[i].p, fine);
    const auto best = std::min_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(refine),
                                       [](const Candidate& a, const Candidate& b) { return a.c < b.c; });

    ShapeFit fit;
    fit.model = ShapeModel::from_array(best->p);
    fit.cost = best->c;
    if (!(fit.cost <= options.hard_cap)) {
        throw Error(ErrorCode::NoFit, "best residual " + std::to_string(fit.cost) + " exceeds cap " +
                                          std::to_string(options.hard_cap));
    }

    // Spread per parameter from the central second difference at 1 px.
    for (std::size_t i = 0; i < best->p.size(); ++i) {
        Params plus = best->p;
        Params minus = best->p;
        plus[i] += 1.0;
        minus[i] -= 1.0;
        const double curvature = cost(plus) + cost(minus) - 2.0 * fit.cost;
        double sigma = options.max_sigma;
        if (curvature > 0.0) sigma = options.temperature * std::sqrt(fit.cost / curvature);
        fit.sigma[i] = std::clamp(sigma, options.min_sigma, options.max_sigma);
    }
    return fit;
}

SegmentationSampleSet segment_mc(const ImageGrid& image, int T, std::uint64_t seed, const SegmenterOptions& options) {
    if (T < 1) throw Error(ErrorCode::InvalidArgument, "T must be >= 1");
    const ShapeFit fit = fit_shape_model(image, seed, options);

    SegmentationSampleSet set;
    set.backend = "builtin-mc";
    set.evidence = fit.cost;
    set.samples.reserve(static_cast<std::size_t>(T));

    std::mt19937_64 rng(seed ^ 0xa0761d6478bd642fULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Params base = fit.model.to_array();
    for (int t = 0; t < T; ++t) {
        Params p = base;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += fit.sigma[i] * gauss(rng);
        p[2] = std::max(p[2], 1.0);
        p[3] = std::max(p[3], p[2] + 1.0);
        p[6] = std::max(p[6], 1.0);
        set.samples.push_back(ShapeModel::from_array(p).render(image.width(), image.height()));
    }
    return set;
}

SegmentationSampleSet perturbed_mask_samples(const ImageGrid& image, const LabelMask& mask, int T,
                                             std::uint64_t seed, double flip_probability) {
    if (T < 1) throw Error(ErrorCode::InvalidArgument, "T must be >= 1");
    if (!image.same_shape(mask)) throw Error(ErrorCode::DimensionMismatch, "image and mask differ in size");

    SegmentationSampleSet set;
    set.backend = "perturbed-mask";
    set.evidence = mask_evidence(image, mask);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    for (int t = 0; t < T; ++t) {
        LabelMask sample = mask;
        for (int y = 0; y < mask.height(); ++y) {
            for (int x = 0; x < mask.width(); ++x) {
                Label others[4];
                int n = 0;
                for (int k = 0; k < 4; ++k) {
                    const int nx = x + dx[k], ny = y + dy[k];
                    if (mask.contains(nx, ny) && mask.at(nx, ny) != mask.at(x, y)) others[n++] = mask.at(nx, ny);
                }
                if (n == 0) continue;
                if (unit(rng) < flip_probability) {
                    sample.at(x, y) = others[static_cast<int>(unit(rng) * n) % n];
                }
            }
        }
        set.samples.push_back(std::move(sample));
    }
    return set;
}

std::string encode_samples(const SegmentationSampleSet& set) {
    set.validate();
    nlohmann::json header = {{"width", set.width()},
                             {"height", set.height()},
                             {"T", set.count()},
                             {"evidence", set.evidence},
                             {"backend", set.backend}};
    if (set.has_soft()) header["soft"] = "float32";
    std::string out = header.dump();
    out += '\n';
    for (const auto& s : set.samples) {
        for (Label l : s.values()) out.push_back(static_cast<char>(l));
    }
    for (const auto& planes : set.soft) {
        for (float f : planes) {
            auto raw = std::bit_cast<std::array<char, 4>>(f);
            if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
            out.append(raw.data(), raw.size());
        }
    }
    return out;
}

SegmentationSampleSet decode_samples(std::string_view bytes) {
    const auto newline = bytes.find('\n');
    if (newline == std::string_view::npos) throw Error(ErrorCode::FormatError, "sample stack lacks a header line");
    nlohmann::json header;
    int width = 0, height = 0, T = 0;
    bool soft = false;
    SegmentationSampleSet set;
    try {
        header = nlohmann::json::parse(bytes.substr(0, newline));
        width = header.at("width").get<int>();
        height = header.at("height").get<int>();
        T = header.at("T").get<int>();
        set.evidence = header.at("evidence").get<double>();
        set.backend = header.value("backend", std::string("unknown"));
        if (header.contains("soft")) {
            if (header["soft"] != "float32") throw Error(ErrorCode::FormatError, "soft maps must be float32");
            soft = true;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("sample stack header: ") + e.what());
    }
    if (width < 1 || height < 1 || T < 1) throw Error(ErrorCode::FormatError, "sample stack needs positive sizes and T");

    const std::size_t plane = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::string_view body = bytes.substr(newline + 1);
    const std::size_t labels_bytes = plane * static_cast<std::size_t>(T);
    const std::size_t soft_bytes = soft ? labels_bytes * kNumClasses * 4 : 0;
    if (body.size() != labels_bytes + soft_bytes) {
        throw Error(ErrorCode::DimensionMismatch, "sample stack body holds " + std::to_string(body.size()) +
                                                      " bytes, header implies " +
                                                      std::to_string(labels_bytes + soft_bytes));
    }
    for (int t = 0; t < T; ++t) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(body.data()) + static_cast<std::size_t>(t) * plane;
        set.samples.push_back(label_mask_from_bytes(width, height, std::span<const std::uint8_t>(p, plane)));
    }
    if (soft) {
        const char* p = body.data() + labels_bytes;
        for (int t = 0; t < T; ++t) {
            std::vector<float> planes(plane * kNumClasses);
            for (float& f : planes) {
                std::array<char, 4> raw{};
                std::memcpy(raw.data(), p, 4);
                if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
                f = std::bit_cast<float>(raw);
                p += 4;
            }
            set.soft.push_back(std::move(planes));
        }
    }
    set.validate();
    return set;
}

void write_samples(const std::filesystem::path& path, const SegmentationSampleSet& set) {
    write_text_file(path, encode_samples(set));
}

SegmentationSampleSet load_samples(const std::filesystem::path& path) { return decode_samples(read_text_file(path)); }

}  // namespace t1forge
