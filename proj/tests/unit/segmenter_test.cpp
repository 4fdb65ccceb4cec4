#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/helpers.hpp"
#include "t1forge/error.hpp"
#include "t1forge/morphology.hpp"
#include "t1forge/phantom.hpp"
#include "t1forge/segmenter.hpp"
#include "t1forge/uncertainty.hpp"

using namespace t1forge;
using testing_helpers::dice_of;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Segmenter, NoiseFreeDefaultPhantomMeanMaskMatchesTruth) {
    const PhantomTruth t = generate_phantom(default_phantom_spec());
    const SegmentationSampleSet s = segment_mc(t.image, 100, 1);
    EXPECT_EQ(s.count(), 100u);
    EXPECT_EQ(s.backend, "builtin-mc");
    const LabelMask m = final_mask(mean_probability(s));
    EXPECT_GE(dice_of(m, t.mask, Label::LVMyocardium), 0.90);
    EXPECT_GE(dice_of(m, t.mask, Label::LVBloodPool), 0.93);
    EXPECT_GE(dice_of(m, t.mask, Label::RVBloodPool), 0.90);
}

TEST(Segmenter, ConstantImageIsDegenerate) {
    EXPECT_EQ(code_of([] { segment_mc(ImageGrid(64, 64, 900.0), 10, 0); }), ErrorCode::DegenerateImage);
}

TEST(Segmenter, InvalidSampleCount) {
    const PhantomTruth t = generate_phantom(default_phantom_spec());
    EXPECT_THROW(segment_mc(t.image, 0, 0), Error);
}

TEST(Segmenter, DeterministicGivenSeed) {
    PhantomSpec spec = randomized_phantom_spec(8, 30.0);
    const PhantomTruth t = generate_phantom(spec);
    const SegmentationSampleSet a = segment_mc(t.image, 20, 42);
    const SegmentationSampleSet b = segment_mc(t.image, 20, 42);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_EQ(a.evidence, b.evidence);
}

TEST(Segmenter, NormalizedIntensitiesSpanUnitInterval) {
    const PhantomTruth t = generate_phantom(randomized_phantom_spec(2, 30.0));
    const auto n = normalize_intensities(t.image);
    const auto [lo, hi] = std::minmax_element(n.values().begin(), n.values().end());
    EXPECT_EQ(*lo, 0.0);
    EXPECT_EQ(*hi, 1.0);
}

TEST(Segmenter, WrongPlaneInputsFailOrScoreWorse) {
    const PhantomTruth t = generate_phantom(randomized_phantom_spec(3, 30.0));
    const CorruptedPhantom c = corrupt(t, CorruptionMode::WrongPlane, 1.0, 3);
    const double clean = segment_mc(t.image, 1, 3).evidence;
    try {
        EXPECT_GT(segment_mc(c.image, 1, 3).evidence, clean);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoFit);
    }
}

TEST(SegmenterProperty, CleanEvidenceBelowWrongPlaneEvidence) {
    int wins = 0;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> sev(0.5, 1.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const PhantomTruth t = generate_phantom(randomized_phantom_spec(1000 + seed, 30.0));
        const CorruptedPhantom c = corrupt(t, CorruptionMode::WrongPlane, sev(rng), seed);
        const double clean = segment_mc(t.image, 1, seed).evidence;
        double corrupted = INFINITY;
        try {
            corrupted = segment_mc(c.image, 1, seed).evidence;
        } catch (const Error& e) {
            ASSERT_TRUE(e.code() == ErrorCode::NoFit || e.code() == ErrorCode::DegenerateImage);
        }
        wins += clean < corrupted;
    }
    EXPECT_GE(wins, 95);
}

TEST(SegmenterProperty, DisagreementConcentratesOnTrueBoundaries) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PhantomTruth t = generate_phantom(randomized_phantom_spec(2000 + seed, 30.0));
        const SegmentationSampleSet s = segment_mc(t.image, 50, seed);
        const UncertaintyMap u = uncertainty_map(mean_probability(s), s);
        // Pixels within 2 px of a label change in the truth.
        BinaryMask near(t.mask.width(), t.mask.height(), 0);
        for (int y = 0; y < t.mask.height(); ++y)
            for (int x = 0; x < t.mask.width(); ++x)
                for (int dy = -2; dy <= 2 && !near.at(x, y); ++dy)
                    for (int dx = -2; dx <= 2; ++dx) {
                        const int xx = x + dx, yy = y + dy;
                        if (t.mask.contains(xx, yy) && t.mask.at(xx, yy) != t.mask.at(x, y)) {
                            near.at(x, y) = 1;
                            break;
                        }
                    }
        double in = 0, out = 0;
        std::size_t n_in = 0, n_out = 0;
        for (std::size_t i = 0; i < near.values().size(); ++i) {
            if (near.values()[i]) {
                in += u.values()[i];
                ++n_in;
            } else {
                out += u.values()[i];
                ++n_out;
            }
        }
        EXPECT_GT(in / static_cast<double>(n_in), out / static_cast<double>(n_out)) << seed;
    }
}

TEST(PerturbedMask, SamplesStayNearTheGivenMask) {
    const PhantomTruth t = generate_phantom(randomized_phantom_spec(5, 30.0));
    const SegmentationSampleSet s = perturbed_mask_samples(t.image, t.mask, 30, 5);
    EXPECT_EQ(s.backend, "perturbed-mask");
    EXPECT_DOUBLE_EQ(s.evidence, mask_evidence(t.image, t.mask));
    for (const auto& m : s.samples) EXPECT_GT(dice_of(m, t.mask, Label::LVMyocardium), 0.8);
    EXPECT_EQ(final_mask(mean_probability(s)).width(), t.mask.width());
}

TEST(SampleStack, RoundTripsBitExactly) {
    const PhantomTruth t = generate_phantom(randomized_phantom_spec(6, 30.0));
    SegmentationSampleSet s = segment_mc(t.image, 5, 6);
    EXPECT_EQ(decode_samples(encode_samples(s)).samples, s.samples);
    const auto back = decode_samples(encode_samples(s));
    EXPECT_EQ(back.evidence, s.evidence);
    EXPECT_EQ(back.backend, s.backend);
    EXPECT_FALSE(back.has_soft());

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    s.soft.assign(s.count(), std::vector<float>(4 * t.mask.values().size()));
    for (auto& plane : s.soft)
        for (auto& v : plane) v = u(rng);
    const auto soft_back = decode_samples(encode_samples(s));
    EXPECT_EQ(soft_back.soft, s.soft);

    const auto path = std::filesystem::temp_directory_path() / "t1forge_stack_test.stk";
    write_samples(path, s);
    EXPECT_EQ(load_samples(path).samples, s.samples);
    std::filesystem::remove(path);
}

TEST(SampleStack, MismatchedSamplesRejected) {
    SegmentationSampleSet s;
    s.samples = {LabelMask(4, 4), LabelMask(5, 4)};
    EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([&] { encode_samples(s); }), ErrorCode::DimensionMismatch);
}

TEST(SampleStack, MalformedBytesRejected) {
    SegmentationSampleSet s;
    s.samples = {LabelMask(4, 4), LabelMask(4, 4)};
    s.backend = "external";
    std::string bytes = encode_samples(s);
    EXPECT_EQ(code_of([&] { decode_samples(bytes.substr(0, bytes.size() - 1)); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([&] { decode_samples("{\"width\":4}\n"); }), ErrorCode::FormatError);
    bytes.back() = 9;
    EXPECT_EQ(code_of([&] { decode_samples(bytes); }), ErrorCode::FormatError);
}

TEST(SampleStack, SingleSampleGivesZeroUncertainty) {
    const PhantomTruth t = generate_phantom(default_phantom_spec());
    SegmentationSampleSet s;
    s.samples = {t.mask};
    s.backend = "external";
    const SegmentationSampleSet back = decode_samples(encode_samples(s));
    ASSERT_EQ(back.count(), 1u);
    const UncertaintyMap u = uncertainty_map(mean_probability(back), back);
    for (double v : u.values()) ASSERT_EQ(v, 0.0);
}
