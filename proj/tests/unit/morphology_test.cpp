#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "t1forge/error.hpp"
#include "t1forge/morphology.hpp"
#include "t1forge/phantom.hpp"

using namespace t1forge;

namespace {

BinaryMask filled_square(int grid, int x0, int side) {
    BinaryMask m(grid, grid, 0);
    for (int y = x0; y < x0 + side; ++y)
        for (int x = x0; x < x0 + side; ++x) m.at(x, y) = 1;
    return m;
}

}  // namespace

TEST(Erode, NineByNineSquareShrinksToSevenBySeven) {
    const BinaryMask sq = filled_square(15, 3, 9);
    const BinaryMask e = erode(sq);
    EXPECT_EQ(area(e), 49u);
    EXPECT_EQ(e, oracle::erode_square3(sq));
    EXPECT_EQ(e, filled_square(15, 4, 7));
}

TEST(Erode, SinglePixelVanishes) {
    BinaryMask m(5, 5, 0);
    m.at(2, 2) = 1;
    EXPECT_EQ(area(erode(m)), 0u);
}

TEST(Erode, EmptyStaysEmpty) { EXPECT_EQ(area(erode(BinaryMask(6, 4, 0))), 0u); }

TEST(Erode, ImageBorderCountsAsBackground) {
    const BinaryMask full(5, 5, 1);
    const BinaryMask e = erode(full);
    EXPECT_EQ(area(e), 9u);
    EXPECT_EQ(e.at(0, 0), 0);
    EXPECT_EQ(e.at(2, 2), 1);
}

TEST(Erode, MatchesBruteForceOnRandomMasks) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 300; ++k) {
        const BinaryMask m = oracle::random_binary(rng, 20, 17, 0.75);
        ASSERT_EQ(erode(m), oracle::erode_square3(m)) << "case " << k;
    }
}

TEST(ErodeProperty, AntiExtensiveForSeveralElements) {
    std::mt19937_64 rng(12);
    const StructuringElement elements[] = {StructuringElement{}, StructuringElement::square(5),
                                           StructuringElement::cross()};
    for (int k = 0; k < 300; ++k) {
        const BinaryMask m = oracle::random_binary(rng, 24, 24, 0.7);
        for (const auto& se : elements) ASSERT_TRUE(is_subset(erode(m, se), m));
    }
}

TEST(ErodeProperty, Monotone) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 300; ++k) {
        const BinaryMask b = oracle::random_binary(rng, 24, 24, 0.8);
        BinaryMask a = b;
        std::bernoulli_distribution drop(0.2);
        for (auto& v : a.values()) v = v && !drop(rng);
        ASSERT_TRUE(is_subset(erode(a), erode(b)));
        ASSERT_TRUE(is_subset(erode(a, StructuringElement::cross()), erode(b, StructuringElement::cross())));
    }
}

TEST(StructuringElement, AnchorMustBeInsideAndFootprintNonEmpty) {
    EXPECT_THROW(StructuringElement(3, 3, std::vector<std::uint8_t>(9, 1), 3, 1), Error);
    EXPECT_THROW(StructuringElement(2, 2, std::vector<std::uint8_t>(4, 0), 0, 0), Error);
    EXPECT_EQ(StructuringElement{}.offsets().size(), 9u);
    EXPECT_EQ(StructuringElement::cross().offsets().size(), 5u);
}

TEST(ErodeToFraction, ThirdOfNineByNineTakesTwoErosions) {
    const BinaryMask sq = filled_square(15, 3, 9);
    const BinaryMask oracle_two = oracle::erode_square3(oracle::erode_square3(sq));
    const BinaryMask e = erode_to_fraction(sq, 1.0 / 3.0);
    EXPECT_EQ(area(e), 25u);
    EXPECT_EQ(e, oracle_two);
}

TEST(ErodeToFraction, FractionOneIsIdentity) {
    std::mt19937_64 rng(14);
    const BinaryMask m = oracle::random_binary(rng, 16, 16, 0.6);
    EXPECT_EQ(erode_to_fraction(m, 1.0), m);
}

TEST(ErodeToFraction, SinglePixelBecomesEmpty) {
    BinaryMask m(5, 5, 0);
    m.at(1, 3) = 1;
    EXPECT_EQ(area(erode_to_fraction(m, 1.0 / 3.0)), 0u);
}

TEST(ErodeToFraction, EmptyInputIsAnError) {
    try {
        erode_to_fraction(BinaryMask(4, 4, 0), 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
    EXPECT_THROW(erode_to_fraction(BinaryMask(4, 4, 1), 0.0), Error);
    EXPECT_THROW(erode_to_fraction(BinaryMask(4, 4, 1), 1.5), Error);
}

TEST(ErodeToFractionProperty, AreaBoundAndFirstMaskMeetingIt) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    for (int k = 0; k < 200; ++k) {
        BinaryMask m = oracle::random_binary(rng, 20, 20, 0.9);
        if (area(m) == 0) continue;
        const double f = frac(rng);
        const BinaryMask out = erode_to_fraction(m, f);
        const double bound = f * static_cast<double>(area(m));
        if (area(out) > 0) ASSERT_LE(static_cast<double>(area(out)), std::ceil(bound));
        // Walk the oracle chain to the first mask meeting the bound.
        BinaryMask cur = m;
        while (static_cast<double>(area(cur)) > bound) cur = oracle::erode_square3(cur);
        ASSERT_EQ(out, cur);
    }
}

TEST(HitOrMiss, TwoByTwoExample) {
    const std::vector<std::uint8_t> bytes{0, 2, 3, 2};
    const LabelMask m = label_mask_from_bytes(2, 2, bytes);
    const auto j = hit_or_miss_junctions(m, {Label::Background, Label::LVMyocardium, Label::RVBloodPool});
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0], (Pixel{0, 0}));
}

TEST(HitOrMiss, UniformMaskHasNoJunctions) {
    const LabelMask m(10, 10, Label::LVMyocardium);
    EXPECT_TRUE(hit_or_miss_junctions(m, {Label::Background, Label::LVMyocardium, Label::RVBloodPool}).empty());
}

TEST(HitOrMiss, PhantomJunctionsLieNearTrueInsertionPoints) {
    const PhantomTruth t = generate_phantom(default_phantom_spec());
    const auto j = hit_or_miss_junctions(t.mask, {Label::Background, Label::LVMyocardium, Label::RVBloodPool});
    ASSERT_FALSE(j.empty());
    for (const Pixel& p : j) {
        // Window centre is half a pixel right and down of its anchor.
        const Point2 c{p.x + 0.5, p.y + 0.5};
        EXPECT_LE(std::min(distance(c, t.rv1), distance(c, t.rv2)), 2.0) << p.x << "," << p.y;
    }
}

TEST(HitOrMissProperty, MatchesExhaustiveWindowScan) {
    std::mt19937_64 rng(16);
    const std::vector<std::vector<Label>> required_sets{
        {Label::Background, Label::LVMyocardium, Label::RVBloodPool},
        {Label::LVBloodPool, Label::LVMyocardium},
        {Label::Background, Label::LVBloodPool, Label::LVMyocardium, Label::RVBloodPool},
    };
    const LabelSet sets[] = {
        {Label::Background, Label::LVMyocardium, Label::RVBloodPool},
        {Label::LVBloodPool, Label::LVMyocardium},
        {Label::Background, Label::LVBloodPool, Label::LVMyocardium, Label::RVBloodPool},
    };
    for (int k = 0; k < 1200; ++k) {
        const LabelMask m = oracle::random_labels(rng, 32, 32);
        const auto idx = static_cast<std::size_t>(k) % required_sets.size();
        const auto& req = required_sets[idx];
        const LabelSet set = sets[idx];
        ASSERT_EQ(hit_or_miss_junctions(m, set), oracle::junctions(m, req)) << "case " << k;
    }
}

TEST(ConnectedComponents, EmptyMaskHasNone) {
    const Components c = connected_components(BinaryMask(8, 8, 0));
    EXPECT_EQ(c.count, 0);
}

TEST(ConnectedComponents, DiagonalNeighboursAreSeparate) {
    BinaryMask m(2, 2, 0);
    m.at(0, 0) = 1;
    m.at(1, 1) = 1;
    const Components c = connected_components(m);
    EXPECT_EQ(c.count, 2);
    EXPECT_EQ(c.labels.at(0, 0), 1);
    EXPECT_EQ(c.labels.at(1, 1), 2);
}

TEST(ConnectedComponents, MatchesUnionFindOnRandomMasks) {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 500; ++k) {
        const BinaryMask m = oracle::random_binary(rng, 16, 16, 0.45);
        const Components c = connected_components(m);
        ASSERT_EQ(c.count, oracle::component_count(m));
        // Labels appear in first-encounter row-major order.
        int next = 1;
        for (int v : c.labels.values()) {
            if (v == 0) continue;
            ASSERT_LE(v, next);
            if (v == next) ++next;
        }
    }
}
