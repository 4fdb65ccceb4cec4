#include <gtest/gtest.h>

#include <cmath>

#include "t1forge/error.hpp"
#include "t1forge/image.hpp"

using namespace t1forge;

TEST(ImageGrid, StoresRowMajorValues) {
    ImageGrid g(3, 2, std::vector<double>{0, 1, 2, 3, 4, 5}, 0.9, 0.8);
    EXPECT_EQ(g.width(), 3);
    EXPECT_EQ(g.height(), 2);
    EXPECT_DOUBLE_EQ(g.at(2, 1), 5.0);
    EXPECT_DOUBLE_EQ(g.at(0, 1), 3.0);
    EXPECT_DOUBLE_EQ(g.spacing_x(), 0.9);
    EXPECT_DOUBLE_EQ(g.spacing_y(), 0.8);
}

TEST(ImageGrid, RejectsInvalidShapes) {
    EXPECT_THROW(ImageGrid(0, 3), Error);
    EXPECT_THROW(ImageGrid(2, 2, 0.0, -1.0, 1.0), Error);
    EXPECT_THROW(ImageGrid(2, 2, std::vector<double>{1, 2, 3}), Error);
}

TEST(ImageGrid, ValidateFlagsNonFiniteValues) {
    ImageGrid g(2, 2, 1.0);
    EXPECT_NO_THROW(g.validate());
    g.at(1, 1) = std::nan("");
    try {
        g.validate();
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}

TEST(LabelMask, RejectsBytesOutsideTheClassSet) {
    const std::vector<std::uint8_t> ok{0, 1, 2, 3};
    const LabelMask m = label_mask_from_bytes(2, 2, ok);
    EXPECT_EQ(m.at(1, 1), Label::RVBloodPool);
    const std::vector<std::uint8_t> bad{0, 1, 4, 3};
    EXPECT_THROW(label_mask_from_bytes(2, 2, bad), Error);
}

TEST(LabelMask, SelectAreaAndCentroid) {
    LabelMask m(5, 5, Label::Background);
    m.at(1, 1) = Label::LVMyocardium;
    m.at(3, 3) = Label::LVMyocardium;
    m.at(2, 2) = Label::LVBloodPool;
    const BinaryMask myo = select(m, Label::LVMyocardium);
    EXPECT_EQ(area(myo), 2u);
    const Point2 c = centroid(myo);
    EXPECT_DOUBLE_EQ(c.x, 2.0);
    EXPECT_DOUBLE_EQ(c.y, 2.0);
    const Label lv[] = {Label::LVBloodPool, Label::LVMyocardium};
    EXPECT_EQ(area(select_any(m, lv)), 3u);
    EXPECT_TRUE(is_subset(myo, select_any(m, lv)));
    EXPECT_FALSE(is_subset(select_any(m, lv), myo));
}

TEST(LabelMask, CentroidOfEmptyMaskThrows) {
    try {
        centroid(BinaryMask(3, 3, 0));
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
}

TEST(BinaryMask, AndOrRequireMatchingShapes) {
    BinaryMask a(2, 1, std::vector<std::uint8_t>{1, 0});
    BinaryMask b(2, 1, std::vector<std::uint8_t>{1, 1});
    EXPECT_EQ(area(mask_and(a, b)), 1u);
    EXPECT_EQ(area(mask_or(a, b)), 2u);
    EXPECT_THROW(mask_and(a, BinaryMask(1, 2, 0)), Error);
}
