#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dropmeter/fractal.hpp"
#include "dropmeter/synthcard.hpp"
#include "oracles.hpp"

namespace dropmeter {
namespace {

TEST(BoxCount, Basics) {
    EXPECT_EQ(box_count(BinaryMask::Constant(64, 64, true), 32), 4);
    EXPECT_EQ(box_count(BinaryMask::Constant(64, 64, false), 4), 0);
    BinaryMask one = BinaryMask::Constant(64, 64, false);
    one(37, 11) = true;
    for (std::int64_t s : {1, 2, 8, 64, 100}) EXPECT_EQ(box_count(one, s), 1);
    EXPECT_THROW(box_count(one, 0), ParameterError);
}

TEST(BoxCount, PartialEdgeBoxesCount) {
    BinaryMask m = BinaryMask::Constant(5, 5, false);
    m(4, 4) = true;
    m(0, 0) = true;
    EXPECT_EQ(box_count(m, 4), 2);
}

TEST(BoxCount, SeriesInvariants) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = oracle::random_blobs(rng, 100, 150, 10, 9.0);
        const auto series = box_count_series(m);
        ASSERT_FALSE(series.empty());
        EXPECT_EQ(series.front().size, 1);
        EXPECT_EQ(series.front().count, m.count());
        EXPECT_EQ(series.back().size, padded_extent(m) / 4);
        for (std::size_t i = 1; i < series.size(); ++i) {
            EXPECT_EQ(series[i].size, 2 * series[i - 1].size);
            EXPECT_LE(series[i].count, series[i - 1].count);
            const std::int64_t cells = (padded_extent(m) + series[i].size - 1) / series[i].size;
            EXPECT_LE(series[i].count, cells * cells);
        }
    }
}

TEST(FractalDimension, FilledSquare) {
    const auto est = fractal_dimension(BinaryMask::Constant(256, 256, true));
    EXPECT_NEAR(est.dimension, 2.0, 0.05);
    EXPECT_NEAR(est.r_squared, 1.0, 1e-9);
}

TEST(FractalDimension, SinglePixel) {
    BinaryMask m = BinaryMask::Constant(256, 256, false);
    m(100, 100) = true;
    EXPECT_NEAR(fractal_dimension(m).dimension, 0.0, 0.05);
}

TEST(FractalDimension, HorizontalLine) {
    BinaryMask m = BinaryMask::Constant(256, 256, false);
    m.row(128).setConstant(true);
    // Analytic counts N(sigma) = 256 / sigma give a slope of exactly -1.
    const auto est = fractal_dimension(m);
    EXPECT_NEAR(est.dimension, 1.0, 0.1);
    EXPECT_NEAR(est.slope, -1.0, 1e-9);
}

TEST(FractalDimension, EmptyMaskIsUndefined) {
    EXPECT_THROW(fractal_dimension(BinaryMask::Constant(16, 16, false)), UndefinedDimensionError);
}

TEST(FractalDimension, TinyImagesStillRegress) {
    BinaryMask m = BinaryMask::Constant(3, 3, true);
    const auto est = fractal_dimension(m);
    EXPECT_GE(est.dimension, 0.0);
    EXPECT_LE(est.dimension, 2.0);
}

TEST(FractalDimension, TranslationJitterIsSmall) {
    // Card-scale content; compact blobs covering only a few of the largest boxes jitter more.
    for (int drops : {60, 150}) {
        SyntheticCardSpec spec;
        spec.dpi = 300;
        spec.overlap_policy = OverlapPolicy::allow;
        spec.seed = 3;
        for (int i = 0; i < drops; ++i) spec.disks.push_back({400, {}, {}});
        const BinaryMask content = binarize(to_grayscale(generate_card(spec).image));
        auto shifted = [&](long dy, long dx) {
            BinaryMask m = BinaryMask::Constant(content.rows() + 64, content.cols() + 64, false);
            m.block(dy, dx, content.rows(), content.cols()) = content;
            return fractal_dimension(m).dimension;
        };
        const double d0 = shifted(0, 0);
        for (long dy = 0; dy <= 64; dy += 16)
            for (long dx = 0; dx <= 64; dx += 16) EXPECT_NEAR(shifted(dy, dx), d0, 0.05) << dy << "," << dx;
    }
}

}  // namespace
}  // namespace dropmeter
