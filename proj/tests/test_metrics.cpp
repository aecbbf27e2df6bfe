#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dropmeter/metrics.hpp"
#include "oracles.hpp"

namespace dropmeter {
namespace {

DropletPhysical drop(double diameter_um) {
    return {0, std::numbers::pi * diameter_um * diameter_um / 4.0, diameter_um, diameter_um};
}

CardGeometry standard_card(std::int64_t w = 760, std::int64_t h = 260) { return {76000, 26000, w, h}; }

TEST(PxToUm, StandardCardAt600Dpi) {
    // 1,795 x 614 px is the 76 x 26 mm card scanned at 600 dpi.
    EXPECT_NEAR(px_to_um_ratio({76000, 26000, 1795, 614}), 42.33983286908078, 1e-12);
}

TEST(PxToUm, UnitRatio) { EXPECT_DOUBLE_EQ(px_to_um_ratio({500, 250, 500, 250}), 1.0); }

TEST(PxToUm, TransposedImageIsDistorted) {
    EXPECT_THROW(px_to_um_ratio({26000, 76000, 760, 260}), DistortionError);
}

TEST(PxToUm, AspectToleranceIsTwoPercent) {
    EXPECT_NO_THROW(px_to_um_ratio({1000, 1000, 1000, 981}));
    EXPECT_THROW(px_to_um_ratio({1000, 1000, 1000, 975}), DistortionError);
    EXPECT_THROW(px_to_um_ratio({0, 1000, 1000, 1000}), ParameterError);
}

TEST(DiameterFromArea, Values) {
    EXPECT_NEAR(diameter_from_area(std::numbers::pi, 1.0), 2.0, 1e-15);
    EXPECT_NEAR(diameter_from_area(100, 1.0), 11.283791670955126, 1e-12);
    EXPECT_NEAR(diameter_from_area(100, 42.34), 477.75573934824002, 1e-9);
}

TEST(DiameterFromArea, MonotoneAndHomogeneous) {
    for (double a = 1; a < 500; a += 7) {
        EXPECT_LT(diameter_from_area(a, 3.0), diameter_from_area(a + 1, 3.0));
        EXPECT_NEAR(diameter_from_area(a, 6.5), 6.5 * diameter_from_area(a, 1.0), 1e-9);
    }
}

TEST(CorrectDiameter, Values) {
    EXPECT_DOUBLE_EQ(correct_diameter(1.0), 0.2192733);
    EXPECT_DOUBLE_EQ(correct_diameter(123.4, {1.0, 1.0}), 123.4);
    // Reference from 40-digit arithmetic.
    EXPECT_NEAR(correct_diameter(1000.0), 1058.7873714279585821, 1e-9);
    EXPECT_NEAR(correct_diameter(500.0), 452.02419220984463209, 1e-9);
}

TEST(CorrectDiameter, StrictlyIncreasing) {
    double prev = 0;
    for (double d = 1; d < 5000; d *= 1.1) {
        const double c = correct_diameter(d);
        EXPECT_GT(c, prev);
        prev = c;
    }
}

TEST(Summarize, SingleDrop) {
    const std::vector<DropletPhysical> drops{drop(450)};
    const auto s = summarize(drops, standard_card(), BinaryMask::Constant(260, 760, false));
    EXPECT_EQ(s.drop_count, 1);
    EXPECT_DOUBLE_EQ(*s.vmd_um, 450);
    EXPECT_DOUBLE_EQ(*s.relative_span, 0);
}

TEST(Summarize, TwoDrops) {
    const std::vector<DropletPhysical> drops{drop(200), drop(100)};
    const auto s = summarize(drops, standard_card(), BinaryMask::Constant(260, 760, false));
    EXPECT_DOUBLE_EQ(*s.dv01_um, 100);
    EXPECT_DOUBLE_EQ(*s.vmd_um, 200);
    EXPECT_DOUBLE_EQ(*s.dv09_um, 200);
    EXPECT_DOUBLE_EQ(*s.relative_span, 0.5);
    EXPECT_DOUBLE_EQ(s.density_per_cm2, 2.0 / (7.6 * 2.6));
    EXPECT_DOUBLE_EQ(*s.mean_diameter_um, 150);
}

TEST(Summarize, EmptyDropListKeepsCoverage) {
    BinaryMask m = BinaryMask::Constant(10, 10, false);
    m.block(0, 0, 5, 5).setConstant(true);
    const auto s = summarize({}, {1000, 1000, 10, 10}, m);
    EXPECT_EQ(s.drop_count, 0);
    EXPECT_DOUBLE_EQ(s.coverage_pct, 25.0);
    EXPECT_FALSE(s.vmd_um);
    EXPECT_FALSE(s.relative_span);
    EXPECT_FALSE(s.mean_area_um2);
}

TEST(Summarize, PercentilesMatchOracleAndScale) {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> size(1, 200);
    std::lognormal_distribution<double> diam(5.5, 0.7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> ds(size(rng));
        for (auto& d : ds) d = diam(rng);
        for (double p : {0.1, 0.5, 0.9}) EXPECT_NEAR(*volume_percentile(ds, p), oracle::volume_percentile(ds, p), 1e-9);

        std::vector<DropletPhysical> drops;
        for (double d : ds) drops.push_back(drop(d));
        const auto s = summarize(drops, standard_card(), BinaryMask::Constant(2, 2, false));
        EXPECT_LE(*s.dv01_um, *s.vmd_um);
        EXPECT_LE(*s.vmd_um, *s.dv09_um);

        std::vector<DropletPhysical> scaled;
        for (double d : ds) scaled.push_back(drop(3.5 * d));
        const auto t = summarize(scaled, standard_card(), BinaryMask::Constant(2, 2, false));
        EXPECT_NEAR(*t.vmd_um, 3.5 * *s.vmd_um, 1e-9 * *t.vmd_um);
        EXPECT_NEAR(*t.relative_span, *s.relative_span, 1e-9);
    }
}

TEST(CoverageWarning, Thresholds) {
    EXPECT_EQ(coverage_warning(4.54).level, WarningLevel::none);
    EXPECT_EQ(coverage_warning(20.0).level, WarningLevel::none);
    EXPECT_EQ(coverage_warning(20.01).level, WarningLevel::questionable);
    EXPECT_EQ(coverage_warning(25.0).level, WarningLevel::questionable);
    EXPECT_EQ(coverage_warning(70.0).level, WarningLevel::questionable);
    EXPECT_EQ(coverage_warning(70.01).level, WarningLevel::unfeasible);
    EXPECT_EQ(coverage_warning(75.0).level, WarningLevel::unfeasible);
    EXPECT_THROW(coverage_warning(-1), ParameterError);
    EXPECT_THROW(coverage_warning(100.5), ParameterError);
}

TEST(MinPixels, TableCells) {
    EXPECT_EQ(min_pixels_for_diameter(50, 600), 1);
    EXPECT_EQ(min_pixels_for_diameter(10000, 2600), 1024);
    EXPECT_FALSE(min_pixels_for_diameter(10, 1200));
    EXPECT_EQ(min_pixels_for_diameter(10, 2600), 1);
    EXPECT_THROW(min_pixels_for_diameter(0, 600), ParameterError);
}

TEST(MinPixels, MonotoneOverRepresentableCells) {
    const auto t = standard_dpi_table();
    for (std::size_t i = 0; i < t.cells.size(); ++i)
        for (std::size_t j = 0; j < t.cells[i].size(); ++j) {
            if (!t.cells[i][j]) continue;
            if (j + 1 < t.cells[i].size()) {
                ASSERT_TRUE(t.cells[i][j + 1]);
                EXPECT_LE(*t.cells[i][j], *t.cells[i][j + 1]);
            }
            if (i + 1 < t.cells.size()) {
                ASSERT_TRUE(t.cells[i + 1][j]);
                EXPECT_LE(*t.cells[i][j], *t.cells[i + 1][j]);
            }
        }
}

}  // namespace
}  // namespace dropmeter
