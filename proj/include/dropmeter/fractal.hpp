#pragma once

#include <cstdint>
#include <vector>

#include "dropmeter/raster.hpp"

namespace dropmeter {

struct BoxCount {
    std::int64_t size = 0;   // box edge in pixels
    std::int64_t count = 0;  // occupied boxes

    bool operator==(const BoxCount&) const = default;
};

using BoxCountSeries = std::vector<BoxCount>;

struct FractalEstimate {
    double dimension = 0.0;  // clamped to [0,2]
    double slope = 0.0;      // of log N against log sigma
    double r_squared = 0.0;

    bool operator==(const FractalEstimate&) const = default;
};

/// Number of sigma x sigma cells (grid anchored at the origin, partial edge cells included)
/// holding at least one foreground pixel.
std::int64_t box_count(const BinaryMask& mask, std::int64_t sigma);

/// Side of the square the mask is padded to: the next power of two, at least 8.
std::int64_t padded_extent(const BinaryMask& mask);

/// Counts for sigma = 1, 2, 4, ..., M/4.
BoxCountSeries box_count_series(const BinaryMask& mask);

/// Box-counting dimension: minus the least-squares slope of log N(sigma) on log sigma.
/// Throws UndefinedDimensionError for an empty mask.
FractalEstimate fractal_dimension(const BinaryMask& mask);

}  // namespace dropmeter
