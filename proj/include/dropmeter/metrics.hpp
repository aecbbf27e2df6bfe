#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dropmeter/raster.hpp"

namespace dropmeter {

inline constexpr double kMicrometersPerInch = 25400.0;
inline constexpr double kMaxAspectMismatch = 0.02;

/// Physical card size and the pixel size of its (pre-cropped) image.
struct CardGeometry {
    double card_width_um = 76000.0;
    double card_height_um = 26000.0;
    std::int64_t image_width_px = 0;
    std::int64_t image_height_px = 0;

    double card_area_cm2() const { return card_width_um * card_height_um * 1e-8; }
    bool operator==(const CardGeometry&) const = default;
};

/// diameter' = a * diameter^b. Defaults are the smartphone-rig calibration.
struct CorrectionParams {
    double a = 0.2192733;
    double b = 1.227941;

    bool operator==(const CorrectionParams&) const = default;
};

struct DropletPhysical {
    std::int32_t segment_id = 0;
    double area_um2 = 0.0;
    double diameter_um = 0.0;
    double corrected_diameter_um = 0.0;

    bool operator==(const DropletPhysical&) const = default;
};

/// Card-level statistics. Percentile fields are empty when there are no drops.
struct SummaryStats {
    std::int64_t drop_count = 0;
    double density_per_cm2 = 0.0;
    double coverage_pct = 0.0;
    std::optional<double> vmd_um;
    std::optional<double> dv01_um;
    std::optional<double> dv09_um;
    std::optional<double> relative_span;
    std::optional<double> mean_area_um2;
    std::optional<double> mean_diameter_um;

    bool operator==(const SummaryStats&) const = default;
};

enum class WarningLevel { none, questionable, unfeasible };

struct CoverageWarning {
    WarningLevel level = WarningLevel::none;
    double coverage_pct = 0.0;

    bool operator==(const CoverageWarning&) const = default;
};

std::string to_string(WarningLevel level);
WarningLevel warning_level_from_string(const std::string& s);

/// Micrometers per pixel along the card width. Throws DistortionError when the card and
/// image aspect ratios differ by more than 2%.
double px_to_um_ratio(const CardGeometry& geom);

/// Equivalent-circle diameter 2 sqrt(area/pi) scaled to micrometers.
double diameter_from_area(double area_px, double um_per_px);

double correct_diameter(double diameter_um, const CorrectionParams& params = {});

/// Volume-weighted percentile: the smallest diameter whose cumulative d^3 share reaches p.
/// Returns nullopt for an empty list.
std::optional<double> volume_percentile(std::span<const double> diameters_um, double p);

SummaryStats summarize(std::span<const DropletPhysical> drops, const CardGeometry& geom,
                       const BinaryMask& mask);

/// none <= 20% < questionable <= 70% < unfeasible.
CoverageWarning coverage_warning(double coverage_pct);

/// Pixels needed to span `diameter_um` at `dpi`, or nullopt when it is below one pixel.
std::optional<std::int64_t> min_pixels_for_diameter(double diameter_um, double dpi);

struct DpiTable {
    std::vector<double> diameters_um;
    std::vector<double> dpis;
    std::vector<std::vector<std::optional<std::int64_t>>> cells;  // [diameter][dpi]
};

/// Rows and columns of the standard resolution guide.
DpiTable standard_dpi_table();
DpiTable dpi_table(std::vector<double> diameters_um, std::vector<double> dpis);
std::string format_dpi_table(const DpiTable& table);

}  // namespace dropmeter
