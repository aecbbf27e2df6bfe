#pragma once

#include "json.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dropmeter/fractal.hpp"
#include "dropmeter/metrics.hpp"
#include "dropmeter/raster.hpp"
#include "dropmeter/segmentation.hpp"

namespace dropmeter {

inline constexpr const char* kVersion = DROPMETER_VERSION;

struct AnalysisParams {
    double bin_threshold = kDefaultBinThreshold;
    double marker_threshold = kDefaultMarkerThreshold;
    CorrectionParams correction;
    Normalization normalization = Normalization::per_component;
    bool include_fractal = true;

    bool operator==(const AnalysisParams&) const = default;
};

struct DropRecord {
    DropletSegment segment;
    DropletPhysical physical;

    bool operator==(const DropRecord&) const = default;
};

struct Provenance {
    std::string input;
    std::string timestamp;  // ISO-8601 UTC
    std::string tool_version = kVersion;

    bool operator==(const Provenance&) const = default;
};

struct CardAnalysisReport {
    AnalysisParams params;
    CardGeometry geometry;
    double um_per_px = 0.0;
    std::vector<DropRecord> drops;
    SummaryStats summary;
    CoverageWarning warning;
    std::optional<FractalEstimate> fractal;  // absent for cards without droplet pixels
    Provenance provenance;

    bool operator==(const CardAnalysisReport&) const = default;
};

/// Report plus the intermediate rasters, for overlays and debugging.
struct CardAnalysis {
    CardAnalysisReport report;
    GrayRaster<double> gray;
    BinaryMask mask;
    DistanceMap<double> distance;
    MarkerMask markers;
    SegmentationResult segmentation;
};

/// Card geometry for an image of the given size on a card of the given physical size.
CardGeometry card_geometry(double card_width_mm, double card_height_mm, const RgbRaster<double>& image);

/// Grayscale, binarize, distance transform, markers, watershed, then physical metrics,
/// coverage warning and fractal dimension. Deterministic. `provenance.timestamp` is left
/// empty; callers stamp it.
CardAnalysis analyze_card_detailed(const RgbRaster<double>& image, const CardGeometry& geom,
                                   const AnalysisParams& params = {});
CardAnalysisReport analyze_card(const RgbRaster<double>& image, const CardGeometry& geom,
                                const AnalysisParams& params = {});

std::string utc_timestamp();

enum class ReportFormat { json, csv };
ReportFormat report_format_from_string(const std::string& s);

nlohmann::ordered_json to_json(const CardAnalysisReport& report);
CardAnalysisReport report_from_json(const nlohmann::json& j);

std::string export_report(const CardAnalysisReport& report, ReportFormat format);

/// Columns of the summary row: drops, mean area, density, coverage, VMD, relative span.
std::string csv_summary_header();
std::string csv_summary_row(const CardAnalysisReport& report);

/// Each segment blended at 50% with a per-id color; segment boundaries drawn at full color.
RgbRaster<double> render_overlay(const RgbRaster<double>& image, const SegmentationResult& result);
/// Deterministic RGB color for a segment id.
std::array<double, 3> segment_color(std::int32_t id);

}  // namespace dropmeter
