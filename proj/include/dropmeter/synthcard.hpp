#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dropmeter/raster.hpp"

namespace dropmeter {

enum class OverlapPolicy { forbid, allow };

struct DiskRequest {
    double diameter_um = 0.0;
    // Center in micrometers from the card's top-left corner; random placement when empty.
    std::optional<double> center_x_um;
    std::optional<double> center_y_um;
};

/// Recipe for a synthetic water-sensitive card.
struct SyntheticCardSpec {
    double card_width_um = 76000.0;
    double card_height_um = 26000.0;
    double dpi = 1200.0;
    std::vector<DiskRequest> disks;
    OverlapPolicy overlap_policy = OverlapPolicy::forbid;
    double background_gray = 0.9;
    double drop_gray = 0.1;
    std::uint64_t seed = 1;
    // Minimum pixel gap between disk edges under the forbid policy.
    double min_gap_px = 2.0;
    // 1-px linear blend across disk edges instead of hard edges.
    bool edge_blend = false;
    std::int64_t max_retries = 10000;
};

struct GroundTruthDisk {
    double center_x_px = 0.0;
    double center_y_px = 0.0;
    double diameter_um = 0.0;
    std::int64_t area_px = 0;  // rasterized pixel count of this disk alone
};

struct GroundTruth {
    std::vector<GroundTruthDisk> disks;
    double total_coverage_fraction = 0.0;     // rasterized union / card pixels
    double analytic_coverage_fraction = 0.0;  // sum of pi r^2 / card area
    double um_per_px = 0.0;
};

struct SyntheticCard {
    RgbRaster<double> image;
    GroundTruth truth;
};

/// Raster size of a card at `dpi`: round(card dims * dpi / 25,400).
std::int64_t card_pixels(double length_um, double dpi);

/// Deterministic for a given spec. Disks are placed in list order; a pixel belongs to a
/// disk when its center lies within the disk's radius. Intensities are quantized to 8 bits.
SyntheticCard generate_card(const SyntheticCardSpec& spec);

/// Five size classes (50, 100, 250, 500 and 1,000 um), `per_class` disks each, largest first.
SyntheticCardSpec control_card_spec(int per_class = 20, double dpi = 1200.0, std::uint64_t seed = 7);

/// Key-value text format (see data/cards/*.cfg).
SyntheticCardSpec parse_card_spec(const std::string& text);
SyntheticCardSpec load_card_spec(const std::filesystem::path& path);

}  // namespace dropmeter
