#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dropmeter/report.hpp"

namespace dropmeter {

struct BatchOptions {
    double card_width_mm = 76.0;
    double card_height_mm = 26.0;
    AnalysisParams params;
    unsigned jobs = 1;      // 0 = hardware concurrency
    std::string timestamp;  // stamped into every report
};

struct BatchItem {
    std::filesystem::path input;
    std::optional<CardAnalysisReport> report;
    std::string error;  // set when the file could not be analyzed
};

/// PNG/PGM/PPM files directly inside `dir`, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Analyzes every file independently; output order follows `files`, whatever the job count.
std::vector<BatchItem> analyze_batch(const std::vector<std::filesystem::path>& files, const BatchOptions& options);

/// Decode + analyze one file, stamping provenance the way the CLI does.
CardAnalysisReport analyze_file(const std::filesystem::path& file, const BatchOptions& options);

/// One summary row per file: file, the six summary columns, warning level, fractal dimension.
std::string rollup_csv(const std::vector<BatchItem>& items);

}  // namespace dropmeter
