#include "dropmeter/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dropmeter {

std::string to_string(WarningLevel level) {
    switch (level) {
        case WarningLevel::none: return "none";
        case WarningLevel::questionable: return "questionable";
        case WarningLevel::unfeasible: return "unfeasible";
    }
    return "none";
}

WarningLevel warning_level_from_string(const std::string& s) {
    if (s == "none") return WarningLevel::none;
    if (s == "questionable") return WarningLevel::questionable;
    if (s == "unfeasible") return WarningLevel::unfeasible;
    throw InputError("unknown warning level '" + s + "'");
}

double px_to_um_ratio(const CardGeometry& geom) {
    if (!(geom.card_width_um > 0 && geom.card_height_um > 0) || geom.image_width_px <= 0 ||
        geom.image_height_px <= 0)
        throw ParameterError("card geometry must be strictly positive");
    const double card_aspect = geom.card_width_um / geom.card_height_um;
    const double image_aspect = double(geom.image_width_px) / double(geom.image_height_px);
    if (std::abs(image_aspect / card_aspect - 1.0) > kMaxAspectMismatch) {
        std::ostringstream msg;
        msg << "image aspect " << image_aspect << " does not match card aspect " << card_aspect
            << " (distorted or mis-cropped image)";
        throw DistortionError(msg.str());
    }
    return geom.card_width_um / double(geom.image_width_px);
}

double diameter_from_area(double area_px, double um_per_px) {
    return 2.0 * std::sqrt(area_px / std::numbers::pi) * um_per_px;
}

double correct_diameter(double diameter_um, const CorrectionParams& params) {
    return params.a * std::pow(diameter_um, params.b);
}

std::optional<double> volume_percentile(std::span<const double> diameters_um, double p) {
    if (diameters_um.empty()) return std::nullopt;
    std::vector<double> sorted(diameters_um.begin(), diameters_um.end());
    std::sort(sorted.begin(), sorted.end());
    long double total = 0;
    for (double d : sorted) total += (long double)d * d * d;
    const long double target = (long double)p * total;
    long double cumulative = 0;
    for (double d : sorted) {
        cumulative += (long double)d * d * d;
        if (cumulative >= target) return d;
    }
    return sorted.back();
}

SummaryStats summarize(std::span<const DropletPhysical> drops, const CardGeometry& geom,
                       const BinaryMask& mask) {
    SummaryStats s;
    s.drop_count = static_cast<std::int64_t>(drops.size());
    s.density_per_cm2 = double(s.drop_count) / geom.card_area_cm2();
    s.coverage_pct = mask.size() ? 100.0 * double(mask.count()) / double(mask.size()) : 0.0;
    if (drops.empty()) return s;

    std::vector<double> diameters;
    diameters.reserve(drops.size());
    double area_sum = 0, diameter_sum = 0;
    for (const auto& d : drops) {
        diameters.push_back(d.diameter_um);
        area_sum += d.area_um2;
        diameter_sum += d.diameter_um;
    }
    s.dv01_um = volume_percentile(diameters, 0.1);
    s.vmd_um = volume_percentile(diameters, 0.5);
    s.dv09_um = volume_percentile(diameters, 0.9);
    s.relative_span = (*s.dv09_um - *s.dv01_um) / *s.vmd_um;
    s.mean_area_um2 = area_sum / double(drops.size());
    s.mean_diameter_um = diameter_sum / double(drops.size());
    return s;
}

CoverageWarning coverage_warning(double coverage_pct) {
    if (!(coverage_pct >= 0.0 && coverage_pct <= 100.0))
        throw ParameterError("coverage must lie in [0,100], got " + std::to_string(coverage_pct));
    WarningLevel level = WarningLevel::none;
    if (coverage_pct > 70.0)
        level = WarningLevel::unfeasible;
    else if (coverage_pct > 20.0)
        level = WarningLevel::questionable;
    return {level, coverage_pct};
}

std::optional<std::int64_t> min_pixels_for_diameter(double diameter_um, double dpi) {
    if (!(diameter_um > 0 && dpi > 0))
        throw ParameterError("diameter and dpi must be positive");
    const double exact = diameter_um * dpi / kMicrometersPerInch;
    if (exact < 1.0) return std::nullopt;
    return static_cast<std::int64_t>(std::round(exact));  // half away from zero
}

DpiTable dpi_table(std::vector<double> diameters_um, std::vector<double> dpis) {
    DpiTable t{std::move(diameters_um), std::move(dpis), {}};
    for (double d : t.diameters_um) {
        auto& row = t.cells.emplace_back();
        for (double dpi : t.dpis) row.push_back(min_pixels_for_diameter(d, dpi));
    }
    return t;
}

DpiTable standard_dpi_table() {
    return dpi_table({10, 50, 100, 250, 500, 1000, 10000}, {50, 100, 300, 600, 1200, 2400, 2600});
}

std::string format_dpi_table(const DpiTable& table) {
    std::ostringstream os;
    os << "um\\dpi";
    for (double dpi : table.dpis) os << '\t' << dpi;
    os << '\n';
    for (std::size_t i = 0; i < table.diameters_um.size(); ++i) {
        os << table.diameters_um[i];
        for (const auto& cell : table.cells[i]) {
            os << '\t';
            if (cell)
                os << *cell;
            else
                os << '-';
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace dropmeter
