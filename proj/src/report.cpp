#include "dropmeter/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace dropmeter {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> read_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

}  // namespace

CardGeometry card_geometry(double card_width_mm, double card_height_mm, const RgbRaster<double>& image) {
    return {card_width_mm * 1000.0, card_height_mm * 1000.0, image.width(), image.height()};
}

CardAnalysis analyze_card_detailed(const RgbRaster<double>& image, const CardGeometry& geom,
                                   const AnalysisParams& params) {
    detail::require_unit_interval(params.bin_threshold, "binarization threshold");
    detail::require_unit_interval(params.marker_threshold, "marker threshold");
    if (!(params.correction.a > 0 && params.correction.b > 0))
        throw ParameterError("correction parameters a and b must be positive");
    if (geom.image_width_px != image.width() || geom.image_height_px != image.height())
        throw InputError("card geometry does not match the image size");

    CardAnalysis a;
    CardAnalysisReport& report = a.report;
    report.params = params;
    report.geometry = geom;
    report.um_per_px = px_to_um_ratio(geom);

    a.gray = to_grayscale(image);
    a.mask = binarize(a.gray, params.bin_threshold);
    a.distance = distance_transform<double>(a.mask, params.normalization);
    a.markers = extract_markers(a.distance, params.marker_threshold);
    a.segmentation = watershed(a.gray, label_markers(a.markers), a.mask);

    const double px_area_um2 = report.um_per_px * report.um_per_px;
    std::vector<DropletPhysical> physical;
    physical.reserve(a.segmentation.segments.size());
    for (const auto& seg : a.segmentation.segments) {
        DropletPhysical p;
        p.segment_id = seg.id;
        p.area_um2 = double(seg.pixel_area) * px_area_um2;
        p.diameter_um = diameter_from_area(double(seg.pixel_area), report.um_per_px);
        p.corrected_diameter_um = correct_diameter(p.diameter_um, params.correction);
        physical.push_back(p);
        report.drops.push_back({seg, p});
    }
    report.summary = summarize(physical, geom, a.mask);
    report.warning = coverage_warning(report.summary.coverage_pct);
    if (params.include_fractal && a.mask.any()) report.fractal = fractal_dimension(a.mask);
    return a;
}

CardAnalysisReport analyze_card(const RgbRaster<double>& image, const CardGeometry& geom,
                                const AnalysisParams& params) {
    return analyze_card_detailed(image, geom, params).report;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw ParameterError("unknown report format '" + s + "' (json or csv)");
}

ordered_json to_json(const CardAnalysisReport& r) {
    ordered_json j;
    j["provenance"] = {{"input", r.provenance.input},
                       {"timestamp", r.provenance.timestamp},
                       {"tool_version", r.provenance.tool_version}};
    j["parameters"] = {{"bin_threshold", r.params.bin_threshold},
                       {"marker_threshold", r.params.marker_threshold},
                       {"normalization", to_string(r.params.normalization)},
                       {"correction", {{"a", r.params.correction.a}, {"b", r.params.correction.b}}},
                       {"include_fractal", r.params.include_fractal}};
    j["geometry"] = {{"card_width_um", r.geometry.card_width_um},
                     {"card_height_um", r.geometry.card_height_um},
                     {"image_width_px", r.geometry.image_width_px},
                     {"image_height_px", r.geometry.image_height_px},
                     {"um_per_px", r.um_per_px}};
    const SummaryStats& s = r.summary;
    j["summary"] = {{"drop_count", s.drop_count},
                    {"density_per_cm2", s.density_per_cm2},
                    {"coverage_pct", s.coverage_pct},
                    {"vmd_um", optional_number(s.vmd_um)},
                    {"dv01_um", optional_number(s.dv01_um)},
                    {"dv09_um", optional_number(s.dv09_um)},
                    {"relative_span", optional_number(s.relative_span)},
                    {"mean_area_um2", optional_number(s.mean_area_um2)},
                    {"mean_diameter_um", optional_number(s.mean_diameter_um)}};
    j["warning"] = {{"level", to_string(r.warning.level)}, {"coverage_pct", r.warning.coverage_pct}};
    if (r.fractal)
        j["fractal"] = {{"dimension", r.fractal->dimension},
                        {"slope", r.fractal->slope},
                        {"r_squared", r.fractal->r_squared}};
    else
        j["fractal"] = nullptr;
    ordered_json drops = ordered_json::array();
    for (const auto& d : r.drops) {
        const auto& box = d.segment.bounding_box;
        drops.push_back({{"id", d.segment.id},
                         {"pixel_area", d.segment.pixel_area},
                         {"centroid", {d.segment.centroid_x, d.segment.centroid_y}},
                         {"bounding_box", {box.x0, box.y0, box.x1, box.y1}},
                         {"area_um2", d.physical.area_um2},
                         {"diameter_um", d.physical.diameter_um},
                         {"corrected_diameter_um", d.physical.corrected_diameter_um}});
    }
    j["drops"] = std::move(drops);
    return j;
}

CardAnalysisReport report_from_json(const nlohmann::json& j) {
    try {
        CardAnalysisReport r;
        const auto& prov = j.at("provenance");
        r.provenance = {prov.at("input").get<std::string>(), prov.at("timestamp").get<std::string>(),
                        prov.at("tool_version").get<std::string>()};
        const auto& par = j.at("parameters");
        r.params.bin_threshold = par.at("bin_threshold").get<double>();
        r.params.marker_threshold = par.at("marker_threshold").get<double>();
        r.params.normalization = normalization_from_string(par.at("normalization").get<std::string>());
        r.params.correction = {par.at("correction").at("a").get<double>(), par.at("correction").at("b").get<double>()};
        r.params.include_fractal = par.at("include_fractal").get<bool>();
        const auto& geo = j.at("geometry");
        r.geometry = {geo.at("card_width_um").get<double>(), geo.at("card_height_um").get<double>(),
                      geo.at("image_width_px").get<std::int64_t>(), geo.at("image_height_px").get<std::int64_t>()};
        r.um_per_px = geo.at("um_per_px").get<double>();
        const auto& s = j.at("summary");
        r.summary.drop_count = s.at("drop_count").get<std::int64_t>();
        r.summary.density_per_cm2 = s.at("density_per_cm2").get<double>();
        r.summary.coverage_pct = s.at("coverage_pct").get<double>();
        r.summary.vmd_um = read_optional(s, "vmd_um");
        r.summary.dv01_um = read_optional(s, "dv01_um");
        r.summary.dv09_um = read_optional(s, "dv09_um");
        r.summary.relative_span = read_optional(s, "relative_span");
        r.summary.mean_area_um2 = read_optional(s, "mean_area_um2");
        r.summary.mean_diameter_um = read_optional(s, "mean_diameter_um");
        r.warning = {warning_level_from_string(j.at("warning").at("level").get<std::string>()),
                     j.at("warning").at("coverage_pct").get<double>()};
        if (const auto& f = j.at("fractal"); !f.is_null())
            r.fractal = FractalEstimate{f.at("dimension").get<double>(), f.at("slope").get<double>(),
                                        f.at("r_squared").get<double>()};
        for (const auto& d : j.at("drops")) {
            DropRecord rec;
            rec.segment.id = d.at("id").get<std::int32_t>();
            rec.segment.pixel_area = d.at("pixel_area").get<std::int64_t>();
            rec.segment.centroid_x = d.at("centroid").at(0).get<double>();
            rec.segment.centroid_y = d.at("centroid").at(1).get<double>();
            const auto& b = d.at("bounding_box");
            rec.segment.bounding_box = {b.at(0).get<Eigen::Index>(), b.at(1).get<Eigen::Index>(),
                                        b.at(2).get<Eigen::Index>(), b.at(3).get<Eigen::Index>()};
            rec.physical = {rec.segment.id, d.at("area_um2").get<double>(), d.at("diameter_um").get<double>(),
                            d.at("corrected_diameter_um").get<double>()};
            r.drops.push_back(rec);
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed report JSON: ") + e.what());
    }
}

std::string csv_summary_header() {
    return "drops,mean_area_um2,density_per_cm2,coverage_pct,vmd_um,relative_span";
}

std::string csv_summary_row(const CardAnalysisReport& r) {
    const SummaryStats& s = r.summary;
    return std::to_string(s.drop_count) + "," + csv_optional(s.mean_area_um2) + "," +
           csv_number(s.density_per_cm2) + "," + csv_number(s.coverage_pct) + "," + csv_optional(s.vmd_um) + "," +
           csv_optional(s.relative_span);
}

std::string export_report(const CardAnalysisReport& report, ReportFormat format) {
    if (format == ReportFormat::json) return to_json(report).dump(2) + "\n";

    std::ostringstream os;
    os << "# dropmeter " << report.provenance.tool_version << " report";
    if (!report.provenance.input.empty()) os << " for " << report.provenance.input;
    os << "\n# warning: " << to_string(report.warning.level) << "\n";
    os << csv_summary_header() << "\n" << csv_summary_row(report) << "\n\n";
    os << "id,pixel_area,centroid_x,centroid_y,area_um2,diameter_um,corrected_diameter_um\n";
    for (const auto& d : report.drops)
        os << d.segment.id << ',' << d.segment.pixel_area << ',' << csv_number(d.segment.centroid_x) << ','
           << csv_number(d.segment.centroid_y) << ',' << csv_number(d.physical.area_um2) << ','
           << csv_number(d.physical.diameter_um) << ',' << csv_number(d.physical.corrected_diameter_um) << "\n";
    return os.str();
}

std::array<double, 3> segment_color(std::int32_t id) {
    // Golden-angle hue walk, full saturation.
    const double hue = std::fmod(double(id) * 137.50776405003785, 360.0) / 60.0;
    const double x = 1.0 - std::abs(std::fmod(hue, 2.0) - 1.0);
    switch (int(hue)) {
        case 0: return {1, x, 0};
        case 1: return {x, 1, 0};
        case 2: return {0, 1, x};
        case 3: return {0, x, 1};
        case 4: return {x, 0, 1};
        default: return {1, 0, x};
    }
}

RgbRaster<double> render_overlay(const RgbRaster<double>& image, const SegmentationResult& result) {
    detail::require_same_shape(image.r, result.labels, "render_overlay");
    constexpr double opacity = 0.5;
    RgbRaster<double> out = image;
    const LabelPlane& labels = result.labels;
    const Eigen::Index h = labels.rows(), w = labels.cols();
    for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x) {
            const auto id = labels(y, x);
            if (id <= 0) continue;
            const bool boundary = (y == 0 || labels(y - 1, x) != id) || (y + 1 == h || labels(y + 1, x) != id) ||
                                  (x == 0 || labels(y, x - 1) != id) || (x + 1 == w || labels(y, x + 1) != id);
            const auto c = segment_color(id);
            const double a = boundary ? 1.0 : opacity;
            out.r(y, x) = (1 - a) * image.r(y, x) + a * c[0];
            out.g(y, x) = (1 - a) * image.g(y, x) + a * c[1];
            out.b(y, x) = (1 - a) * image.b(y, x) + a * c[2];
        }
    return out;
}

}  // namespace dropmeter
