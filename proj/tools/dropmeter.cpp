// dropmeter: spray-card droplet analysis from the command line.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "dropmeter/batch.hpp"
#include "dropmeter/fractal.hpp"
#include "dropmeter/image_io.hpp"
#include "dropmeter/metrics.hpp"
#include "dropmeter/report.hpp"
#include "dropmeter/server.hpp"
#include "dropmeter/synthcard.hpp"

namespace fs = std::filesystem;
using namespace dropmeter;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitParameter = 2;

struct CommonOptions {
    double card_width_mm = 76.0;
    double card_height_mm = 26.0;
    double bin_threshold = kDefaultBinThreshold;
    double marker_threshold = kDefaultMarkerThreshold;
    std::string correct;
    std::string normalization = "per_component";
    bool no_fractal = false;
    std::string timestamp;

    AnalysisParams params() const {
        AnalysisParams p;
        p.bin_threshold = bin_threshold;
        p.marker_threshold = marker_threshold;
        p.normalization = normalization_from_string(normalization);
        p.include_fractal = !no_fractal;
        if (!correct.empty()) {
            const auto comma = correct.find(',');
            if (comma == std::string::npos) throw ParameterError("--correct expects a,b");
            try {
                p.correction = {std::stod(correct.substr(0, comma)), std::stod(correct.substr(comma + 1))};
            } catch (const std::exception&) {
                throw ParameterError("--correct expects two numbers a,b");
            }
        }
        return p;
    }

    BatchOptions batch_options() const {
        BatchOptions o;
        o.card_width_mm = card_width_mm;
        o.card_height_mm = card_height_mm;
        o.params = params();
        o.timestamp = timestamp.empty() ? utc_timestamp() : timestamp;
        return o;
    }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--card-width-mm", o.card_width_mm, "Physical card width in mm")->capture_default_str();
    cmd->add_option("--card-height-mm", o.card_height_mm, "Physical card height in mm")->capture_default_str();
    cmd->add_option("--bin-threshold", o.bin_threshold, "Gray level below which a pixel is a droplet")
        ->capture_default_str();
    cmd->add_option("--marker-threshold", o.marker_threshold, "Normalized distance that makes a marker")
        ->capture_default_str();
    cmd->add_option("--correct", o.correct, "Diameter correction a,b for d' = a*d^b");
    cmd->add_option("--normalization", o.normalization, "Distance normalization: per_component or per_image")
        ->capture_default_str();
    cmd->add_flag("--no-fractal", o.no_fractal, "Skip the fractal dimension");
    cmd->add_option("--timestamp", o.timestamp, "Override the report timestamp");
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw InputError("cannot write " + out);
    f << text;
}

Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dropmeter: droplet coverage analysis of water-sensitive spray cards"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonOptions common;

    std::string input, out, overlay, format = "json";
    auto* analyze = app.add_subcommand("analyze", "Analyze a single card image");
    analyze->add_option("image", input, "PNG/PGM/PPM card image, pre-cropped to the card")->required();
    add_common(analyze, common);
    analyze->add_option("--out", out, "Report destination (default stdout)");
    analyze->add_option("--overlay", overlay, "Write a segmentation overlay (.png or .ppm)");
    analyze->add_option("--format", format, "json or csv")->capture_default_str();

    std::string batch_dir;
    unsigned jobs = 0;
    auto* batch = app.add_subcommand("batch", "Analyze every image in a directory");
    batch->add_option("directory", batch_dir, "Directory of card images")->required();
    add_common(batch, common);
    batch->add_option("--out", out, "Directory for per-card reports and rollup.csv")->required();
    batch->add_option("--format", format, "Per-card report format: json or csv")->capture_default_str();
    batch->add_option("--jobs", jobs, "Parallel workers (0 = all cores)")->capture_default_str();

    std::string spec_path, truth_out;
    auto* synth = app.add_subcommand("synth", "Render a synthetic card from a spec file");
    synth->add_option("spec", spec_path, "Card spec (key = value)")->required();
    synth->add_option("--out", out, "Output image (.png or .ppm)")->required();
    synth->add_option("--truth", truth_out, "Write ground truth JSON");

    auto* fractal = app.add_subcommand("fractal", "Box-counting fractal dimension of a card");
    fractal->add_option("image", input, "Card image")->required();
    fractal->add_option("--bin-threshold", common.bin_threshold, "Binarization threshold")->capture_default_str();

    std::vector<double> dpi_diameters, dpi_values;
    auto* dpi = app.add_subcommand("dpi", "Pixels needed to represent a diameter at a resolution");
    dpi->add_option("--diameter", dpi_diameters, "Diameters in um (default: standard rows)");
    dpi->add_option("--dpi", dpi_values, "Resolutions in dpi (default: standard columns)");

    ServerConfig server_config;
    auto* serve = app.add_subcommand("serve", "Start the HTTP endpoint and UI");
    serve->add_option("--host", server_config.host)->capture_default_str();
    serve->add_option("--port", server_config.port)->capture_default_str();
    serve->add_option("--max-body", server_config.max_body_bytes, "Request body limit in bytes")
        ->capture_default_str();
    serve->add_option("--ui-dir", server_config.ui_dir, "Static UI assets to serve at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParameter;
    }

    try {
        if (*analyze) {
            const auto fmt = report_format_from_string(format);
            BatchOptions options = common.batch_options();
            const RgbRaster<double> image = decode_image(input);
            const CardGeometry geom = card_geometry(options.card_width_mm, options.card_height_mm, image);
            CardAnalysis analysis = analyze_card_detailed(image, geom, options.params);
            analysis.report.provenance.input = fs::path(input).filename().string();
            analysis.report.provenance.timestamp = options.timestamp;
            emit(export_report(analysis.report, fmt), out);
            if (!overlay.empty()) write_image(overlay, render_overlay(image, analysis.segmentation));
            if (analysis.report.warning.level != WarningLevel::none)
                std::cerr << "warning: coverage " << analysis.report.summary.coverage_pct << "% is "
                          << to_string(analysis.report.warning.level) << " for droplet sizing\n";
        } else if (*batch) {
            const auto fmt = report_format_from_string(format);
            BatchOptions options = common.batch_options();
            options.jobs = jobs;
            const auto files = list_images(batch_dir);
            const auto items = analyze_batch(files, options);
            fs::create_directories(out);
            bool failed = false;
            for (const auto& item : items) {
                if (!item.report) {
                    std::cerr << item.input.string() << ": " << item.error << "\n";
                    failed = true;
                    continue;
                }
                const auto name = item.input.stem().string() + (fmt == ReportFormat::json ? ".json" : ".csv");
                emit(export_report(*item.report, fmt), (fs::path(out) / name).string());
            }
            emit(rollup_csv(items), (fs::path(out) / "rollup.csv").string());
            std::cout << items.size() << " cards analyzed, rollup at " << (fs::path(out) / "rollup.csv").string()
                      << "\n";
            if (failed) return kExitInput;
        } else if (*synth) {
            const SyntheticCard card = generate_card(load_card_spec(spec_path));
            write_image(out, card.image);
            if (!truth_out.empty()) {
                nlohmann::ordered_json j;
                j["um_per_px"] = card.truth.um_per_px;
                j["total_coverage_fraction"] = card.truth.total_coverage_fraction;
                j["analytic_coverage_fraction"] = card.truth.analytic_coverage_fraction;
                j["disks"] = nlohmann::ordered_json::array();
                for (const auto& d : card.truth.disks)
                    j["disks"].push_back({{"center_px", {d.center_x_px, d.center_y_px}},
                                          {"diameter_um", d.diameter_um},
                                          {"area_px", d.area_px}});
                emit(j.dump(2) + "\n", truth_out);
            }
        } else if (*fractal) {
            const BinaryMask mask = binarize(to_grayscale(decode_image(input)), common.bin_threshold);
            const FractalEstimate est = fractal_dimension(mask);
            std::cout << "dimension " << est.dimension << "\nslope " << est.slope << "\nr_squared " << est.r_squared
                      << "\n";
            for (const auto& [size, count] : box_count_series(mask)) std::cout << size << '\t' << count << '\n';
        } else if (*dpi) {
            DpiTable table = standard_dpi_table();
            if (!dpi_diameters.empty() || !dpi_values.empty())
                table = dpi_table(dpi_diameters.empty() ? table.diameters_um : dpi_diameters,
                                  dpi_values.empty() ? table.dpis : dpi_values);
            std::cout << format_dpi_table(table);
        } else if (*serve) {
            Server server(server_config);
            const int port = server.bind();
            g_server = &server;
            std::signal(SIGINT, [](int) {
                if (g_server) g_server->stop();
            });
            std::cerr << "dropmeter " << kVersion << " listening on http://" << server_config.host << ":" << port
                      << "\n";
            server.listen();
            g_server = nullptr;
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParameter;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
