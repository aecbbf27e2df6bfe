#include "dropmeter/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>
#include <thread>

#include "dropmeter/image_io.hpp"

namespace dropmeter {

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw InputError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".ppm" || ext == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

CardAnalysisReport analyze_file(const std::filesystem::path& file, const BatchOptions& options) {
    const RgbRaster<double> image = decode_image(file);
    const CardGeometry geom = card_geometry(options.card_width_mm, options.card_height_mm, image);
    CardAnalysisReport report = analyze_card(image, geom, options.params);
    report.provenance.input = file.filename().string();
    report.provenance.timestamp = options.timestamp;
    return report;
}

std::vector<BatchItem> analyze_batch(const std::vector<std::filesystem::path>& files, const BatchOptions& options) {
    std::vector<BatchItem> items(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            items[i].input = files[i];
            try {
                items[i].report = analyze_file(files[i], options);
            } catch (const std::exception& e) {
                items[i].error = e.what();
            }
        }
    };
    unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(files.size(), 1)));
    if (jobs <= 1) {
        worker();
        return items;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    pool.clear();
    return items;
}

std::string rollup_csv(const std::vector<BatchItem>& items) {
    std::ostringstream os;
    os << "file," << csv_summary_header() << ",warning,fractal_dimension,error\n";
    for (const auto& item : items) {
        os << item.input.filename().string() << ',';
        if (item.report) {
            const auto& r = *item.report;
            os << csv_summary_row(r) << ',' << to_string(r.warning.level) << ',';
            if (r.fractal) {
                std::ostringstream f;
                f.precision(12);
                f << r.fractal->dimension;
                os << f.str();
            }
            os << ",\n";
        } else {
            std::string msg = item.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            os << ",,,,,,,," << msg << "\n";
        }
    }
    return os.str();
}

}  // namespace dropmeter
