#include "dropmeter/synthcard.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "dropmeter/metrics.hpp"

namespace dropmeter {
namespace {

struct Placed {
    double cx, cy, r;
};

void validate(const SyntheticCardSpec& spec) {
    if (!(spec.card_width_um > 0 && spec.card_height_um > 0 && spec.dpi > 0))
        throw SpecError("card dimensions and dpi must be positive");
    detail::require_unit_interval(spec.background_gray, "background_gray");
    detail::require_unit_interval(spec.drop_gray, "drop_gray");
    if (!(spec.drop_gray < spec.background_gray))
        throw SpecError("drop_gray must be darker than background_gray");
    if (spec.min_gap_px < 0) throw SpecError("min_gap_px must be non-negative");
    for (const auto& d : spec.disks) {
        if (!(d.diameter_um > 0)) throw SpecError("disk diameters must be positive");
        if (!min_pixels_for_diameter(d.diameter_um, spec.dpi))
            throw SpecError("diameter " + std::to_string(d.diameter_um) + " um is not representable at " +
                            std::to_string(spec.dpi) + " dpi");
    }
}

double quantize8(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(trim(s), &used);
        if (used != trim(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SpecError("bad number '" + s + "' for key " + key);
    }
}

}  // namespace

std::int64_t card_pixels(double length_um, double dpi) {
    return static_cast<std::int64_t>(std::llround(length_um * dpi / kMicrometersPerInch));
}

SyntheticCard generate_card(const SyntheticCardSpec& spec) {
    validate(spec);
    const std::int64_t w = card_pixels(spec.card_width_um, spec.dpi);
    const std::int64_t h = card_pixels(spec.card_height_um, spec.dpi);
    if (w < 1 || h < 1) throw SpecError("card is smaller than one pixel");
    const double um_per_px = spec.card_width_um / double(w);

    std::mt19937_64 rng(spec.seed);
    std::vector<Placed> placed;
    const double gap = spec.overlap_policy == OverlapPolicy::forbid ? spec.min_gap_px : 0.0;

    auto fits = [&](const Placed& p) {
        if (p.cx - p.r < -0.5 || p.cy - p.r < -0.5 || p.cx + p.r > double(w) - 0.5 ||
            p.cy + p.r > double(h) - 0.5)
            return false;
        if (spec.overlap_policy == OverlapPolicy::allow) return true;
        return std::none_of(placed.begin(), placed.end(), [&](const Placed& q) {
            return std::hypot(p.cx - q.cx, p.cy - q.cy) <= p.r + q.r + gap;
        });
    };

    for (const auto& d : spec.disks) {
        const double r = d.diameter_um / um_per_px / 2.0;
        if (d.center_x_um && d.center_y_um) {
            // Pixel x spans [x, x+1) in card pixel units, so its center sits at x + 0.5.
            Placed p{*d.center_x_um / um_per_px - 0.5, *d.center_y_um / um_per_px - 0.5, r};
            if (!fits(p))
                throw CapacityError("explicitly placed disk crosses the border or overlaps another disk");
            placed.push_back(p);
            continue;
        }
        std::uniform_real_distribution<double> ux(r - 0.5, double(w) - 0.5 - r);
        std::uniform_real_distribution<double> uy(r - 0.5, double(h) - 0.5 - r);
        if (ux.a() > ux.b() || uy.a() > uy.b()) throw CapacityError("disk larger than the card");
        bool ok = false;
        for (std::int64_t attempt = 0; attempt < spec.max_retries && !ok; ++attempt) {
            Placed p{ux(rng), uy(rng), r};
            if (fits(p)) {
                placed.push_back(p);
                ok = true;
            }
        }
        if (!ok)
            throw CapacityError("could not place a " + std::to_string(d.diameter_um) + " um disk after " +
                                std::to_string(spec.max_retries) + " attempts");
    }

    // Per-pixel darkness in [0,1]: 1 inside a disk, blended across the edge when requested.
    Plane<double> ink = Plane<double>::Zero(h, w);
    BinaryMask covered = BinaryMask::Constant(h, w, false);
    SyntheticCard card;
    card.truth.um_per_px = um_per_px;
    double analytic_area = 0;
    for (std::size_t i = 0; i < placed.size(); ++i) {
        const Placed& p = placed[i];
        const std::int64_t x0 = std::max<std::int64_t>(0, std::int64_t(std::floor(p.cx - p.r - 1)));
        const std::int64_t x1 = std::min<std::int64_t>(w - 1, std::int64_t(std::ceil(p.cx + p.r + 1)));
        const std::int64_t y0 = std::max<std::int64_t>(0, std::int64_t(std::floor(p.cy - p.r - 1)));
        const std::int64_t y1 = std::min<std::int64_t>(h - 1, std::int64_t(std::ceil(p.cy + p.r + 1)));
        std::int64_t area = 0;
        for (std::int64_t y = y0; y <= y1; ++y)
            for (std::int64_t x = x0; x <= x1; ++x) {
                const double dist = std::hypot(double(x) - p.cx, double(y) - p.cy);
                const bool inside = dist <= p.r;
                if (inside) {
                    ++area;
                    covered(y, x) = true;
                }
                double v = inside ? 1.0 : 0.0;
                if (spec.edge_blend) v = std::clamp(p.r + 0.5 - dist, 0.0, 1.0);
                ink(y, x) = std::max(ink(y, x), v);
            }
        card.truth.disks.push_back({p.cx, p.cy, spec.disks[i].diameter_um, area});
        analytic_area += std::numbers::pi * p.r * p.r;
    }
    card.truth.total_coverage_fraction = double(covered.count()) / double(w * h);
    card.truth.analytic_coverage_fraction = analytic_area / double(w * h);

    const Plane<double> gray =
        (spec.background_gray + (spec.drop_gray - spec.background_gray) * ink).unaryExpr(&quantize8);
    card.image = RgbRaster<double>::from_gray(gray);
    return card;
}

SyntheticCardSpec control_card_spec(int per_class, double dpi, std::uint64_t seed) {
    SyntheticCardSpec spec;
    spec.dpi = dpi;
    spec.seed = seed;
    for (double d : {1000.0, 500.0, 250.0, 100.0, 50.0})
        for (int i = 0; i < per_class; ++i) spec.disks.push_back({d, {}, {}});
    return spec;
}

SyntheticCardSpec parse_card_spec(const std::string& text) {
    SyntheticCardSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "card_width_um") spec.card_width_um = parse_double(value, key);
        else if (key == "card_height_um") spec.card_height_um = parse_double(value, key);
        else if (key == "dpi") spec.dpi = parse_double(value, key);
        else if (key == "background_gray") spec.background_gray = parse_double(value, key);
        else if (key == "drop_gray") spec.drop_gray = parse_double(value, key);
        else if (key == "min_gap_px") spec.min_gap_px = parse_double(value, key);
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_double(value, key));
        else if (key == "max_retries") spec.max_retries = static_cast<std::int64_t>(parse_double(value, key));
        else if (key == "edge_blend") {
            if (value != "true" && value != "false") throw SpecError("edge_blend must be true or false");
            spec.edge_blend = value == "true";
        } else if (key == "overlap") {
            if (value == "forbid") spec.overlap_policy = OverlapPolicy::forbid;
            else if (value == "allow") spec.overlap_policy = OverlapPolicy::allow;
            else throw SpecError("overlap must be forbid or allow");
        } else if (key == "disks") {
            // "<diameter_um> x <count>, ..."
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                const auto x = item.find('x');
                const double d = parse_double(item.substr(0, x), key);
                const double n = x == std::string::npos ? 1.0 : parse_double(item.substr(x + 1), key);
                if (n < 0 || n != std::floor(n)) throw SpecError("disk count must be a whole number");
                for (int i = 0; i < int(n); ++i) spec.disks.push_back({d, {}, {}});
            }
        } else if (key == "disk") {
            // "<diameter_um> @ <x_um>, <y_um>"
            const auto at = value.find('@');
            const auto comma = value.find(',', at == std::string::npos ? 0 : at);
            if (at == std::string::npos || comma == std::string::npos)
                throw SpecError("line " + std::to_string(lineno) + ": disk = <diameter_um> @ <x_um>, <y_um>");
            spec.disks.push_back({parse_double(value.substr(0, at), key),
                                  parse_double(value.substr(at + 1, comma - at - 1), key),
                                  parse_double(value.substr(comma + 1), key)});
        } else {
            throw SpecError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return spec;
}

SyntheticCardSpec load_card_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open card spec " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_card_spec(buf.str());
}

}  // namespace dropmeter
