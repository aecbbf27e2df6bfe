#pragma once

// Brute-force reference implementations. Deliberately naive and independent of the
// library's algorithms; only the library's plain data types are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "dropmeter/raster.hpp"
#include "dropmeter/segmentation.hpp"

namespace dropmeter::oracle {

/// All-pairs minimum distance from every foreground pixel to a background pixel. When the
/// mask has no background, the ring just outside the image is the background.
inline Plane<double> distances(const BinaryMask& mask) {
    const long h = mask.rows(), w = mask.cols();
    std::vector<std::pair<long, long>> background;
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x)
            if (!mask(y, x)) background.emplace_back(y, x);
    if (background.empty()) {
        for (long x = -1; x <= w; ++x) {
            background.emplace_back(-1, x);
            background.emplace_back(h, x);
        }
        for (long y = 0; y < h; ++y) {
            background.emplace_back(y, -1);
            background.emplace_back(y, w);
        }
    }
    Plane<double> d = Plane<double>::Zero(h, w);
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x) {
            if (!mask(y, x)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [by, bx] : background)
                best = std::min(best, std::sqrt(double((y - by) * (y - by) + (x - bx) * (x - bx))));
            d(y, x) = best;
        }
    return d;
}

/// Priority flood by repeated linear scan for the minimum (gray, enqueue order) entry.
inline LabelPlane flood(const Plane<double>& gray, const LabelPlane& seeds, const BinaryMask& mask) {
    const long h = gray.rows(), w = gray.cols();
    struct Pending {
        double value;
        long order;
        long y, x;
    };
    std::vector<Pending> pending;
    LabelPlane labels = LabelPlane::Zero(h, w);
    long order = 0;
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x)
            if (seeds(y, x)) {
                labels(y, x) = seeds(y, x);
                pending.push_back({gray(y, x), order++, y, x});
            }
    while (!pending.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pending.size(); ++i) {
            const auto& a = pending[i];
            const auto& b = pending[best];
            if (a.value < b.value || (a.value == b.value && a.order < b.order)) best = i;
        }
        const Pending p = pending[best];
        pending.erase(pending.begin() + long(best));
        const long dy[4] = {-1, 0, 0, 1};
        const long dx[4] = {0, -1, 1, 0};
        for (int k = 0; k < 4; ++k) {
            const long ny = p.y + dy[k], nx = p.x + dx[k];
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            if (!mask(ny, nx) || labels(ny, nx)) continue;
            labels(ny, nx) = labels(p.y, p.x);
            pending.push_back({gray(ny, nx), order++, ny, nx});
        }
    }
    return labels;
}

/// Smallest diameter whose share of total d^3 (summing every drop no larger than it) reaches p.
inline double volume_percentile(const std::vector<double>& diameters, double p) {
    std::vector<double> candidates = diameters;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    long double total = 0;
    for (double d : diameters) total += (long double)d * d * d;
    for (double c : candidates) {
        long double below = 0;
        for (double d : diameters)
            if (d <= c) below += (long double)d * d * d;
        if (below >= (long double)p * total) return c;
    }
    return candidates.back();
}

inline BinaryMask random_mask(std::mt19937_64& rng, long h, long w, double density) {
    std::bernoulli_distribution fg(density);
    BinaryMask m(h, w);
    for (long i = 0; i < m.size(); ++i) m.data()[i] = fg(rng);
    return m;
}

/// Blobby mask: union of random filled disks.
inline BinaryMask random_blobs(std::mt19937_64& rng, long h, long w, int count, double max_radius) {
    BinaryMask m = BinaryMask::Constant(h, w, false);
    std::uniform_real_distribution<double> ux(0, double(w)), uy(0, double(h)), ur(1.0, max_radius);
    for (int i = 0; i < count; ++i) {
        const double cx = ux(rng), cy = uy(rng), r = ur(rng);
        for (long y = 0; y < h; ++y)
            for (long x = 0; x < w; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m(y, x) = true;
    }
    return m;
}

/// Two 5x5 squares joined by a one-pixel bridge through their middle rows.
inline BinaryMask dumbbell() {
    BinaryMask m = BinaryMask::Constant(5, 13, false);
    m.block(0, 0, 5, 5).setConstant(true);
    m.block(0, 8, 5, 5).setConstant(true);
    m.block(2, 5, 1, 3).setConstant(true);
    return m;
}

}  // namespace dropmeter::oracle
