#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <queue>
#include <vector>

#include "dropmeter/raster.hpp"

namespace dropmeter {

struct BoundingBox {
    Eigen::Index x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive

    bool contains(double x, double y) const {
        return x >= double(x0) && x <= double(x1) && y >= double(y0) && y <= double(y1);
    }
    bool operator==(const BoundingBox&) const = default;
};

struct DropletSegment {
    std::int32_t id = 0;
    std::int64_t pixel_area = 0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    BoundingBox bounding_box;

    bool operator==(const DropletSegment&) const = default;
};

struct LabeledMarkers {
    LabelPlane labels;  // 0 = no marker
    std::int32_t count = 0;
};

struct SegmentationResult {
    LabelPlane labels;  // 0 = background or unclaimed foreground
    std::vector<DropletSegment> segments;
};

/// 8-connected labeling of marker regions; ids are dense and follow row-major order.
inline LabeledMarkers label_markers(const MarkerMask& markers) {
    LabeledMarkers out;
    out.labels = label_components_8(markers, &out.count);
    return out;
}

/// Per-label pixel counts, centroids and bounding boxes for ids 1..count.
inline std::vector<DropletSegment> measure_segments(const LabelPlane& labels, std::int32_t count) {
    struct Acc {
        std::int64_t n = 0;
        double sx = 0, sy = 0;
        BoundingBox box{std::numeric_limits<Eigen::Index>::max(), std::numeric_limits<Eigen::Index>::max(), 0, 0};
    };
    std::vector<Acc> acc(static_cast<std::size_t>(count) + 1);
    for (Eigen::Index y = 0; y < labels.rows(); ++y)
        for (Eigen::Index x = 0; x < labels.cols(); ++x) {
            const auto id = labels(y, x);
            if (id <= 0 || id > count) continue;
            Acc& a = acc[id];
            ++a.n;
            a.sx += double(x);
            a.sy += double(y);
            a.box.x0 = std::min(a.box.x0, x);
            a.box.y0 = std::min(a.box.y0, y);
            a.box.x1 = std::max(a.box.x1, x);
            a.box.y1 = std::max(a.box.y1, y);
        }
    std::vector<DropletSegment> segments;
    segments.reserve(count);
    for (std::int32_t id = 1; id <= count; ++id) {
        const Acc& a = acc[id];
        if (a.n == 0) continue;
        segments.push_back({id, a.n, a.sx / double(a.n), a.sy / double(a.n), a.box});
    }
    return segments;
}

inline std::vector<DropletSegment> measure_segments(const SegmentationResult& result) {
    std::int32_t count = result.labels.size() ? result.labels.maxCoeff() : 0;
    return measure_segments(result.labels, count);
}

/// Marker-controlled priority flood restricted to the foreground mask.
///
/// All marker pixels are seeded at once in row-major order. Pixels leave the queue by
/// ascending gray value; equal values leave in enqueue order. Each dequeued pixel claims
/// its unclaimed foreground 4-neighbours (N, W, E, S) for its own label and enqueues them.
/// Foreground that no flood reaches stays 0.
template <typename Scalar>
SegmentationResult watershed(const GrayRaster<Scalar>& gray, const LabeledMarkers& markers,
                             const BinaryMask& mask) {
    detail::require_same_shape(gray, markers.labels, "watershed");
    detail::require_same_shape(gray, mask, "watershed");
    const Eigen::Index h = gray.rows(), w = gray.cols();

    struct Entry {
        Scalar value;
        std::uint64_t age;
        Eigen::Index index;
        bool operator>(const Entry& o) const {
            return value != o.value ? value > o.value : age > o.age;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;

    SegmentationResult result;
    result.labels = LabelPlane::Zero(h, w);
    std::int32_t* out = result.labels.data();
    const std::int32_t* seed = markers.labels.data();
    const Scalar* g = gray.data();
    const bool* fg = mask.data();

    std::uint64_t age = 0;
    for (Eigen::Index i = 0; i < gray.size(); ++i) {
        if (seed[i] == 0) continue;
        if (!fg[i])
            throw InputError("watershed: marker pixel (" + std::to_string(i % w) + ", " +
                             std::to_string(i / w) + ") lies outside the foreground mask");
        out[i] = seed[i];
        queue.push({g[i], age++, i});
    }

    while (!queue.empty()) {
        const Entry e = queue.top();
        queue.pop();
        const Eigen::Index y = e.index / w, x = e.index % w;
        const Eigen::Index neighbours[4] = {y > 0 ? e.index - w : -1, x > 0 ? e.index - 1 : -1,
                                            x + 1 < w ? e.index + 1 : -1, y + 1 < h ? e.index + w : -1};
        for (const Eigen::Index n : neighbours) {
            if (n < 0 || !fg[n] || out[n] != 0) continue;
            out[n] = out[e.index];
            queue.push({g[n], age++, n});
        }
    }

    result.segments = measure_segments(result.labels, markers.count);
    return result;
}

}  // namespace dropmeter
