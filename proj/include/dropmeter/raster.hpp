#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dropmeter/errors.hpp"

namespace dropmeter {

// All rasters are row-major planes indexed (y, x): rows = height, cols = width.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar = double>
using GrayRaster = Plane<Scalar>;

// true = droplet (foreground) pixel.
using BinaryMask = Plane<bool>;
using MarkerMask = Plane<bool>;
using LabelPlane = Plane<std::int32_t>;

inline constexpr double kDefaultBinThreshold = 0.35;
inline constexpr double kDefaultMarkerThreshold = 0.17;

/// Planar RGB image with channels normalized to [0,1].
template <typename Scalar = double>
struct RgbRaster {
    Plane<Scalar> r, g, b;

    RgbRaster() = default;
    RgbRaster(Eigen::Index width, Eigen::Index height)
        : r(Plane<Scalar>::Zero(height, width)),
          g(Plane<Scalar>::Zero(height, width)),
          b(Plane<Scalar>::Zero(height, width)) {}

    static RgbRaster filled(Eigen::Index width, Eigen::Index height, Scalar value) {
        RgbRaster img(width, height);
        img.r.setConstant(value);
        img.g.setConstant(value);
        img.b.setConstant(value);
        return img;
    }

    static RgbRaster from_gray(const Plane<Scalar>& gray) {
        RgbRaster img;
        img.r = gray;
        img.g = gray;
        img.b = gray;
        return img;
    }

    Eigen::Index width() const { return r.cols(); }
    Eigen::Index height() const { return r.rows(); }

    bool operator==(const RgbRaster& o) const {
        return r.rows() == o.r.rows() && r.cols() == o.r.cols() && (r == o.r).all() &&
               (g == o.g).all() && (b == o.b).all();
    }
};

/// Euclidean distances inside droplets. `raw` holds exact pixel-center distances to the
/// nearest background pixel; `normalized` is its min-max rescaling to [0,1].
template <typename Scalar = double>
struct DistanceMap {
    Plane<Scalar> raw;
    Plane<Scalar> normalized;

    Eigen::Index width() const { return raw.cols(); }
    Eigen::Index height() const { return raw.rows(); }
};

enum class Normalization {
    per_image,      // single global min-max
    per_component,  // each 8-connected droplet blob rescaled by its own maximum
};

inline std::string to_string(Normalization n) {
    return n == Normalization::per_image ? "per_image" : "per_component";
}

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "per_image") return Normalization::per_image;
    if (s == "per_component") return Normalization::per_component;
    throw ParameterError("unknown normalization '" + s + "'");
}

namespace detail {

inline void require_unit_interval(double value, const char* what) {
    if (!(value >= 0.0 && value <= 1.0))
        throw ParameterError(std::string(what) + " must lie in [0,1], got " + std::to_string(value));
}

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError(std::string(what) + ": raster dimensions disagree");
}

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher). `f` holds squared
// distances, +inf where no site exists; result is written back into `f`.
template <typename Scalar>
void squared_distance_1d(std::vector<Scalar>& f, std::vector<Eigen::Index>& sites,
                         std::vector<Scalar>& bounds, std::vector<Scalar>& out) {
    const auto n = static_cast<Eigen::Index>(f.size());
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    sites.clear();
    bounds.clear();
    for (Eigen::Index q = 0; q < n; ++q) {
        if (!std::isfinite(f[q])) continue;
        while (!sites.empty()) {
            const Eigen::Index p = sites.back();
            const Scalar s = ((f[q] + Scalar(q * q)) - (f[p] + Scalar(p * p))) / Scalar(2 * (q - p));
            if (s <= bounds.back()) {
                sites.pop_back();
                bounds.pop_back();
            } else {
                bounds.push_back(s);
                break;
            }
        }
        if (sites.empty()) bounds.push_back(-inf);
        sites.push_back(q);
    }
    if (sites.empty()) return;
    bounds.push_back(inf);
    // bounds[k] is the left boundary of sites[k]'s region; bounds[k+1] its right boundary.
    out.assign(n, inf);
    std::size_t k = 0;
    for (Eigen::Index q = 0; q < n; ++q) {
        while (bounds[k + 1] < Scalar(q)) ++k;
        const Eigen::Index p = sites[k];
        out[q] = Scalar((q - p) * (q - p)) + f[p];
    }
    f.swap(out);
}

}  // namespace detail

/// Luma reduction 0.299 R + 0.587 G + 0.114 B, clamped to [0,1].
template <typename Scalar>
GrayRaster<Scalar> to_grayscale(const RgbRaster<Scalar>& img) {
    return (Scalar(0.299) * img.r + Scalar(0.587) * img.g + Scalar(0.114) * img.b)
        .max(Scalar(0))
        .min(Scalar(1));
}

/// Droplets are the dark pixels: gray < threshold.
template <typename Scalar>
BinaryMask binarize(const GrayRaster<Scalar>& gray, double threshold = kDefaultBinThreshold) {
    detail::require_unit_interval(threshold, "binarization threshold");
    return gray < Scalar(threshold);
}

/// Exact squared Euclidean distance from each foreground pixel center to the nearest
/// background pixel center. Background pixels get 0. When the mask has no background,
/// the ring of pixels just outside the image counts as background.
template <typename Scalar = double>
Plane<Scalar> squared_distance_transform(const BinaryMask& mask) {
    const Eigen::Index h = mask.rows(), w = mask.cols();
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    const bool no_background = h > 0 && w > 0 && mask.all();
    // Pad by one ring of background when the image has none of its own.
    const Eigen::Index pad = no_background ? 1 : 0;
    const Eigen::Index ph = h + 2 * pad, pw = w + 2 * pad;

    Plane<Scalar> d(ph, pw);
    for (Eigen::Index y = 0; y < ph; ++y)
        for (Eigen::Index x = 0; x < pw; ++x) {
            const bool inside = y >= pad && y < h + pad && x >= pad && x < w + pad;
            d(y, x) = inside && mask(y - pad, x - pad) ? inf : Scalar(0);
        }

    std::vector<Scalar> f, out, bounds;
    std::vector<Eigen::Index> sites;
    f.resize(ph);
    for (Eigen::Index x = 0; x < pw; ++x) {
        f.resize(ph);
        for (Eigen::Index y = 0; y < ph; ++y) f[y] = d(y, x);
        detail::squared_distance_1d(f, sites, bounds, out);
        for (Eigen::Index y = 0; y < ph; ++y) d(y, x) = f[y];
    }
    for (Eigen::Index y = 0; y < ph; ++y) {
        f.resize(pw);
        for (Eigen::Index x = 0; x < pw; ++x) f[x] = d(y, x);
        detail::squared_distance_1d(f, sites, bounds, out);
        for (Eigen::Index x = 0; x < pw; ++x) d(y, x) = f[x];
    }
    return d.block(pad, pad, h, w);
}

/// 8-connected component labels of `mask` (0 = unset, ids 1..count assigned in row-major
/// order of each component's first pixel).
inline LabelPlane label_components_8(const BinaryMask& mask, std::int32_t* count = nullptr) {
    const Eigen::Index h = mask.rows(), w = mask.cols();
    LabelPlane labels = LabelPlane::Zero(h, w);
    std::int32_t next = 0;
    std::vector<Eigen::Index> stack;
    for (Eigen::Index y0 = 0; y0 < h; ++y0)
        for (Eigen::Index x0 = 0; x0 < w; ++x0) {
            if (!mask(y0, x0) || labels(y0, x0) != 0) continue;
            ++next;
            labels(y0, x0) = next;
            stack.assign(1, y0 * w + x0);
            while (!stack.empty()) {
                const Eigen::Index p = stack.back();
                stack.pop_back();
                const Eigen::Index y = p / w, x = p % w;
                for (Eigen::Index dy = -1; dy <= 1; ++dy)
                    for (Eigen::Index dx = -1; dx <= 1; ++dx) {
                        const Eigen::Index ny = y + dy, nx = x + dx;
                        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                        if (!mask(ny, nx) || labels(ny, nx) != 0) continue;
                        labels(ny, nx) = next;
                        stack.push_back(ny * w + nx);
                    }
            }
        }
    if (count) *count = next;
    return labels;
}

/// Min-max rescaling of raw distances. Background stays 0; when max == min the
/// foreground becomes 1.
template <typename Scalar>
Plane<Scalar> normalize_distances(const Plane<Scalar>& raw, const BinaryMask& mask,
                                  Normalization mode = Normalization::per_component) {
    Plane<Scalar> out = Plane<Scalar>::Zero(raw.rows(), raw.cols());
    if (raw.size() == 0 || !mask.any()) return out;

    const bool has_background = !mask.all();
    if (mode == Normalization::per_image || !has_background) {
        const Scalar lo = raw.minCoeff(), hi = raw.maxCoeff();
        if (hi > lo)
            out = (raw - lo) / (hi - lo);
        else
            out = mask.template cast<Scalar>();
        return mask.select(out, Scalar(0));
    }

    std::int32_t count = 0;
    const LabelPlane comp = label_components_8(mask, &count);
    std::vector<Scalar> peak(static_cast<std::size_t>(count) + 1, Scalar(0));
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        const auto c = comp.data()[i];
        if (c) peak[c] = std::max(peak[c], raw.data()[i]);
    }
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        const auto c = comp.data()[i];
        if (c) out.data()[i] = raw.data()[i] / peak[c];
    }
    return out;
}

template <typename Scalar = double>
DistanceMap<Scalar> distance_transform(const BinaryMask& mask,
                                       Normalization mode = Normalization::per_component) {
    DistanceMap<Scalar> dm;
    dm.raw = squared_distance_transform<Scalar>(mask).sqrt();
    dm.normalized = normalize_distances(dm.raw, mask, mode);
    return dm;
}

/// Marker pixels are foreground pixels whose normalized distance reaches the threshold.
template <typename Scalar>
MarkerMask extract_markers(const DistanceMap<Scalar>& dist, double threshold = kDefaultMarkerThreshold) {
    detail::require_unit_interval(threshold, "marker threshold");
    return (dist.raw > Scalar(0)) && (dist.normalized >= Scalar(threshold));
}

}  // namespace dropmeter
