#include "dropmeter/fractal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace dropmeter {

std::int64_t box_count(const BinaryMask& mask, std::int64_t sigma) {
    if (sigma < 1) throw ParameterError("box size must be at least 1");
    const Eigen::Index h = mask.rows(), w = mask.cols();
    const Eigen::Index bw = (w + sigma - 1) / sigma, bh = (h + sigma - 1) / sigma;
    Plane<bool> occupied = Plane<bool>::Constant(bh, bw, false);
    for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x)
            if (mask(y, x)) occupied(y / sigma, x / sigma) = true;
    return occupied.count();
}

std::int64_t padded_extent(const BinaryMask& mask) {
    std::int64_t m = 8;
    while (m < mask.rows() || m < mask.cols()) m *= 2;
    return m;
}

BoxCountSeries box_count_series(const BinaryMask& mask) {
    // Padding with background never changes the anchored counts, so the mask is used as is.
    const std::int64_t m = padded_extent(mask);
    BoxCountSeries series;
    for (std::int64_t sigma = 1; sigma <= m / 4; sigma *= 2) series.push_back({sigma, box_count(mask, sigma)});
    return series;
}

FractalEstimate fractal_dimension(const BinaryMask& mask) {
    if (!mask.any()) throw UndefinedDimensionError("fractal dimension of an empty mask is undefined");
    const BoxCountSeries series = box_count_series(mask);
    const auto n = static_cast<Eigen::Index>(series.size());

    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd log_count(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = std::log(double(series[i].size));
        design(i, 1) = 1.0;
        log_count(i) = std::log(double(series[i].count));
    }
    const Eigen::Vector2d fit = design.colPivHouseholderQr().solve(log_count);

    const double mean = log_count.mean();
    const double ss_tot = (log_count.array() - mean).square().sum();
    const double ss_res = (design * fit - log_count).squaredNorm();

    FractalEstimate est;
    est.slope = fit(0);
    est.dimension = std::clamp(-est.slope, 0.0, 2.0);
    est.r_squared = ss_tot > 1e-12 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return est;
}

}  // namespace dropmeter
