#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ccid {

struct LogLogFit {
    std::vector<double> xs;
    std::vector<double> ys;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares; needs at least 3 points.
LogLogFit fit_line(std::vector<double> xs, std::vector<double> ys);

struct FractalDimension {
    double value = 1.0;
    LogLogFit fit;
    bool clamped = false;
};

// Box counting on the signal graph normalised into the unit square with box
// sides 2^-k, k = 1..floor(log2 N) - 2. Each segment between consecutive
// samples is rasterised, so the polyline rather than the sample set is
// covered. A constant window has FD = 1 exactly (empty fit).
FractalDimension box_counting_dimension(std::span<const double> window);

// Brute-force reference counter: marks every box touched by any sample of a
// densely resampled polyline. Slow; test and diagnostic use only.
std::size_t count_boxes_reference(std::span<const double> window, std::size_t boxes_per_side);
std::size_t count_boxes(std::span<const double> window, std::size_t boxes_per_side);

enum class PartitionMode {
    forward,   // segments laid from the start; remainder dropped at the end
    mirrored,  // segments laid from the end; remainder dropped at the start
};

struct HurstEstimate {
    double value = 0.5;
    LogLogFit fit;
    bool clamped = false;
};

inline constexpr std::size_t kHurstScales = 8;
inline constexpr std::size_t kHurstMinSegment = 10;

// Segment lengths used for a window of n samples: 8 log-spaced values in
// [10, n/2], rounded and de-duplicated.
std::vector<std::size_t> hurst_segment_lengths(std::size_t n);

// Rescaled range averaged over disjoint segments (population std), slope of
// log(R/S) against log(n). Throws DegenerateError if fewer than 3 segment
// lengths survive.
HurstEstimate hurst_exponent(std::span<const double> window, PartitionMode mode = PartitionMode::forward);

} // namespace ccid
