#include "ccid/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "ccid/error.hpp"

namespace ccid {

LogLogFit fit_line(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw DegenerateError("log-log fit needs at least 3 points");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) {
        throw DegenerateError("log-log fit with identical scale values");
    }
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.xs = std::move(xs);
    fit.ys = std::move(ys);
    return fit;
}

// ---------------------------------------------------------------------------
// Box counting
// ---------------------------------------------------------------------------

namespace {

struct UnitGraph {
    std::vector<double> x;
    std::vector<double> y;
};

// nullopt for a constant window
std::optional<UnitGraph> normalise(std::span<const double> window) {
    const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) {
        return std::nullopt;
    }
    const double last = static_cast<double>(window.size() - 1);
    UnitGraph g;
    g.x.resize(window.size());
    g.y.resize(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        g.x[i] = static_cast<double>(i) / last;
        g.y[i] = (window[i] - *lo) / range;
    }
    return g;
}

std::size_t clamp_index(double v, std::size_t m) {
    if (!(v > 0.0)) {
        return 0;
    }
    return std::min(m - 1, static_cast<std::size_t>(v));
}

// The polyline restricted to a closed column is connected, so the boxes it
// occupies in that column form one contiguous run of rows.
std::size_t count_boxes_graph(const UnitGraph& g, std::size_t m) {
    const double md = static_cast<double>(m);
    std::vector<double> ymin(m, std::numeric_limits<double>::infinity());
    std::vector<double> ymax(m, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
        const double xa = g.x[i], xb = g.x[i + 1];
        const double ya = g.y[i], yb = g.y[i + 1];
        const double slope = (yb - ya) / (xb - xa);
        const double first = std::ceil(xa * md - 1.0);
        const std::size_t c0 = first > 0.0 ? static_cast<std::size_t>(first) : 0;
        const std::size_t c1 = clamp_index(std::floor(xb * md), m);
        for (std::size_t c = c0; c <= c1; ++c) {
            const double left = std::max(xa, static_cast<double>(c) / md);
            const double right = std::min(xb, static_cast<double>(c + 1) / md);
            if (left > right) {
                continue;
            }
            const double yl = ya + slope * (left - xa);
            const double yr = ya + slope * (right - xa);
            ymin[c] = std::min({ymin[c], yl, yr});
            ymax[c] = std::max({ymax[c], yl, yr});
        }
    }
    std::size_t boxes = 0;
    for (std::size_t c = 0; c < m; ++c) {
        if (ymin[c] > ymax[c]) {
            continue;
        }
        const std::size_t lo = clamp_index(std::floor(ymin[c] * md), m);
        std::size_t hi = ymax[c] * md > 0.0 ? clamp_index(std::ceil(ymax[c] * md) - 1.0, m) : 0;
        hi = std::max(hi, lo);
        boxes += hi - lo + 1;
    }
    return boxes;
}

// Open-interior test of segment (p, q) against box (x0,x1) x (y0,y1).
bool segment_hits_box(double px, double py, double qx, double qy, double x0, double x1, double y0, double y1) {
    double t_lo = 0.0, t_hi = 1.0;
    const auto clip = [&](double p, double d, double lo, double hi) {
        if (d == 0.0) {
            return p > lo && p < hi;
        }
        double a = (lo - p) / d;
        double b = (hi - p) / d;
        if (a > b) {
            std::swap(a, b);
        }
        t_lo = std::max(t_lo, a);
        t_hi = std::min(t_hi, b);
        return t_lo < t_hi;
    };
    return clip(px, qx - px, x0, x1) && clip(py, qy - py, y0, y1);
}

} // namespace

std::size_t count_boxes(std::span<const double> window, std::size_t boxes_per_side) {
    const auto g = normalise(window);
    if (!g) {
        return boxes_per_side;  // a horizontal line through one row
    }
    return count_boxes_graph(*g, boxes_per_side);
}

std::size_t count_boxes_reference(std::span<const double> window, std::size_t boxes_per_side) {
    const auto g = normalise(window);
    if (!g) {
        return boxes_per_side;
    }
    const std::size_t m = boxes_per_side;
    const double side = 1.0 / static_cast<double>(m);
    std::set<std::pair<std::size_t, std::size_t>> hit;
    for (std::size_t i = 0; i + 1 < g->x.size(); ++i) {
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t r = 0; r < m; ++r) {
                const double x0 = static_cast<double>(c) * side, y0 = static_cast<double>(r) * side;
                if (segment_hits_box(g->x[i], g->y[i], g->x[i + 1], g->y[i + 1], x0, x0 + side, y0, y0 + side)) {
                    hit.emplace(c, r);
                }
            }
        }
    }
    return hit.size();
}

FractalDimension box_counting_dimension(std::span<const double> window) {
    if (window.size() < 64) {
        throw DataError("box counting needs at least 64 samples, got " + std::to_string(window.size()));
    }
    FractalDimension fd;
    const auto g = normalise(window);
    if (!g) {
        fd.value = 1.0;
        return fd;
    }
    const auto levels = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(window.size())))) - 2;
    std::vector<double> xs, ys;
    for (std::size_t k = 1; k <= levels; ++k) {
        const std::size_t m = std::size_t{1} << k;
        xs.push_back(std::log(static_cast<double>(m)));
        ys.push_back(std::log(static_cast<double>(count_boxes_graph(*g, m))));
    }
    fd.fit = fit_line(std::move(xs), std::move(ys));
    fd.value = fd.fit.slope;
    if (fd.value < 1.0 || fd.value > 2.0) {
        fd.value = std::clamp(fd.value, 1.0, 2.0);
        fd.clamped = true;
    }
    return fd;
}

// ---------------------------------------------------------------------------
// Rescaled range
// ---------------------------------------------------------------------------

std::vector<std::size_t> hurst_segment_lengths(std::size_t n) {
    const double lo = static_cast<double>(kHurstMinSegment);
    const double hi = static_cast<double>(n / 2);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < kHurstScales; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(kHurstScales - 1);
        const auto len = static_cast<std::size_t>(std::llround(lo * std::pow(hi / lo, t)));
        if (out.empty() || out.back() != len) {
            out.push_back(len);
        }
    }
    return out;
}

namespace {

// nullopt when the segment has zero standard deviation
std::optional<double> rescaled_range(std::span<const double> seg) {
    const double n = static_cast<double>(seg.size());
    double mean = 0.0;
    for (double v : seg) {
        mean += v;
    }
    mean /= n;
    double var = 0.0;
    double cum = 0.0;
    double lo = 0.0, hi = 0.0;
    for (double v : seg) {
        const double d = v - mean;
        var += d * d;
        cum += d;
        lo = std::min(lo, cum);
        hi = std::max(hi, cum);
    }
    const double s = std::sqrt(var / n);
    if (!(s > 0.0)) {
        return std::nullopt;
    }
    return (hi - lo) / s;
}

} // namespace

HurstEstimate hurst_exponent(std::span<const double> window, PartitionMode mode) {
    const std::size_t n = window.size();
    if (n < 100) {
        throw DataError("Hurst estimate needs at least 100 samples, got " + std::to_string(n));
    }
    std::vector<double> xs, ys;
    for (std::size_t len : hurst_segment_lengths(n)) {
        const std::size_t segments = n / len;
        double sum = 0.0;
        std::size_t used = 0;
        for (std::size_t s = 0; s < segments; ++s) {
            const std::size_t start = mode == PartitionMode::forward ? s * len : n - (s + 1) * len;
            if (const auto rs = rescaled_range(window.subspan(start, len))) {
                sum += *rs;
                ++used;
            }
        }
        if (used == 0) {
            continue;
        }
        xs.push_back(std::log(static_cast<double>(len)));
        ys.push_back(std::log(sum / static_cast<double>(used)));
    }
    if (xs.size() < 3) {
        throw DegenerateError("fewer than 3 segment lengths have non-zero deviation");
    }
    HurstEstimate h;
    h.fit = fit_line(std::move(xs), std::move(ys));
    h.value = h.fit.slope;
    if (h.value < 0.0 || h.value > 1.0) {
        h.value = std::clamp(h.value, 0.0, 1.0);
        h.clamped = true;
    }
    return h;
}

} // namespace ccid
