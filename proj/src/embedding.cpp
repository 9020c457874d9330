#include "ccid/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ccid/error.hpp"

namespace ccid {

Trajectory::Trajectory(std::vector<double> coords, std::size_t rows, std::size_t dim, std::size_t tau)
    : coords_(std::move(coords)), rows_(rows), dim_(dim), tau_(tau) {
    if (coords_.size() != rows_ * dim_) {
        throw std::invalid_argument("trajectory storage does not match rows x dim");
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += d * d;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Average mutual information
// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> bin_indices(std::span<const double> series, std::size_t bins, bool& constant) {
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    const double range = *hi - *lo;
    constant = !(range > 0.0);
    std::vector<std::size_t> idx(series.size(), 0);
    if (constant) {
        return idx;
    }
    const double scale = static_cast<double>(bins) / range;
    for (std::size_t i = 0; i < series.size(); ++i) {
        idx[i] = std::min(bins - 1, static_cast<std::size_t>((series[i] - *lo) * scale));
    }
    return idx;
}

double ami_from_bins(const std::vector<std::size_t>& idx, std::size_t lag, std::size_t bins,
                     std::vector<double>& joint) {
    const std::size_t pairs = idx.size() - lag;
    std::fill(joint.begin(), joint.end(), 0.0);
    std::vector<double> pa(bins, 0.0);
    std::vector<double> pb(bins, 0.0);
    for (std::size_t i = 0; i < pairs; ++i) {
        joint[idx[i] * bins + idx[i + lag]] += 1.0;
        pa[idx[i]] += 1.0;
        pb[idx[i + lag]] += 1.0;
    }
    const double total = static_cast<double>(pairs);
    double info = 0.0;
    for (std::size_t a = 0; a < bins; ++a) {
        if (pa[a] == 0.0) {
            continue;
        }
        for (std::size_t b = 0; b < bins; ++b) {
            const double c = joint[a * bins + b];
            if (c == 0.0) {
                continue;
            }
            // P(a,b) log2[P(a,b) / (P(a) P(b))] with counts
            info += (c / total) * std::log2(c * total / (pa[a] * pb[b]));
        }
    }
    return std::max(0.0, info);
}

void check_ami_args(std::span<const double> series, std::size_t lag, std::size_t bins) {
    if (bins < 2) {
        throw std::invalid_argument("AMI needs at least 2 bins");
    }
    if (lag >= series.size()) {
        throw DataError("AMI lag " + std::to_string(lag) + " is not below the series length " +
                        std::to_string(series.size()));
    }
}

} // namespace

double average_mutual_information(std::span<const double> series, std::size_t lag, std::size_t bins) {
    check_ami_args(series, lag, bins);
    bool constant = false;
    const auto idx = bin_indices(series, bins, constant);
    if (constant) {
        return 0.0;
    }
    std::vector<double> joint(bins * bins);
    return ami_from_bins(idx, lag, bins, joint);
}

std::vector<AmiPoint> ami_curve(std::span<const double> series, std::size_t max_lag, std::size_t bins) {
    check_ami_args(series, max_lag, bins);
    bool constant = false;
    const auto idx = bin_indices(series, bins, constant);
    std::vector<double> joint(bins * bins);
    std::vector<AmiPoint> curve;
    curve.reserve(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        curve.push_back({lag, constant ? 0.0 : ami_from_bins(idx, lag, bins, joint)});
    }
    return curve;
}

DelayChoice optimal_delay(std::span<const double> series, std::size_t max_lag, std::size_t bins) {
    if (max_lag < 2) {
        throw std::invalid_argument("max_lag must be at least 2");
    }
    DelayChoice choice;
    choice.curve = ami_curve(series, max_lag + 1, bins);
    const auto& c = choice.curve;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        if (c[lag - 1].bits > c[lag].bits && c[lag].bits <= c[lag + 1].bits) {
            choice.tau = lag;
            return choice;
        }
    }
    std::size_t best = 1;
    for (std::size_t lag = 2; lag <= max_lag; ++lag) {
        if (c[lag].bits < c[best].bits) {
            best = lag;
        }
    }
    choice.tau = best;
    choice.flagged = true;
    return choice;
}

// ---------------------------------------------------------------------------
// Delay embedding
// ---------------------------------------------------------------------------

Trajectory embed(std::span<const double> series, std::size_t tau, std::size_t dim) {
    if (tau == 0 || dim == 0) {
        throw std::invalid_argument("embedding requires tau >= 1 and dim >= 1");
    }
    const std::size_t span = (dim - 1) * tau;
    if (series.size() < span + 2) {
        throw DataError("series of " + std::to_string(series.size()) + " samples is too short to embed with tau=" +
                        std::to_string(tau) + ", dim=" + std::to_string(dim));
    }
    const std::size_t rows = series.size() - span;
    std::vector<double> coords(rows * dim);
    for (std::size_t n = 0; n < rows; ++n) {
        for (std::size_t k = 0; k < dim; ++k) {
            coords[n * dim + k] = series[n + k * tau];
        }
    }
    return Trajectory(std::move(coords), rows, dim, tau);
}

// ---------------------------------------------------------------------------
// False nearest neighbours
// ---------------------------------------------------------------------------

double fnn_fraction(std::span<const double> series, std::size_t tau, std::size_t dim, double r_threshold,
                    std::size_t max_queries) {
    if (tau == 0 || dim == 0) {
        throw std::invalid_argument("FNN requires tau >= 1 and dim >= 1");
    }
    if (!(r_threshold > 0.0)) {
        throw std::invalid_argument("FNN threshold R_T must be positive");
    }
    const std::size_t reach = dim * tau;  // offset of the (dim+1)-th coordinate
    if (series.size() <= reach + 2 * tau + 1) {
        throw DataError("series too short for FNN at dim " + std::to_string(dim + 1) + " with tau " +
                        std::to_string(tau));
    }
    const std::size_t points = series.size() - reach;
    const auto [lo, hi] = std::minmax_element(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(points + reach));
    if (*lo == *hi) {
        throw DegenerateError("FNN on a constant series: all pairwise distances are zero");
    }

    const std::size_t queries = (max_queries == 0 || max_queries >= points) ? points : max_queries;
    const double* x = series.data();
    std::size_t false_count = 0;
    for (std::size_t q = 0; q < queries; ++q) {
        const std::size_t n = queries == points ? q : q * points / queries;
        double best = std::numeric_limits<double>::infinity();
        std::size_t nearest = points;
        for (std::size_t m = 0; m < points; ++m) {
            if ((m > n ? m - n : n - m) <= tau) {
                continue;
            }
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim && d2 < best; ++k) {
                const double diff = x[n + k * tau] - x[m + k * tau];
                d2 += diff * diff;
            }
            if (d2 < best) {
                best = d2;
                nearest = m;
            }
        }
        const double rd = std::sqrt(best);
        const double extra = std::abs(x[n + reach] - x[nearest + reach]);
        if (extra > r_threshold * rd) {
            ++false_count;
        }
    }
    return static_cast<double>(false_count) / static_cast<double>(queries);
}

DimensionChoice embedding_dimension(std::span<const double> series, std::size_t tau, double r_threshold,
                                    double fnn_cutoff, std::size_t d_max, std::size_t max_queries) {
    if (d_max < 2) {
        throw std::invalid_argument("d_max must be at least 2");
    }
    DimensionChoice choice;
    for (std::size_t d = 1; d <= d_max; ++d) {
        const double f = fnn_fraction(series, tau, d, r_threshold, max_queries);
        choice.curve.push_back({d, f});
        if (f < fnn_cutoff) {
            choice.dim = d;
            return choice;
        }
    }
    choice.dim = d_max;
    choice.flagged = true;
    return choice;
}

EmbeddingParams estimate_embedding(std::span<const double> series, const EmbeddingConfig& config) {
    auto delay = optimal_delay(series, config.max_lag, config.bins);
    auto dimension = embedding_dimension(series, delay.tau, config.r_threshold, config.fnn_cutoff, config.d_max,
                                         config.max_queries);
    EmbeddingParams p;
    p.tau = delay.tau;
    p.dim = dimension.dim;
    p.tau_flagged = delay.flagged;
    p.dim_flagged = dimension.flagged;
    p.ami_curve = std::move(delay.curve);
    p.fnn_curve = std::move(dimension.curve);
    return p;
}

} // namespace ccid
