#include "ccid/rqa.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <span>
#include <stdexcept>

#include "ccid/error.hpp"

namespace ccid {

RecurrenceMatrix::RecurrenceMatrix(std::size_t size, double epsilon)
    : bits_(size * size, 0), size_(size), epsilon_(epsilon) {}

std::size_t RecurrenceMatrix::count_ones() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double RecurrenceMatrix::recurrence_rate() const {
    if (size_ == 0) {
        return 0.0;
    }
    return static_cast<double>(count_ones()) / (static_cast<double>(size_) * static_cast<double>(size_));
}

namespace {

// ||a - b|| <= eps decided on the square root, so that eps equal to a
// measured distance always includes that pair.
class WithinEpsilon {
public:
    explicit WithinEpsilon(double eps)
        : eps_(eps), lo_(eps * eps * (1.0 - 1e-12)), hi_(eps * eps * (1.0 + 1e-12)) {}

    bool operator()(double d2) const {
        if (d2 < lo_) {
            return true;
        }
        if (d2 > hi_) {
            return false;
        }
        return std::sqrt(d2) <= eps_;
    }

private:
    double eps_, lo_, hi_;
};

// Coordinate-major copy of a trajectory. Squared distances from one point to
// a contiguous range of others are summed coordinate by coordinate, in the
// same order as a point-by-point sum, so results are bit-identical.
class PairDistances {
public:
    explicit PairDistances(const Trajectory& t) : m_(t.size()), dim_(t.dim()), cols_(m_ * dim_), row_(m_) {
        for (std::size_t j = 0; j < m_; ++j) {
            for (std::size_t k = 0; k < dim_; ++k) {
                cols_[k * m_ + j] = t(j, k);
            }
        }
    }

    std::size_t size() const { return m_; }

    // Squared distances from point i to points j >= first.
    std::span<const double> from(std::size_t i, std::size_t first) {
        double* out = row_.data();
        std::fill(out + first, out + m_, 0.0);
        for (std::size_t k = 0; k < dim_; ++k) {
            const double* col = cols_.data() + k * m_;
            const double c = col[i];
            for (std::size_t j = first; j < m_; ++j) {
                const double d = col[j] - c;
                out[j] += d * d;
            }
        }
        return {out + first, m_ - first};
    }

private:
    std::size_t m_, dim_;
    std::vector<double> cols_;
    std::vector<double> row_;
};

} // namespace

RecurrenceMatrix recurrence_matrix(const Trajectory& trajectory, double epsilon) {
    if (!(epsilon >= 0.0)) {
        throw std::invalid_argument("epsilon must be non-negative");
    }
    const std::size_t m = trajectory.size();
    RecurrenceMatrix r(m, epsilon);
    const WithinEpsilon within(epsilon);
    PairDistances pd(trajectory);
    for (std::size_t i = 0; i < m; ++i) {
        r.set(i, i, true);
        const auto d2 = pd.from(i, i + 1);
        for (std::size_t j = 0; j < d2.size(); ++j) {
            if (within(d2[j])) {
                r.set(i, i + 1 + j, true);
            }
        }
    }
    // Mirror the upper triangle in tiles to keep both sides cache resident.
    constexpr std::size_t kTile = 64;
    for (std::size_t ib = 0; ib < m; ib += kTile) {
        for (std::size_t jb = ib; jb < m; jb += kTile) {
            const std::size_t ie = std::min(ib + kTile, m);
            const std::size_t je = std::min(jb + kTile, m);
            for (std::size_t i = ib; i < ie; ++i) {
                for (std::size_t j = std::max(jb, i + 1); j < je; ++j) {
                    if (r(i, j)) {
                        r.set(j, i, true);
                    }
                }
            }
        }
    }
    return r;
}

double trajectory_diameter(const Trajectory& trajectory) {
    PairDistances pd(trajectory);
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < pd.size(); ++i) {
        for (double d2 : pd.from(i, i + 1)) {
            best = std::max(best, d2);
        }
    }
    return std::sqrt(best);
}

double epsilon_from_diameter(const Trajectory& trajectory, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("epsilon fraction must lie in (0, 1]");
    }
    const double diameter = trajectory_diameter(trajectory);
    if (!(diameter > 0.0)) {
        throw DegenerateError("trajectory has zero diameter");
    }
    return fraction * diameter;
}

VerticalHistogram vertical_line_histogram(const RecurrenceMatrix& matrix) {
    const std::size_t m = matrix.size();
    std::vector<std::size_t> by_length(m + 1, 0);
    std::vector<std::size_t> run(m, 0);
    // Rows are walked in order with one open run per column.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (matrix(i, j)) {
                ++run[j];
            } else if (run[j] > 0) {
                ++by_length[run[j]];
                run[j] = 0;
            }
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (run[j] > 0) {
            ++by_length[run[j]];
        }
    }
    VerticalHistogram hist;
    for (std::size_t h = 1; h <= m; ++h) {
        if (by_length[h] > 0) {
            hist.emplace(h, by_length[h]);
        }
    }
    return hist;
}

namespace {

// For a symmetric matrix the vertical runs of column j are the horizontal
// runs of row j, which can be scanned contiguously.
VerticalHistogram symmetric_line_histogram(const RecurrenceMatrix& matrix) {
    const std::size_t m = matrix.size();
    std::vector<std::size_t> by_length(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint8_t* row = matrix.row(i);
        const std::uint8_t* p = row;
        const std::uint8_t* end = row + m;
        while (p < end) {
            const void* hit = std::memchr(p, 1, static_cast<std::size_t>(end - p));
            if (hit == nullptr) {
                break;
            }
            const auto* first = static_cast<const std::uint8_t*>(hit);
            const std::uint8_t* last = first;
            while (last < end && *last != 0) {
                ++last;
            }
            ++by_length[static_cast<std::size_t>(last - first)];
            p = last;
        }
    }
    VerticalHistogram hist;
    for (std::size_t h = 1; h <= m; ++h) {
        if (by_length[h] > 0) {
            hist.emplace(h, by_length[h]);
        }
    }
    return hist;
}

} // namespace

std::optional<double> trapping_time(const VerticalHistogram& hist, std::size_t h_min) {
    if (h_min == 0) {
        throw std::invalid_argument("h_min must be at least 1");
    }
    double weighted = 0.0;
    double lines = 0.0;
    for (auto it = hist.lower_bound(h_min); it != hist.end(); ++it) {
        weighted += static_cast<double>(it->first) * static_cast<double>(it->second);
        lines += static_cast<double>(it->second);
    }
    if (lines == 0.0) {
        return std::nullopt;
    }
    return weighted / lines;
}

double laminarity(const VerticalHistogram& hist, std::size_t h_min) {
    if (h_min == 0) {
        throw std::invalid_argument("h_min must be at least 1");
    }
    double total = 0.0;
    double long_lines = 0.0;
    for (const auto& [h, count] : hist) {
        const double mass = static_cast<double>(h) * static_cast<double>(count);
        total += mass;
        if (h >= h_min) {
            long_lines += mass;
        }
    }
    if (total == 0.0) {
        throw DegenerateError("laminarity of an empty histogram");
    }
    return long_lines / total;
}

RqaMeasures measure_recurrence(const Trajectory& trajectory, double epsilon_fraction, std::size_t h_min) {
    RqaMeasures out;
    out.epsilon = epsilon_from_diameter(trajectory, epsilon_fraction);
    const auto matrix = recurrence_matrix(trajectory, out.epsilon);
    out.recurrence_rate = matrix.recurrence_rate();
    const auto hist = symmetric_line_histogram(matrix);
    out.lam = laminarity(hist, h_min);
    if (const auto tt = trapping_time(hist, h_min)) {
        out.tt = *tt;
    } else {
        out.tt = 0.0;
        out.no_lines = true;
    }
    return out;
}

} // namespace ccid
