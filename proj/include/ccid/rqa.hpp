#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ccid/embedding.hpp"

namespace ccid {

inline constexpr double kDefaultEpsilonFraction = 0.1;
inline constexpr std::size_t kDefaultHmin = 2;

// Symmetric binary matrix with unit diagonal, stored densely row-major.
class RecurrenceMatrix {
public:
    RecurrenceMatrix() = default;
    RecurrenceMatrix(std::size_t size, double epsilon);

    std::size_t size() const { return size_; }
    double epsilon() const { return epsilon_; }

    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * size_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool value) {
        bits_[i * size_ + j] = value ? 1 : 0;
    }

    const std::uint8_t* row(std::size_t i) const { return bits_.data() + i * size_; }

    std::size_t count_ones() const;
    double recurrence_rate() const;

private:
    std::vector<std::uint8_t> bits_;
    std::size_t size_ = 0;
    double epsilon_ = 0.0;
};

// line length -> number of maximal vertical runs of that length
using VerticalHistogram = std::map<std::size_t, std::size_t>;

// R(i,j) = 1 iff ||x_i - x_j|| <= epsilon.
RecurrenceMatrix recurrence_matrix(const Trajectory& trajectory, double epsilon);

double trajectory_diameter(const Trajectory& trajectory);

// fraction * diameter; throws DegenerateError for a zero-diameter trajectory.
double epsilon_from_diameter(const Trajectory& trajectory, double fraction = kDefaultEpsilonFraction);

VerticalHistogram vertical_line_histogram(const RecurrenceMatrix& matrix);

// Mean length of lines with h >= h_min; nullopt when there are none.
std::optional<double> trapping_time(const VerticalHistogram& hist, std::size_t h_min = kDefaultHmin);

// Share of recurrence points on lines with h >= h_min.
double laminarity(const VerticalHistogram& hist, std::size_t h_min = kDefaultHmin);

struct RqaMeasures {
    double epsilon = 0.0;
    double recurrence_rate = 0.0;
    double lam = 0.0;
    double tt = 0.0;
    bool no_lines = false;  // tt reported as 0
};

RqaMeasures measure_recurrence(const Trajectory& trajectory, double epsilon_fraction = kDefaultEpsilonFraction,
                               std::size_t h_min = kDefaultHmin);

} // namespace ccid
