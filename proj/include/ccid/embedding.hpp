#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ccid {

inline constexpr std::size_t kDefaultAmiBins = 64;
inline constexpr double kDefaultFnnThreshold = 10.0;  // R_T
inline constexpr double kDefaultFnnCutoff = 0.01;
inline constexpr std::size_t kDefaultMaxDim = 10;
inline constexpr std::size_t kDefaultMaxLag = 100;

struct AmiPoint {
    std::size_t lag = 0;
    double bits = 0.0;
};

struct FnnPoint {
    std::size_t dim = 0;
    double fraction = 0.0;
};

struct EmbeddingParams {
    std::size_t tau = 1;
    std::size_t dim = 1;
    bool tau_flagged = false;  // no local AMI minimum up to max_lag
    bool dim_flagged = false;  // FNN never fell below the cutoff
    std::vector<AmiPoint> ami_curve;
    std::vector<FnnPoint> fnn_curve;
};

// Delay vectors stored row-major: row n = [x(n), x(n+tau), ..., x(n+(dim-1)tau)].
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> coords, std::size_t rows, std::size_t dim, std::size_t tau);

    std::size_t size() const { return rows_; }
    std::size_t dim() const { return dim_; }
    std::size_t tau() const { return tau_; }

    std::span<const double> point(std::size_t n) const {
        return {coords_.data() + n * dim_, dim_};
    }
    double operator()(std::size_t n, std::size_t k) const { return coords_[n * dim_ + k]; }
    std::span<const double> data() const { return coords_; }

private:
    std::vector<double> coords_;
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::size_t tau_ = 0;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// I(lag) in bits from a bins x bins joint histogram of the N - lag
// overlapping pairs, equal-width bins over [min, max] of the whole series.
double average_mutual_information(std::span<const double> series, std::size_t lag,
                                  std::size_t bins = kDefaultAmiBins);

std::vector<AmiPoint> ami_curve(std::span<const double> series, std::size_t max_lag,
                                std::size_t bins = kDefaultAmiBins);

struct DelayChoice {
    std::size_t tau = 1;
    bool flagged = false;
    std::vector<AmiPoint> curve;  // lags 0..max_lag+1
};

// First local minimum of the AMI curve; global minimum over 1..max_lag,
// flagged, when there is none.
DelayChoice optimal_delay(std::span<const double> series, std::size_t max_lag = kDefaultMaxLag,
                          std::size_t bins = kDefaultAmiBins);

Trajectory embed(std::span<const double> series, std::size_t tau, std::size_t dim);

// Fraction of points whose nearest neighbour in `dim` dimensions (Theiler
// window = tau) is false by the distance-ratio test against R_T. With
// max_queries > 0 only that many evenly spaced points are tested; every
// point remains a neighbour candidate.
double fnn_fraction(std::span<const double> series, std::size_t tau, std::size_t dim,
                    double r_threshold = kDefaultFnnThreshold, std::size_t max_queries = 0);

struct DimensionChoice {
    std::size_t dim = 1;
    bool flagged = false;
    std::vector<FnnPoint> curve;
};

DimensionChoice embedding_dimension(std::span<const double> series, std::size_t tau,
                                    double r_threshold = kDefaultFnnThreshold,
                                    double fnn_cutoff = kDefaultFnnCutoff,
                                    std::size_t d_max = kDefaultMaxDim, std::size_t max_queries = 0);

struct EmbeddingConfig {
    std::size_t max_lag = kDefaultMaxLag;
    std::size_t bins = kDefaultAmiBins;
    double r_threshold = kDefaultFnnThreshold;
    double fnn_cutoff = kDefaultFnnCutoff;
    std::size_t d_max = kDefaultMaxDim;
    std::size_t max_queries = 0;  // 0 = every point

    friend bool operator==(const EmbeddingConfig&, const EmbeddingConfig&) = default;
};

// optimal_delay followed by embedding_dimension.
EmbeddingParams estimate_embedding(std::span<const double> series, const EmbeddingConfig& config = {});

} // namespace ccid
