#include "ccid/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ccid/error.hpp"
#include "ccid/signal_io.hpp"

namespace ccid {

namespace {

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

// Planning is not thread-safe in FFTW; execution with new-array execute is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

    fftw_plan get(std::size_t n) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(n); it != plans_.end()) {
            return it->second;
        }
        FftwBuffer<double> in(fftw_alloc_real(n));
        FftwBuffer<fftw_complex> out(fftw_alloc_complex(n / 2 + 1));
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

} // namespace

double rms(std::span<const double> window) {
    if (window.empty()) {
        throw DataError("rms of an empty window");
    }
    double sum = 0.0;
    for (double v : window) {
        sum += v * v;
    }
    return std::sqrt(sum / static_cast<double>(window.size()));
}

Spectrum amplitude_spectrum(std::span<const double> window, double sample_rate) {
    const std::size_t n = window.size();
    if (n < 2) {
        throw DataError("amplitude spectrum needs at least 2 samples");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("sample rate must be positive");
    }
    const std::size_t bins = n / 2 + 1;
    FftwBuffer<double> in(fftw_alloc_real(n));
    FftwBuffer<fftw_complex> out(fftw_alloc_complex(bins));
    std::copy(window.begin(), window.end(), in.get());
    fftw_execute_dft_r2c(plan_cache().get(n), in.get(), out.get());

    Spectrum s;
    s.frequencies.resize(bins);
    s.amplitudes.resize(bins);
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < bins; ++k) {
        const double mag = std::hypot(out[k][0], out[k][1]);
        const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
        s.frequencies[k] = static_cast<double>(k) * sample_rate / nd;
        s.amplitudes[k] = unpaired ? mag / nd : 2.0 * mag / nd;
    }
    return s;
}

DominantPeak dominant_frequency(const Spectrum& spectrum, Band search_band) {
    if (!(search_band.lo <= search_band.hi)) {
        throw std::invalid_argument("search band must satisfy lo <= hi");
    }
    std::size_t best = 0;
    bool found = false;
    for (std::size_t k = 1; k < spectrum.frequencies.size(); ++k) {
        const double f = spectrum.frequencies[k];
        if (f < search_band.lo || f > search_band.hi) {
            continue;
        }
        // strict comparison keeps the lowest frequency on ties
        if (!found || spectrum.amplitudes[k] > spectrum.amplitudes[best]) {
            best = k;
            found = true;
        }
    }
    if (!found) {
        throw DataError("no spectral bins inside the search band [" + std::to_string(search_band.lo) + ", " +
                        std::to_string(search_band.hi) + "] Hz");
    }
    DominantPeak peak;
    peak.frequency = spectrum.frequencies[best];
    peak.amplitude = spectrum.amplitudes[best];
    peak.spl = peak.amplitude > 0.0 ? rms_to_spl(peak.amplitude / std::numbers::sqrt2)
                                    : -std::numeric_limits<double>::infinity();
    return peak;
}

double snr(const Spectrum& spectrum, const DominantPeak& peak, Band noise_band) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
        const double f = spectrum.frequencies[k];
        if (f >= noise_band.lo && f <= noise_band.hi) {
            sum += spectrum.amplitudes[k];
            ++count;
        }
    }
    if (count == 0) {
        throw DataError("noise band contains no spectral bins");
    }
    const double mean = sum / static_cast<double>(count);
    if (mean == 0.0) {
        throw DegenerateError("mean noise-band amplitude is zero");
    }
    return peak.amplitude / mean;
}

} // namespace ccid
