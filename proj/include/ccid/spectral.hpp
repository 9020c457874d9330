#pragma once

#include <span>
#include <utility>
#include <vector>

namespace ccid {

// Single-sided amplitude spectrum, rectangular taper. Bin k sits at
// k * sample_rate / n; a bin-centred sinusoid of amplitude A reads A.
struct Spectrum {
    std::vector<double> frequencies;  // Hz, ascending, uniform
    std::vector<double> amplitudes;   // Pa

    double resolution() const {
        return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0;
    }
};

struct DominantPeak {
    double frequency = 0.0;  // Hz
    double amplitude = 0.0;  // Pa (peak)
    double spl = 0.0;        // dB re 20 uPa, from amplitude / sqrt(2)
};

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Band&, const Band&) = default;
};

inline constexpr Band kDefaultSearchBand{50.0, 1000.0};
inline constexpr Band kNoiseBand{500.0, 600.0};

double rms(std::span<const double> window);

Spectrum amplitude_spectrum(std::span<const double> window, double sample_rate);

// Maximum-amplitude bin with lo <= f <= hi, DC excluded; ties go to the
// lower frequency.
DominantPeak dominant_frequency(const Spectrum& spectrum, Band search_band = kDefaultSearchBand);

// A(f_dom) over the mean amplitude of the bins inside `noise_band`.
double snr(const Spectrum& spectrum, const DominantPeak& peak, Band noise_band = kNoiseBand);

} // namespace ccid
