#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccid {

// Numeric encoding is fixed: stable -> 1, unstable -> 0.
enum class Label : int { unstable = 0, stable = 1 };

std::string_view to_string(Label label);
Label label_from_string(std::string_view text);

inline constexpr double kDefaultSampleRate = 20000.0;

struct TimeSeriesRecord {
    std::vector<double> samples;              // acoustic pressure, Pa
    double sample_rate = kDefaultSampleRate;  // Hz
    std::optional<Label> label;
    std::optional<double> condition;          // equivalence ratio
    std::string source_id;

    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

    // Throws DataError on an empty record, non-positive rate or a non-finite
    // sample (the message names the index of the first offender).
    void validate() const;
};

struct WindowSpec {
    std::size_t length = 3000;
    std::size_t stride = 150;
    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct Window {
    std::size_t start = 0;
    std::span<const double> samples;
};

std::size_t window_count(std::size_t record_length, const WindowSpec& spec);

// Read-only views into `record`; the record must outlive the result.
// Partial trailing windows are dropped.
std::vector<Window> slide_windows(const TimeSeriesRecord& record, const WindowSpec& spec);

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------
enum class FileFormat { csv, raw_f64 };

FileFormat parse_format(std::string_view name);
FileFormat format_from_path(const std::filesystem::path& path);

// CSV: optional header, columns (time_s, pressure_pa) or (pressure_pa).
// A time column must be uniform within 1 ppm and defines the sample rate;
// otherwise `sample_rate` is required. raw_f64 is little-endian binary64.
TimeSeriesRecord load_timeseries(const std::filesystem::path& path, FileFormat format,
                                 std::optional<double> sample_rate = std::nullopt);

void save_timeseries(const TimeSeriesRecord& record, const std::filesystem::path& path,
                     FileFormat format);

// ---------------------------------------------------------------------------
// Sub-data length validation
// ---------------------------------------------------------------------------
struct SubLengthReport {
    std::size_t candidate_length = 0;
    double spectral_correlation = 0.0;  // Pearson, band amplitudes
    double pdf_divergence = 0.0;        // symmetrized KL, nats
};

inline constexpr std::size_t kMinSubLength = 256;
inline constexpr std::size_t kPdfBins = 64;

// Compares the first `candidate_length` samples with the whole record.
// Spectra are mapped onto a shared band grid (band width = two bins of the
// candidate slice; band amplitude = root-sum-square of member bins, DC band
// excluded) before correlating. Histograms use 64 bins over the record's
// range with half-count smoothing.
SubLengthReport validate_sub_length(const TimeSeriesRecord& record, std::size_t candidate_length);

// ---------------------------------------------------------------------------
// Synthetic signals
// ---------------------------------------------------------------------------
enum class SynthKind { stable_noise, unstable_limit_cycle };

SynthKind parse_synth_kind(std::string_view name);
std::string_view to_string(SynthKind kind);

struct SynthSpec {
    SynthKind kind = SynthKind::stable_noise;
    double duration = 2.0;           // s
    double sample_rate = kDefaultSampleRate;
    double tone_frequency = 146.0;   // Hz
    double tone_spl = 127.0;         // dB re 20 uPa
    double noise_floor_spl = 118.0;  // dB re 20 uPa, total noise RMS
    // Noise floor shape: a low-frequency (rumble) component below
    // `rumble_corner` carrying `rumble_fraction` of the noise power, plus a
    // broadband component band-limited to `noise_cutoff`.
    double noise_cutoff = 300.0;     // Hz
    double rumble_corner = 10.0;     // Hz
    double rumble_fraction = 0.5;
    std::uint64_t seed = 1;

    void validate() const;
};

inline constexpr double kReferencePressure = 20e-6;  // Pa

double spl_to_rms(double spl_db);
double rms_to_spl(double rms_pa);

// Deterministic for a fixed spec (bit-identical across calls).
TimeSeriesRecord synthesize_signal(const SynthSpec& spec);

} // namespace ccid
