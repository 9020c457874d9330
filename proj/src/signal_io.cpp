#include "ccid/signal_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ccid/error.hpp"
#include "ccid/spectral.hpp"
#include "filters.hpp"

namespace ccid {

std::string_view to_string(Label label) { return label == Label::stable ? "stable" : "unstable"; }

Label label_from_string(std::string_view text) {
    if (text == "stable" || text == "1") {
        return Label::stable;
    }
    if (text == "unstable" || text == "0") {
        return Label::unstable;
    }
    throw DataError("unknown label '" + std::string(text) + "'");
}

void TimeSeriesRecord::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw DataError("sample rate must be positive and finite");
    }
    if (samples.empty()) {
        throw DataError("record '" + source_id + "' has no samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i])) {
            throw DataError("non-finite sample at index " + std::to_string(i));
        }
    }
}

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

std::size_t window_count(std::size_t record_length, const WindowSpec& spec) {
    if (spec.length == 0 || spec.stride == 0 || spec.stride > spec.length) {
        throw std::invalid_argument("window spec requires 0 < stride <= length");
    }
    if (record_length < spec.length) {
        return 0;
    }
    return (record_length - spec.length) / spec.stride + 1;
}

std::vector<Window> slide_windows(const TimeSeriesRecord& record, const WindowSpec& spec) {
    const std::size_t n = record.samples.size();
    const std::size_t count = window_count(n, spec);
    if (count == 0) {
        throw DataError("record of " + std::to_string(n) + " samples is shorter than the window length " +
                        std::to_string(spec.length));
    }
    std::vector<Window> windows;
    windows.reserve(count);
    const std::span<const double> all(record.samples);
    for (std::size_t w = 0; w < count; ++w) {
        const std::size_t start = w * spec.stride;
        windows.push_back({start, all.subspan(start, spec.length)});
    }
    return windows;
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

FileFormat parse_format(std::string_view name) {
    if (name == "csv") {
        return FileFormat::csv;
    }
    if (name == "raw_f64" || name == "raw" || name == "f64") {
        return FileFormat::raw_f64;
    }
    throw std::invalid_argument("unknown file format '" + std::string(name) + "'");
}

FileFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? FileFormat::csv : FileFormat::raw_f64;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view field) {
    double value = 0.0;
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        return std::nullopt;
    }
    return value;
}

// DAQ rates are integral in practice; snap when within 1 ppm.
double snap_rate(double rate) {
    const double rounded = std::round(rate);
    return std::abs(rate - rounded) <= 1e-6 * rate ? rounded : rate;
}

TimeSeriesRecord load_csv(const std::filesystem::path& path, std::optional<double> sample_rate) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    int time_col = -1;
    int pressure_col = -1;
    std::size_t columns = 0;
    bool first = true;
    std::vector<double> times;
    std::vector<double> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto fields = split_fields(text);
        if (first) {
            first = false;
            columns = fields.size();
            const bool is_header = std::any_of(fields.begin(), fields.end(),
                                               [](std::string_view f) { return !parse_number(f); });
            if (is_header) {
                for (std::size_t c = 0; c < fields.size(); ++c) {
                    if (fields[c] == "time_s") {
                        time_col = static_cast<int>(c);
                    } else if (fields[c] == "pressure_pa") {
                        pressure_col = static_cast<int>(c);
                    }
                }
                if (pressure_col < 0) {
                    throw DataError(path.string() + ": header lacks a pressure_pa column");
                }
                continue;
            }
            if (columns == 1) {
                pressure_col = 0;
            } else if (columns == 2) {
                time_col = 0;
                pressure_col = 1;
            } else {
                throw DataError(path.string() + ": expected 1 or 2 columns, found " + std::to_string(columns));
            }
        }
        if (fields.size() != columns) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                            " fields");
        }
        const std::size_t row = samples.size();
        const auto p = parse_number(fields[static_cast<std::size_t>(pressure_col)]);
        if (!p) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": cannot parse pressure '" +
                            std::string(fields[static_cast<std::size_t>(pressure_col)]) + "'");
        }
        if (!std::isfinite(*p)) {
            throw DataError(path.string() + ": non-finite sample at row " + std::to_string(row) + " (line " +
                            std::to_string(line_no) + ")");
        }
        samples.push_back(*p);
        if (time_col >= 0) {
            const auto t = parse_number(fields[static_cast<std::size_t>(time_col)]);
            if (!t || !std::isfinite(*t)) {
                throw DataError(path.string() + ": bad time value at row " + std::to_string(row) + " (line " +
                                std::to_string(line_no) + ")");
            }
            times.push_back(*t);
        }
    }
    if (samples.empty()) {
        throw DataError(path.string() + ": no samples");
    }

    TimeSeriesRecord record;
    record.samples = std::move(samples);
    record.source_id = path.stem().string();
    if (time_col >= 0 && times.size() >= 2) {
        const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
        if (!(dt > 0.0)) {
            throw DataError(path.string() + ": time column is not increasing");
        }
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt) {
                throw DataError(path.string() + ": non-uniform time column at row " + std::to_string(i));
            }
        }
        record.sample_rate = snap_rate(1.0 / dt);
        if (sample_rate && std::abs(*sample_rate - record.sample_rate) > 1e-6 * *sample_rate) {
            throw DataError(path.string() + ": time column implies " + std::to_string(record.sample_rate) +
                            " Hz but " + std::to_string(*sample_rate) + " Hz was given");
        }
    } else if (sample_rate) {
        record.sample_rate = *sample_rate;
    } else {
        throw DataError(path.string() + ": no time column; a sample rate must be supplied");
    }
    record.validate();
    return record;
}

TimeSeriesRecord load_raw(const std::filesystem::path& path, std::optional<double> sample_rate) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % sizeof(double) != 0) {
        throw DataError(path.string() + ": size " + std::to_string(bytes.size()) + " is not a multiple of 8 bytes");
    }
    TimeSeriesRecord record;
    record.samples.resize(bytes.size() / sizeof(double));
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, bytes.data() + i * sizeof(double), sizeof(bits));
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap64(bits);
        }
        record.samples[i] = std::bit_cast<double>(bits);
    }
    record.sample_rate = sample_rate.value_or(kDefaultSampleRate);
    record.source_id = path.stem().string();
    record.validate();
    return record;
}

} // namespace

TimeSeriesRecord load_timeseries(const std::filesystem::path& path, FileFormat format,
                                 std::optional<double> sample_rate) {
    if (sample_rate && !(*sample_rate > 0.0)) {
        throw std::invalid_argument("sample rate must be positive");
    }
    return format == FileFormat::csv ? load_csv(path, sample_rate) : load_raw(path, sample_rate);
}

void save_timeseries(const TimeSeriesRecord& record, const std::filesystem::path& path, FileFormat format) {
    record.validate();
    if (format == FileFormat::raw_f64) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw DataError("cannot write " + path.string());
        }
        for (double v : record.samples) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            if constexpr (std::endian::native == std::endian::big) {
                bits = __builtin_bswap64(bits);
            }
            out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
        }
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << "time_s,pressure_pa\n";
    char buf[64];
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        const double t = static_cast<double>(i) / record.sample_rate;
        auto r = std::to_chars(buf, buf + sizeof(buf), t);
        out.write(buf, r.ptr - buf);
        out.put(',');
        r = std::to_chars(buf, buf + sizeof(buf), record.samples[i]);
        out.write(buf, r.ptr - buf);
        out.put('\n');
    }
}

// ---------------------------------------------------------------------------
// Sub-data length validation
// ---------------------------------------------------------------------------

namespace {

std::vector<double> band_amplitudes(const Spectrum& s, double band_width, std::size_t bands) {
    std::vector<double> power(bands, 0.0);
    for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
        const auto b = std::min(bands - 1, static_cast<std::size_t>(s.frequencies[k] / band_width));
        power[b] += s.amplitudes[k] * s.amplitudes[k];
    }
    for (double& p : power) {
        p = std::sqrt(p);
    }
    return power;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        return 1.0;
    }
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> histogram(std::span<const double> x, double lo, double hi, std::size_t bins) {
    std::vector<double> counts(bins, 0.5);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : x) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
        }
        counts[b] += 1.0;
    }
    const double total = static_cast<double>(x.size()) + 0.5 * static_cast<double>(bins);
    for (double& c : counts) {
        c /= total;
    }
    return counts;
}

} // namespace

SubLengthReport validate_sub_length(const TimeSeriesRecord& record, std::size_t candidate_length) {
    record.validate();
    const std::size_t n = record.samples.size();
    if (candidate_length < kMinSubLength) {
        throw DataError("candidate length " + std::to_string(candidate_length) + " is below the minimum of " +
                        std::to_string(kMinSubLength));
    }
    if (candidate_length > n) {
        throw DataError("candidate length exceeds the record length");
    }
    const std::span<const double> full(record.samples);
    const auto slice = full.first(candidate_length);

    const Spectrum s_slice = amplitude_spectrum(slice, record.sample_rate);
    const Spectrum s_full = amplitude_spectrum(full, record.sample_rate);
    const double band_width = 2.0 * record.sample_rate / static_cast<double>(candidate_length);
    const auto bands = static_cast<std::size_t>(record.sample_rate / 2.0 / band_width) + 1;
    const auto a = band_amplitudes(s_slice, band_width, bands);
    const auto b = band_amplitudes(s_full, band_width, bands);

    SubLengthReport report;
    report.candidate_length = candidate_length;
    report.spectral_correlation = pearson(std::span(a).subspan(1), std::span(b).subspan(1));

    const auto [lo, hi] = std::minmax_element(full.begin(), full.end());
    const auto p = histogram(slice, *lo, *hi, kPdfBins);
    const auto q = histogram(full, *lo, *hi, kPdfBins);
    double kl = 0.0;
    for (std::size_t i = 0; i < kPdfBins; ++i) {
        kl += p[i] * std::log(p[i] / q[i]) + q[i] * std::log(q[i] / p[i]);
    }
    report.pdf_divergence = kl;
    return report;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

SynthKind parse_synth_kind(std::string_view name) {
    if (name == "stable_noise" || name == "stable") {
        return SynthKind::stable_noise;
    }
    if (name == "unstable_limit_cycle" || name == "unstable") {
        return SynthKind::unstable_limit_cycle;
    }
    throw std::invalid_argument("unknown synth kind '" + std::string(name) + "'");
}

std::string_view to_string(SynthKind kind) {
    return kind == SynthKind::stable_noise ? "stable_noise" : "unstable_limit_cycle";
}

void SynthSpec::validate() const {
    if (!(duration > 0.0)) {
        throw std::invalid_argument("synth duration must be positive");
    }
    if (!(sample_rate > 0.0)) {
        throw std::invalid_argument("synth sample rate must be positive");
    }
    if (!(tone_frequency > 0.0) || !(tone_frequency < sample_rate / 2.0)) {
        throw std::invalid_argument("tone frequency must lie in (0, sample_rate/2)");
    }
    if (!(noise_cutoff > 0.0) || !(noise_cutoff < sample_rate / 2.0)) {
        throw std::invalid_argument("noise cutoff must lie in (0, sample_rate/2)");
    }
    if (!(rumble_corner > 0.0) || !(rumble_corner < noise_cutoff)) {
        throw std::invalid_argument("rumble corner must lie in (0, noise_cutoff)");
    }
    if (!(rumble_fraction >= 0.0 && rumble_fraction <= 1.0)) {
        throw std::invalid_argument("rumble fraction must lie in [0, 1]");
    }
}

double spl_to_rms(double spl_db) { return kReferencePressure * std::pow(10.0, spl_db / 20.0); }

double rms_to_spl(double rms_pa) { return 20.0 * std::log10(rms_pa / kReferencePressure); }

namespace {

void normalise_rms(std::vector<double>& x) {
    const double r = rms(x);
    if (r > 0.0) {
        for (double& v : x) {
            v /= r;
        }
    }
}

// Filter start-up samples discarded before the record begins.
constexpr std::size_t kWarmup = 8000;

std::vector<double> filtered_gaussian(std::mt19937_64& rng, std::size_t n, double sample_rate, double cutoff,
                                      std::optional<double> rumble_corner) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    detail::ButterworthLowpass band_limit(4, cutoff, sample_rate);
    std::optional<detail::ButterworthLowpass> rumble;
    if (rumble_corner) {
        rumble.emplace(2, *rumble_corner, sample_rate);
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n + kWarmup; ++i) {
        double v = gauss(rng);
        if (rumble) {
            v = rumble->step(v);
        }
        v = band_limit.step(v);
        if (i >= kWarmup) {
            out.push_back(v);
        }
    }
    normalise_rms(out);
    return out;
}

} // namespace

TimeSeriesRecord synthesize_signal(const SynthSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
    if (n == 0) {
        throw std::invalid_argument("synth duration is shorter than one sample");
    }
    std::mt19937_64 rng(spec.seed);
    const auto broadband = filtered_gaussian(rng, n, spec.sample_rate, spec.noise_cutoff, std::nullopt);
    const auto rumble = filtered_gaussian(rng, n, spec.sample_rate, spec.noise_cutoff, spec.rumble_corner);

    std::vector<double> noise(n);
    const double wr = std::sqrt(spec.rumble_fraction);
    const double wb = std::sqrt(1.0 - spec.rumble_fraction);
    for (std::size_t i = 0; i < n; ++i) {
        noise[i] = wr * rumble[i] + wb * broadband[i];
    }
    normalise_rms(noise);

    TimeSeriesRecord record;
    record.sample_rate = spec.sample_rate;
    record.samples.resize(n);
    const double noise_rms = spl_to_rms(spec.noise_floor_spl);
    for (std::size_t i = 0; i < n; ++i) {
        record.samples[i] = noise_rms * noise[i];
    }
    if (spec.kind == SynthKind::unstable_limit_cycle) {
        const double amplitude = std::numbers::sqrt2 * spl_to_rms(spec.tone_spl);
        const double w = 2.0 * std::numbers::pi * spec.tone_frequency / spec.sample_rate;
        for (std::size_t i = 0; i < n; ++i) {
            record.samples[i] += amplitude * std::sin(w * static_cast<double>(i));
        }
        record.label = Label::unstable;
    } else {
        record.label = Label::stable;
    }
    std::ostringstream id;
    id << (spec.kind == SynthKind::stable_noise ? "stable" : "unstable") << "-s" << spec.seed;
    record.source_id = id.str();
    return record;
}

} // namespace ccid
