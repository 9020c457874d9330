#include <cmath>
#include <cstring>

#include "ccid/error.hpp"
#include "ccid/signal_io.hpp"
#include "ccid/spectral.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ccid;

TEST_SUITE("signal_io") {

TEST_CASE("label encoding is stable=1, unstable=0") {
    CHECK(static_cast<int>(Label::stable) == 1);
    CHECK(static_cast<int>(Label::unstable) == 0);
    CHECK(label_from_string("1") == Label::stable);
    CHECK(label_from_string("unstable") == Label::unstable);
    CHECK_THROWS_AS(label_from_string("maybe"), DataError);
}

TEST_CASE("two-column CSV derives the sample rate from the time column") {
    TempDir dir;
    write_file(dir / "a.csv", "0.0,1.0\n5e-5,2.0\n1e-4,3.0\n");
    const auto r = load_timeseries(dir / "a.csv", FileFormat::csv);
    CHECK(r.samples == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(r.sample_rate == 20000.0);
}

TEST_CASE("CSV header and single column") {
    TempDir dir;
    write_file(dir / "h.csv", "time_s,pressure_pa\n0,4\n0.001,5\n");
    CHECK(load_timeseries(dir / "h.csv", FileFormat::csv).sample_rate == doctest::Approx(1000.0));

    write_file(dir / "p.csv", "pressure_pa\n1\n2\n");
    CHECK_THROWS_AS(load_timeseries(dir / "p.csv", FileFormat::csv), DataError);
    const auto r = load_timeseries(dir / "p.csv", FileFormat::csv, 20000.0);
    CHECK(r.samples.size() == 2);
    CHECK(r.sample_rate == 20000.0);
}

TEST_CASE("CSV rejects non-finite samples with the row index") {
    TempDir dir;
    write_file(dir / "n.csv", "0,1\n5e-5,NaN\n1e-4,3\n");
    try {
        load_timeseries(dir / "n.csv", FileFormat::csv);
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    write_file(dir / "i.csv", "pressure_pa\n1\ninf\n");
    CHECK_THROWS_AS(load_timeseries(dir / "i.csv", FileFormat::csv, 20000.0), DataError);
}

TEST_CASE("CSV rejects a non-uniform time column") {
    TempDir dir;
    write_file(dir / "u.csv", "0,1\n5e-5,2\n2e-4,3\n");
    CHECK_THROWS_AS(load_timeseries(dir / "u.csv", FileFormat::csv), DataError);
}

TEST_CASE("malformed and missing files") {
    TempDir dir;
    write_file(dir / "bad.csv", "0,1\n5e-5,abc\n");
    CHECK_THROWS_AS(load_timeseries(dir / "bad.csv", FileFormat::csv), DataError);
    CHECK_THROWS_AS(load_timeseries(dir / "none.csv", FileFormat::csv), DataError);
    write_file(dir / "odd.f64", std::string(12, '\0'));
    CHECK_THROWS_AS(load_timeseries(dir / "odd.f64", FileFormat::raw_f64), DataError);
}

TEST_CASE("raw f64 of 40000 values at 20 kHz is a 2 s record and round-trips bit-exactly") {
    TempDir dir;
    auto x = fixture::white_noise(40000, 3);
    x[5] = -0.0;
    x[6] = std::nextafter(1.0, 2.0);
    TimeSeriesRecord rec;
    rec.samples = x;
    save_timeseries(rec, dir / "x.f64", FileFormat::raw_f64);
    CHECK(std::filesystem::file_size(dir / "x.f64") == 40000 * 8);
    const auto back = load_timeseries(dir / "x.f64", FileFormat::raw_f64, 20000.0);
    CHECK(back.duration() == doctest::Approx(2.0));
    REQUIRE(back.samples.size() == x.size());
    CHECK(std::memcmp(back.samples.data(), x.data(), x.size() * sizeof(double)) == 0);
}

TEST_CASE("CSV save/load preserves values exactly") {
    TempDir dir;
    TimeSeriesRecord rec;
    rec.samples = fixture::white_noise(500, 8);
    save_timeseries(rec, dir / "x.csv", FileFormat::csv);
    const auto back = load_timeseries(dir / "x.csv", FileFormat::csv);
    CHECK(back.samples == rec.samples);
    CHECK(back.sample_rate == 20000.0);
}

TEST_CASE("window counts") {
    CHECK(window_count(40000, {3000, 150}) == 247);
    CHECK(window_count(3000, {3000, 150}) == 1);
    CHECK(window_count(2999, {3000, 150}) == 0);
    TimeSeriesRecord short_rec;
    short_rec.samples.assign(2999, 0.0);
    CHECK_THROWS_AS(slide_windows(short_rec, {3000, 150}), DataError);
    CHECK_THROWS_AS(window_count(5000, {3000, 0}), std::invalid_argument);
    CHECK_THROWS_AS(window_count(5000, {3000, 3001}), std::invalid_argument);
}

TEST_CASE("windows tile the record as an arithmetic progression of starts") {
    TimeSeriesRecord rec;
    rec.samples = fixture::ramp(10000);
    const WindowSpec spec{1000, 333};
    const auto windows = slide_windows(rec, spec);
    REQUIRE(windows.size() == oracle::window_count(10000, 1000, 333));
    for (std::size_t i = 0; i < windows.size(); ++i) {
        CHECK(windows[i].start == i * spec.stride);
        CHECK(windows[i].samples.size() == spec.length);
        CHECK(windows[i].samples.front() == static_cast<double>(windows[i].start));
    }
    CHECK(windows.back().start + spec.length <= rec.samples.size());
}

TEST_CASE("sub-length validation") {
    TimeSeriesRecord tone;
    tone.samples = fixture::sine(40000, 146.0, 20000.0);
    SUBCASE("self comparison") {
        TimeSeriesRecord small;
        small.samples = fixture::white_noise(5000, 1);
        const auto r = validate_sub_length(small, 5000);
        CHECK(r.spectral_correlation == doctest::Approx(1.0));
        CHECK(r.pdf_divergence == doctest::Approx(0.0));
    }
    SUBCASE("pure tone keeps its spectral shape at 3000 samples") {
        CHECK(validate_sub_length(tone, 3000).spectral_correlation > 0.99);
    }
    SUBCASE("shorter noise slices diverge more") {
        TimeSeriesRecord noise;
        noise.samples = fixture::white_noise(40000, 12);
        CHECK(validate_sub_length(noise, 256).pdf_divergence > validate_sub_length(noise, 3000).pdf_divergence);
    }
    SUBCASE("too short") {
        CHECK_THROWS_AS(validate_sub_length(tone, 255), DataError);
        CHECK_THROWS_AS(validate_sub_length(tone, 40001), DataError);
    }
}

TEST_CASE("SPL conversions") {
    CHECK(spl_to_rms(127.0) == doctest::Approx(44.77).epsilon(1e-3));
    CHECK(rms_to_spl(spl_to_rms(93.5)) == doctest::Approx(93.5));
}

TEST_CASE("synthesis") {
    SynthSpec spec;
    spec.kind = SynthKind::unstable_limit_cycle;
    spec.duration = 0.5;
    const auto a = synthesize_signal(spec);
    const auto b = synthesize_signal(spec);
    CHECK(std::memcmp(a.samples.data(), b.samples.data(), a.samples.size() * sizeof(double)) == 0);
    CHECK(a.label == Label::unstable);
    CHECK(a.samples.size() == 10000);

    spec.seed = 2;
    CHECK(synthesize_signal(spec).samples != a.samples);

    SUBCASE("tone RMS matches the requested SPL") {
        SynthSpec quiet = spec;
        quiet.noise_floor_spl = 40.0;  // negligible next to 127 dB
        quiet.duration = 1.0;          // integer number of 146 Hz periods is not needed at this length
        const auto r = synthesize_signal(quiet);
        CHECK(rms(r.samples) == doctest::Approx(44.77).epsilon(2e-3));
    }
    SUBCASE("dominant window peak sits at the tone") {
        const std::span<const double> w(a.samples.data(), 3000);
        const auto peak = dominant_frequency(amplitude_spectrum(w, 20000.0));
        CHECK(std::abs(peak.frequency - 146.0) <= 20000.0 / 3000.0);
    }
    SUBCASE("noise floor level and label") {
        SynthSpec s;
        s.kind = SynthKind::stable_noise;
        s.duration = 1.0;
        const auto r = synthesize_signal(s);
        CHECK(r.label == Label::stable);
        CHECK(rms(r.samples) == doctest::Approx(spl_to_rms(s.noise_floor_spl)).epsilon(1e-9));
        const auto spectrum = amplitude_spectrum(r.samples, 20000.0);
        double below = 0, above = 0;
        for (std::size_t k = 1; k < spectrum.frequencies.size(); ++k) {
            (spectrum.frequencies[k] < 1000.0 ? below : above) += spectrum.amplitudes[k] * spectrum.amplitudes[k];
        }
        CHECK(above < 1e-3 * below);
    }
    SUBCASE("invalid specs") {
        SynthSpec bad;
        bad.duration = 0.0;
        CHECK_THROWS_AS(synthesize_signal(bad), std::invalid_argument);
        bad = {};
        bad.tone_frequency = 10000.0;
        CHECK_THROWS_AS(synthesize_signal(bad), std::invalid_argument);
    }
}

} // TEST_SUITE
