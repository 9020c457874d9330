// Acceptance run: one PASS/FAIL line per check, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ccid/classifier.hpp"
#include "ccid/complexity.hpp"
#include "ccid/embedding.hpp"
#include "ccid/pipeline.hpp"
#include "ccid/rqa.hpp"
#include "ccid/signal_io.hpp"
#include "ccid/spectral.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ccid;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << id << "  " << detail << std::endl;
    failures += ok ? 0 : 1;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

// Runs `body`, then reports whether it finished inside `budget_s`.
void timed(const std::string& id, double budget_s, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id + ".runtime", s < budget_s, fmt(s, 3) + " s (budget " + fmt(budget_s) + " s)");
}

std::vector<double> affine(std::vector<double> x, double a, double b) {
    for (double& v : x) {
        v = a * v + b;
    }
    return x;
}

// ---------------------------------------------------------------------------

void analytic_checks() {
    const auto sine = fixture::sine(40000, 146.0, 20000.0);
    const double r = rms(fixture::sine(20000, 50.0, 20000.0));
    report("1.rms_unit_sine", std::abs(r - 0.70711) <= 1e-3, "rms = " + fmt(r, 7));
    report("1.entropy_half", entropy(0.5) == 1.0, "E(0.5) = " + fmt(entropy(0.5), 17));
    const double ig = information_gain({5, 5}, {5, 0}, {0, 5});
    report("1.ig_perfect_split", ig == 1.0, "IG = " + fmt(ig, 17));

    const double fd = box_counting_dimension(fixture::ramp(3000)).value;
    report("1.fd_line", std::abs(fd - 1.0) <= 0.05, "FD = " + fmt(fd));

    double hn = 0, hw = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        hn += hurst_exponent(fixture::white_noise(3000, seed + 1)).value;
        hw += hurst_exponent(fixture::random_walk(3000, seed + 1)).value;
    }
    hn /= 100;
    hw /= 100;
    report("1.hurst_white_noise", std::abs(hn - 0.5) <= 0.1, "mean H = " + fmt(hn));
    report("1.hurst_random_walk", std::abs(hw - 1.0) <= 0.1, "mean H = " + fmt(hw));

    const auto delay = optimal_delay(sine);
    report("1.ami_first_minimum", !delay.flagged && delay.tau >= 31 && delay.tau <= 37,
           "tau = " + std::to_string(delay.tau));
    // quarter period of the 137-sample cycle
    const auto dim = embedding_dimension(std::span(sine).first(3000), 34, 10.0, 0.01);
    report("1.fnn_dimension", dim.dim == 2 && !dim.flagged, "d = " + std::to_string(dim.dim));
}

void oracle_checks() {
    std::mt19937_64 rng(20240601);

    bool hist_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + rng() % 50;
        std::bernoulli_distribution bit(std::uniform_real_distribution<double>(0.05, 0.95)(rng));
        RecurrenceMatrix mat(m, 0.0);
        std::vector<std::vector<int>> grid(m, std::vector<int>(m));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                grid[i][j] = bit(rng);
                mat.set(i, j, grid[i][j] == 1);
            }
        }
        const auto want = oracle::column_runs(grid);
        hist_ok = hist_ok && vertical_line_histogram(mat) == VerticalHistogram(want.begin(), want.end());
    }
    report("2.vertical_histogram_oracle", hist_ok, "200 random matrices, M <= 50");

    const std::vector<Feature> pair{Feature::hurst, Feature::fd};
    int split_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 39;
        std::vector<LabeledSample> data;
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        std::uniform_int_distribution<int> g(0, 5);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = trial % 2 ? u(rng) : g(rng);
            const double b = trial % 2 ? u(rng) : g(rng);
            const bool stable = (a - b > 0.3) != (rng() % 4 == 0);
            data.push_back(fixture::sample({{Feature::hurst, a}, {Feature::fd, b}},
                                           stable ? Label::stable : Label::unstable));
        }
        const auto got = best_split(data, pair);
        const auto want = oracle::exhaustive_split(data, pair);
        const bool same = got.has_value() == want.has_value() &&
                          (!got || (got->feature == want->feature && got->threshold == want->threshold &&
                                    std::abs(got->gain - want->gain) < 1e-9));
        split_mismatch += same ? 0 : 1;
    }
    report("2.best_split_oracle", split_mismatch == 0,
           std::to_string(split_mismatch) + " mismatches in 100 datasets of <= 40 samples");

    int count_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t length = 1 + rng() % 5000;
        const std::size_t stride = 1 + rng() % length;
        const std::size_t n = length + rng() % 50000;
        count_mismatch += window_count(n, {length, stride}) == oracle::window_count(n, length, stride) ? 0 : 1;
    }
    report("2.window_count_oracle", count_mismatch == 0, std::to_string(count_mismatch) + " mismatches in 100 triples");
}

void property_checks() {
    std::mt19937_64 rng(77);

    bool sym = true, lam_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 20 + rng() % 120;
        const auto t = embed(fixture::white_noise(n, rng()), 1 + rng() % 3, 1 + rng() % 4);
        const auto r = recurrence_matrix(t, epsilon_from_diameter(t, 0.05 + 0.95 * (rng() % 1000) / 1000.0));
        for (std::size_t i = 0; i < r.size() && sym; ++i) {
            sym = r(i, i);
            for (std::size_t j = 0; j < i && sym; ++j) {
                sym = r(i, j) == r(j, i);
            }
        }
        const double lam = laminarity(vertical_line_histogram(r));
        lam_ok = lam_ok && lam >= 0.0 && lam <= 1.0;
    }
    report("3.recurrence_symmetry_diagonal", sym, "1000 random trajectories");
    report("3.lam_unit_interval", lam_ok, "1000 random trajectories");

    bool ig_ok = true;
    for (int trial = 0; trial < 10000; ++trial) {
        const ClassCounts l{rng() % 30, rng() % 30};
        const ClassCounts r{rng() % 30, rng() % 30 + 1};
        ig_ok = ig_ok && information_gain({l.stable + r.stable, l.unstable + r.unstable}, l, r) >= 0.0;
    }
    report("3.ig_non_negative", ig_ok, "10000 random splits");

    double ami_dev = 0, fnn_dev = 0, fd_dev = 0, h_dev = 0;
    bool tau_same = true;
    for (int trial = 0; trial < 10; ++trial) {
        // Inputs in general position: an exactly periodic sample sequence has
        // zero-distance neighbours whose ratio test is decided by rounding.
        auto base = fixture::white_noise(3000, rng());
        if (trial % 2 == 0) {
            const auto tone = fixture::sine(3000, 140.0 + trial, 20000.0, 1.0, 0.1 * trial);
            for (std::size_t i = 0; i < base.size(); ++i) {
                base[i] = tone[i] + 0.05 * base[i];
            }
        }
        const double a = (rng() % 2 ? 1.0 : -1.0) * std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
        const double b = std::uniform_real_distribution<double>(-100, 100)(rng);
        const auto y = affine(base, a, b);
        for (std::size_t lag : {1u, 10u, 34u}) {
            ami_dev = std::max(ami_dev, std::abs(average_mutual_information(y, lag) - average_mutual_information(base, lag)));
        }
        tau_same = tau_same && optimal_delay(y).tau == optimal_delay(base).tau;
        for (std::size_t d = 1; d <= 3; ++d) {
            fnn_dev = std::max(fnn_dev, std::abs(fnn_fraction(y, 34, d) - fnn_fraction(base, 34, d)));
        }
        fd_dev = std::max(fd_dev, std::abs(box_counting_dimension(y).value - box_counting_dimension(base).value));
        h_dev = std::max(h_dev, std::abs(hurst_exponent(y).value - hurst_exponent(base).value));
    }
    report("3.affine_ami", ami_dev < 1e-9 && tau_same, "max |dI| = " + fmt(ami_dev) + " bits");
    report("3.affine_fnn", fnn_dev == 0.0, "max |dFNN| = " + fmt(fnn_dev));
    report("3.affine_fd", fd_dev < 1e-9, "max |dFD| = " + fmt(fd_dev));
    report("3.affine_hurst", h_dev < 1e-9, "max |dH| = " + fmt(h_dev));

    const std::vector<Feature> pair{Feature::hurst, Feature::fd};
    bool base_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LabeledSample> data;
        std::normal_distribution<double> g(0.0, 1.0);
        for (std::size_t i = 0; i < 5 + rng() % 60; ++i) {
            const double a = g(rng), b = g(rng);
            data.push_back(fixture::sample({{Feature::hurst, a}, {Feature::fd, b}},
                                           (a + b + 0.5 * g(rng) > 0) ? Label::stable : Label::unstable));
        }
        const auto s2 = best_split(data, pair, 2.0);
        for (double base : {std::exp(1.0), 10.0}) {
            const auto s = best_split(data, pair, base);
            base_ok = base_ok && s.has_value() == s2.has_value() &&
                      (!s || (s->feature == s2->feature && s->threshold == s2->threshold));
        }
    }
    report("3.split_log_base_invariance", base_ok, "200 datasets, bases 2, e, 10");

    bool fold_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LabeledSample> data;
        const std::size_t n = 10 + rng() % 300;
        for (std::size_t i = 0; i < n; ++i) {
            data.push_back(fixture::sample({{Feature::rms, double(i)}}, i % 3 ? Label::unstable : Label::stable));
        }
        const std::uint64_t seed = rng();
        const auto folds = stratified_folds(data, 5, seed);
        std::vector<int> seen(n, 0);
        for (const auto& f : folds) {
            for (std::size_t i : f) {
                seen[i] += 1;
            }
        }
        fold_ok = fold_ok && folds.size() == 5 && std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }) &&
                  stratified_folds(data, 5, seed) == folds;
    }
    report("3.kfold_disjoint_cover_deterministic", fold_ok, "50 random corpora");
}

// ---------------------------------------------------------------------------

struct AnalogOutputs {
    std::string train_csv, test_csv, models, report_json, report_text;
};

AnalogOutputs analog_run(const fs::path& dir) {
    FeatureTable train_table, test_table;
    const ExtractionConfig config;
    for (const auto& c : analog_conditions()) {
        auto record = synthesize_signal(c.spec);
        record.source_id = c.source_id;
        const auto table = extract_features(record, config);
        report("4.windows." + c.source_id, table.rows.size() == 247, std::to_string(table.rows.size()) + " windows");
        (c.training ? train_table : test_table).append(table);
    }
    train_table.config = test_table.config = config;

    const auto trained = train_models(labeled_samples(train_table));
    const auto result = classify_report(trained.suite, test_table);
    for (int m = 0; m < kModelCount; ++m) {
        const auto& name = model_definitions()[m].name;
        report("4.train_accuracy." + name, trained.training[m].accuracy >= 0.99,
               fmt(100 * trained.training[m].accuracy) + " % (>= 99)");
        report("4.test_accuracy." + name, result.models[m].evaluation.accuracy >= 0.90,
               fmt(100 * result.models[m].evaluation.accuracy) + " % (>= 90)");
    }

    FeatureTable all = train_table;
    all.append(test_table);
    for (Feature f : {Feature::fd, Feature::hurst, Feature::lam, Feature::tt}) {
        double s = 0, u = 0;
        std::size_t ns = 0, nu = 0;
        for (const auto& row : all.rows) {
            (row.label == Label::stable ? s : u) += row.features[f];
            (row.label == Label::stable ? ns : nu) += 1;
        }
        s /= static_cast<double>(ns);
        u /= static_cast<double>(nu);
        report(std::string("4.direction.") + std::string(to_string(f)), s > u,
               "stable mean " + fmt(s, 6) + " vs unstable mean " + fmt(u, 6));
    }

    write_feature_table(train_table, dir / "train_features.csv");
    write_feature_table(test_table, dir / "test_features.csv");
    return {slurp(dir / "train_features.csv") + slurp(dir / "train_features.csv.meta.json"),
            slurp(dir / "test_features.csv") + slurp(dir / "test_features.csv.meta.json"),
            trained.suite.to_json().dump(2) + "\n", result.to_json().dump(2) + "\n", result.to_text()};
}

void determinism_check(const AnalogOutputs& first, const std::string& cli) {
    TempDir dir;
    // Same seeds through the command line with a different worker count.
    const std::string cmd = cli + " --threads 3 analog --out-dir '" + dir.path().string() + "' >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const bool ran = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    report("5.rerun_completed", ran, "exit status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    if (!ran) {
        return;
    }
    const auto same = [&](const std::string& id, const std::string& a, const std::string& b) {
        report("5.byte_identical." + id, a == b, std::to_string(a.size()) + " bytes");
    };
    same("train_features", first.train_csv,
         slurp(dir / "train_features.csv") + slurp(dir / "train_features.csv.meta.json"));
    same("test_features", first.test_csv, slurp(dir / "test_features.csv") + slurp(dir / "test_features.csv.meta.json"));
    same("models", first.models, slurp(dir / "models.json"));
    same("report_json", first.report_json, slurp(dir / "report.json"));
    same("report_text", first.report_text, slurp(dir / "report.txt"));
}

} // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    timed("1", 5.0, analytic_checks);
    timed("2", 30.0, oracle_checks);
    timed("3", 60.0, property_checks);
    TempDir dir;
    AnalogOutputs outputs;
    timed("4", 120.0, [&] { outputs = analog_run(dir.path()); });
    if (cli.empty()) {
        report("5.rerun_completed", false, "no command-line binary given");
    } else {
        determinism_check(outputs, cli);
    }
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
