// ccid: command-line front end for the combustion-condition identification
// pipeline. Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric degeneracy.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccid/classifier.hpp"
#include "ccid/complexity.hpp"
#include "ccid/embedding.hpp"
#include "ccid/error.hpp"
#include "ccid/pipeline.hpp"
#include "ccid/rqa.hpp"
#include "ccid/signal_io.hpp"
#include "ccid/spectral.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDegenerate = 3;

// ---------------------------------------------------------------------------
// Shared options and configuration
// ---------------------------------------------------------------------------

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
};

struct RunConfig {
    ccid::ExtractionConfig extraction;
    ccid::TrainConfig train;
    ccid::SynthSpec synth;
};

void read_train_config(const json& j, ccid::TrainConfig& c) {
    c.max_depth = j.value("max_depth", c.max_depth);
    c.min_samples_leaf = j.value("min_samples_leaf", c.min_samples_leaf);
    c.purity_stop = j.value("purity_stop", c.purity_stop);
    c.min_ig = j.value("min_ig", c.min_ig);
    c.seed = j.value("seed", c.seed);
}

void read_synth_config(const json& j, ccid::SynthSpec& s) {
    s.duration = j.value("duration", s.duration);
    s.sample_rate = j.value("sample_rate", s.sample_rate);
    s.tone_frequency = j.value("tone_frequency", s.tone_frequency);
    s.tone_spl = j.value("tone_spl", s.tone_spl);
    s.noise_floor_spl = j.value("noise_floor_spl", s.noise_floor_spl);
    s.noise_cutoff = j.value("noise_cutoff", s.noise_cutoff);
    s.rumble_corner = j.value("rumble_corner", s.rumble_corner);
    s.rumble_fraction = j.value("rumble_fraction", s.rumble_fraction);
    s.seed = j.value("seed", s.seed);
}

RunConfig load_config(const Globals& g) {
    RunConfig rc;
    if (!g.config_path.empty()) {
        json j;
        try {
            j = json::parse(ccid::read_text_file(g.config_path));
            if (j.contains("extraction")) {
                rc.extraction = ccid::ExtractionConfig::from_json(j["extraction"]);
            }
            if (j.contains("train")) {
                read_train_config(j["train"], rc.train);
            }
            if (j.contains("synth")) {
                read_synth_config(j["synth"], rc.synth);
            }
        } catch (const json::exception& e) {
            throw ccid::DataError(g.config_path + ": " + e.what());
        }
    }
    if (g.seed) {
        rc.train.seed = *g.seed;
        rc.synth.seed = *g.seed;
    }
    rc.train.validate();
    return rc;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        ccid::write_text_file(out, text);
    }
}

void emit_json(const json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

struct RecordInput {
    std::string path;
    std::string format;
    std::optional<double> rate;

    void add_to(CLI::App* sub) {
        sub->add_option("--in", path, "input time series (CSV or raw little-endian f64)")->required();
        sub->add_option("--format", format, "csv or raw (default: from extension)");
        sub->add_option("--rate", rate, "sample rate in Hz (required for raw and single-column CSV)");
    }

    ccid::TimeSeriesRecord load() const {
        const auto f = format.empty() ? ccid::format_from_path(path) : ccid::parse_format(format);
        auto record = ccid::load_timeseries(path, f, rate);
        if (record.source_id.empty()) {
            record.source_id = fs::path(path).stem().string();
        }
        return record;
    }
};

std::span<const double> pick_window(const ccid::TimeSeriesRecord& record, const ccid::WindowSpec& spec,
                                    std::size_t index) {
    const auto n = ccid::window_count(record.samples.size(), spec);
    if (index >= n) {
        throw ccid::DataError("window index " + std::to_string(index) + " out of range (record has " +
                              std::to_string(n) + " windows)");
    }
    return std::span<const double>(record.samples).subspan(index * spec.stride, spec.length);
}

json fit_json(const ccid::LogLogFit& fit) {
    json points = json::array();
    for (std::size_t i = 0; i < fit.xs.size(); ++i) {
        points.push_back({fit.xs[i], fit.ys[i]});
    }
    return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}, {"points", points}};
}

ccid::FeatureTable load_tables(const std::vector<std::string>& paths) {
    ccid::FeatureTable table;
    bool first = true;
    for (const auto& p : paths) {
        auto t = ccid::read_feature_table(p);
        if (first) {
            table.config = t.config;
            first = false;
        }
        table.append(t);
    }
    return table;
}

// A model file holds either one tree or a three-model suite.
struct LoadedModel {
    std::optional<ccid::ModelSuite> suite;
    std::optional<ccid::DecisionTree> tree;
};

LoadedModel load_model(const std::string& path) {
    json j;
    try {
        j = json::parse(ccid::read_text_file(path));
    } catch (const json::exception& e) {
        throw ccid::DataError(path + ": " + e.what());
    }
    LoadedModel m;
    if (j.contains("models")) {
        m.suite = ccid::ModelSuite::from_json(j);
    } else {
        m.tree = ccid::DecisionTree::from_json(j);
    }
    return m;
}

std::pair<ccid::Feature, ccid::Feature> tree_pair(const ccid::DecisionTree& tree) {
    const auto& f = tree.features();
    if (f.size() != 2) {
        throw ccid::DataError("boundary grids need a tree over exactly two features");
    }
    return {f[0], f[1]};
}

// ---------------------------------------------------------------------------
// Five-condition synthetic run
// ---------------------------------------------------------------------------

void run_analog(const RunConfig& rc, const Globals& g, const fs::path& out_dir, bool save_records) {
    fs::create_directories(out_dir);
    ccid::AnalogConfig ac;
    ac.noise = rc.synth;
    ac.duration = rc.synth.duration;
    ac.sample_rate = rc.synth.sample_rate;
    if (g.seed) {
        ac.seed = *g.seed;
    }
    ccid::FeatureTable train_table, test_table;
    for (const auto& c : ccid::analog_conditions(ac)) {
        auto record = ccid::synthesize_signal(c.spec);
        record.source_id = c.source_id;
        if (save_records) {
            ccid::save_timeseries(record, out_dir / (c.source_id + ".csv"), ccid::FileFormat::csv);
        }
        auto table = ccid::extract_features(record, rc.extraction, {g.threads});
        table.config = rc.extraction;
        (c.training ? train_table : test_table).append(table);
        std::cerr << c.source_id << ": " << table.rows.size() << " windows\n";
    }
    train_table.config = test_table.config = rc.extraction;
    ccid::write_feature_table(train_table, out_dir / "train_features.csv");
    ccid::write_feature_table(test_table, out_dir / "test_features.csv");

    const auto samples = ccid::labeled_samples(train_table);
    const auto trained = ccid::train_models(samples, rc.train);
    ccid::write_text_file(out_dir / "models.json", trained.suite.to_json().dump(2) + "\n");

    json folds = json::array();
    for (int m = 0; m < ccid::kModelCount; ++m) {
        folds.push_back({{"name", ccid::model_definitions()[m].name},
                         {"training_accuracy", trained.training[m].accuracy},
                         {"cross_validation", trained.folds[m].to_json()}});
    }
    ccid::write_text_file(out_dir / "training.json", folds.dump(2) + "\n");

    const auto report = ccid::classify_report(trained.suite, test_table);
    ccid::write_text_file(out_dir / "report.json", report.to_json().dump(2) + "\n");
    ccid::write_text_file(out_dir / "report.txt", report.to_text());

    std::cout << "training\n";
    for (int m = 0; m < ccid::kModelCount; ++m) {
        std::cout << "  " << ccid::model_definitions()[m].name << "  accuracy "
                  << ccid::format_double(trained.training[m].accuracy) << "  5-fold "
                  << ccid::format_double(trained.folds[m].mean_test_accuracy) << '\n';
    }
    std::cout << "test\n" << report.to_text();
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"Combustion condition identification from acoustic pressure"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "seed for synthesis and fold shuffling");
    app.add_option("--threads", g.threads, "worker threads for extraction (0 = all cores)");

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize a stable or unstable pressure record");
    std::string synth_kind = "stable";
    std::string synth_out;
    std::string synth_format;
    std::optional<double> s_duration, s_rate, s_tone_freq, s_tone_spl, s_noise_spl;
    synth->add_option("--kind", synth_kind, "stable or unstable");
    synth->add_option("--duration", s_duration, "seconds");
    synth->add_option("--rate", s_rate, "sample rate in Hz");
    synth->add_option("--tone-freq", s_tone_freq, "limit-cycle frequency in Hz");
    synth->add_option("--tone-spl", s_tone_spl, "limit-cycle SPL in dB re 20 uPa");
    synth->add_option("--noise-spl", s_noise_spl, "noise floor SPL in dB re 20 uPa");
    synth->add_option("--out", synth_out, "output file")->required();
    synth->add_option("--format", synth_format, "csv or raw (default: from extension)");
    synth->callback([&] {
        auto rc = load_config(g);
        auto spec = rc.synth;
        spec.kind = ccid::parse_synth_kind(synth_kind);
        spec.duration = s_duration.value_or(spec.duration);
        spec.sample_rate = s_rate.value_or(spec.sample_rate);
        spec.tone_frequency = s_tone_freq.value_or(spec.tone_frequency);
        spec.tone_spl = s_tone_spl.value_or(spec.tone_spl);
        spec.noise_floor_spl = s_noise_spl.value_or(spec.noise_floor_spl);
        const auto record = ccid::synthesize_signal(spec);
        const auto f = synth_format.empty() ? ccid::format_from_path(synth_out) : ccid::parse_format(synth_format);
        ccid::save_timeseries(record, synth_out, f);
    });

    // validate-sublength
    auto* sublen = app.add_subcommand("validate-sublength", "compare a leading slice with the whole record");
    RecordInput sublen_in;
    sublen_in.add_to(sublen);
    std::size_t sublen_length = 3000;
    sublen->add_option("--length", sublen_length, "candidate slice length in samples");
    sublen->callback([&] {
        const auto r = ccid::validate_sub_length(sublen_in.load(), sublen_length);
        emit_json({{"candidate_length", r.candidate_length},
                   {"spectral_correlation", r.spectral_correlation},
                   {"pdf_divergence", r.pdf_divergence}},
                  "");
    });

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "single-sided amplitude spectrum of one window");
    RecordInput spectrum_in;
    spectrum_in.add_to(spectrum);
    std::size_t spectrum_index = 0;
    double band_lo = 0.0;
    std::optional<double> band_hi;
    std::string spectrum_out;
    spectrum->add_option("--window-index", spectrum_index, "window number (0-based)");
    spectrum->add_option("--band-lo", band_lo, "lowest frequency written (Hz)");
    spectrum->add_option("--band-hi", band_hi, "highest frequency written (Hz, default Nyquist)");
    spectrum->add_option("--out", spectrum_out, "CSV output (default stdout)");
    spectrum->callback([&] {
        const auto rc = load_config(g);
        const auto record = spectrum_in.load();
        const auto s = ccid::amplitude_spectrum(pick_window(record, rc.extraction.window, spectrum_index),
                                                record.sample_rate);
        const double hi = band_hi.value_or(record.sample_rate / 2.0);
        std::string text = "frequency_hz,amplitude_pa\n";
        for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
            if (s.frequencies[k] >= band_lo && s.frequencies[k] <= hi) {
                text += ccid::format_double(s.frequencies[k]) + "," + ccid::format_double(s.amplitudes[k]) + "\n";
            }
        }
        emit(text, spectrum_out);
    });

    // embed-diagnostics
    auto* embed = app.add_subcommand("embed-diagnostics", "delay and dimension selection for one window");
    RecordInput embed_in;
    embed_in.add_to(embed);
    std::size_t embed_index = 0;
    ccid::EmbeddingConfig embed_cfg;
    embed->add_option("--window-index", embed_index, "window number (0-based)");
    embed->add_option("--max-lag", embed_cfg.max_lag, "largest lag scanned for the AMI minimum");
    embed->add_option("--bins", embed_cfg.bins, "histogram bins per axis for AMI");
    embed->add_option("--rt", embed_cfg.r_threshold, "false-neighbour distance ratio threshold");
    embed->add_option("--cutoff", embed_cfg.fnn_cutoff, "accepted false-neighbour fraction");
    embed->add_option("--dmax", embed_cfg.d_max, "largest dimension tried");
    embed->callback([&] {
        const auto rc = load_config(g);
        const auto record = embed_in.load();
        const auto p = ccid::estimate_embedding(pick_window(record, rc.extraction.window, embed_index), embed_cfg);
        json ami = json::array(), fnn = json::array();
        for (const auto& a : p.ami_curve) {
            ami.push_back({{"lag", a.lag}, {"bits", a.bits}});
        }
        for (const auto& f : p.fnn_curve) {
            fnn.push_back({{"dim", f.dim}, {"fraction", f.fraction}});
        }
        emit_json({{"tau", p.tau},
                   {"dim", p.dim},
                   {"tau_flagged", p.tau_flagged},
                   {"dim_flagged", p.dim_flagged},
                   {"ami_curve", ami},
                   {"fnn_curve", fnn}},
                  "");
    });

    // rqa
    auto* rqa = app.add_subcommand("rqa", "recurrence quantification of one window");
    RecordInput rqa_in;
    rqa_in.add_to(rqa);
    std::size_t rqa_index = 0;
    std::optional<double> eps_fraction;
    std::optional<std::size_t> hmin, rqa_tau, rqa_dim;
    std::string dump_matrix;
    rqa->add_option("--window-index", rqa_index, "window number (0-based)");
    rqa->add_option("--eps-fraction", eps_fraction, "threshold as a fraction of the trajectory diameter");
    rqa->add_option("--hmin", hmin, "shortest vertical line counted");
    rqa->add_option("--tau", rqa_tau, "delay (default: estimated on the window)");
    rqa->add_option("--dim", rqa_dim, "dimension (default: estimated on the window)");
    rqa->add_option("--dump-matrix", dump_matrix, "write the matrix as run-length encoded rows");
    rqa->callback([&] {
        const auto rc = load_config(g);
        const auto record = rqa_in.load();
        const auto w = pick_window(record, rc.extraction.window, rqa_index);
        std::size_t tau = 0, dim = 0;
        if (!rqa_tau || !rqa_dim) {
            const auto p = ccid::estimate_embedding(w, rc.extraction.embedding);
            tau = p.tau;
            dim = p.dim;
        }
        tau = rqa_tau.value_or(tau);
        dim = rqa_dim.value_or(dim);
        const auto traj = ccid::embed(w, tau, dim);
        const auto m = ccid::measure_recurrence(traj, eps_fraction.value_or(rc.extraction.epsilon_fraction),
                                                hmin.value_or(rc.extraction.h_min));
        json j = {{"tau", tau},         {"dim", dim},  {"epsilon", m.epsilon}, {"recurrence_rate", m.recurrence_rate},
                  {"lam", m.lam},       {"tt", m.tt}, {"tt_no_lines", m.no_lines}};
        emit_json(j, "");
        if (!dump_matrix.empty()) {
            // Each line: row index followed by alternating run lengths,
            // starting with a (possibly empty) run of zeros.
            const auto r = ccid::recurrence_matrix(traj, m.epsilon);
            std::string text;
            for (std::size_t i = 0; i < r.size(); ++i) {
                text += std::to_string(i);
                bool value = false;
                std::size_t run = 0;
                for (std::size_t jj = 0; jj < r.size(); ++jj) {
                    if (r(i, jj) == value) {
                        ++run;
                    } else {
                        text += ' ' + std::to_string(run);
                        value = !value;
                        run = 1;
                    }
                }
                text += ' ' + std::to_string(run) + '\n';
            }
            ccid::write_text_file(dump_matrix, text);
        }
    });

    // complexity
    auto* complexity = app.add_subcommand("complexity", "fractal dimension and Hurst exponent of one window");
    RecordInput complexity_in;
    complexity_in.add_to(complexity);
    std::size_t complexity_index = 0;
    complexity->add_option("--window-index", complexity_index, "window number (0-based)");
    complexity->callback([&] {
        const auto rc = load_config(g);
        const auto record = complexity_in.load();
        const auto w = pick_window(record, rc.extraction.window, complexity_index);
        const auto fd = ccid::box_counting_dimension(w);
        const auto h = ccid::hurst_exponent(w);
        emit_json({{"fd", fd.value},
                   {"fd_clamped", fd.clamped},
                   {"fd_fit", fit_json(fd.fit)},
                   {"hurst", h.value},
                   {"hurst_clamped", h.clamped},
                   {"hurst_fit", fit_json(h.fit)}},
                  "");
    });

    // extract
    auto* extract = app.add_subcommand("extract", "windowed feature extraction into a feature table");
    std::vector<std::string> extract_inputs, extract_labels;
    std::string extract_format, extract_out, extract_policy;
    std::optional<double> extract_rate;
    extract->add_option("--in", extract_inputs, "input records")->required();
    extract->add_option("--label", extract_labels, "stable/unstable, one for all inputs or one per input");
    extract->add_option("--format", extract_format, "csv or raw (default: from extension)");
    extract->add_option("--rate", extract_rate, "sample rate in Hz");
    extract->add_option("--policy", extract_policy, "per_record or per_window embedding estimation");
    extract->add_option("--out", extract_out, "feature table CSV")->required();
    extract->callback([&] {
        auto rc = load_config(g);
        if (!extract_policy.empty()) {
            auto j = rc.extraction.to_json();
            j["policy"] = extract_policy;
            rc.extraction = ccid::ExtractionConfig::from_json(j);
        }
        if (!extract_labels.empty() && extract_labels.size() != 1 && extract_labels.size() != extract_inputs.size()) {
            throw std::invalid_argument("--label must be given once or once per --in");
        }
        ccid::FeatureTable table;
        table.config = rc.extraction;
        for (std::size_t i = 0; i < extract_inputs.size(); ++i) {
            RecordInput in{extract_inputs[i], extract_format, extract_rate};
            auto record = in.load();
            if (!extract_labels.empty()) {
                record.label = ccid::label_from_string(extract_labels[extract_labels.size() == 1 ? 0 : i]);
            }
            table.append(ccid::extract_features(record, rc.extraction, {g.threads}));
        }
        ccid::write_feature_table(table, extract_out);
    });

    // train
    auto* train = app.add_subcommand("train", "train decision trees on labelled feature tables");
    std::vector<std::string> train_data;
    std::string train_features, train_out, train_report;
    bool drop_flagged = false;
    train->add_option("--train-data", train_data, "labelled feature tables")->required();
    train->add_option("--features", train_features, "comma-separated pair for a single tree (default: all three models)");
    train->add_flag("--drop-flagged", drop_flagged, "exclude rows with clamped or degenerate features");
    train->add_option("--out", train_out, "model JSON")->required();
    train->add_option("--report", train_report, "training and 5-fold summary JSON");
    train->callback([&] {
        const auto rc = load_config(g);
        const auto samples = ccid::labeled_samples(load_tables(train_data), drop_flagged);
        json summary;
        if (train_features.empty()) {
            const auto trained = ccid::train_models(samples, rc.train);
            ccid::write_text_file(train_out, trained.suite.to_json().dump(2) + "\n");
            summary = json::array();
            for (int m = 0; m < ccid::kModelCount; ++m) {
                summary.push_back({{"name", ccid::model_definitions()[m].name},
                                   {"training_accuracy", trained.training[m].accuracy},
                                   {"cross_validation", trained.folds[m].to_json()}});
            }
        } else {
            const auto features = ccid::parse_feature_list(train_features);
            const auto tree = ccid::train(samples, features, rc.train);
            ccid::write_text_file(train_out, tree.to_json().dump(2) + "\n");
            summary = {{"training_accuracy", ccid::evaluate(tree, samples).accuracy},
                       {"cross_validation", ccid::kfold_validate(samples, features, rc.train).to_json()}};
        }
        emit_json(summary, train_report.empty() ? "-" : train_report);
    });

    // validate
    auto* validate = app.add_subcommand("validate", "stratified k-fold cross-validation");
    std::vector<std::string> validate_data;
    std::string validate_features;
    std::size_t validate_k = 5;
    bool validate_drop = false;
    validate->add_option("--data", validate_data, "labelled feature tables")->required();
    validate->add_option("--features", validate_features, "comma-separated pair (default: all three models)");
    validate->add_option("--k", validate_k, "number of folds");
    validate->add_flag("--drop-flagged", validate_drop, "exclude rows with clamped or degenerate features");
    validate->callback([&] {
        const auto rc = load_config(g);
        const auto samples = ccid::labeled_samples(load_tables(validate_data), validate_drop);
        json out = json::array();
        if (validate_features.empty()) {
            for (const auto& def : ccid::model_definitions()) {
                const std::array<ccid::Feature, 2> pair{def.x, def.y};
                out.push_back({{"name", def.name},
                               {"cross_validation", ccid::kfold_validate(samples, pair, rc.train, validate_k).to_json()}});
            }
        } else {
            const auto features = ccid::parse_feature_list(validate_features);
            out.push_back({{"features", validate_features},
                           {"cross_validation", ccid::kfold_validate(samples, features, rc.train, validate_k).to_json()}});
        }
        emit_json(out, "");
    });

    // predict
    auto* predict = app.add_subcommand("predict", "per-window verdicts from a trained model");
    std::string predict_model, predict_out;
    std::vector<std::string> predict_data;
    predict->add_option("--model", predict_model, "model JSON (single tree or suite)")->required();
    predict->add_option("--data", predict_data, "feature tables")->required();
    predict->add_option("--out", predict_out, "CSV output (default stdout)");
    predict->callback([&] {
        const auto model = load_model(predict_model);
        const auto table = load_tables(predict_data);
        std::string text = "source_id,window_start";
        if (model.suite) {
            for (const auto& def : ccid::model_definitions()) {
                text += "," + def.name;
            }
        } else {
            text += ",verdict";
        }
        text += "\n";
        for (const auto& row : table.rows) {
            text += row.provenance.source_id + "," + std::to_string(row.provenance.window_start);
            if (model.suite) {
                for (const auto& tree : model.suite->trees) {
                    text += "," + std::string(ccid::to_string(tree.predict(row.features)));
                }
            } else {
                text += "," + std::string(ccid::to_string(model.tree->predict(row.features)));
            }
            text += "\n";
        }
        emit(text, predict_out);
    });

    // report
    auto* report = app.add_subcommand("report", "accuracy and confusion counts of a model suite");
    std::string report_model, report_json;
    std::vector<std::string> report_data;
    report->add_option("--model", report_model, "model suite JSON")->required();
    report->add_option("--data", report_data, "feature tables")->required();
    report->add_option("--json", report_json, "also write the machine-readable report here");
    report->callback([&] {
        const auto model = load_model(report_model);
        if (!model.suite) {
            throw ccid::DataError("report needs a three-model suite");
        }
        const auto r = ccid::classify_report(*model.suite, load_tables(report_data));
        std::cout << r.to_text();
        if (!report_json.empty()) {
            ccid::write_text_file(report_json, r.to_json().dump(2) + "\n");
        }
    });

    // boundary
    auto* boundary = app.add_subcommand("boundary", "label lattice over a model's two-feature plane");
    std::string boundary_model, boundary_out;
    std::vector<std::string> boundary_data;
    std::vector<double> boundary_bounds;
    std::size_t boundary_resolution = 200;
    int boundary_index = 1;
    boundary->add_option("--model", boundary_model, "model JSON")->required();
    boundary->add_option("--model-index", boundary_index, "1-3, selects a model from a suite");
    boundary->add_option("--bounds", boundary_bounds, "x_lo,x_hi,y_lo,y_hi")->delimiter(',')->expected(4);
    boundary->add_option("--data", boundary_data, "feature tables used to derive bounds");
    boundary->add_option("--resolution", boundary_resolution, "lattice points per axis");
    boundary->add_option("--out", boundary_out, "CSV output")->required();
    boundary->callback([&] {
        const auto model = load_model(boundary_model);
        ccid::DecisionTree tree;
        std::pair<ccid::Feature, ccid::Feature> pair;
        if (model.suite) {
            if (boundary_index < 1 || boundary_index > ccid::kModelCount) {
                throw std::invalid_argument("--model-index must be 1, 2 or 3");
            }
            tree = model.suite->trees[boundary_index - 1];
            const auto& def = ccid::model_definitions()[boundary_index - 1];
            pair = {def.x, def.y};
        } else {
            tree = *model.tree;
            pair = tree_pair(tree);
        }
        ccid::Bounds2D bounds;
        if (boundary_bounds.size() == 4) {
            bounds = {boundary_bounds[0], boundary_bounds[1], boundary_bounds[2], boundary_bounds[3]};
        } else if (!boundary_data.empty()) {
            bounds = ccid::feature_bounds(load_tables(boundary_data), pair.first, pair.second);
        } else {
            throw std::invalid_argument("boundary needs --bounds or --data");
        }
        ccid::export_boundary(ccid::decision_boundary_grid(tree, pair, bounds, boundary_resolution), boundary_out);
    });

    // export
    auto* exporter = app.add_subcommand("export", "write plot data (CSV) for tables, models and records");
    std::vector<std::string> export_data;
    std::string export_model, export_dir, export_record;
    std::size_t export_index = 0, export_resolution = 200;
    std::optional<double> export_rate;
    exporter->add_option("--data", export_data, "feature tables");
    exporter->add_option("--model", export_model, "model suite JSON, adds boundary grids");
    exporter->add_option("--record", export_record, "record for spectrum, AMI and FNN curves");
    exporter->add_option("--rate", export_rate, "sample rate of --record in Hz");
    exporter->add_option("--window-index", export_index, "window of --record to analyse");
    exporter->add_option("--resolution", export_resolution, "boundary lattice points per axis");
    exporter->add_option("--out-dir", export_dir, "output directory")->required();
    exporter->callback([&] {
        const auto rc = load_config(g);
        fs::create_directories(export_dir);
        const fs::path dir(export_dir);
        if (!export_data.empty()) {
            const auto table = load_tables(export_data);
            ccid::export_feature_traces(table, dir / "feature_traces.csv");
            std::optional<ccid::ModelSuite> suite;
            if (!export_model.empty()) {
                suite = load_model(export_model).suite;
                if (!suite) {
                    throw ccid::DataError("export needs a three-model suite");
                }
            }
            for (int m = 0; m < ccid::kModelCount; ++m) {
                const auto& def = ccid::model_definitions()[m];
                ccid::export_scatter(table, def.x, def.y, dir / ("scatter_" + def.name + ".csv"));
                if (suite) {
                    const auto bounds = ccid::feature_bounds(table, def.x, def.y);
                    ccid::export_boundary(
                        ccid::decision_boundary_grid(suite->trees[m], {def.x, def.y}, bounds, export_resolution),
                        dir / ("boundary_" + def.name + ".csv"));
                }
            }
        }
        if (!export_record.empty()) {
            RecordInput in{export_record, "", export_rate};
            const auto record = in.load();
            const auto w = pick_window(record, rc.extraction.window, export_index);
            ccid::export_spectrum(ccid::amplitude_spectrum(w, record.sample_rate), dir / "spectrum.csv");
            const auto p = ccid::estimate_embedding(w, rc.extraction.embedding);
            ccid::export_ami_curve(p.ami_curve, dir / "ami_curve.csv");
            ccid::export_fnn_curve(p.fnn_curve, dir / "fnn_curve.csv");
        }
        if (export_data.empty() && export_record.empty()) {
            throw std::invalid_argument("export needs --data and/or --record");
        }
    });

    // analog
    auto* analog = app.add_subcommand("analog", "synthesize, extract, train and test the five-condition corpus");
    std::string analog_dir;
    bool analog_records = false;
    analog->add_option("--out-dir", analog_dir, "output directory")->required();
    analog->add_flag("--save-records", analog_records, "also write the synthesized pressure records");
    analog->callback([&] { run_analog(load_config(g), g, analog_dir, analog_records); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ccid::DegenerateError& e) {
        std::cerr << "ccid: numeric degeneracy: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const ccid::DataError& e) {
        std::cerr << "ccid: data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ccid: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "ccid: " << e.what() << '\n';
        return kExitData;
    }
}
