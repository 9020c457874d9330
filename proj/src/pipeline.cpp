#include "ccid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "ccid/complexity.hpp"
#include "ccid/error.hpp"

namespace ccid {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

std::string policy_name(EmbeddingPolicy p) { return p == EmbeddingPolicy::per_record ? "per_record" : "per_window"; }

EmbeddingPolicy policy_from_string(std::string_view s) {
    if (s == "per_record") {
        return EmbeddingPolicy::per_record;
    }
    if (s == "per_window") {
        return EmbeddingPolicy::per_window;
    }
    throw DataError("unknown embedding policy '" + std::string(s) + "'");
}

nlohmann::json band_json(Band b) { return nlohmann::json::array({b.lo, b.hi}); }

Band band_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

} // namespace

nlohmann::json ExtractionConfig::to_json() const {
    return {{"window", {{"length", window.length}, {"stride", window.stride}}},
            {"search_band", band_json(search_band)},
            {"noise_band", band_json(noise_band)},
            {"epsilon_fraction", epsilon_fraction},
            {"h_min", h_min},
            {"policy", policy_name(policy)},
            {"embedding",
             {{"max_lag", embedding.max_lag},
              {"bins", embedding.bins},
              {"r_threshold", embedding.r_threshold},
              {"fnn_cutoff", embedding.fnn_cutoff},
              {"d_max", embedding.d_max},
              {"max_queries", embedding.max_queries}}},
            {"record_fnn_queries", record_fnn_queries}};
}

// Missing keys keep their defaults, so partial config files are accepted.
ExtractionConfig ExtractionConfig::from_json(const nlohmann::json& j) {
    ExtractionConfig c;
    try {
        if (j.contains("window")) {
            c.window.length = j["window"].value("length", c.window.length);
            c.window.stride = j["window"].value("stride", c.window.stride);
        }
        if (j.contains("search_band")) {
            c.search_band = band_from_json(j["search_band"]);
        }
        if (j.contains("noise_band")) {
            c.noise_band = band_from_json(j["noise_band"]);
        }
        c.epsilon_fraction = j.value("epsilon_fraction", c.epsilon_fraction);
        c.h_min = j.value("h_min", c.h_min);
        if (j.contains("policy")) {
            c.policy = policy_from_string(j["policy"].get<std::string>());
        }
        if (j.contains("embedding")) {
            const auto& e = j["embedding"];
            c.embedding.max_lag = e.value("max_lag", c.embedding.max_lag);
            c.embedding.bins = e.value("bins", c.embedding.bins);
            c.embedding.r_threshold = e.value("r_threshold", c.embedding.r_threshold);
            c.embedding.fnn_cutoff = e.value("fnn_cutoff", c.embedding.fnn_cutoff);
            c.embedding.d_max = e.value("d_max", c.embedding.d_max);
            c.embedding.max_queries = e.value("max_queries", c.embedding.max_queries);
        }
        c.record_fnn_queries = j.value("record_fnn_queries", c.record_fnn_queries);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed extraction config: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Flags
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<QualityFlag, std::string_view>, 6> kFlagNames{{
    {kFlagTtNoLines, "tt_no_lines"},
    {kFlagFdClamped, "fd_clamped"},
    {kFlagHurstClamped, "hurst_clamped"},
    {kFlagTauFlagged, "tau_flagged"},
    {kFlagDimFlagged, "dim_flagged"},
    {kFlagDegenerate, "degenerate"},
}};

// Window-level problems; record-level embedding flags are excluded.
constexpr std::uint32_t kWindowFlags = kFlagTtNoLines | kFlagFdClamped | kFlagHurstClamped | kFlagDegenerate;

} // namespace

std::string flags_to_string(std::uint32_t flags) {
    std::string out;
    for (const auto& [bit, name] : kFlagNames) {
        if (flags & bit) {
            if (!out.empty()) {
                out += '|';
            }
            out += name;
        }
    }
    return out;
}

std::uint32_t flags_from_string(std::string_view text) {
    std::uint32_t flags = kFlagNone;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto bar = text.find('|', pos);
        const auto item = text.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);
        const auto it = std::find_if(kFlagNames.begin(), kFlagNames.end(),
                                     [item](const auto& entry) { return entry.second == item; });
        if (it == kFlagNames.end()) {
            throw DataError("unknown quality flag '" + std::string(item) + "'");
        }
        flags |= it->first;
        if (bar == std::string_view::npos) {
            break;
        }
        pos = bar + 1;
    }
    return flags;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

void FeatureTable::sort_rows() {
    std::stable_sort(rows.begin(), rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
        if (a.provenance.source_id != b.provenance.source_id) {
            return a.provenance.source_id < b.provenance.source_id;
        }
        return a.provenance.window_start < b.provenance.window_start;
    });
}

void FeatureTable::append(const FeatureTable& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    embeddings.insert(embeddings.end(), other.embeddings.begin(), other.embeddings.end());
    std::sort(embeddings.begin(), embeddings.end(),
              [](const auto& a, const auto& b) { return a.source_id < b.source_id; });
    sort_rows();
}

FeatureRow extract_window(std::span<const double> window, double sample_rate, std::size_t tau, std::size_t dim,
                          const ExtractionConfig& config) {
    FeatureRow row;
    auto& f = row.features;
    const auto guarded = [&row](Feature feature, auto&& compute) {
        try {
            compute();
        } catch (const DegenerateError&) {
            row.features[feature] = 0.0;
            row.flags |= kFlagDegenerate;
        } catch (const DataError&) {
            row.features[feature] = 0.0;
            row.flags |= kFlagDegenerate;
        }
    };

    f[Feature::rms] = rms(window);
    guarded(Feature::snr, [&] {
        const Spectrum s = amplitude_spectrum(window, sample_rate);
        const DominantPeak peak = dominant_frequency(s, config.search_band);
        f[Feature::snr] = snr(s, peak, config.noise_band);
    });
    guarded(Feature::lam, [&] {
        const Trajectory traj = embed(window, tau, dim);
        const RqaMeasures m = measure_recurrence(traj, config.epsilon_fraction, config.h_min);
        f[Feature::lam] = m.lam;
        f[Feature::tt] = m.tt;
        if (m.no_lines) {
            row.flags |= kFlagTtNoLines;
        }
    });
    if (std::isnan(f[Feature::tt])) {
        f[Feature::tt] = 0.0;
    }
    guarded(Feature::fd, [&] {
        const auto fd = box_counting_dimension(window);
        f[Feature::fd] = fd.value;
        if (fd.clamped) {
            row.flags |= kFlagFdClamped;
        }
    });
    guarded(Feature::hurst, [&] {
        const auto h = hurst_exponent(window);
        f[Feature::hurst] = h.value;
        if (h.clamped) {
            row.flags |= kFlagHurstClamped;
        }
    });
    return row;
}

namespace {

RecordEmbedding record_embedding(const TimeSeriesRecord& record, const ExtractionConfig& config) {
    RecordEmbedding e;
    e.source_id = record.source_id;
    try {
        const auto delay = optimal_delay(record.samples, config.embedding.max_lag, config.embedding.bins);
        e.tau = delay.tau;
        e.tau_flagged = delay.flagged;
        const auto dimension =
            embedding_dimension(record.samples, e.tau, config.embedding.r_threshold, config.embedding.fnn_cutoff,
                                config.embedding.d_max, config.record_fnn_queries);
        e.dim = dimension.dim;
        e.dim_flagged = dimension.flagged;
    } catch (const DegenerateError&) {
        e.tau = 1;
        e.dim = 1;
        e.tau_flagged = true;
        e.dim_flagged = true;
    }
    return e;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace

FeatureTable extract_features(const TimeSeriesRecord& record, const ExtractionConfig& config,
                              const ExtractOptions& options) {
    record.validate();
    if (record.source_id.find(',') != std::string::npos) {
        throw DataError("source id must not contain commas");
    }
    const auto windows = slide_windows(record, config.window);
    FeatureTable table;
    table.config = config;

    std::optional<RecordEmbedding> shared;
    if (config.policy == EmbeddingPolicy::per_record) {
        shared = record_embedding(record, config);
        table.embeddings.push_back(*shared);
    }

    table.rows.resize(windows.size());
    parallel_for(windows.size(), options.threads, [&](std::size_t i) {
        const auto& w = windows[i];
        std::size_t tau = 1, dim = 1;
        std::uint32_t flags = kFlagNone;
        if (shared) {
            tau = shared->tau;
            dim = shared->dim;
            flags |= (shared->tau_flagged ? kFlagTauFlagged : 0u) | (shared->dim_flagged ? kFlagDimFlagged : 0u);
        } else {
            try {
                const auto p = estimate_embedding(w.samples, config.embedding);
                tau = p.tau;
                dim = p.dim;
                flags |= (p.tau_flagged ? kFlagTauFlagged : 0u) | (p.dim_flagged ? kFlagDimFlagged : 0u);
            } catch (const DegenerateError&) {
                flags |= kFlagTauFlagged | kFlagDimFlagged;
            }
        }
        FeatureRow row = extract_window(w.samples, record.sample_rate, tau, dim, config);
        row.flags |= flags;
        row.provenance = {record.source_id, w.start};
        row.label = record.label;
        table.rows[i] = std::move(row);
    });
    return table;
}

std::vector<LabeledSample> labeled_samples(const FeatureTable& table, bool drop_flagged) {
    std::vector<LabeledSample> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        if (!row.label) {
            throw DataError("row " + row.provenance.source_id + "@" + std::to_string(row.provenance.window_start) +
                            " has no label");
        }
        if (drop_flagged && (row.flags & kWindowFlags) != 0) {
            continue;
        }
        out.push_back({row.features, *row.label, row.provenance});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Table persistence
// ---------------------------------------------------------------------------

std::string format_double(double value) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, r.ptr);
}

namespace {

constexpr std::string_view kTableHeader = "source_id,window_start,rms,snr,hurst,fd,lam,tt,label,flags";

std::filesystem::path meta_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".meta.json";
    return p;
}

double parse_double_field(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError("feature table line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

void write_feature_table(const FeatureTable& table, const std::filesystem::path& path) {
    std::ostringstream out;
    out << kTableHeader << '\n';
    for (const auto& row : table.rows) {
        out << row.provenance.source_id << ',' << row.provenance.window_start;
        for (Feature f : kAllFeatures) {
            out << ',' << format_double(row.features[f]);
        }
        out << ',' << (row.label ? std::to_string(static_cast<int>(*row.label)) : std::string()) << ','
            << flags_to_string(row.flags) << '\n';
    }
    write_text_file(path, out.str());

    nlohmann::json embeddings = nlohmann::json::array();
    for (const auto& e : table.embeddings) {
        embeddings.push_back({{"source_id", e.source_id},
                              {"tau", e.tau},
                              {"dim", e.dim},
                              {"tau_flagged", e.tau_flagged},
                              {"dim_flagged", e.dim_flagged}});
    }
    const nlohmann::json meta = {{"format", "ccid-feature-table"},
                                 {"version", 1},
                                 {"config", table.config.to_json()},
                                 {"embeddings", embeddings}};
    write_text_file(meta_path(path), meta.dump(2) + "\n");
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    FeatureTable table;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || line != kTableHeader) {
        throw DataError(path.string() + ": missing feature table header");
    }
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 10) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 10 fields");
        }
        FeatureRow row;
        row.provenance.source_id = std::string(fields[0]);
        row.provenance.window_start = static_cast<std::size_t>(parse_double_field(fields[1], line_no));
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            row.features[kAllFeatures[i]] = parse_double_field(fields[2 + i], line_no);
        }
        if (!fields[8].empty()) {
            row.label = label_from_string(fields[8]);
        }
        row.flags = flags_from_string(fields[9]);
        table.rows.push_back(std::move(row));
    }
    const auto meta_file = meta_path(path);
    if (std::filesystem::exists(meta_file)) {
        try {
            const auto meta = nlohmann::json::parse(read_text_file(meta_file));
            table.config = ExtractionConfig::from_json(meta.at("config"));
            for (const auto& e : meta.at("embeddings")) {
                table.embeddings.push_back({e.at("source_id").get<std::string>(), e.at("tau").get<std::size_t>(),
                                            e.at("dim").get<std::size_t>(), e.at("tau_flagged").get<bool>(),
                                            e.at("dim_flagged").get<bool>()});
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(meta_file.string() + ": " + e.what());
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

const std::array<ModelDefinition, kModelCount>& model_definitions() {
    static const std::array<ModelDefinition, kModelCount> defs{{
        {"model1", Feature::rms, Feature::snr},
        {"model2", Feature::hurst, Feature::fd},
        {"model3", Feature::lam, Feature::tt},
    }};
    return defs;
}

nlohmann::json ModelSuite::to_json() const {
    nlohmann::json models = nlohmann::json::array();
    for (int m = 0; m < kModelCount; ++m) {
        const auto& def = model_definitions()[m];
        models.push_back({{"name", def.name},
                          {"features", {to_string(def.x), to_string(def.y)}},
                          {"tree", trees[m].to_json()}});
    }
    return {{"schema_version", 1}, {"models", models}};
}

ModelSuite ModelSuite::from_json(const nlohmann::json& j) {
    ModelSuite suite;
    try {
        const auto& models = j.at("models");
        if (models.size() != kModelCount) {
            throw DataError("model suite must hold exactly 3 models");
        }
        for (int m = 0; m < kModelCount; ++m) {
            suite.trees[m] = DecisionTree::from_json(models.at(m).at("tree"));
            const auto& def = model_definitions()[m];
            for (Feature f : suite.trees[m].used_features()) {
                if (f != def.x && f != def.y) {
                    throw DataError(def.name + " references feature '" + std::string(to_string(f)) +
                                    "' outside its pair");
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model suite: ") + e.what());
    }
    return suite;
}

TrainedSuite train_models(std::span<const LabeledSample> samples, const TrainConfig& config, std::size_t k) {
    ClassCounts counts;
    for (const auto& s : samples) {
        counts.add(s.label);
    }
    if (counts.stable == 0 || counts.unstable == 0) {
        throw DataError("training data must contain both stable and unstable samples");
    }
    TrainedSuite out;
    for (int m = 0; m < kModelCount; ++m) {
        const auto& def = model_definitions()[m];
        const std::array<Feature, 2> pair{def.x, def.y};
        out.suite.trees[m] = train(samples, pair, config);
        out.folds[m] = kfold_validate(samples, pair, config, k);
        out.training[m] = evaluate(out.suite.trees[m], samples);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

nlohmann::json confusion_json(const Confusion& c) {
    return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

} // namespace

SuiteReport classify_report(const ModelSuite& suite, const FeatureTable& table) {
    if (table.rows.empty()) {
        throw DataError("cannot report on an empty feature table");
    }
    SuiteReport report;
    for (const auto& row : table.rows) {
        report.rows.push_back(row.provenance);
        report.truth.push_back(row.label);
    }
    for (int m = 0; m < kModelCount; ++m) {
        auto& result = report.models[m];
        result.name = model_definitions()[m].name;
        Confusion c;
        for (const auto& row : table.rows) {
            const Label p = suite.trees[m].predict(row.features);
            result.verdicts.push_back(p);
            if (!row.label) {
                continue;
            }
            if (*row.label == Label::stable) {
                (p == Label::stable ? c.tp : c.fn) += 1;
            } else {
                (p == Label::unstable ? c.tn : c.fp) += 1;
            }
        }
        result.evaluation = {c.accuracy(), c};
    }
    return report;
}

nlohmann::json SuiteReport::to_json() const {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : this->models) {
        models.push_back({{"name", m.name},
                          {"accuracy", m.evaluation.accuracy},
                          {"labeled_rows", m.evaluation.confusion.total()},
                          {"confusion", confusion_json(m.evaluation.confusion)}});
    }
    nlohmann::json verdicts = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        nlohmann::json v = {{"source_id", rows[i].source_id}, {"window_start", rows[i].window_start}};
        v["truth"] = truth[i] ? nlohmann::json(to_string(*truth[i])) : nlohmann::json(nullptr);
        for (const auto& m : this->models) {
            v[m.name] = to_string(m.verdicts[i]);
        }
        verdicts.push_back(std::move(v));
    }
    return {{"models", models}, {"verdicts", verdicts}};
}

std::string SuiteReport::to_text() const {
    std::ostringstream out;
    out << "model    features     accuracy    TP    TN    FP    FN\n";
    for (int m = 0; m < kModelCount; ++m) {
        const auto& r = models[m];
        const auto& def = model_definitions()[m];
        const auto& c = r.evaluation.confusion;
        const std::string feats = std::string(to_string(def.x)) + "/" + std::string(to_string(def.y));
        out << std::left << std::setw(9) << r.name << std::setw(13) << feats << std::right << std::fixed
            << std::setprecision(4) << std::setw(8) << r.evaluation.accuracy << std::setw(6) << c.tp << std::setw(6)
            << c.tn << std::setw(6) << c.fp << std::setw(6) << c.fn << '\n';
    }
    out << rows.size() << " windows\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Plot data
// ---------------------------------------------------------------------------

void export_spectrum(const Spectrum& spectrum, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "frequency_hz,amplitude_pa\n";
    for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
        out << format_double(spectrum.frequencies[k]) << ',' << format_double(spectrum.amplitudes[k]) << '\n';
    }
    write_text_file(path, out.str());
}

void export_ami_curve(const std::vector<AmiPoint>& curve, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "lag,ami_bits\n";
    for (const auto& p : curve) {
        out << p.lag << ',' << format_double(p.bits) << '\n';
    }
    write_text_file(path, out.str());
}

void export_fnn_curve(const std::vector<FnnPoint>& curve, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "dim,fnn_fraction\n";
    for (const auto& p : curve) {
        out << p.dim << ',' << format_double(p.fraction) << '\n';
    }
    write_text_file(path, out.str());
}

void export_feature_traces(const FeatureTable& table, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "source_id,window_start,time_s";
    for (Feature f : kAllFeatures) {
        out << ',' << to_string(f);
    }
    out << '\n';
    const double rate = kDefaultSampleRate;
    for (const auto& row : table.rows) {
        out << row.provenance.source_id << ',' << row.provenance.window_start << ','
            << format_double(static_cast<double>(row.provenance.window_start) / rate);
        for (Feature f : kAllFeatures) {
            out << ',' << format_double(row.features[f]);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

void export_scatter(const FeatureTable& table, Feature x, Feature y, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "source_id,window_start," << to_string(x) << ',' << to_string(y) << ",label\n";
    for (const auto& row : table.rows) {
        out << row.provenance.source_id << ',' << row.provenance.window_start << ','
            << format_double(row.features[x]) << ',' << format_double(row.features[y]) << ','
            << (row.label ? std::to_string(static_cast<int>(*row.label)) : std::string()) << '\n';
    }
    write_text_file(path, out.str());
}

void export_boundary(const BoundaryGrid& grid, const std::filesystem::path& path) {
    std::ostringstream out;
    out << to_string(grid.x_feature) << ',' << to_string(grid.y_feature) << ",label\n";
    for (std::size_t iy = 0; iy < grid.resolution; ++iy) {
        for (std::size_t ix = 0; ix < grid.resolution; ++ix) {
            out << format_double(grid.xs[ix]) << ',' << format_double(grid.ys[iy]) << ','
                << static_cast<int>(grid.at(ix, iy)) << '\n';
        }
    }
    write_text_file(path, out.str());
}

Bounds2D feature_bounds(const FeatureTable& table, Feature x, Feature y, double margin) {
    if (table.rows.empty()) {
        throw DataError("cannot take bounds of an empty table");
    }
    Bounds2D b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& row : table.rows) {
        b.x_lo = std::min(b.x_lo, row.features[x]);
        b.x_hi = std::max(b.x_hi, row.features[x]);
        b.y_lo = std::min(b.y_lo, row.features[y]);
        b.y_hi = std::max(b.y_hi, row.features[y]);
    }
    const auto pad = [margin](double& lo, double& hi) {
        const double span = hi > lo ? hi - lo : std::max(1.0, std::abs(lo));
        lo -= margin * span;
        hi += margin * span;
    };
    pad(b.x_lo, b.x_hi);
    pad(b.y_lo, b.y_hi);
    return b;
}

// ---------------------------------------------------------------------------
// Synthetic five-condition corpus
// ---------------------------------------------------------------------------

std::vector<AnalogCondition> analog_conditions(const AnalogConfig& config) {
    std::vector<AnalogCondition> out;
    // Equivalence ratios 0.8 (stable) and 1.2, 1.1, 1.0, 0.9 for the tones
    // in the order given; the first tone is the training condition.
    const auto phi_label = [](int tenths) {
        std::ostringstream s;
        s << "phi" << tenths / 10 << '.' << tenths % 10;
        return s.str();
    };
    SynthSpec base = config.noise;
    base.duration = config.duration;
    base.sample_rate = config.sample_rate;

    AnalogCondition stable;
    stable.spec = base;
    stable.spec.kind = SynthKind::stable_noise;
    stable.spec.seed = config.seed;
    stable.source_id = phi_label(8) + "-stable";
    stable.training = true;
    out.push_back(stable);

    for (std::size_t i = 0; i < config.tone_spls.size(); ++i) {
        AnalogCondition c;
        c.spec = base;
        c.spec.kind = SynthKind::unstable_limit_cycle;
        c.spec.tone_spl = config.tone_spls[i];
        c.spec.seed = config.seed + 1 + i;
        const int tenths = 12 - static_cast<int>(i);
        std::ostringstream id;
        id << phi_label(tenths) << "-unstable-" << format_double(config.tone_spls[i]) << "dB";
        c.source_id = id.str();
        c.training = i == 0;
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

} // namespace ccid
