#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ccid/classifier.hpp"
#include "ccid/embedding.hpp"
#include "ccid/rqa.hpp"
#include "ccid/signal_io.hpp"
#include "ccid/spectral.hpp"

namespace ccid {

// ---------------------------------------------------------------------------
// Extraction configuration
// ---------------------------------------------------------------------------
enum class EmbeddingPolicy { per_record, per_window };

struct ExtractionConfig {
    WindowSpec window;
    Band search_band = kDefaultSearchBand;
    Band noise_band = kNoiseBand;
    double epsilon_fraction = kDefaultEpsilonFraction;
    std::size_t h_min = kDefaultHmin;
    EmbeddingPolicy policy = EmbeddingPolicy::per_record;
    EmbeddingConfig embedding;
    // Per-record FNN evaluates at most this many query points spread over
    // the record (every point is still a neighbour candidate).
    std::size_t record_fnn_queries = 2000;

    nlohmann::json to_json() const;
    static ExtractionConfig from_json(const nlohmann::json& j);
    friend bool operator==(const ExtractionConfig&, const ExtractionConfig&) = default;
};

// ---------------------------------------------------------------------------
// Quality flags
// ---------------------------------------------------------------------------
enum QualityFlag : std::uint32_t {
    kFlagNone = 0,
    kFlagTtNoLines = 1u << 0,
    kFlagFdClamped = 1u << 1,
    kFlagHurstClamped = 1u << 2,
    kFlagTauFlagged = 1u << 3,
    kFlagDimFlagged = 1u << 4,
    kFlagDegenerate = 1u << 5,  // a feature could not be computed; stored as 0
};

std::string flags_to_string(std::uint32_t flags);
std::uint32_t flags_from_string(std::string_view text);

// ---------------------------------------------------------------------------
// Feature table
// ---------------------------------------------------------------------------
struct FeatureRow {
    Provenance provenance;
    FeatureVector features;
    std::optional<Label> label;
    std::uint32_t flags = kFlagNone;
};

struct RecordEmbedding {
    std::string source_id;
    std::size_t tau = 1;
    std::size_t dim = 1;
    bool tau_flagged = false;
    bool dim_flagged = false;
    friend bool operator==(const RecordEmbedding&, const RecordEmbedding&) = default;
};

struct FeatureTable {
    std::vector<FeatureRow> rows;
    ExtractionConfig config;
    std::vector<RecordEmbedding> embeddings;  // per_record policy only

    // Concatenates and re-sorts by (source_id, window_start).
    void append(const FeatureTable& other);
    void sort_rows();
};

struct ExtractOptions {
    std::size_t threads = 0;  // 0 = hardware concurrency
};

// Features of one window given an embedding (tau, dim).
FeatureRow extract_window(std::span<const double> window, double sample_rate, std::size_t tau, std::size_t dim,
                          const ExtractionConfig& config);

FeatureTable extract_features(const TimeSeriesRecord& record, const ExtractionConfig& config = {},
                              const ExtractOptions& options = {});

// Samples for training/evaluation; throws DataError on an unlabeled row.
std::vector<LabeledSample> labeled_samples(const FeatureTable& table, bool drop_flagged = false);

// CSV: source_id,window_start,rms,snr,hurst,fd,lam,tt,label,flags. Numbers
// are written in shortest round-trip form. The extraction config and the
// per-record embeddings go to a sidecar "<path>.meta.json".
void write_feature_table(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable read_feature_table(const std::filesystem::path& path);

std::string format_double(double value);

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------
inline constexpr int kModelCount = 3;

struct ModelDefinition {
    std::string name;
    Feature x;
    Feature y;
};

// Model 1: rms/snr, Model 2: hurst/fd, Model 3: lam/tt.
const std::array<ModelDefinition, kModelCount>& model_definitions();

struct ModelSuite {
    std::array<DecisionTree, kModelCount> trees;

    nlohmann::json to_json() const;
    static ModelSuite from_json(const nlohmann::json& j);
    friend bool operator==(const ModelSuite&, const ModelSuite&) = default;
};

struct TrainedSuite {
    ModelSuite suite;
    std::array<FoldReport, kModelCount> folds;
    std::array<Evaluation, kModelCount> training;  // full training set
};

TrainedSuite train_models(std::span<const LabeledSample> samples, const TrainConfig& config = {},
                          std::size_t k = 5);

struct ModelResult {
    std::string name;
    Evaluation evaluation;
    std::vector<Label> verdicts;  // one per input row, table order
};

struct SuiteReport {
    std::array<ModelResult, kModelCount> models;
    std::vector<Provenance> rows;
    std::vector<std::optional<Label>> truth;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Throws DataError on an empty table. Unlabeled rows get verdicts but do not
// count towards accuracy.
SuiteReport classify_report(const ModelSuite& suite, const FeatureTable& table);

// ---------------------------------------------------------------------------
// Plot data export (CSV, no rendering)
// ---------------------------------------------------------------------------
void export_spectrum(const Spectrum& spectrum, const std::filesystem::path& path);
void export_ami_curve(const std::vector<AmiPoint>& curve, const std::filesystem::path& path);
void export_fnn_curve(const std::vector<FnnPoint>& curve, const std::filesystem::path& path);
void export_feature_traces(const FeatureTable& table, const std::filesystem::path& path);
void export_scatter(const FeatureTable& table, Feature x, Feature y, const std::filesystem::path& path);
void export_boundary(const BoundaryGrid& grid, const std::filesystem::path& path);

// Bounds of a feature pair over a table, padded by `margin` of the span.
Bounds2D feature_bounds(const FeatureTable& table, Feature x, Feature y, double margin = 0.05);

// ---------------------------------------------------------------------------
// Synthetic five-condition corpus: one stable (noise only) condition and four
// unstable ones with a 146 Hz tone at descending SPL. Training uses the
// stable condition and the strongest tone; the rest are held out.
// ---------------------------------------------------------------------------
struct AnalogCondition {
    std::string source_id;
    SynthSpec spec;
    bool training = false;
};

struct AnalogConfig {
    double duration = 2.0;
    double sample_rate = kDefaultSampleRate;
    std::vector<double> tone_spls{127.0, 126.0, 125.0, 124.0};
    std::uint64_t seed = 2025;
    SynthSpec noise;  // noise-floor template; kind/tone/seed are overwritten
};

std::vector<AnalogCondition> analog_conditions(const AnalogConfig& config = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace ccid
