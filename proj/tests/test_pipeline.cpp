#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ccid/error.hpp"
#include "ccid/pipeline.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ccid;

namespace {

ExtractionConfig small_config() {
    ExtractionConfig c;
    c.window = {3000, 1500};
    return c;
}

TimeSeriesRecord short_record(SynthKind kind, std::uint64_t seed, double seconds = 0.5) {
    SynthSpec spec;
    spec.kind = kind;
    spec.duration = seconds;
    spec.seed = seed;
    auto r = synthesize_signal(spec);
    r.source_id = std::string(to_string(kind)) + "-" + std::to_string(seed);
    return r;
}

// Two short labeled records per class.
const FeatureTable& small_corpus() {
    static const FeatureTable table = [] {
        FeatureTable t;
        for (std::uint64_t seed : {1u, 2u}) {
            t.append(extract_features(short_record(SynthKind::stable_noise, seed), small_config()));
            t.append(extract_features(short_record(SynthKind::unstable_limit_cycle, seed), small_config()));
        }
        return t;
    }();
    return table;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("extraction yields one row per window") {
    const auto rec = short_record(SynthKind::unstable_limit_cycle, 3);
    const auto table = extract_features(rec, small_config());
    REQUIRE(table.rows.size() == window_count(rec.samples.size(), {3000, 1500}));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        CHECK(row.provenance.source_id == rec.source_id);
        CHECK(row.provenance.window_start == i * 1500);
        CHECK(row.label == Label::unstable);
        for (Feature f : kAllFeatures) {
            CHECK(std::isfinite(row.features[f]));
        }
    }
    REQUIRE(table.embeddings.size() == 1);
    CHECK(table.embeddings[0].source_id == rec.source_id);
}

TEST_CASE("a 40000-sample record gives 247 rows") {
    TimeSeriesRecord rec;
    rec.samples = fixture::white_noise(40000, 1);
    rec.source_id = "noise";
    ExtractionConfig c;
    c.embedding.max_lag = 10;
    c.record_fnn_queries = 200;
    CHECK(window_count(rec.samples.size(), c.window) == 247);
}

TEST_CASE("window features match the single-window path") {
    const auto rec = short_record(SynthKind::stable_noise, 4);
    const auto table = extract_features(rec, small_config());
    const auto& e = table.embeddings.at(0);
    const auto row = extract_window(std::span(rec.samples).subspan(1500, 3000), rec.sample_rate, e.tau, e.dim,
                                    small_config());
    CHECK(row.features == table.rows[1].features);
}

TEST_CASE("features do not depend on the label") {
    auto rec = short_record(SynthKind::unstable_limit_cycle, 5);
    const auto labeled = extract_features(rec, small_config());
    rec.label.reset();
    const auto blind = extract_features(rec, small_config());
    REQUIRE(labeled.rows.size() == blind.rows.size());
    for (std::size_t i = 0; i < blind.rows.size(); ++i) {
        CHECK(blind.rows[i].features == labeled.rows[i].features);
        CHECK_FALSE(blind.rows[i].label.has_value());
    }
    CHECK_THROWS_AS(labeled_samples(blind), DataError);
}

TEST_CASE("thread count does not change the table") {
    const auto rec = short_record(SynthKind::stable_noise, 6);
    const auto one = extract_features(rec, small_config(), {1});
    const auto many = extract_features(rec, small_config(), {3});
    REQUIRE(one.rows.size() == many.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
        CHECK(one.rows[i].features == many.rows[i].features);
    }
}

TEST_CASE("per-window policy") {
    auto c = small_config();
    c.policy = EmbeddingPolicy::per_window;
    const auto table = extract_features(short_record(SynthKind::unstable_limit_cycle, 7), c);
    CHECK(table.embeddings.empty());
    CHECK(table.rows.size() == 5);
}

TEST_CASE("extraction rejects bad records") {
    TimeSeriesRecord rec;
    rec.samples = fixture::white_noise(5000, 1);
    rec.source_id = "a,b";
    CHECK_THROWS_AS(extract_features(rec, small_config()), DataError);
    rec.source_id = "x";
    rec.samples[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(extract_features(rec, small_config()), DataError);
    rec.samples.resize(2000);
    CHECK_THROWS_AS(extract_features(rec, small_config()), DataError);
}

TEST_CASE("constant window is flagged, not fatal") {
    const std::vector<double> flat(3000, 0.0);
    const auto row = extract_window(flat, 20000.0, 1, 2, small_config());
    CHECK((row.flags & kFlagDegenerate) != 0);
    CHECK(row.features[Feature::rms] == 0.0);
}

TEST_CASE("quality flag names round trip") {
    const std::uint32_t all = kFlagTtNoLines | kFlagFdClamped | kFlagHurstClamped | kFlagTauFlagged | kFlagDimFlagged |
                              kFlagDegenerate;
    for (std::uint32_t f = 0; f <= all; ++f) {
        CHECK(flags_from_string(flags_to_string(f)) == f);
    }
    CHECK(flags_to_string(kFlagNone).empty());
    CHECK_THROWS_AS(flags_from_string("odd"), DataError);
}

TEST_CASE("extraction config JSON round trip") {
    auto c = small_config();
    c.policy = EmbeddingPolicy::per_window;
    c.epsilon_fraction = 0.07;
    c.embedding.r_threshold = 12.5;
    CHECK(ExtractionConfig::from_json(c.to_json()) == c);
    CHECK(ExtractionConfig::from_json(nlohmann::json::object()) == ExtractionConfig{});
    CHECK_THROWS_AS(ExtractionConfig::from_json(nlohmann::json::parse(R"({"policy": "sometimes"})")), DataError);
}

TEST_CASE("feature table round trip preserves rows and training") {
    TempDir dir;
    const auto& table = small_corpus();
    write_feature_table(table, dir / "t.csv");
    CHECK(std::filesystem::exists(dir / "t.csv.meta.json"));
    const auto back = read_feature_table(dir / "t.csv");
    REQUIRE(back.rows.size() == table.rows.size());
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
        CHECK(back.rows[i].features == table.rows[i].features);
        CHECK(back.rows[i].label == table.rows[i].label);
        CHECK(back.rows[i].flags == table.rows[i].flags);
        CHECK(back.rows[i].provenance.source_id == table.rows[i].provenance.source_id);
        CHECK(back.rows[i].provenance.window_start == table.rows[i].provenance.window_start);
    }
    CHECK(back.config == table.config);
    CHECK(back.embeddings == table.embeddings);

    TrainConfig tc;
    tc.min_samples_leaf = 1;
    const auto a = train_models(labeled_samples(table), tc, 2);
    const auto b = train_models(labeled_samples(back), tc, 2);
    CHECK(a.suite == b.suite);
    CHECK(a.suite.to_json().dump() == b.suite.to_json().dump());

    write_feature_table(back, dir / "u.csv");
    CHECK(slurp(dir / "u.csv") == slurp(dir / "t.csv"));
}

TEST_CASE("rows are sorted by source and window start") {
    const auto& t = small_corpus();
    CHECK(std::is_sorted(t.rows.begin(), t.rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
        return std::tie(a.provenance.source_id, a.provenance.window_start) <
               std::tie(b.provenance.source_id, b.provenance.window_start);
    }));
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("model suite") {
    const auto& t = small_corpus();
    TrainConfig tc;
    tc.min_samples_leaf = 1;
    const auto trained = train_models(labeled_samples(t), tc, 2);
    for (int m = 0; m < kModelCount; ++m) {
        const auto& def = model_definitions()[m];
        for (Feature f : trained.suite.trees[m].used_features()) {
            CHECK((f == def.x || f == def.y));
        }
    }
    CHECK(ModelSuite::from_json(trained.suite.to_json()) == trained.suite);

    SUBCASE("replaying the training table reproduces the training accuracy") {
        const auto report = classify_report(trained.suite, t);
        for (int m = 0; m < kModelCount; ++m) {
            CHECK(report.models[m].evaluation.accuracy == trained.training[m].accuracy);
            CHECK(report.models[m].evaluation.confusion == trained.training[m].confusion);
            CHECK(report.models[m].verdicts.size() == t.rows.size());
        }
        CHECK(report.to_json().at("verdicts").size() == t.rows.size());
        CHECK(report.to_text().find("model1") != std::string::npos);
    }
    SUBCASE("a tree outside its pair is rejected") {
        auto j = trained.suite.to_json();
        j["models"][0]["tree"] = DecisionTree::make_stump(Feature::lam, 0.5, Label::stable, Label::unstable).to_json();
        CHECK_THROWS_AS(ModelSuite::from_json(j), DataError);
    }
    SUBCASE("empty table") {
        CHECK_THROWS_AS(classify_report(trained.suite, FeatureTable{}), DataError);
    }
    SUBCASE("single class training") {
        auto samples = labeled_samples(t);
        std::erase_if(samples, [](const LabeledSample& s) { return s.label == Label::stable; });
        CHECK_THROWS_AS(train_models(samples), DataError);
    }
}

TEST_CASE("plot exports") {
    TempDir dir;
    const auto& t = small_corpus();
    export_scatter(t, Feature::hurst, Feature::fd, dir / "scatter.csv");
    CHECK(line_count(slurp(dir / "scatter.csv")) == t.rows.size() + 1);
    export_scatter(t, Feature::hurst, Feature::fd, dir / "again.csv");
    CHECK(slurp(dir / "again.csv") == slurp(dir / "scatter.csv"));

    const auto bounds = feature_bounds(t, Feature::hurst, Feature::fd);
    CHECK(bounds.x_lo < bounds.x_hi);
    CHECK(bounds.y_lo < bounds.y_hi);
    const auto stump = DecisionTree::make_stump(Feature::hurst, 0.8, Label::stable, Label::unstable);
    export_boundary(decision_boundary_grid(stump, {Feature::hurst, Feature::fd}, bounds, 25), dir / "b.csv");
    CHECK(line_count(slurp(dir / "b.csv")) == 25 * 25 + 1);

    export_feature_traces(t, dir / "traces.csv");
    CHECK(line_count(slurp(dir / "traces.csv")) == t.rows.size() + 1);
    CHECK_THROWS_AS(feature_bounds(FeatureTable{}, Feature::rms, Feature::snr), DataError);
}

TEST_CASE("analog corpus layout") {
    const auto conditions = analog_conditions();
    REQUIRE(conditions.size() == 5);
    CHECK(conditions[0].spec.kind == SynthKind::stable_noise);
    CHECK(conditions[0].training);
    CHECK(conditions[1].training);
    CHECK(conditions[1].spec.tone_spl == 127.0);
    std::size_t held_out = 0;
    for (const auto& c : conditions) {
        held_out += !c.training;
    }
    CHECK(held_out == 3);
    const auto again = analog_conditions();
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        CHECK(again[i].source_id == conditions[i].source_id);
        CHECK(again[i].spec.seed == conditions[i].spec.seed);
    }
}

} // TEST_SUITE
