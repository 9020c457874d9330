#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ccid/signal_io.hpp"

namespace ccid {

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------
enum class Feature : std::uint8_t { rms = 0, snr, hurst, fd, lam, tt };

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<Feature, kFeatureCount> kAllFeatures{
    Feature::rms, Feature::snr, Feature::hurst, Feature::fd, Feature::lam, Feature::tt};

std::string_view to_string(Feature feature);
Feature feature_from_string(std::string_view name);
// Comma separated list, e.g. "rms,snr".
std::vector<Feature> parse_feature_list(std::string_view list);

// Missing values are NaN.
class FeatureVector {
public:
    FeatureVector();

    double operator[](Feature f) const { return values_[static_cast<std::size_t>(f)]; }
    double& operator[](Feature f) { return values_[static_cast<std::size_t>(f)]; }
    bool has(Feature f) const;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::array<double, kFeatureCount> values_;
};

struct Provenance {
    std::string source_id;
    std::size_t window_start = 0;
};

struct LabeledSample {
    FeatureVector features;
    Label label = Label::unstable;
    Provenance provenance;
};

// ---------------------------------------------------------------------------
// Impurity
// ---------------------------------------------------------------------------
struct ClassCounts {
    std::size_t stable = 0;
    std::size_t unstable = 0;

    std::size_t total() const { return stable + unstable; }
    void add(Label label) { (label == Label::stable ? stable : unstable) += 1; }
    friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

// Binary entropy of a class fraction, base 2 unless stated.
double entropy(double p, double log_base = 2.0);
double entropy(const ClassCounts& counts, double log_base = 2.0);

// Parent entropy minus the sample-weighted child entropies.
double information_gain(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right,
                        double log_base = 2.0);

struct Split {
    Feature feature = Feature::rms;
    double threshold = 0.0;
    double gain = 0.0;
};

// Midpoints between consecutive distinct values of every feature; ties go to
// the earlier feature in `features`, then the lower threshold. nullopt when
// no candidate has positive gain.
std::optional<Split> best_split(std::span<const LabeledSample> samples, std::span<const Feature> features,
                                double log_base = 2.0);

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------
struct TrainConfig {
    std::size_t max_depth = 8;
    std::size_t min_samples_leaf = 5;
    double purity_stop = 1.0;
    double min_ig = 1e-6;
    std::uint64_t seed = 42;

    void validate() const;
};

struct TreeNode {
    bool leaf = true;
    // internal
    Feature feature = Feature::rms;
    double threshold = 0.0;
    std::size_t left = 0;   // feature <= threshold
    std::size_t right = 0;
    // leaf
    Label label = Label::unstable;
    double purity = 1.0;
    std::size_t count = 0;
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::vector<Feature> features);

    static DecisionTree make_leaf(Label label, double purity = 1.0, std::size_t count = 0);
    static DecisionTree make_stump(Feature feature, double threshold, Label left, Label right);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }
    // Feature set the tree was trained over.
    const std::vector<Feature>& features() const { return features_; }
    // Features actually referenced by internal nodes.
    std::vector<Feature> used_features() const;
    std::size_t depth() const;
    std::size_t leaf_count() const;

    Label predict(const FeatureVector& sample) const;

    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& j);

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
    std::vector<Feature> features_;
};

// Leaf ties resolve to unstable.
DecisionTree train(std::span<const LabeledSample> samples, std::span<const Feature> features,
                   const TrainConfig& config = {});

inline Label predict(const DecisionTree& tree, const LabeledSample& sample) {
    return tree.predict(sample.features);
}

// Stable is the positive class.
struct Confusion {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    double accuracy() const;
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Evaluation {
    double accuracy = 0.0;
    Confusion confusion;
};

Evaluation evaluate(const DecisionTree& tree, std::span<const LabeledSample> samples);

// ---------------------------------------------------------------------------
// K-fold validation
// ---------------------------------------------------------------------------

// Stratified shuffled partition: fold[i] holds sample indices.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const LabeledSample> samples, std::size_t k,
                                                       std::uint64_t seed);

struct FoldReport {
    std::vector<double> fold_accuracies;
    std::vector<double> fold_train_accuracies;
    double mean_train_accuracy = 0.0;
    double mean_test_accuracy = 0.0;
    Confusion confusion;  // summed over held-out folds
    std::size_t k = 0;

    nlohmann::json to_json() const;
};

FoldReport kfold_validate(std::span<const LabeledSample> samples, std::span<const Feature> features,
                          const TrainConfig& config = {}, std::size_t k = 5);

// ---------------------------------------------------------------------------
// Decision boundary lattice
// ---------------------------------------------------------------------------
struct Bounds2D {
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;
};

struct BoundaryGrid {
    Feature x_feature = Feature::rms;
    Feature y_feature = Feature::snr;
    Bounds2D bounds;
    std::size_t resolution = 0;
    std::vector<double> xs;     // lattice coordinates along x
    std::vector<double> ys;
    std::vector<Label> labels;  // labels[iy * resolution + ix]

    Label at(std::size_t ix, std::size_t iy) const { return labels[iy * resolution + ix]; }
};

// Cell-centred lattice: coordinate i is lo + (i + 0.5) * (hi - lo) / resolution.
BoundaryGrid decision_boundary_grid(const DecisionTree& tree, std::pair<Feature, Feature> feature_pair,
                                    const Bounds2D& bounds, std::size_t resolution);

} // namespace ccid
