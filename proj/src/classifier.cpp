#include "ccid/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "ccid/error.hpp"

namespace ccid {

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

namespace {
constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{"rms", "snr", "hurst", "fd", "lam", "tt"};
}

std::string_view to_string(Feature feature) { return kFeatureNames[static_cast<std::size_t>(feature)]; }

Feature feature_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) {
            return static_cast<Feature>(i);
        }
    }
    throw DataError("unknown feature '" + std::string(name) + "'");
}

std::vector<Feature> parse_feature_list(std::string_view list) {
    std::vector<Feature> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const auto item = list.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        if (!item.empty()) {
            const Feature f = feature_from_string(item);
            if (std::find(out.begin(), out.end(), f) != out.end()) {
                throw DataError("feature '" + std::string(item) + "' listed twice");
            }
            out.push_back(f);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (out.empty()) {
        throw DataError("empty feature list");
    }
    return out;
}

FeatureVector::FeatureVector() { values_.fill(std::numeric_limits<double>::quiet_NaN()); }

bool FeatureVector::has(Feature f) const { return !std::isnan((*this)[f]); }

// ---------------------------------------------------------------------------
// Impurity
// ---------------------------------------------------------------------------

double entropy(double p, double log_base) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("entropy needs a fraction in [0, 1]");
    }
    if (!(log_base > 0.0) || log_base == 1.0) {
        throw std::invalid_argument("entropy log base must be positive and not 1");
    }
    const auto term = [log_base](double q) {
        if (q == 0.0) {
            return 0.0;
        }
        return log_base == 2.0 ? q * std::log2(q) : q * std::log(q) / std::log(log_base);
    };
    return -(term(p) + term(1.0 - p));
}

double entropy(const ClassCounts& counts, double log_base) {
    if (counts.total() == 0) {
        return 0.0;
    }
    return entropy(static_cast<double>(counts.stable) / static_cast<double>(counts.total()), log_base);
}

double information_gain(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right,
                        double log_base) {
    if (parent.total() == 0) {
        throw std::invalid_argument("information gain of an empty parent");
    }
    if (left.stable + right.stable != parent.stable || left.unstable + right.unstable != parent.unstable) {
        throw std::invalid_argument("child class counts do not sum to the parent");
    }
    const double w = static_cast<double>(left.total()) / static_cast<double>(parent.total());
    const double gain =
        entropy(parent, log_base) - (w * entropy(left, log_base) + (1.0 - w) * entropy(right, log_base));
    // concavity makes the gain non-negative; only rounding can push it below
    return std::max(0.0, gain);
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

namespace {

constexpr double kGainTolerance = 1e-12;

ClassCounts count_classes(std::span<const LabeledSample> samples) {
    ClassCounts c;
    for (const auto& s : samples) {
        c.add(s.label);
    }
    return c;
}

double midpoint(double a, double b) {
    const double mid = a + (b - a) / 2.0;
    return mid < b ? mid : a;
}

void require_feature(const LabeledSample& s, Feature f) {
    if (!s.features.has(f)) {
        throw DataError("sample " + s.provenance.source_id + "@" + std::to_string(s.provenance.window_start) +
                        " lacks feature '" + std::string(to_string(f)) + "'");
    }
}

} // namespace

std::optional<Split> best_split(std::span<const LabeledSample> samples, std::span<const Feature> features,
                                double log_base) {
    if (features.empty()) {
        throw std::invalid_argument("best_split needs at least one feature");
    }
    const ClassCounts parent = count_classes(samples);
    std::optional<Split> best;
    std::vector<std::pair<double, Label>> column(samples.size());
    for (Feature f : features) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            require_feature(samples[i], f);
            column[i] = {samples[i].features[f], samples[i].label};
        }
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        ClassCounts left;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            left.add(column[i].second);
            if (column[i].first == column[i + 1].first) {
                continue;
            }
            const ClassCounts right{parent.stable - left.stable, parent.unstable - left.unstable};
            const double gain = information_gain(parent, left, right, log_base);
            // gains equal up to rounding count as ties
            if (gain > kGainTolerance && (!best || gain > best->gain + kGainTolerance)) {
                best = Split{f, midpoint(column[i].first, column[i + 1].first), gain};
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
    if (max_depth < 1) {
        throw std::invalid_argument("max_depth must be at least 1");
    }
    if (min_samples_leaf < 1) {
        throw std::invalid_argument("min_samples_leaf must be at least 1");
    }
    if (!(purity_stop > 0.5 && purity_stop <= 1.0)) {
        throw std::invalid_argument("purity_stop must lie in (0.5, 1]");
    }
    if (!(min_ig >= 0.0)) {
        throw std::invalid_argument("min_ig must be non-negative");
    }
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::vector<Feature> features)
    : nodes_(std::move(nodes)), features_(std::move(features)) {
    if (nodes_.empty()) {
        throw std::invalid_argument("a decision tree needs at least one node");
    }
    for (const auto& n : nodes_) {
        if (!n.leaf && (n.left >= nodes_.size() || n.right >= nodes_.size())) {
            throw std::invalid_argument("decision tree child index out of range");
        }
    }
}

DecisionTree DecisionTree::make_leaf(Label label, double purity, std::size_t count) {
    TreeNode n;
    n.leaf = true;
    n.label = label;
    n.purity = purity;
    n.count = count;
    return DecisionTree({n}, {});
}

DecisionTree DecisionTree::make_stump(Feature feature, double threshold, Label left, Label right) {
    TreeNode root;
    root.leaf = false;
    root.feature = feature;
    root.threshold = threshold;
    root.left = 1;
    root.right = 2;
    TreeNode l;
    l.label = left;
    TreeNode r;
    r.label = right;
    return DecisionTree({root, l, r}, {feature});
}

std::vector<Feature> DecisionTree::used_features() const {
    std::vector<Feature> out;
    for (const auto& n : nodes_) {
        if (!n.leaf && std::find(out.begin(), out.end(), n.feature) == out.end()) {
            out.push_back(n.feature);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::size_t depth_from(const std::vector<TreeNode>& nodes, std::size_t i) {
    const auto& n = nodes[i];
    if (n.leaf) {
        return 0;
    }
    return 1 + std::max(depth_from(nodes, n.left), depth_from(nodes, n.right));
}

} // namespace

std::size_t DecisionTree::depth() const { return depth_from(nodes_, 0); }

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.leaf; }));
}

Label DecisionTree::predict(const FeatureVector& sample) const {
    std::size_t i = 0;
    while (!nodes_[i].leaf) {
        const auto& n = nodes_[i];
        const double v = sample[n.feature];
        if (std::isnan(v)) {
            throw DataError("sample lacks feature '" + std::string(to_string(n.feature)) + "' used by the tree");
        }
        i = v <= n.threshold ? n.left : n.right;
    }
    return nodes_[i].label;
}

namespace {

constexpr int kTreeSchemaVersion = 1;

nlohmann::json node_to_json(const std::vector<TreeNode>& nodes, std::size_t i) {
    const auto& n = nodes[i];
    if (n.leaf) {
        return {{"type", "leaf"}, {"label", to_string(n.label)}, {"purity", n.purity}, {"count", n.count}};
    }
    return {{"type", "internal"},
            {"feature", to_string(n.feature)},
            {"threshold", n.threshold},
            {"left", node_to_json(nodes, n.left)},
            {"right", node_to_json(nodes, n.right)}};
}

std::size_t node_from_json(const nlohmann::json& j, std::vector<TreeNode>& nodes) {
    const std::size_t index = nodes.size();
    nodes.emplace_back();
    const std::string type = j.at("type").get<std::string>();
    if (type == "leaf") {
        TreeNode n;
        n.label = label_from_string(j.at("label").get<std::string>());
        n.purity = j.at("purity").get<double>();
        n.count = j.at("count").get<std::size_t>();
        nodes[index] = n;
    } else if (type == "internal") {
        TreeNode n;
        n.leaf = false;
        n.feature = feature_from_string(j.at("feature").get<std::string>());
        n.threshold = j.at("threshold").get<double>();
        n.left = node_from_json(j.at("left"), nodes);
        n.right = node_from_json(j.at("right"), nodes);
        nodes[index] = n;
    } else {
        throw DataError("unknown tree node type '" + type + "'");
    }
    return index;
}

} // namespace

nlohmann::json DecisionTree::to_json() const {
    nlohmann::json features = nlohmann::json::array();
    for (Feature f : features_) {
        features.push_back(to_string(f));
    }
    return {{"schema_version", kTreeSchemaVersion}, {"features", features}, {"root", node_to_json(nodes_, 0)}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != kTreeSchemaVersion) {
            throw DataError("unsupported tree schema version");
        }
        std::vector<Feature> features;
        for (const auto& f : j.at("features")) {
            features.push_back(feature_from_string(f.get<std::string>()));
        }
        std::vector<TreeNode> nodes;
        node_from_json(j.at("root"), nodes);
        return DecisionTree(std::move(nodes), std::move(features));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed tree JSON: ") + e.what());
    }
}

namespace {

struct Grower {
    std::span<const Feature> features;
    const TrainConfig& config;
    std::vector<TreeNode> nodes;

    std::size_t make_leaf(const ClassCounts& counts) {
        TreeNode n;
        n.leaf = true;
        n.label = counts.stable > counts.unstable ? Label::stable : Label::unstable;
        n.count = counts.total();
        n.purity = counts.total() == 0
                       ? 1.0
                       : static_cast<double>(std::max(counts.stable, counts.unstable)) /
                             static_cast<double>(counts.total());
        nodes.push_back(n);
        return nodes.size() - 1;
    }

    std::size_t grow(std::vector<LabeledSample> samples, std::size_t depth) {
        const ClassCounts counts = count_classes(samples);
        const double purity =
            static_cast<double>(std::max(counts.stable, counts.unstable)) / static_cast<double>(counts.total());
        if (purity >= config.purity_stop || depth >= config.max_depth || counts.stable == 0 ||
            counts.unstable == 0) {
            return make_leaf(counts);
        }
        const auto split = best_split(samples, features);
        if (!split || split->gain < config.min_ig) {
            return make_leaf(counts);
        }
        std::vector<LabeledSample> left, right;
        for (auto& s : samples) {
            (s.features[split->feature] <= split->threshold ? left : right).push_back(std::move(s));
        }
        if (left.size() < config.min_samples_leaf || right.size() < config.min_samples_leaf) {
            return make_leaf(counts);
        }
        const std::size_t index = nodes.size();
        TreeNode n;
        n.leaf = false;
        n.feature = split->feature;
        n.threshold = split->threshold;
        nodes.push_back(n);
        const std::size_t l = grow(std::move(left), depth + 1);
        const std::size_t r = grow(std::move(right), depth + 1);
        nodes[index].left = l;
        nodes[index].right = r;
        return index;
    }
};

} // namespace

DecisionTree train(std::span<const LabeledSample> samples, std::span<const Feature> features,
                   const TrainConfig& config) {
    config.validate();
    if (features.empty()) {
        throw std::invalid_argument("training needs at least one feature");
    }
    if (samples.empty()) {
        throw DataError("training set is empty");
    }
    for (const auto& s : samples) {
        for (Feature f : features) {
            require_feature(s, f);
        }
    }
    Grower g{features, config, {}};
    g.grow(std::vector<LabeledSample>(samples.begin(), samples.end()), 0);
    return DecisionTree(std::move(g.nodes), std::vector<Feature>(features.begin(), features.end()));
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double Confusion::accuracy() const {
    return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
}

Evaluation evaluate(const DecisionTree& tree, std::span<const LabeledSample> samples) {
    if (samples.empty()) {
        throw DataError("cannot evaluate on an empty sample set");
    }
    Evaluation e;
    for (const auto& s : samples) {
        const Label p = tree.predict(s.features);
        if (s.label == Label::stable) {
            (p == Label::stable ? e.confusion.tp : e.confusion.fn) += 1;
        } else {
            (p == Label::unstable ? e.confusion.tn : e.confusion.fp) += 1;
        }
    }
    e.accuracy = e.confusion.accuracy();
    return e;
}

// ---------------------------------------------------------------------------
// K-fold
// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const LabeledSample> samples, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) {
        throw std::invalid_argument("k-fold needs k >= 2");
    }
    std::vector<std::size_t> stable, unstable;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        (samples[i].label == Label::stable ? stable : unstable).push_back(i);
    }
    if (stable.size() < k || unstable.size() < k) {
        throw DataError("each class needs at least k=" + std::to_string(k) + " samples (stable " +
                        std::to_string(stable.size()) + ", unstable " + std::to_string(unstable.size()) + ")");
    }
    // Fisher-Yates on the raw engine output keeps the permutation identical
    // across standard library implementations.
    std::mt19937_64 rng(seed);
    const auto shuffle = [&rng](std::vector<std::size_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[rng() % i]);
        }
    };
    shuffle(stable);
    shuffle(unstable);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (const auto* group : {&stable, &unstable}) {
        for (std::size_t idx : *group) {
            folds[next].push_back(idx);
            next = (next + 1) % k;
        }
    }
    for (auto& f : folds) {
        std::sort(f.begin(), f.end());
    }
    return folds;
}

nlohmann::json FoldReport::to_json() const {
    return {{"k", k},
            {"fold_accuracies", fold_accuracies},
            {"fold_train_accuracies", fold_train_accuracies},
            {"mean_train_accuracy", mean_train_accuracy},
            {"mean_test_accuracy", mean_test_accuracy},
            {"confusion", {{"tp", confusion.tp}, {"tn", confusion.tn}, {"fp", confusion.fp}, {"fn", confusion.fn}}}};
}

FoldReport kfold_validate(std::span<const LabeledSample> samples, std::span<const Feature> features,
                          const TrainConfig& config, std::size_t k) {
    const auto folds = stratified_folds(samples, k, config.seed);
    FoldReport report;
    report.k = k;
    std::vector<bool> held(samples.size());
    for (const auto& fold : folds) {
        std::fill(held.begin(), held.end(), false);
        for (std::size_t i : fold) {
            held[i] = true;
        }
        std::vector<LabeledSample> train_set, test_set;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            (held[i] ? test_set : train_set).push_back(samples[i]);
        }
        const DecisionTree tree = train(train_set, features, config);
        const Evaluation test = evaluate(tree, test_set);
        const Evaluation fit = evaluate(tree, train_set);
        report.fold_accuracies.push_back(test.accuracy);
        report.fold_train_accuracies.push_back(fit.accuracy);
        report.confusion.tp += test.confusion.tp;
        report.confusion.tn += test.confusion.tn;
        report.confusion.fp += test.confusion.fp;
        report.confusion.fn += test.confusion.fn;
    }
    const double kd = static_cast<double>(k);
    report.mean_test_accuracy =
        std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(), 0.0) / kd;
    report.mean_train_accuracy =
        std::accumulate(report.fold_train_accuracies.begin(), report.fold_train_accuracies.end(), 0.0) / kd;
    return report;
}

// ---------------------------------------------------------------------------
// Boundary lattice
// ---------------------------------------------------------------------------

BoundaryGrid decision_boundary_grid(const DecisionTree& tree, std::pair<Feature, Feature> feature_pair,
                                    const Bounds2D& bounds, std::size_t resolution) {
    if (resolution == 0) {
        throw std::invalid_argument("boundary resolution must be positive");
    }
    if (feature_pair.first == feature_pair.second) {
        throw std::invalid_argument("boundary needs two distinct features");
    }
    for (Feature f : tree.used_features()) {
        if (f != feature_pair.first && f != feature_pair.second) {
            throw DataError("tree references feature '" + std::string(to_string(f)) + "' outside the pair");
        }
    }
    BoundaryGrid g;
    g.x_feature = feature_pair.first;
    g.y_feature = feature_pair.second;
    g.bounds = bounds;
    g.resolution = resolution;
    const double r = static_cast<double>(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / r;
        g.xs.push_back(bounds.x_lo + t * (bounds.x_hi - bounds.x_lo));
        g.ys.push_back(bounds.y_lo + t * (bounds.y_hi - bounds.y_lo));
    }
    g.labels.reserve(resolution * resolution);
    FeatureVector v;
    for (std::size_t iy = 0; iy < resolution; ++iy) {
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            v[g.x_feature] = g.xs[ix];
            v[g.y_feature] = g.ys[iy];
            g.labels.push_back(tree.predict(v));
        }
    }
    return g;
}

} // namespace ccid
