#include "fictsense/forest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "fictsense/errors.hpp"
#include "fictsense/parallel.hpp"
#include "fictsense/rng.hpp"

namespace fictsense {

double gini_impurity(std::int64_t count_a, std::int64_t count_b) {
    if (count_a < 0 || count_b < 0) throw std::domain_error("gini_impurity: negative count");
    const std::int64_t total = count_a + count_b;
    if (total == 0) throw std::domain_error("gini_impurity: both counts are zero");
    const double pa = static_cast<double>(count_a) / static_cast<double>(total);
    const double pb = static_cast<double>(count_b) / static_cast<double>(total);
    return 1.0 - (pa * pa + pb * pb);
}

namespace {

// Split quality is compared exactly. Maximizing the Gini decrease over a
// node is equivalent to maximizing
//     S = (cL0^2 + cL1^2)/nL + (cR0^2 + cR1^2)/nR,
// a rational number; comparisons cross-multiply in 128-bit integers so
// split selection never depends on floating-point rounding.
struct ExactScore {
    __int128 numerator = 0;
    std::int64_t denominator = 1;
};

ExactScore score_split(std::int64_t cl0, std::int64_t cl1, std::int64_t cr0, std::int64_t cr1) {
    const std::int64_t nl = cl0 + cl1;
    const std::int64_t nr = cr0 + cr1;
    const __int128 sum_l = static_cast<__int128>(cl0) * cl0 + static_cast<__int128>(cl1) * cl1;
    const __int128 sum_r = static_cast<__int128>(cr0) * cr0 + static_cast<__int128>(cr1) * cr1;
    return ExactScore{sum_l * nr + sum_r * nl, nl * nr};
}

bool exact_greater(const ExactScore& a, const ExactScore& b) {
    return a.numerator * b.denominator > b.numerator * a.denominator;
}

int label_class(const FeatureVector& fv) { return static_cast<int>(*fv.label); }

struct BuildItem {
    std::int32_t node = -1;
    std::vector<std::int32_t> rows;
    int depth = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<FeatureVector>& X, const ForestParams& params, Rng& rng)
        : X_(X), params_(params), rng_(rng) {}

    Tree build(std::vector<std::int32_t> rows) {
        Tree tree;
        std::vector<BuildItem> stack;
        tree.nodes.emplace_back();
        stack.push_back(BuildItem{0, std::move(rows), 0});

        while (!stack.empty()) {
            BuildItem item = std::move(stack.back());
            stack.pop_back();
            grow(tree, std::move(item), stack);
        }
        return tree;
    }

private:
    struct BestSplit {
        bool found = false;
        int feature = -1;
        double threshold = 0.0;
        ExactScore score;
        std::int64_t left_size = 0;
    };

    void grow(Tree& tree, BuildItem item, std::vector<BuildItem>& stack) {
        TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
        std::array<std::int64_t, 2> counts{};
        for (std::int32_t r : item.rows) ++counts[static_cast<std::size_t>(label_class(X_[static_cast<std::size_t>(r)]))];
        node.counts = counts;

        const std::int64_t n = counts[0] + counts[1];
        const bool pure = counts[0] == 0 || counts[1] == 0;
        const bool depth_capped =
            params_.max_depth.has_value() && item.depth >= *params_.max_depth;
        if (pure || depth_capped || n < 2 * params_.min_leaf) return;  // leaf

        const BestSplit best = find_best_split(item.rows, counts);
        if (!best.found) return;

        // Positive gain: S(split) must exceed S(parent) = (c0^2 + c1^2)/n.
        const __int128 parent_sum = static_cast<__int128>(counts[0]) * counts[0] +
                                    static_cast<__int128>(counts[1]) * counts[1];
        if (!(best.score.numerator * n > parent_sum * best.score.denominator)) return;

        std::vector<std::int32_t> left_rows, right_rows;
        left_rows.reserve(static_cast<std::size_t>(best.left_size));
        right_rows.reserve(item.rows.size() - static_cast<std::size_t>(best.left_size));
        for (std::int32_t r : item.rows) {
            const double v = X_[static_cast<std::size_t>(r)].values[static_cast<std::size_t>(best.feature)];
            (v < best.threshold ? left_rows : right_rows).push_back(r);
        }

        const auto left_index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        const auto right_index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        TreeNode& parent = tree.nodes[static_cast<std::size_t>(item.node)];
        parent.feature = best.feature;
        parent.threshold = best.threshold;
        parent.left = left_index;
        parent.right = right_index;

        stack.push_back(BuildItem{right_index, std::move(right_rows), item.depth + 1});
        stack.push_back(BuildItem{left_index, std::move(left_rows), item.depth + 1});
    }

    std::vector<int> sample_features() {
        std::array<int, kNumSupersenses> all;
        std::iota(all.begin(), all.end(), 0);
        const int take = params_.max_features;
        for (int i = 0; i < take; ++i) {
            const auto j = i + static_cast<int>(rng_.uniform_below(
                                   static_cast<std::uint64_t>(kNumSupersenses - i)));
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
        }
        std::vector<int> picked(all.begin(), all.begin() + take);
        // Ascending order fixes the tie rule: first strictly-better split
        // wins, so equal-gain ties resolve to the lowest feature index and
        // then the smallest threshold.
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    BestSplit find_best_split(const std::vector<std::int32_t>& rows,
                              const std::array<std::int64_t, 2>& counts) {
        BestSplit best;
        const std::size_t m = rows.size();
        std::vector<std::pair<double, int>> ordered(m);

        for (int feature : sample_features()) {
            for (std::size_t i = 0; i < m; ++i) {
                const FeatureVector& fv = X_[static_cast<std::size_t>(rows[i])];
                ordered[i] = {fv.values[static_cast<std::size_t>(feature)], label_class(fv)};
            }
            std::sort(ordered.begin(), ordered.end());

            std::int64_t cl0 = 0, cl1 = 0;
            for (std::size_t cut = 1; cut < m; ++cut) {
                (ordered[cut - 1].second == 0 ? cl0 : cl1) += 1;
                const double lo = ordered[cut - 1].first;
                const double hi = ordered[cut].first;
                if (!(lo < hi)) continue;
                const std::int64_t nl = static_cast<std::int64_t>(cut);
                const std::int64_t nr = static_cast<std::int64_t>(m - cut);
                if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
                const double threshold = lo + (hi - lo) / 2.0;
                if (!(lo < threshold)) continue;  // adjacent doubles round down

                const ExactScore score = score_split(cl0, cl1, counts[0] - cl0, counts[1] - cl1);
                if (!best.found || exact_greater(score, best.score)) {
                    best.found = true;
                    best.feature = feature;
                    best.threshold = threshold;
                    best.score = score;
                    best.left_size = nl;
                }
            }
        }
        return best;
    }

    const std::vector<FeatureVector>& X_;
    const ForestParams& params_;
    Rng& rng_;
};

void validate_params(const ForestParams& params) {
    if (params.n_trees < 1) throw ValidationError("forest params: n_trees must be >= 1");
    if (params.max_features < 1 || params.max_features > kNumSupersenses)
        throw ValidationError("forest params: max_features must be in [1, 40]");
    if (params.min_leaf < 1) throw ValidationError("forest params: min_leaf must be >= 1");
    if (params.max_depth && *params.max_depth < 0)
        throw ValidationError("forest params: max_depth must be >= 0");
}

std::array<std::string, kNumSupersenses> canonical_feature_order() {
    std::array<std::string, kNumSupersenses> order;
    for (std::size_t s = 0; s < kNumSupersenses; ++s) order[s] = std::string(kSupersenses[s]);
    return order;
}

}  // namespace

Forest train_forest(const std::vector<FeatureVector>& X, const ForestParams& params,
                    std::vector<std::vector<std::int32_t>>* bootstrap_log) {
    validate_params(params);
    if (X.size() < 2) throw ValidationError("train_forest: need at least 2 examples");
    std::array<std::int64_t, 2> totals{};
    for (const FeatureVector& fv : X) {
        if (!fv.label)
            throw ValidationError("train_forest: document '" + fv.doc_id + "' has no label");
        ++totals[static_cast<std::size_t>(static_cast<int>(*fv.label))];
    }
    if (totals[0] == 0 || totals[1] == 0)
        throw ValidationError("train_forest: training data contains a single class");

    Forest forest;
    forest.params = params;
    forest.feature_order = canonical_feature_order();
    forest.trees.resize(static_cast<std::size_t>(params.n_trees));
    if (bootstrap_log) bootstrap_log->assign(static_cast<std::size_t>(params.n_trees), {});

    const std::size_t n = X.size();
    parallel_for(static_cast<std::size_t>(params.n_trees), [&](std::size_t t) {
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::int32_t> rows(n);
        for (std::size_t i = 0; i < n; ++i)
            rows[i] = static_cast<std::int32_t>(rng.uniform_below(n));
        if (bootstrap_log) (*bootstrap_log)[t] = rows;
        TreeBuilder builder(X, params, rng);
        forest.trees[t] = builder.build(std::move(rows));
    });
    return forest;
}

Label predict_tree(const Tree& tree, const std::array<double, kNumSupersenses>& values) {
    std::size_t at = 0;
    while (!tree.nodes[at].is_leaf()) {
        const TreeNode& node = tree.nodes[at];
        at = static_cast<std::size_t>(
            values[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                            : node.right);
    }
    const auto& counts = tree.nodes[at].counts;
    return counts[0] >= counts[1] ? Label::fiction : Label::nonfiction;
}

Prediction predict(const Forest& forest, const FeatureVector& x) {
    if (forest.trees.empty()) throw ValidationError("predict: forest has no trees");
    std::size_t fiction_votes = 0;
    for (const Tree& tree : forest.trees)
        if (predict_tree(tree, x.values) == Label::fiction) ++fiction_votes;
    Prediction p;
    p.fiction_score = static_cast<double>(fiction_votes) / static_cast<double>(forest.trees.size());
    p.label = 2 * fiction_votes >= forest.trees.size() ? Label::fiction : Label::nonfiction;
    return p;
}

std::array<double, kNumSupersenses> feature_importances(const Forest& forest) {
    std::array<double, kNumSupersenses> acc{};
    for (const Tree& tree : forest.trees) {
        if (tree.nodes.empty()) continue;
        const double root_total =
            static_cast<double>(tree.nodes[0].counts[0] + tree.nodes[0].counts[1]);
        if (root_total == 0) continue;
        for (const TreeNode& node : tree.nodes) {
            if (node.is_leaf()) continue;
            const TreeNode& left = tree.nodes[static_cast<std::size_t>(node.left)];
            const TreeNode& right = tree.nodes[static_cast<std::size_t>(node.right)];
            const double n = static_cast<double>(node.counts[0] + node.counts[1]);
            const double nl = static_cast<double>(left.counts[0] + left.counts[1]);
            const double nr = static_cast<double>(right.counts[0] + right.counts[1]);
            const double decrease = gini_impurity(node.counts[0], node.counts[1]) -
                                    (nl / n) * gini_impurity(left.counts[0], left.counts[1]) -
                                    (nr / n) * gini_impurity(right.counts[0], right.counts[1]);
            acc[static_cast<std::size_t>(node.feature)] += decrease * (n / root_total);
        }
    }
    if (!forest.trees.empty())
        for (double& v : acc) v /= static_cast<double>(forest.trees.size());
    const double total = std::accumulate(acc.begin(), acc.end(), 0.0);
    if (total > 0.0)
        for (double& v : acc) v /= total;
    return acc;
}

std::vector<SignedFeature> signed_top_features(const Forest& forest,
                                               const std::vector<FeatureVector>& X, int k) {
    if (k < 1) throw ValidationError("signed_top_features: k must be >= 1");
    const auto importances = feature_importances(forest);

    std::array<int, kNumSupersenses> order;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ia = importances[static_cast<std::size_t>(a)];
        const double ib = importances[static_cast<std::size_t>(b)];
        if (ia != ib) return ia > ib;
        return a < b;
    });

    std::array<double, kNumSupersenses> mean[2] = {{}, {}};
    std::size_t count[2] = {0, 0};
    for (const FeatureVector& fv : X) {
        if (!fv.label) continue;
        const auto c = static_cast<std::size_t>(static_cast<int>(*fv.label));
        ++count[c];
        for (std::size_t s = 0; s < kNumSupersenses; ++s) mean[c][s] += fv.values[s];
    }
    for (std::size_t c : {0u, 1u})
        if (count[c] > 0)
            for (double& v : mean[c]) v /= static_cast<double>(count[c]);

    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), kNumSupersenses);
    std::vector<SignedFeature> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const int s = order[i];
        SignedFeature sf;
        sf.supersense = s;
        sf.importance = importances[static_cast<std::size_t>(s)];
        const double fic = mean[0][static_cast<std::size_t>(s)];
        const double non = mean[1][static_cast<std::size_t>(s)];
        sf.fiction_positive = fic >= non;
        sf.mean_tie = fic == non;
        out.push_back(sf);
    }
    return out;
}

namespace {

nlohmann::json node_to_json(const Tree& tree, std::size_t index) {
    const TreeNode& node = tree.nodes[index];
    nlohmann::json j;
    j["counts"] = {node.counts[0], node.counts[1]};
    if (!node.is_leaf()) {
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["left"] = node_to_json(tree, static_cast<std::size_t>(node.left));
        j["right"] = node_to_json(tree, static_cast<std::size_t>(node.right));
    }
    return j;
}

std::int32_t node_from_json(const nlohmann::json& j, Tree& tree) {
    if (!j.is_object() || !j.contains("counts") || !j["counts"].is_array() ||
        j["counts"].size() != 2)
        throw ParseError("forest model: node missing counts");
    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    {
        TreeNode& node = tree.nodes.back();
        node.counts = {j["counts"][0].get<std::int64_t>(), j["counts"][1].get<std::int64_t>()};
    }
    const bool has_children = j.contains("left") || j.contains("right");
    if (has_children) {
        if (!j.contains("left") || !j.contains("right") || !j.contains("feature") ||
            !j.contains("threshold"))
            throw ValidationError("forest model: internal node needs feature, threshold, "
                                  "left, and right");
        const int feature = j["feature"].get<int>();
        if (feature < 0 || feature >= kNumSupersenses)
            throw ValidationError("forest model: feature index out of range");
        const double threshold = j["threshold"].get<double>();
        const std::int32_t left = node_from_json(j["left"], tree);
        const std::int32_t right = node_from_json(j["right"], tree);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
        node.feature = feature;
        node.threshold = threshold;
        node.left = left;
        node.right = right;
    } else {
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
        if (node.counts[0] == 0 && node.counts[1] == 0)
            throw ValidationError("forest model: leaf with zero counts");
    }
    return index;
}

}  // namespace

nlohmann::json forest_to_json(const Forest& forest) {
    nlohmann::json j;
    j["format"] = "fictsense-forest";
    j["version"] = 1;
    j["params"]["n_trees"] = forest.params.n_trees;
    j["params"]["max_features"] = forest.params.max_features;
    j["params"]["min_leaf"] = forest.params.min_leaf;
    if (forest.params.max_depth) {
        j["params"]["max_depth"] = *forest.params.max_depth;
    } else {
        j["params"]["max_depth"] = nullptr;
    }
    j["params"]["seed"] = forest.params.seed;
    j["feature_order"] = forest.feature_order;
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : forest.trees) trees.push_back(node_to_json(tree, 0));
    j["trees"] = std::move(trees);
    return j;
}

Forest forest_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != "fictsense-forest")
        throw ValidationError("forest model: missing fictsense-forest format marker");
    Forest forest;
    const auto& p = j.at("params");
    forest.params.n_trees = p.at("n_trees").get<int>();
    forest.params.max_features = p.at("max_features").get<int>();
    forest.params.min_leaf = p.at("min_leaf").get<int>();
    if (p.contains("max_depth") && !p.at("max_depth").is_null())
        forest.params.max_depth = p.at("max_depth").get<int>();
    forest.params.seed = p.at("seed").get<std::uint64_t>();

    const auto& order = j.at("feature_order");
    if (!order.is_array() || order.size() != kNumSupersenses)
        throw ValidationError("forest model: feature_order must list 40 supersenses");
    for (std::size_t s = 0; s < kNumSupersenses; ++s) {
        const auto name = order[s].get<std::string>();
        if (name != kSupersenses[s])
            throw ValidationError("forest model: feature_order differs from the canonical "
                                  "inventory at index " + std::to_string(s));
        forest.feature_order[s] = name;
    }

    for (const auto& tj : j.at("trees")) {
        Tree tree;
        node_from_json(tj, tree);
        forest.trees.push_back(std::move(tree));
    }
    if (forest.trees.size() != static_cast<std::size_t>(forest.params.n_trees))
        throw ValidationError("forest model: tree count does not match params.n_trees");
    return forest;
}

void save_forest(const Forest& forest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model: " + path.string());
    out << forest_to_json(forest).dump() << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Forest load_forest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("forest model " + path.string() + ": " + e.what());
    }
    return forest_from_json(j);
}

}  // namespace fictsense
