#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fictsense/features.hpp"

namespace fictsense {

struct ForestParams {
    int n_trees = 500;
    int max_features = 7;  // ceil(sqrt(40)), per-split candidate count
    int min_leaf = 1;
    std::optional<int> max_depth;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    // Samples reaching the node, by class (fiction, nonfiction). Kept on
    // internal nodes too so importances survive serialization.
    std::array<std::int64_t, 2> counts{};

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct Forest {
    ForestParams params;
    std::array<std::string, kNumSupersenses> feature_order;
    std::vector<Tree> trees;
};

// 1 - sum(p_c^2); both counts zero is a domain error.
double gini_impurity(std::int64_t count_a, std::int64_t count_b);

// Breiman-style forest: per-tree bootstrap on a stream derived from
// (seed, tree index), per-node feature subsampling, midpoint thresholds,
// split chosen by exact (integer-rational) Gini decrease comparison with
// ties to the lowest feature index then smallest threshold. Structure is
// identical under any thread schedule. bootstrap_log, when given, records
// each tree's sampled row indices.
Forest train_forest(const std::vector<FeatureVector>& X, const ForestParams& params,
                    std::vector<std::vector<std::int32_t>>* bootstrap_log = nullptr);

struct Prediction {
    Label label = Label::fiction;
    double fiction_score = 0.0;  // fraction of trees voting fiction
};

Label predict_tree(const Tree& tree, const std::array<double, kNumSupersenses>& values);
Prediction predict(const Forest& forest, const FeatureVector& x);

// Mean decrease in impurity per feature, averaged over trees and
// normalized to sum to 1 (all-zero stays all-zero).
std::array<double, kNumSupersenses> feature_importances(const Forest& forest);

struct SignedFeature {
    int supersense = -1;
    double importance = 0.0;
    bool fiction_positive = true;
    bool mean_tie = false;  // class-conditional means were equal
};

// Top-k features by importance; the sign marks the class with the larger
// class-conditional mean of the feature in X (tie -> fiction, flagged).
std::vector<SignedFeature> signed_top_features(const Forest& forest,
                                               const std::vector<FeatureVector>& X, int k);

nlohmann::json forest_to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& j);
void save_forest(const Forest& forest, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

}  // namespace fictsense
