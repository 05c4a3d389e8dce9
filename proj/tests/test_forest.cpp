#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "fictsense/errors.hpp"
#include "fictsense/forest.hpp"
#include "fictsense/rng.hpp"
#include "helpers.hpp"
#include "split_oracle.hpp"

using namespace fictsense;

namespace {

FeatureVector fv(std::string id, Label label, std::initializer_list<std::pair<int, double>> vals) {
    FeatureVector x;
    x.doc_id = std::move(id);
    x.label = label;
    for (auto [index, value] : vals) x.values[static_cast<std::size_t>(index)] = value;
    return x;
}

std::vector<FeatureVector> random_dataset(Rng& rng, std::size_t n) {
    std::vector<FeatureVector> X;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector x;
        x.doc_id = "r" + std::to_string(i);
        // Both classes guaranteed by the first two assignments.
        x.label = (i < 2) ? static_cast<Label>(i)
                          : static_cast<Label>(rng.uniform_below(2));
        for (double& v : x.values) v = rng.unit_real();
        X.push_back(std::move(x));
    }
    return X;
}

}  // namespace

TEST_CASE("gini impurity values") {
    CHECK(gini_impurity(10, 0) == 0.0);
    CHECK(gini_impurity(0, 10) == 0.0);
    CHECK(gini_impurity(5, 5) == 0.5);
    CHECK(gini_impurity(3, 1) == 0.375);  // 1 - (9/16 + 1/16)
    CHECK_THROWS_AS(gini_impurity(0, 0), std::domain_error);
}

TEST_CASE("perfectly separable four points split on the separating feature") {
    // Feature 0 separates the classes; other features are constant.
    std::vector<FeatureVector> X = {
        fv("a", Label::fiction, {{0, 0.0}}),
        fv("b", Label::fiction, {{0, 0.1}}),
        fv("c", Label::nonfiction, {{0, 0.9}}),
        fv("d", Label::nonfiction, {{0, 1.0}}),
    };
    ForestParams params;
    params.n_trees = 1;
    params.max_features = 40;
    params.min_leaf = 1;

    // Find a seed whose bootstrap holds both classes, then assert the
    // structure the geometry forces.
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        params.seed = seed;
        std::vector<std::vector<std::int32_t>> log;
        const Forest forest = train_forest(X, params, &log);
        std::set<int> classes;
        for (std::int32_t r : log[0]) classes.insert(static_cast<int>(*X[static_cast<std::size_t>(r)].label));
        if (classes.size() < 2) continue;

        const Tree& tree = forest.trees[0];
        REQUIRE_FALSE(tree.nodes[0].is_leaf());
        CHECK(tree.nodes[0].feature == 0);
        CHECK(tree.nodes[0].threshold > 0.1);
        CHECK(tree.nodes[0].threshold <= 0.9);
        const TreeNode& left = tree.nodes[static_cast<std::size_t>(tree.nodes[0].left)];
        const TreeNode& right = tree.nodes[static_cast<std::size_t>(tree.nodes[0].right)];
        CHECK(left.is_leaf());
        CHECK(right.is_leaf());
        CHECK(left.counts[1] == 0);   // pure fiction side
        CHECK(right.counts[0] == 0);  // pure nonfiction side

        // The tree reproduces its own training labels.
        for (const FeatureVector& x : X) {
            if (std::find(log[0].begin(), log[0].end(),
                          static_cast<std::int32_t>(&x - X.data())) == log[0].end())
                continue;
            CHECK(predict_tree(tree, x.values) == *x.label);
        }
        return;
    }
    FAIL("no seed in 0..15 produced a two-class bootstrap");
}

TEST_CASE("identical points with mixed labels produce a single leaf") {
    std::vector<FeatureVector> X = {
        fv("a", Label::fiction, {{3, 0.5}}),
        fv("b", Label::nonfiction, {{3, 0.5}}),
        fv("c", Label::fiction, {{3, 0.5}}),
        fv("d", Label::nonfiction, {{3, 0.5}}),
    };
    ForestParams params;
    params.n_trees = 4;
    params.max_features = 40;
    params.seed = 3;
    const Forest forest = train_forest(X, params);
    for (const Tree& tree : forest.trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].is_leaf());
        CHECK(tree.nodes[0].counts[0] + tree.nodes[0].counts[1] == 4);
    }
    const auto importances = feature_importances(forest);
    for (double v : importances) CHECK(v == 0.0);
}

TEST_CASE("training validation errors") {
    std::vector<FeatureVector> single = {fv("a", Label::fiction, {}),
                                         fv("b", Label::fiction, {})};
    CHECK_THROWS_AS(train_forest(single, ForestParams{}), ValidationError);

    std::vector<FeatureVector> unlabeled = {fv("a", Label::fiction, {}), FeatureVector{}};
    unlabeled[1].doc_id = "b";
    CHECK_THROWS_AS(train_forest(unlabeled, ForestParams{}), ValidationError);

    ForestParams bad;
    bad.max_features = 41;
    std::vector<FeatureVector> X = {fv("a", Label::fiction, {}), fv("b", Label::nonfiction, {})};
    CHECK_THROWS_AS(train_forest(X, bad), ValidationError);
    bad = ForestParams{};
    bad.n_trees = 0;
    CHECK_THROWS_AS(train_forest(X, bad), ValidationError);
}

TEST_CASE("every internal node matches the exhaustive split oracle") {
    Rng rng(2024);
    for (int round = 0; round < 30; ++round) {
        const std::size_t n = 4 + rng.uniform_below(13);  // up to 16 points
        const auto X = random_dataset(rng, n);
        ForestParams params;
        params.n_trees = 1;
        params.max_features = 40;
        params.min_leaf = 1;
        params.seed = rng.next_u64();

        std::vector<std::vector<std::int32_t>> log;
        const Forest forest = train_forest(X, params, &log);
        std::vector<const FeatureVector*> rows;
        for (std::int32_t r : log[0]) rows.push_back(&X[static_cast<std::size_t>(r)]);
        std::string failure;
        testutil::verify_tree_splits(forest.trees[0], 0, rows, params.min_leaf, &failure);
        CHECK_MESSAGE(failure.empty(), failure);
    }
}

TEST_CASE("each tree fits its own bootstrap sample exactly") {
    Rng rng(555);
    const auto X = random_dataset(rng, 40);  // distinct vectors w.p. 1
    ForestParams params;
    params.n_trees = 10;
    params.max_features = 40;
    params.min_leaf = 1;
    params.seed = 8;
    std::vector<std::vector<std::int32_t>> log;
    const Forest forest = train_forest(X, params, &log);
    for (std::size_t t = 0; t < forest.trees.size(); ++t)
        for (std::int32_t r : log[t])
            CHECK(predict_tree(forest.trees[t], X[static_cast<std::size_t>(r)].values) ==
                  *X[static_cast<std::size_t>(r)].label);
}

TEST_CASE("bootstrap samples have cardinality n and about 63 percent unique") {
    Rng rng(77);
    const auto X = random_dataset(rng, 150);
    ForestParams params;
    params.n_trees = 300;
    params.max_features = 7;
    params.max_depth = 1;  // keep the statistical test cheap
    params.seed = 15;
    std::vector<std::vector<std::int32_t>> log;
    train_forest(X, params, &log);

    double unique_fraction = 0.0;
    for (const auto& rows : log) {
        CHECK(rows.size() == X.size());
        std::set<std::int32_t> unique(rows.begin(), rows.end());
        unique_fraction += static_cast<double>(unique.size()) / static_cast<double>(rows.size());
    }
    unique_fraction /= static_cast<double>(log.size());
    CHECK(std::abs(unique_fraction - (1.0 - 1.0 / std::exp(1.0))) < 0.03);
}

TEST_CASE("prediction vote counting") {
    // Hand-built forest of single-leaf trees: 3 vote fiction, 7 nonfiction.
    Forest forest;
    forest.params.n_trees = 10;
    for (std::size_t s = 0; s < kNumSupersenses; ++s)
        forest.feature_order[s] = std::string(kSupersenses[s]);
    for (int t = 0; t < 10; ++t) {
        Tree tree;
        TreeNode leaf;
        leaf.counts = (t < 3) ? std::array<std::int64_t, 2>{5, 1}
                              : std::array<std::int64_t, 2>{1, 5};
        tree.nodes.push_back(leaf);
        forest.trees.push_back(tree);
    }
    const Prediction p = predict(forest, FeatureVector{});
    CHECK(p.label == Label::nonfiction);
    CHECK(p.fiction_score == 0.3);

    // Unanimous fiction -> (fiction, 1.0); forest vote tie -> fiction.
    forest.trees.resize(2);
    forest.trees[0].nodes[0].counts = {5, 1};
    forest.trees[1].nodes[0].counts = {1, 5};
    forest.params.n_trees = 2;
    CHECK(predict(forest, FeatureVector{}).label == Label::fiction);
    forest.trees[1].nodes[0].counts = {5, 1};
    CHECK(predict(forest, FeatureVector{}).fiction_score == 1.0);
}

TEST_CASE("single split tree concentrates importance on its feature") {
    std::vector<FeatureVector> X = {
        fv("a", Label::fiction, {{0, 0.0}}),
        fv("b", Label::fiction, {{0, 0.0}}),
        fv("c", Label::nonfiction, {{0, 1.0}}),
        fv("d", Label::nonfiction, {{0, 1.0}}),
    };
    ForestParams params;
    params.n_trees = 1;
    params.max_features = 40;
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        params.seed = seed;
        const Forest forest = train_forest(X, params);
        if (forest.trees[0].nodes[0].is_leaf()) continue;  // one-class bootstrap
        const auto importances = feature_importances(forest);
        CHECK(importances[0] == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t s = 1; s < kNumSupersenses; ++s) CHECK(importances[s] == 0.0);
        return;
    }
    FAIL("no usable seed");
}

TEST_CASE("importances are normalized over a trained forest") {
    const Dataset ds = generate_synthetic_corpus(30, 150, 0.5, 5);
    const auto X = featurize_dataset(tag_dataset(ds, testutil::mini_lexicon()));
    ForestParams params;
    params.n_trees = 50;
    params.seed = 4;
    const Forest forest = train_forest(X, params);
    const auto importances = feature_importances(forest);
    double sum = 0.0;
    for (double v : importances) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("signed top features recover the generator's markers") {
    const Dataset ds = generate_synthetic_corpus(100, 300, 0.4, 19);
    const auto X = featurize_dataset(tag_dataset(ds, testutil::mini_lexicon()));
    ForestParams params;
    params.n_trees = 120;
    params.seed = 19;
    const Forest forest = train_forest(X, params);

    const auto top = signed_top_features(forest, X, 7);
    REQUIRE(top.size() == 7);
    for (std::size_t i = 1; i < top.size(); ++i)
        CHECK(top[i - 1].importance >= top[i].importance);

    std::set<int> fiction_markers(fiction_marker_supersenses().begin(),
                                  fiction_marker_supersenses().end());
    std::set<int> nonfiction_markers(nonfiction_marker_supersenses().begin(),
                                     nonfiction_marker_supersenses().end());
    for (const SignedFeature& sf : top) {
        if (fiction_markers.count(sf.supersense)) CHECK(sf.fiction_positive);
        if (nonfiction_markers.count(sf.supersense)) CHECK_FALSE(sf.fiction_positive);
    }

    CHECK(signed_top_features(forest, X, 5).size() == 5);
    CHECK(signed_top_features(forest, X, 99).size() == 40);
    CHECK_THROWS_AS(signed_top_features(forest, X, 0), ValidationError);
}

TEST_CASE("training is deterministic and schedule independent") {
    const Dataset ds = generate_synthetic_corpus(20, 100, 0.3, 30);
    const auto X = featurize_dataset(tag_dataset(ds, testutil::mini_lexicon()));
    ForestParams params;
    params.n_trees = 40;
    params.seed = 12;

    setenv("FICTSENSE_THREADS", "1", 1);
    const std::string serial = forest_to_json(train_forest(X, params)).dump();
    setenv("FICTSENSE_THREADS", "4", 1);
    const std::string parallel = forest_to_json(train_forest(X, params)).dump();
    unsetenv("FICTSENSE_THREADS");
    CHECK(serial == parallel);
    CHECK(forest_to_json(train_forest(X, params)).dump() == serial);
}

TEST_CASE("scaling a feature column by powers of two leaves predictions unchanged") {
    Rng rng(4242);
    auto X = random_dataset(rng, 60);
    auto Xtest = random_dataset(rng, 30);
    ForestParams params;
    params.n_trees = 25;
    params.seed = 99;
    const Forest base = train_forest(X, params);

    for (double scale : {0.25, 2.0, 1024.0}) {
        auto Xs = X;
        auto Xts = Xtest;
        for (auto& x : Xs) x.values[11] *= scale;
        for (auto& x : Xts) x.values[11] *= scale;
        const Forest scaled = train_forest(Xs, params);
        for (std::size_t i = 0; i < Xtest.size(); ++i) {
            const Prediction a = predict(base, Xtest[i]);
            const Prediction b = predict(scaled, Xts[i]);
            CHECK(a.label == b.label);
            CHECK(a.fiction_score == b.fiction_score);
        }
    }
}

TEST_CASE("model serialization round-trips bit-exact predictions") {
    const Dataset ds = generate_synthetic_corpus(25, 120, 0.45, 8);
    const auto X = featurize_dataset(tag_dataset(ds, testutil::mini_lexicon()));
    ForestParams params;
    params.n_trees = 30;
    params.seed = 21;
    params.max_depth = 12;
    const Forest forest = train_forest(X, params);

    const auto path = testutil::temp_path("model.json");
    save_forest(forest, path);
    const Forest loaded = load_forest(path);

    CHECK(forest_to_json(loaded).dump() == forest_to_json(forest).dump());
    for (const FeatureVector& x : X) {
        const Prediction a = predict(forest, x);
        const Prediction b = predict(loaded, x);
        CHECK(a.label == b.label);
        CHECK(a.fiction_score == b.fiction_score);
    }
    const auto imp_a = feature_importances(forest);
    const auto imp_b = feature_importances(loaded);
    CHECK(imp_a == imp_b);
}

TEST_CASE("model loading validates structure") {
    nlohmann::json j = forest_to_json(Forest{
        ForestParams{1, 7, 1, std::nullopt, 0},
        [] {
            std::array<std::string, kNumSupersenses> order;
            for (std::size_t s = 0; s < kNumSupersenses; ++s)
                order[s] = std::string(kSupersenses[s]);
            return order;
        }(),
        {Tree{{TreeNode{-1, 0.0, -1, -1, {3, 1}}}}},
    });
    CHECK(forest_from_json(j).trees.size() == 1);

    nlohmann::json wrong_order = j;
    wrong_order["feature_order"][0] = "noun.animal";
    CHECK_THROWS_AS(forest_from_json(wrong_order), ValidationError);

    nlohmann::json zero_leaf = j;
    zero_leaf["trees"][0]["counts"] = {0, 0};
    CHECK_THROWS_AS(forest_from_json(zero_leaf), ValidationError);

    nlohmann::json no_marker = j;
    no_marker["format"] = "something";
    CHECK_THROWS_AS(forest_from_json(no_marker), ValidationError);
}
