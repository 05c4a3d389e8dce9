#include "fictsense/eval.hpp"

#include <algorithm>
#include <set>

#include "fictsense/errors.hpp"
#include "fictsense/rng.hpp"

namespace fictsense {

Metrics metrics_from_confusion(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                               std::int64_t tn) {
    if (tp < 0 || fp < 0 || fn < 0 || tn < 0)
        throw ValidationError("metrics: negative confusion count");
    const std::int64_t total = tp + fp + fn + tn;
    if (total == 0) throw ValidationError("metrics: empty confusion matrix");

    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
    return m;
}

Metrics precision_recall_f1(const std::vector<Label>& predictions,
                            const std::vector<Label>& truth) {
    if (predictions.size() != truth.size())
        throw ValidationError("metrics: predictions and truth differ in length");
    if (predictions.empty()) throw ValidationError("metrics: empty input");

    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool pred_fic = predictions[i] == Label::fiction;
        const bool true_fic = truth[i] == Label::fiction;
        if (pred_fic && true_fic) ++tp;
        else if (pred_fic && !true_fic) ++fp;
        else if (!pred_fic && true_fic) ++fn;
        else ++tn;
    }
    return metrics_from_confusion(tp, fp, fn, tn);
}

FoldPlan stratified_folds(const std::vector<FeatureVector>& X, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("stratified_folds: k must be >= 2");

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (!X[i].label)
            throw ValidationError("stratified_folds: document '" + X[i].doc_id +
                                  "' has no label");
        by_class[static_cast<int>(*X[i].label)].push_back(i);
    }
    for (int c : {0, 1}) {
        if (by_class[c].size() < static_cast<std::size_t>(k))
            throw ValidationError("stratified_folds: class " +
                                  std::string(label_name(static_cast<Label>(c))) + " has only " +
                                  std::to_string(by_class[c].size()) + " members for k=" +
                                  std::to_string(k));
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(X.size(), 0);
    for (int c : {0, 1}) {
        Rng rng(derive_seed(seed, std::string("folds/") +
                                      std::string(label_name(static_cast<Label>(c)))));
        rng.shuffle(by_class[c]);
        for (std::size_t pos = 0; pos < by_class[c].size(); ++pos)
            plan.assignments[by_class[c][pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    }
    return plan;
}

CvResult cross_validate(const std::vector<FeatureVector>& X, const ForestParams& params, int k,
                        std::uint64_t seed) {
    const FoldPlan plan = stratified_folds(X, k, seed);

    CvResult result;
    result.folds.reserve(static_cast<std::size_t>(k));
    for (int fold = 0; fold < k; ++fold) {
        std::vector<FeatureVector> train, test;
        for (std::size_t i = 0; i < X.size(); ++i)
            (plan.assignments[i] == fold ? test : train).push_back(X[i]);

        ForestParams fold_params = params;
        fold_params.seed = derive_seed(seed, static_cast<std::uint64_t>(fold));
        const Forest forest = train_forest(train, fold_params);

        std::vector<Label> predictions, truth;
        predictions.reserve(test.size());
        truth.reserve(test.size());
        for (const FeatureVector& fv : test) {
            predictions.push_back(predict(forest, fv).label);
            truth.push_back(*fv.label);
        }
        result.folds.push_back(precision_recall_f1(predictions, truth));
    }

    for (const Metrics& m : result.folds) {
        result.mean.precision += m.precision;
        result.mean.recall += m.recall;
        result.mean.f1 += m.f1;
        result.mean.accuracy += m.accuracy;
    }
    const double kf = static_cast<double>(k);
    result.mean.precision /= kf;
    result.mean.recall /= kf;
    result.mean.f1 /= kf;
    result.mean.accuracy /= kf;
    return result;
}

Metrics train_test_accuracy(const std::vector<FeatureVector>& train,
                            const std::vector<FeatureVector>& test,
                            const ForestParams& params) {
    if (test.empty()) throw ValidationError("train_test: empty test set");
    const Forest forest = train_forest(train, params);

    std::vector<Label> predictions, truth;
    predictions.reserve(test.size());
    truth.reserve(test.size());
    for (const FeatureVector& fv : test) {
        if (!fv.label)
            throw ValidationError("train_test: test document '" + fv.doc_id + "' has no label");
        predictions.push_back(predict(forest, fv).label);
        truth.push_back(*fv.label);
    }
    return precision_recall_f1(predictions, truth);
}

std::map<std::string, Metrics> group_holdout(const std::vector<FeatureVector>& X,
                                             const ForestParams& params,
                                             const std::string& group_key) {
    std::set<std::string> groups;
    for (const FeatureVector& fv : X) {
        auto it = fv.meta.find(group_key);
        if (it != fv.meta.end()) groups.insert(it->second);
    }
    if (groups.size() < 2)
        throw ValidationError("group_holdout: need at least 2 groups carrying key '" +
                              group_key + "', found " + std::to_string(groups.size()));

    std::map<std::string, Metrics> out;
    for (const std::string& group : groups) {
        std::vector<FeatureVector> train, test;
        for (const FeatureVector& fv : X) {
            auto it = fv.meta.find(group_key);
            if (it != fv.meta.end() && it->second == group) {
                test.push_back(fv);
            } else {
                train.push_back(fv);
            }
        }
        std::array<std::int64_t, 2> counts{};
        for (const FeatureVector& fv : train)
            if (fv.label) ++counts[static_cast<std::size_t>(static_cast<int>(*fv.label))];
        if (counts[0] == 0 || counts[1] == 0)
            throw ValidationError("group_holdout: training remainder for group '" + group +
                                  "' is single-class");

        ForestParams group_params = params;
        group_params.seed = derive_seed(params.seed, group);
        out[group] = train_test_accuracy(train, test, group_params);
    }
    return out;
}

}  // namespace fictsense
