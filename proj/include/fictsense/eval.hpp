#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fictsense/features.hpp"
#include "fictsense/forest.hpp"

namespace fictsense {

// Fiction is the positive class throughout.
struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;
};

Metrics metrics_from_confusion(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                               std::int64_t tn);
Metrics precision_recall_f1(const std::vector<Label>& predictions,
                            const std::vector<Label>& truth);

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // fold index per example
    std::uint64_t seed = 0;
};

// Per-class seeded shuffle dealt round-robin: fold sizes per class differ
// by at most one.
FoldPlan stratified_folds(const std::vector<FeatureVector>& X, int k, std::uint64_t seed);

// Fold means are arithmetic means of the per-fold metric values, not a
// pooled confusion.
struct MetricSummary {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

struct CvResult {
    MetricSummary mean;
    std::vector<Metrics> folds;
};

// For fold i, trains on the other folds with a forest seed derived from
// (seed, i) and evaluates on fold i.
CvResult cross_validate(const std::vector<FeatureVector>& X, const ForestParams& params, int k,
                        std::uint64_t seed);

// Trains on `train`, evaluates on `test` (which may be single-class; the
// report layer then shows accuracy instead of F1).
Metrics train_test_accuracy(const std::vector<FeatureVector>& train,
                            const std::vector<FeatureVector>& test,
                            const ForestParams& params);

// Leave-one-group-out over the values of meta[group_key]. Examples
// without the key are never held out but always remain in training.
std::map<std::string, Metrics> group_holdout(const std::vector<FeatureVector>& X,
                                             const ForestParams& params,
                                             const std::string& group_key);

}  // namespace fictsense
