#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fictsense/corpus.hpp"
#include "fictsense/eval.hpp"
#include "fictsense/forest.hpp"

namespace fictsense {

enum class ExperimentMode { cv, train_test, group_holdout, window_sweep };

std::string_view experiment_mode_name(ExperimentMode mode);

// One manifest plus optional exact-match filters. Filter keys are
// "corpus", "label", or "meta.<key>".
struct DatasetRef {
    std::filesystem::path manifest;
    std::map<std::string, std::string> filters;
};

struct TaggingConfig {
    std::optional<std::filesystem::path> lexicon;    // compiled cache TSV
    std::optional<std::filesystem::path> pretagged;  // TSV from an external tagger
};

struct ExperimentConfig {
    std::string name;
    ExperimentMode mode = ExperimentMode::cv;
    std::vector<DatasetRef> data;       // train data for train_test
    std::vector<DatasetRef> test_data;  // train_test only
    std::optional<int> page_tokens;
    std::optional<WindowSpec> window;   // window_sweep only
    TaggingConfig tagging;
    ForestParams params;
    int k = 5;                // cv folds
    std::string group_key;    // group_holdout only
    std::uint64_t seed = 0;
    int top_k_features = 5;
    int figure_top_k = 15;
};

// Schema validation only; referenced paths are checked when the
// experiment runs. Relative paths resolve against base_dir.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);
std::string config_digest(const ExperimentConfig& config);

struct ReportValue {
    std::string label;  // "mean", "fold 1", a group name, "3 sentences"
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    bool has_confusion = false;
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct SupportRow {
    std::string dataset;
    std::int64_t fiction = 0;
    std::int64_t nonfiction = 0;
};

struct ReportFeature {
    std::string name;
    double importance = 0.0;
    bool fiction_positive = true;
    bool tie = false;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct ExperimentRecord {
    std::string name;
    std::string metric_kind;  // "F1", or "Accuracy" when a test set is single-class
    std::vector<ReportValue> values;
    std::vector<SupportRow> support;
    std::vector<ReportFeature> top_features;
    std::vector<ReportFeature> figure_features;
    std::uint64_t seed = 0;
    std::string config_digest;
    // Wall-clock timings; excluded from the machine format so equal
    // configurations emit byte-identical reports.
    double runtime_seconds = 0.0;
    std::vector<StageTiming> stages;
};

struct Report {
    std::vector<ExperimentRecord> records;
};

Report run_experiment(const ExperimentConfig& config);

enum class ReportFormat { human_table, machine };

std::string emit_report(const Report& report, ReportFormat format);
Report report_from_machine(const std::string& bytes);

// Equality over everything except wall-clock timings.
bool deterministic_equal(const Report& a, const Report& b);

}  // namespace fictsense
