#include "fictsense/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fictsense/errors.hpp"
#include "fictsense/rng.hpp"
#include "fictsense/tagger.hpp"

namespace fictsense {

namespace {

using nlohmann::json;

void require_keys(const json& j, std::initializer_list<std::string_view> allowed,
                  const std::string& where) {
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ValidationError(where + ": unknown key '" + item.key() + "'");
    }
}

std::filesystem::path resolve(const std::filesystem::path& p,
                              const std::filesystem::path& base_dir) {
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

DatasetRef parse_dataset_ref(const json& j, const std::filesystem::path& base_dir,
                             const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": dataset reference must be an object");
    require_keys(j, {"manifest", "filters"}, where);
    if (!j.contains("manifest") || !j["manifest"].is_string())
        throw ValidationError(where + ": 'manifest' path is required");
    DatasetRef ref;
    ref.manifest = resolve(j["manifest"].get<std::string>(), base_dir);
    if (j.contains("filters")) {
        if (!j["filters"].is_object())
            throw ValidationError(where + ": 'filters' must be an object");
        for (const auto& item : j["filters"].items()) {
            const std::string& key = item.key();
            const bool known =
                key == "corpus" || key == "label" || key.rfind("meta.", 0) == 0;
            if (!known)
                throw ValidationError(where + ": unknown filter key '" + key +
                                      "' (use corpus, label, or meta.<key>)");
            if (!item.value().is_string())
                throw ValidationError(where + ": filter '" + key + "' must be a string");
            if (key == "label" && !parse_label(item.value().get<std::string>()))
                throw ValidationError(where + ": filter label must be fiction or nonfiction");
            ref.filters[key] = item.value().get<std::string>();
        }
    }
    return ref;
}

std::vector<DatasetRef> parse_dataset_refs(const json& j, const std::filesystem::path& base_dir,
                                           const std::string& where) {
    std::vector<DatasetRef> refs;
    if (j.is_array()) {
        if (j.empty()) throw ValidationError(where + ": dataset list is empty");
        std::size_t index = 0;
        for (const auto& item : j)
            refs.push_back(parse_dataset_ref(item, base_dir,
                                             where + "[" + std::to_string(index++) + "]"));
    } else {
        refs.push_back(parse_dataset_ref(j, base_dir, where));
    }
    return refs;
}

}  // namespace

std::string_view experiment_mode_name(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::cv: return "cv";
        case ExperimentMode::train_test: return "train_test";
        case ExperimentMode::group_holdout: return "group_holdout";
        case ExperimentMode::window_sweep: return "window_sweep";
    }
    return "cv";
}

ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ValidationError("config: root must be a JSON object");
    require_keys(j,
                 {"name", "mode", "data", "test_data", "preprocessing", "tagging", "params", "k",
                  "group_key", "seed", "top_k_features", "figure_top_k"},
                 "config");

    ExperimentConfig config;
    if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty())
        throw ValidationError("config: 'name' is required");
    config.name = j["name"].get<std::string>();

    if (!j.contains("mode") || !j["mode"].is_string())
        throw ValidationError("config: 'mode' is required");
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "cv") config.mode = ExperimentMode::cv;
    else if (mode == "train_test") config.mode = ExperimentMode::train_test;
    else if (mode == "group_holdout") config.mode = ExperimentMode::group_holdout;
    else if (mode == "window_sweep") config.mode = ExperimentMode::window_sweep;
    else throw ValidationError("config: unknown mode '" + mode + "'");

    if (!j.contains("data")) throw ValidationError("config: 'data' is required");
    config.data = parse_dataset_refs(j["data"], base_dir, "config.data");

    if (config.mode == ExperimentMode::train_test) {
        if (!j.contains("test_data"))
            throw ValidationError("config: train_test mode requires 'test_data'");
        config.test_data = parse_dataset_refs(j["test_data"], base_dir, "config.test_data");
    } else if (j.contains("test_data")) {
        throw ValidationError("config: 'test_data' is only valid in train_test mode");
    }

    if (j.contains("preprocessing")) {
        const json& p = j["preprocessing"];
        require_keys(p, {"page_tokens", "window"}, "config.preprocessing");
        if (p.contains("page_tokens")) {
            if (!p["page_tokens"].is_number_integer() || p["page_tokens"].get<int>() < 1)
                throw ValidationError("config.preprocessing: page_tokens must be a positive "
                                      "integer");
            config.page_tokens = p["page_tokens"].get<int>();
        }
        if (p.contains("window")) {
            const json& w = p["window"];
            require_keys(w, {"max_sentences", "passages_per_set", "split_sizes", "seed"},
                         "config.preprocessing.window");
            WindowSpec spec;
            if (!w.contains("max_sentences") || !w.contains("passages_per_set") ||
                !w.contains("split_sizes"))
                throw ValidationError("config.preprocessing.window: max_sentences, "
                                      "passages_per_set, and split_sizes are required");
            spec.max_sentences = w["max_sentences"].get<int>();
            spec.passages_per_set = w["passages_per_set"].get<int>();
            const json& sizes = w["split_sizes"];
            if (!sizes.is_array() || sizes.size() != 3)
                throw ValidationError("config.preprocessing.window: split_sizes must be "
                                      "[train, validation, test]");
            for (std::size_t i = 0; i < 3; ++i) spec.split_sizes[i] = sizes[i].get<int>();
            if (w.contains("seed")) spec.seed = w["seed"].get<std::uint64_t>();
            config.window = spec;
        }
    }

    if (!j.contains("tagging") || !j["tagging"].is_object())
        throw ValidationError("config: 'tagging' object is required");
    {
        const json& t = j["tagging"];
        require_keys(t, {"lexicon", "pretagged"}, "config.tagging");
        if (t.contains("lexicon") == t.contains("pretagged"))
            throw ValidationError("config.tagging: exactly one of 'lexicon' or 'pretagged'");
        if (t.contains("lexicon"))
            config.tagging.lexicon = resolve(t["lexicon"].get<std::string>(), base_dir);
        if (t.contains("pretagged"))
            config.tagging.pretagged = resolve(t["pretagged"].get<std::string>(), base_dir);
    }

    if (j.contains("params")) {
        const json& p = j["params"];
        require_keys(p, {"n_trees", "max_features", "min_leaf", "max_depth"}, "config.params");
        if (p.contains("n_trees")) config.params.n_trees = p["n_trees"].get<int>();
        if (p.contains("max_features")) config.params.max_features = p["max_features"].get<int>();
        if (p.contains("min_leaf")) config.params.min_leaf = p["min_leaf"].get<int>();
        if (p.contains("max_depth") && !p["max_depth"].is_null())
            config.params.max_depth = p["max_depth"].get<int>();
    }

    if (j.contains("k")) {
        if (config.mode != ExperimentMode::cv)
            throw ValidationError("config: 'k' is only valid in cv mode");
        config.k = j["k"].get<int>();
    }
    if (config.mode == ExperimentMode::group_holdout) {
        if (!j.contains("group_key") || !j["group_key"].is_string() ||
            j["group_key"].get<std::string>().empty())
            throw ValidationError("config: group_holdout mode requires 'group_key'");
        config.group_key = j["group_key"].get<std::string>();
    } else if (j.contains("group_key")) {
        throw ValidationError("config: 'group_key' is only valid in group_holdout mode");
    }

    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("top_k_features")) config.top_k_features = j["top_k_features"].get<int>();
    if (j.contains("figure_top_k")) config.figure_top_k = j["figure_top_k"].get<int>();
    if (config.top_k_features < 1 || config.figure_top_k < 1)
        throw ValidationError("config: top_k_features and figure_top_k must be >= 1");

    if (config.mode == ExperimentMode::window_sweep && !config.window)
        throw ValidationError("config: window_sweep mode requires preprocessing.window");
    if (config.mode != ExperimentMode::window_sweep && config.window)
        throw ValidationError("config: preprocessing.window is only valid in window_sweep mode");
    if (config.tagging.pretagged && (config.page_tokens || config.window))
        throw ValidationError("config: pretagged tagging cannot be combined with page "
                              "sampling or window building");
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return parse_experiment_config(j, path.parent_path());
}

json config_to_json(const ExperimentConfig& config) {
    json j;
    j["name"] = config.name;
    j["mode"] = std::string(experiment_mode_name(config.mode));
    auto refs_to_json = [](const std::vector<DatasetRef>& refs) {
        json arr = json::array();
        for (const DatasetRef& ref : refs) {
            json r;
            r["manifest"] = ref.manifest.string();
            json filters = json::object();
            for (const auto& [k, v] : ref.filters) filters[k] = v;
            r["filters"] = filters;
            arr.push_back(std::move(r));
        }
        return arr;
    };
    j["data"] = refs_to_json(config.data);
    if (config.mode == ExperimentMode::train_test) j["test_data"] = refs_to_json(config.test_data);
    if (config.page_tokens || config.window) {
        json p = json::object();
        if (config.page_tokens) p["page_tokens"] = *config.page_tokens;
        if (config.window) {
            p["window"]["max_sentences"] = config.window->max_sentences;
            p["window"]["passages_per_set"] = config.window->passages_per_set;
            p["window"]["split_sizes"] = config.window->split_sizes;
            p["window"]["seed"] = config.window->seed;
        }
        j["preprocessing"] = std::move(p);
    }
    if (config.tagging.lexicon) j["tagging"]["lexicon"] = config.tagging.lexicon->string();
    if (config.tagging.pretagged) j["tagging"]["pretagged"] = config.tagging.pretagged->string();
    j["params"]["n_trees"] = config.params.n_trees;
    j["params"]["max_features"] = config.params.max_features;
    j["params"]["min_leaf"] = config.params.min_leaf;
    j["params"]["max_depth"] =
        config.params.max_depth ? json(*config.params.max_depth) : json(nullptr);
    if (config.mode == ExperimentMode::cv) j["k"] = config.k;
    if (config.mode == ExperimentMode::group_holdout) j["group_key"] = config.group_key;
    j["seed"] = config.seed;
    j["top_k_features"] = config.top_k_features;
    j["figure_top_k"] = config.figure_top_k;
    return j;
}

std::string config_digest(const ExperimentConfig& config) {
    const std::uint64_t h = fnv1a64(config_to_json(config).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

[[noreturn]] void rethrow_staged(const std::string& stage, const std::string& field) {
    const std::string prefix = "stage " + stage + " (config field " + field + "): ";
    try {
        throw;
    } catch (const ValidationError& e) {
        throw ValidationError(prefix + e.what());
    } catch (const ParseError& e) {
        throw ParseError(prefix + e.what());
    } catch (const IoError& e) {
        throw IoError(prefix + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(prefix + e.what());
    }
}

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& timings) : timings_(timings) {}

    template <typename F>
    auto run(const std::string& stage, const std::string& field, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto result = f();
            record(stage, t0);
            return result;
        } catch (...) {
            rethrow_staged(stage, field);
        }
    }

    template <typename F>
    void run_void(const std::string& stage, const std::string& field, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            f();
            record(stage, t0);
        } catch (...) {
            rethrow_staged(stage, field);
        }
    }

private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        timings_.push_back(StageTiming{stage, dt.count()});
    }

    std::vector<StageTiming>& timings_;
};

bool matches_filters(const Document& doc, const std::map<std::string, std::string>& filters) {
    for (const auto& [key, value] : filters) {
        if (key == "corpus") {
            if (doc.corpus != value) return false;
        } else if (key == "label") {
            if (!doc.label || label_name(*doc.label) != value) return false;
        } else {  // meta.<key>
            auto it = doc.meta.find(key.substr(5));
            if (it == doc.meta.end() || it->second != value) return false;
        }
    }
    return true;
}

Dataset load_refs(const std::vector<DatasetRef>& refs, const std::string& name) {
    std::vector<Document> docs;
    for (const DatasetRef& ref : refs) {
        const Dataset loaded = load_manifest(ref.manifest);
        for (const Document& doc : loaded.documents())
            if (matches_filters(doc, ref.filters)) docs.push_back(doc);
    }
    return Dataset(name, std::move(docs));
}

Dataset apply_page_sampling(const Dataset& ds, int page_tokens, std::uint64_t seed) {
    std::vector<Document> docs;
    docs.reserve(ds.size());
    for (const Document& doc : ds.documents())
        docs.push_back(sample_page(doc, page_tokens, seed));
    return Dataset(ds.name(), std::move(docs));
}

std::vector<TaggedDocument> tag_stage(const Dataset& ds, const TaggingConfig& tagging,
                                      const Lexicon* lexicon) {
    if (lexicon) return tag_dataset(ds, *lexicon);

    // Pre-tagged route: tags come from the file, documents keep their
    // manifest labels and metadata.
    const std::vector<TaggedDocument> file_docs = ingest_pretagged(*tagging.pretagged);
    std::unordered_map<std::string_view, const TaggedDocument*> by_id;
    for (const TaggedDocument& td : file_docs) by_id[td.doc.id] = &td;

    std::vector<TaggedDocument> out;
    out.reserve(ds.size());
    for (const Document& doc : ds.documents()) {
        auto it = by_id.find(doc.id);
        if (it == by_id.end())
            throw ValidationError("pre-tagged file " + tagging.pretagged->string() +
                                  " has no rows for document '" + doc.id + "'");
        TaggedDocument td = *it->second;
        td.doc = doc;
        out.push_back(std::move(td));
    }
    return out;
}

SupportRow support_row(const std::string& name, const Dataset& ds) {
    const ClassCounts c = ds.counts();
    return SupportRow{name, static_cast<std::int64_t>(c.fiction),
                      static_cast<std::int64_t>(c.nonfiction)};
}

SupportRow support_row(const std::string& name, const std::vector<FeatureVector>& X) {
    SupportRow row{name, 0, 0};
    for (const FeatureVector& fv : X) {
        if (!fv.label) continue;
        (*fv.label == Label::fiction ? row.fiction : row.nonfiction) += 1;
    }
    return row;
}

ReportValue value_from_metrics(const std::string& label, const Metrics& m) {
    ReportValue v;
    v.label = label;
    v.precision = m.precision;
    v.recall = m.recall;
    v.f1 = m.f1;
    v.accuracy = m.accuracy;
    v.has_confusion = true;
    v.tp = m.tp;
    v.fp = m.fp;
    v.fn = m.fn;
    v.tn = m.tn;
    return v;
}

bool single_class(const std::vector<FeatureVector>& X) {
    bool fic = false, non = false;
    for (const FeatureVector& fv : X) {
        if (!fv.label) continue;
        (*fv.label == Label::fiction ? fic : non) = true;
    }
    return fic != non;
}

std::vector<ReportFeature> to_report_features(const std::vector<SignedFeature>& features) {
    std::vector<ReportFeature> out;
    out.reserve(features.size());
    for (const SignedFeature& sf : features) {
        out.push_back(ReportFeature{std::string(kSupersenses[static_cast<std::size_t>(sf.supersense)]),
                                    sf.importance, sf.fiction_positive, sf.mean_tie});
    }
    return out;
}

std::string window_label(int k) {
    return std::to_string(k) + (k == 1 ? " sentence" : " sentences");
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
    const auto wall0 = std::chrono::steady_clock::now();
    ExperimentRecord record;
    record.name = config.name;
    record.seed = config.seed;
    record.config_digest = config_digest(config);
    record.metric_kind = "F1";
    StageClock clock(record.stages);

    Dataset data = clock.run("load", "data",
                             [&] { return load_refs(config.data, config.name + "/data"); });
    Dataset test_data;
    if (config.mode == ExperimentMode::train_test) {
        test_data = clock.run("load_test", "test_data", [&] {
            return load_refs(config.test_data, config.name + "/test");
        });
    }

    if (config.page_tokens) {
        const std::uint64_t page_seed = derive_seed(config.seed, "page");
        clock.run_void("page_sample", "preprocessing.page_tokens", [&] {
            data = apply_page_sampling(data, *config.page_tokens, page_seed);
            if (config.mode == ExperimentMode::train_test)
                test_data = apply_page_sampling(test_data, *config.page_tokens, page_seed);
        });
    }

    Lexicon lexicon;
    const bool use_lexicon = config.tagging.lexicon.has_value();
    if (use_lexicon) {
        clock.run_void("load_lexicon", "tagging.lexicon",
                       [&] { lexicon = load_lexicon_cache(*config.tagging.lexicon); });
    }
    const Lexicon* lexicon_ptr = use_lexicon ? &lexicon : nullptr;

    const std::string tagging_field = use_lexicon ? "tagging.lexicon" : "tagging.pretagged";

    ForestParams params = config.params;
    params.seed = config.seed;

    if (config.mode == ExperimentMode::window_sweep) {
        WindowSpec spec = *config.window;
        if (spec.seed == 0) spec.seed = derive_seed(config.seed, "window");
        const std::vector<Dataset> windows = clock.run("windows", "preprocessing.window", [&] {
            return build_window_datasets(data, spec);
        });

        const SplitSizes sizes{spec.split_sizes[0], spec.split_sizes[1], spec.split_sizes[2]};
        const std::uint64_t split_seed = derive_seed(config.seed, "split");
        Forest features_forest;
        std::vector<FeatureVector> features_train;
        for (int len = 1; len <= spec.max_sentences; ++len) {
            const Dataset& passages = windows[static_cast<std::size_t>(len - 1)];
            const auto tagged = clock.run("tag/w" + std::to_string(len), tagging_field, [&] {
                return tag_stage(passages, config.tagging, lexicon_ptr);
            });
            const auto X = clock.run("featurize/w" + std::to_string(len), "preprocessing.window",
                                     [&] { return featurize_dataset(tagged); });
            clock.run_void("evaluate/w" + std::to_string(len), "preprocessing.window", [&] {
                const auto splits = balanced_split(passages, sizes, split_seed);
                // Feature vectors are index-aligned with the passage
                // dataset; pick the split members by id.
                std::set<std::string_view> train_ids, test_ids;
                for (const Document& d : splits[0].documents()) train_ids.insert(d.id);
                for (const Document& d : splits[2].documents()) test_ids.insert(d.id);
                std::vector<FeatureVector> train, test;
                for (const FeatureVector& fv : X) {
                    if (train_ids.count(fv.doc_id)) train.push_back(fv);
                    else if (test_ids.count(fv.doc_id)) test.push_back(fv);
                }
                ForestParams len_params = params;
                len_params.seed = derive_seed(config.seed, static_cast<std::uint64_t>(len));
                const Metrics m = train_test_accuracy(train, test, len_params);
                record.values.push_back(value_from_metrics(window_label(len), m));
                if (len == 1) {
                    record.support.push_back(support_row("train", train));
                    record.support.push_back(support_row("validation", splits[1]));
                    record.support.push_back(support_row("test", test));
                }
                if (len == spec.max_sentences) {
                    ForestParams f = len_params;
                    features_forest = train_forest(train, f);
                    features_train = train;
                }
            });
        }
        clock.run_void("features", "top_k_features", [&] {
            record.top_features = to_report_features(
                signed_top_features(features_forest, features_train, config.top_k_features));
            record.figure_features = to_report_features(
                signed_top_features(features_forest, features_train, config.figure_top_k));
        });
    } else {
        const auto tagged = clock.run("tag", tagging_field, [&] {
            return tag_stage(data, config.tagging, lexicon_ptr);
        });
        const auto X =
            clock.run("featurize", "data", [&] { return featurize_dataset(tagged); });

        std::vector<FeatureVector> features_train = X;
        Forest features_forest;

        if (config.mode == ExperimentMode::cv) {
            record.support.push_back(support_row("data", data));
            clock.run_void("evaluate", "k", [&] {
                const CvResult cv = cross_validate(X, params, config.k, config.seed);
                ReportValue mean;
                mean.label = "mean";
                mean.precision = cv.mean.precision;
                mean.recall = cv.mean.recall;
                mean.f1 = cv.mean.f1;
                mean.accuracy = cv.mean.accuracy;
                record.values.push_back(mean);
                for (std::size_t i = 0; i < cv.folds.size(); ++i)
                    record.values.push_back(
                        value_from_metrics("fold " + std::to_string(i + 1), cv.folds[i]));
            });
            clock.run_void("features", "top_k_features", [&] {
                ForestParams f = params;
                f.seed = derive_seed(config.seed, "features");
                features_forest = train_forest(X, f);
            });
        } else if (config.mode == ExperimentMode::train_test) {
            const auto tagged_test = clock.run("tag_test", tagging_field, [&] {
                return tag_stage(test_data, config.tagging, lexicon_ptr);
            });
            const auto X_test = clock.run("featurize_test", "test_data",
                                          [&] { return featurize_dataset(tagged_test); });
            record.support.push_back(support_row("train", data));
            record.support.push_back(support_row("test", test_data));
            if (single_class(X_test)) record.metric_kind = "Accuracy";
            clock.run_void("evaluate", "test_data", [&] {
                const Metrics m = train_test_accuracy(X, X_test, params);
                record.values.push_back(value_from_metrics("test", m));
            });
            clock.run_void("features", "top_k_features",
                           [&] { features_forest = train_forest(X, params); });
        } else {  // group_holdout
            record.support.push_back(support_row("data", data));
            clock.run_void("evaluate", "group_key", [&] {
                const auto by_group = group_holdout(X, params, config.group_key);
                for (const auto& [group, metrics] : by_group) {
                    record.values.push_back(value_from_metrics(group, metrics));
                    std::vector<FeatureVector> members;
                    for (const FeatureVector& fv : X) {
                        auto it = fv.meta.find(config.group_key);
                        if (it != fv.meta.end() && it->second == group) members.push_back(fv);
                    }
                    record.support.push_back(support_row("group " + group, members));
                    if (single_class(members)) record.metric_kind = "Accuracy";
                }
            });
            clock.run_void("features", "top_k_features", [&] {
                ForestParams f = params;
                f.seed = derive_seed(config.seed, "features");
                features_forest = train_forest(X, f);
            });
        }

        record.top_features = to_report_features(
            signed_top_features(features_forest, features_train, config.top_k_features));
        record.figure_features = to_report_features(
            signed_top_features(features_forest, features_train, config.figure_top_k));
    }

    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - wall0;
    record.runtime_seconds = wall.count();

    Report report;
    report.records.push_back(std::move(record));
    return report;
}

namespace {

json value_to_json(const ReportValue& v) {
    json j;
    j["label"] = v.label;
    j["precision"] = v.precision;
    j["recall"] = v.recall;
    j["f1"] = v.f1;
    j["accuracy"] = v.accuracy;
    if (v.has_confusion) j["confusion"] = {v.tp, v.fp, v.fn, v.tn};
    return j;
}

ReportValue value_from_json(const json& j) {
    ReportValue v;
    v.label = j.at("label").get<std::string>();
    v.precision = j.at("precision").get<double>();
    v.recall = j.at("recall").get<double>();
    v.f1 = j.at("f1").get<double>();
    v.accuracy = j.at("accuracy").get<double>();
    if (j.contains("confusion")) {
        v.has_confusion = true;
        v.tp = j["confusion"][0].get<std::int64_t>();
        v.fp = j["confusion"][1].get<std::int64_t>();
        v.fn = j["confusion"][2].get<std::int64_t>();
        v.tn = j["confusion"][3].get<std::int64_t>();
    }
    return v;
}

json feature_to_json(const ReportFeature& f) {
    json j;
    j["name"] = f.name;
    j["importance"] = f.importance;
    j["fiction_positive"] = f.fiction_positive;
    j["tie"] = f.tie;
    return j;
}

ReportFeature feature_from_json(const json& j) {
    ReportFeature f;
    f.name = j.at("name").get<std::string>();
    f.importance = j.at("importance").get<double>();
    f.fiction_positive = j.at("fiction_positive").get<bool>();
    f.tie = j.at("tie").get<bool>();
    return f;
}

std::string format_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::string emit_report(const Report& report, ReportFormat format) {
    if (report.records.empty()) throw ValidationError("emit_report: empty report");

    if (format == ReportFormat::machine) {
        json j;
        j["format"] = "fictsense-report";
        j["version"] = 1;
        json records = json::array();
        for (const ExperimentRecord& r : report.records) {
            json rj;
            rj["name"] = r.name;
            rj["metric_kind"] = r.metric_kind;
            rj["seed"] = r.seed;
            rj["config_digest"] = r.config_digest;
            json values = json::array();
            for (const ReportValue& v : r.values) values.push_back(value_to_json(v));
            rj["values"] = std::move(values);
            json support = json::array();
            for (const SupportRow& s : r.support) {
                json sj;
                sj["dataset"] = s.dataset;
                sj["fiction"] = s.fiction;
                sj["nonfiction"] = s.nonfiction;
                support.push_back(std::move(sj));
            }
            rj["support"] = std::move(support);
            json top = json::array();
            for (const ReportFeature& f : r.top_features) top.push_back(feature_to_json(f));
            rj["top_features"] = std::move(top);
            json figure = json::array();
            for (const ReportFeature& f : r.figure_features) figure.push_back(feature_to_json(f));
            rj["figure_features"] = std::move(figure);
            records.push_back(std::move(rj));
        }
        j["records"] = std::move(records);
        return j.dump(2) + "\n";
    }

    // human_table
    std::ostringstream out;
    for (const ExperimentRecord& r : report.records) {
        out << "== " << r.name << " ==\n";
        out << "metric: " << r.metric_kind << "   seed: " << r.seed
            << "   config: " << r.config_digest << "\n";
        for (const SupportRow& s : r.support)
            out << "support: " << s.dataset << "  fiction=" << s.fiction
                << " nonfiction=" << s.nonfiction << "\n";
        out << "top features:";
        for (const ReportFeature& f : r.top_features) {
            out << ' ' << (f.fiction_positive ? '+' : '-') << f.name << '('
                << format_fixed(f.importance) << ')';
            if (f.tie) out << "~";
        }
        out << "\n";
        out << "label                 precision  recall     " << "f1         accuracy\n";
        for (const ReportValue& v : r.values) {
            std::string label = v.label;
            if (label.size() < 20) label.resize(20, ' ');
            out << label << "  " << format_fixed(v.precision) << "     " << format_fixed(v.recall)
                << "     " << format_fixed(v.f1) << "     " << format_fixed(v.accuracy) << "\n";
        }
        out << "figure features:";
        for (const ReportFeature& f : r.figure_features) {
            out << ' ' << (f.fiction_positive ? '+' : '-') << f.name << '('
                << format_fixed(f.importance) << ')';
        }
        out << "\n";
        char runtime[32];
        std::snprintf(runtime, sizeof(runtime), "%.2fs", r.runtime_seconds);
        out << "runtime: " << runtime;
        if (!r.stages.empty()) {
            out << " (";
            for (std::size_t i = 0; i < r.stages.size(); ++i) {
                if (i > 0) out << ", ";
                char sec[32];
                std::snprintf(sec, sizeof(sec), "%.2fs", r.stages[i].seconds);
                out << r.stages[i].stage << ' ' << sec;
            }
            out << ")";
        }
        out << "\n\n";
    }
    return out.str();
}

Report report_from_machine(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("machine report: ") + e.what());
    }
    if (j.value("format", "") != "fictsense-report")
        throw ValidationError("machine report: missing fictsense-report format marker");

    Report report;
    for (const json& rj : j.at("records")) {
        ExperimentRecord r;
        r.name = rj.at("name").get<std::string>();
        r.metric_kind = rj.at("metric_kind").get<std::string>();
        r.seed = rj.at("seed").get<std::uint64_t>();
        r.config_digest = rj.at("config_digest").get<std::string>();
        for (const json& vj : rj.at("values")) r.values.push_back(value_from_json(vj));
        for (const json& sj : rj.at("support"))
            r.support.push_back(SupportRow{sj.at("dataset").get<std::string>(),
                                           sj.at("fiction").get<std::int64_t>(),
                                           sj.at("nonfiction").get<std::int64_t>()});
        for (const json& fj : rj.at("top_features")) r.top_features.push_back(feature_from_json(fj));
        for (const json& fj : rj.at("figure_features"))
            r.figure_features.push_back(feature_from_json(fj));
        report.records.push_back(std::move(r));
    }
    return report;
}

namespace {

bool equal_values(const ReportValue& a, const ReportValue& b) {
    return a.label == b.label && a.precision == b.precision && a.recall == b.recall &&
           a.f1 == b.f1 && a.accuracy == b.accuracy && a.has_confusion == b.has_confusion &&
           a.tp == b.tp && a.fp == b.fp && a.fn == b.fn && a.tn == b.tn;
}

bool equal_features(const ReportFeature& a, const ReportFeature& b) {
    return a.name == b.name && a.importance == b.importance &&
           a.fiction_positive == b.fiction_positive && a.tie == b.tie;
}

}  // namespace

bool deterministic_equal(const Report& a, const Report& b) {
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const ExperimentRecord& x = a.records[i];
        const ExperimentRecord& y = b.records[i];
        if (x.name != y.name || x.metric_kind != y.metric_kind || x.seed != y.seed ||
            x.config_digest != y.config_digest)
            return false;
        if (x.values.size() != y.values.size() || x.support.size() != y.support.size() ||
            x.top_features.size() != y.top_features.size() ||
            x.figure_features.size() != y.figure_features.size())
            return false;
        for (std::size_t v = 0; v < x.values.size(); ++v)
            if (!equal_values(x.values[v], y.values[v])) return false;
        for (std::size_t s = 0; s < x.support.size(); ++s) {
            if (x.support[s].dataset != y.support[s].dataset ||
                x.support[s].fiction != y.support[s].fiction ||
                x.support[s].nonfiction != y.support[s].nonfiction)
                return false;
        }
        for (std::size_t f = 0; f < x.top_features.size(); ++f)
            if (!equal_features(x.top_features[f], y.top_features[f])) return false;
        for (std::size_t f = 0; f < x.figure_features.size(); ++f)
            if (!equal_features(x.figure_features[f], y.figure_features[f])) return false;
    }
    return true;
}

}  // namespace fictsense
