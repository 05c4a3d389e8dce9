#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fictsense/corpus.hpp"
#include "fictsense/supersense.hpp"
#include "fictsense/tagger.hpp"

namespace fictsense {

// 40 supersense frequencies normalized by the document's word-token
// count, index-aligned with the canonical inventory.
struct FeatureVector {
    std::string doc_id;
    std::optional<Label> label;
    // Carried document metadata; used by group holdouts, never exported.
    std::map<std::string, std::string> meta;
    std::array<double, kNumSupersenses> values{};
};

FeatureVector featurize(const TaggedDocument& tagged);
std::vector<FeatureVector> featurize_dataset(const std::vector<TaggedDocument>& tagged_docs);

// CSV with header `doc_id,label,<40 supersense names>`; values carry 17
// significant digits so a read round-trips bit-exactly.
void write_feature_csv(const std::vector<FeatureVector>& rows,
                       const std::filesystem::path& path);
std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path);

}  // namespace fictsense
