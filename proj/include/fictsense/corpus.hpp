#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fictsense {

enum class Label { fiction = 0, nonfiction = 1 };

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view name);

struct Token {
    std::string text;
    bool is_word = false;
    // Byte offsets of the token in the source text, [begin, end).
    std::size_t begin = 0;
    std::size_t end = 0;
};

// True when the string would tokenize as a word (contains at least one
// alphanumeric or non-ASCII byte).
bool token_is_word(std::string_view text);

struct Document {
    std::string id;
    std::string text;
    std::optional<Label> label;
    std::string corpus;
    std::map<std::string, std::string> meta;
};

struct ClassCounts {
    std::size_t fiction = 0;
    std::size_t nonfiction = 0;
    std::size_t unlabeled = 0;
    std::size_t total() const { return fiction + nonfiction + unlabeled; }
};

// An ordered document collection with unique non-empty ids.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::string name, std::vector<Document> documents);

    const std::string& name() const { return name_; }
    const std::vector<Document>& documents() const { return documents_; }
    std::size_t size() const { return documents_.size(); }
    bool empty() const { return documents_.empty(); }
    const Document& operator[](std::size_t i) const { return documents_[i]; }

    ClassCounts counts() const;

private:
    std::string name_;
    std::vector<Document> documents_;
};

struct WindowSpec {
    int max_sentences = 5;
    int passages_per_set = 5000;
    // Totals for (train, validation, test); each split is class-balanced.
    std::array<int, 3> split_sizes{3200, 800, 1000};
    std::uint64_t seed = 0;
};

// Whitespace split, then leading/trailing punctuation runs become their
// own tokens; internal apostrophes and hyphens stay inside the word.
std::vector<Token> tokenize(std::string_view text);

// Boundaries after runs of '.', '!', '?' or an ellipsis when followed by
// whitespace, except after listed abbreviations and single-letter
// initials. Text without a terminal is one sentence.
std::vector<std::string> segment_sentences(std::string_view text);

// JSON Lines manifest, one object per record (see README for the schema).
Dataset load_manifest(const std::filesystem::path& path);
void save_manifest(const Dataset& ds, const std::filesystem::path& path);

// Contiguous span of min(n_tokens, length) tokens; start drawn uniformly
// from the valid range on a stream derived from (seed, doc id).
Document sample_page(const Document& doc, int n_tokens, std::uint64_t seed);

struct WindowAnchor {
    std::size_t doc_index = 0;
    std::size_t sentence_index = 0;
};

// Anchors (document, first sentence) admitting a full max_sentences
// window, split by class, in dataset order.
std::pair<std::vector<WindowAnchor>, std::vector<WindowAnchor>> eligible_window_anchors(
    const Dataset& ds, int max_sentences);

// Datasets of 1..max_sentences-sentence passages over one shared anchor
// sample, so passage k extends passage k-1 by exactly one sentence.
std::vector<Dataset> build_window_datasets(const Dataset& ds, const WindowSpec& spec);

struct SplitSizes {
    int train = 0;
    int validation = 0;
    int test = 0;
};

// Disjoint class-balanced splits of the given total sizes.
std::array<Dataset, 3> balanced_split(const Dataset& ds, SplitSizes sizes, std::uint64_t seed);

// Labeled corpus over a fixed vocabulary with known supersense
// assignments. divergence in [0, 1] shifts probability mass between the
// fiction-marker and nonfiction-marker categories of the two classes.
Dataset generate_synthetic_corpus(int n_per_class, int tokens_per_doc, double divergence,
                                  std::uint64_t seed);

struct SyntheticVocabEntry {
    std::string_view word;
    int supersense = -1;  // canonical index
};

// Every taggable word the generator can emit, with its supersense.
std::span<const SyntheticVocabEntry> synthetic_vocabulary();
// Function words the generator emits that no lexicon entry should match.
std::span<const std::string_view> synthetic_fillers();
// Supersenses whose mass rises in fiction documents as divergence grows.
std::span<const int> fiction_marker_supersenses();
// Supersenses whose mass rises in nonfiction documents.
std::span<const int> nonfiction_marker_supersenses();
// Base (divergence 0) probability that a generated word carries the
// supersense; the class-mean rate gap at divergence d is 2*d*base.
double synthetic_base_mass(int supersense);

}  // namespace fictsense
