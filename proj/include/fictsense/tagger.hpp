#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fictsense/corpus.hpp"
#include "fictsense/supersense.hpp"

namespace fictsense {

enum class Pos { noun, verb };

std::string_view pos_name(Pos pos);

struct LexiconEntry {
    int supersense = -1;  // canonical index
    long score = 0;       // WordNet tag count of the winning sense
};

// Compiled (lemma, pos) -> supersense map. Lemmas are lowercase.
class Lexicon {
public:
    void insert(Pos pos, std::string lemma, LexiconEntry entry);
    const LexiconEntry* find(Pos pos, std::string_view lemma) const;
    std::size_t size() const { return nouns_.size() + verbs_.size(); }

    // Sorted (lemma, pos, entry) rows for deterministic serialization.
    std::vector<std::tuple<std::string, Pos, LexiconEntry>> sorted_entries() const;

private:
    std::unordered_map<std::string, LexiconEntry> nouns_;
    std::unordered_map<std::string, LexiconEntry> verbs_;
};

// Builds the lexicon from WordNet 3.x `index.sense` and `lexnames` files.
// Per (lemma, pos) the sense with the highest tag count wins (ties go to
// the lower sense number); winners in noun.Tops are dropped; adjective
// and adverb senses are ignored.
Lexicon compile_lexicon(const std::filesystem::path& sense_index_path,
                        const std::filesystem::path& lexnames_path);

// TSV cache `lemma<TAB>pos<TAB>supersense<TAB>score`, sorted by (lemma, pos).
void save_lexicon_cache(const Lexicon& lexicon, const std::filesystem::path& path);
Lexicon load_lexicon_cache(const std::filesystem::path& path);

// Irregular verb surface -> lemma table (said -> say, went -> go, ...).
const std::unordered_map<std::string_view, std::string_view>& irregular_verbs();

// Returns `word` if it is in the lexicon under `pos`; otherwise the first
// irregular-table or suffix-rule candidate found in the lexicon;
// otherwise `word` unchanged. Input must be lowercase.
std::string lemmatize(std::string_view word, Pos pos, const Lexicon& lexicon);

struct TaggedDocument {
    Document doc;
    std::vector<Token> tokens;
    // Supersense index per token, -1 untagged. Punctuation is never tagged.
    std::vector<std::int16_t> tags;
    std::size_t word_count = 0;
};

// At most one supersense per word token: the noun and verb candidates
// compete by lexicon score, ties going to the noun.
TaggedDocument tag_supersenses(const Document& doc, const Lexicon& lexicon);

// Tags documents in parallel; output order matches input order.
std::vector<TaggedDocument> tag_dataset(const Dataset& ds, const Lexicon& lexicon);

// Pre-tagged TSV `doc_id<TAB>token_index<TAB>token<TAB>tag` with tag a
// supersense name or `O`; rows grouped by doc_id, indices contiguous.
void export_pretagged(const std::vector<TaggedDocument>& docs,
                      const std::filesystem::path& path);
std::vector<TaggedDocument> ingest_pretagged(const std::filesystem::path& path);

struct TokenCount {
    std::string token;
    std::size_t count = 0;
};

// Top-k most frequent lowercase word tokens per supersense; ties are
// resolved alphabetically.
std::array<std::vector<TokenCount>, kNumSupersenses> top_tokens_report(
    const std::vector<TaggedDocument>& docs, int k);

}  // namespace fictsense
