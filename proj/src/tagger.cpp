#include "fictsense/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "fictsense/errors.hpp"
#include "fictsense/parallel.hpp"

namespace fictsense {

namespace {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        if (at == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, at - start));
        start = at + 1;
    }
}

}  // namespace

std::string_view pos_name(Pos pos) { return pos == Pos::noun ? "noun" : "verb"; }

void Lexicon::insert(Pos pos, std::string lemma, LexiconEntry entry) {
    auto& table = (pos == Pos::noun) ? nouns_ : verbs_;
    table[std::move(lemma)] = entry;
}

const LexiconEntry* Lexicon::find(Pos pos, std::string_view lemma) const {
    const auto& table = (pos == Pos::noun) ? nouns_ : verbs_;
    auto it = table.find(std::string(lemma));
    return it == table.end() ? nullptr : &it->second;
}

std::vector<std::tuple<std::string, Pos, LexiconEntry>> Lexicon::sorted_entries() const {
    std::vector<std::tuple<std::string, Pos, LexiconEntry>> rows;
    rows.reserve(size());
    for (const auto& [lemma, entry] : nouns_) rows.emplace_back(lemma, Pos::noun, entry);
    for (const auto& [lemma, entry] : verbs_) rows.emplace_back(lemma, Pos::verb, entry);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return static_cast<int>(std::get<1>(a)) < static_cast<int>(std::get<1>(b));
    });
    return rows;
}

namespace {

// lexnames rows: `<2-digit file number> <name> <syntactic category>`.
std::map<int, std::string> parse_lexnames(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexnames: " + path.string());
    std::map<int, std::string> names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string num, name;
        if (!(row >> num >> name) || !all_digits(num))
            throw ParseError("lexnames " + path.string() + " line " + std::to_string(line_no) +
                             ": malformed row");
        names[std::stoi(num)] = name;
    }
    return names;
}

struct SenseCandidate {
    long tag_count = -1;
    int sense_number = 0;
    int supersense = -1;  // -1 when the winner sits in noun.Tops
};

bool beats(long count, int sense_number, const SenseCandidate& best) {
    if (count != best.tag_count) return count > best.tag_count;
    return sense_number < best.sense_number;
}

}  // namespace

Lexicon compile_lexicon(const std::filesystem::path& sense_index_path,
                        const std::filesystem::path& lexnames_path) {
    const std::map<int, std::string> lexnames = parse_lexnames(lexnames_path);

    std::ifstream in(sense_index_path);
    if (!in) throw IoError("cannot open sense index: " + sense_index_path.string());

    std::unordered_map<std::string, SenseCandidate> best[2];  // indexed by Pos
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where =
            "index.sense " + sense_index_path.string() + " line " + std::to_string(line_no);

        std::istringstream row(line);
        std::string key, offset, sense_no_str, tag_cnt_str;
        if (!(row >> key >> offset >> sense_no_str >> tag_cnt_str))
            throw ParseError(where + ": expected `sense_key offset sense_number tag_cnt`");
        if (!all_digits(offset) || !all_digits(sense_no_str) || !all_digits(tag_cnt_str))
            throw ParseError(where + ": non-numeric offset, sense number, or tag count");

        const std::size_t percent = key.find('%');
        if (percent == std::string::npos || percent == 0)
            throw ParseError(where + ": sense key has no lemma%... separator");
        const std::string lemma = to_lower_ascii(key.substr(0, percent));
        const auto fields = split_char(std::string_view(key).substr(percent + 1), ':');
        if (fields.size() != 5)
            throw ParseError(where + ": sense key needs ss_type:lex_filenum:lex_id:head:head_id");
        if (!all_digits(fields[0]) || !all_digits(fields[1]))
            throw ParseError(where + ": non-numeric ss_type or lex_filenum");

        const int ss_type = std::stoi(std::string(fields[0]));
        Pos pos;
        if (ss_type == 1) {
            pos = Pos::noun;
        } else if (ss_type == 2) {
            pos = Pos::verb;
        } else if (ss_type >= 3 && ss_type <= 5) {
            continue;  // adjective, adverb, adjective satellite
        } else {
            throw ParseError(where + ": unknown synset type " + std::to_string(ss_type));
        }

        const int filenum = std::stoi(std::string(fields[1]));
        auto named = lexnames.find(filenum);
        if (named == lexnames.end())
            throw ValidationError(where + ": lexicographer file number " +
                                  std::to_string(filenum) + " not present in lexnames");

        int supersense = -1;
        if (named->second != "noun.Tops") {
            auto idx = supersense_index(named->second);
            if (!idx)
                throw ValidationError(where + ": lexicographer file '" + named->second +
                                      "' is not a recognized noun/verb supersense");
            supersense = *idx;
        }

        const long tag_count = std::stol(tag_cnt_str);
        const int sense_number = std::stoi(sense_no_str);
        auto& slot = best[static_cast<int>(pos)][lemma];
        if (slot.tag_count < 0 || beats(tag_count, sense_number, slot))
            slot = SenseCandidate{tag_count, sense_number, supersense};
    }

    Lexicon lexicon;
    for (int p : {0, 1}) {
        for (const auto& [lemma, cand] : best[p]) {
            if (cand.supersense < 0) continue;  // best sense lives in noun.Tops
            lexicon.insert(static_cast<Pos>(p), lemma,
                           LexiconEntry{cand.supersense, cand.tag_count});
        }
    }
    return lexicon;
}

void save_lexicon_cache(const Lexicon& lexicon, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write lexicon cache: " + path.string());
    for (const auto& [lemma, pos, entry] : lexicon.sorted_entries()) {
        out << lemma << '\t' << pos_name(pos) << '\t'
            << kSupersenses[static_cast<std::size_t>(entry.supersense)] << '\t' << entry.score
            << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Lexicon load_lexicon_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon cache: " + path.string());
    Lexicon lexicon;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const std::string where =
            "lexicon cache " + path.string() + " line " + std::to_string(line_no);
        const auto fields = split_char(line, '\t');
        if (fields.size() != 4)
            throw ParseError(where + ": expected 4 tab-separated columns");
        Pos pos;
        if (fields[1] == "noun") {
            pos = Pos::noun;
        } else if (fields[1] == "verb") {
            pos = Pos::verb;
        } else {
            throw ValidationError(where + ": unknown pos '" + std::string(fields[1]) + "'");
        }
        auto idx = supersense_index(fields[2]);
        if (!idx)
            throw ValidationError(where + ": unknown supersense '" + std::string(fields[2]) + "'");
        if (!all_digits(fields[3]))
            throw ParseError(where + ": non-numeric score");
        lexicon.insert(pos, std::string(fields[0]),
                       LexiconEntry{*idx, std::stol(std::string(fields[3]))});
    }
    return lexicon;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_verbs() {
    static const std::unordered_map<std::string_view, std::string_view> table = {
        {"am", "be"},        {"is", "be"},          {"are", "be"},
        {"was", "be"},       {"were", "be"},        {"been", "be"},
        {"has", "have"},     {"had", "have"},       {"did", "do"},
        {"done", "do"},      {"said", "say"},       {"went", "go"},
        {"gone", "go"},      {"made", "make"},      {"knew", "know"},
        {"known", "know"},   {"thought", "think"},  {"took", "take"},
        {"taken", "take"},   {"came", "come"},      {"got", "get"},
        {"gotten", "get"},   {"gave", "give"},      {"given", "give"},
        {"found", "find"},   {"told", "tell"},      {"became", "become"},
        {"showed", "show"},  {"shown", "show"},     {"left", "leave"},
        {"felt", "feel"},    {"brought", "bring"},  {"began", "begin"},
        {"begun", "begin"},  {"kept", "keep"},      {"held", "hold"},
        {"wrote", "write"},  {"written", "write"},  {"stood", "stand"},
        {"heard", "hear"},   {"meant", "mean"},     {"met", "meet"},
        {"ran", "run"},      {"paid", "pay"},       {"sat", "sit"},
        {"spoke", "speak"},  {"spoken", "speak"},   {"led", "lead"},
        {"grew", "grow"},    {"grown", "grow"},     {"lost", "lose"},
        {"fell", "fall"},    {"fallen", "fall"},    {"sent", "send"},
        {"built", "build"},  {"understood", "understand"},
        {"drew", "draw"},    {"drawn", "draw"},     {"broke", "break"},
        {"broken", "break"}, {"spent", "spend"},    {"rose", "rise"},
        {"risen", "rise"},   {"drove", "drive"},    {"driven", "drive"},
        {"bought", "buy"},   {"wore", "wear"},      {"worn", "wear"},
        {"chose", "choose"}, {"chosen", "choose"},  {"ate", "eat"},
        {"eaten", "eat"},    {"slept", "sleep"},    {"flew", "fly"},
        {"flown", "fly"},    {"threw", "throw"},    {"thrown", "throw"},
        {"caught", "catch"}, {"dealt", "deal"},     {"won", "win"},
        {"forgot", "forget"},{"forgotten", "forget"},
        {"laid", "lay"},     {"sought", "seek"},    {"fought", "fight"},
        {"taught", "teach"}, {"sold", "sell"},      {"saw", "see"},
        {"seen", "see"},     {"swam", "swim"},      {"swum", "swim"},
        {"sang", "sing"},    {"sung", "sing"},      {"rang", "ring"},
        {"rung", "ring"},    {"drank", "drink"},    {"drunk", "drink"},
        {"crept", "creep"},  {"slid", "slide"},     {"shook", "shake"},
        {"shaken", "shake"}, {"hid", "hide"},       {"hidden", "hide"},
        {"bit", "bite"},     {"bitten", "bite"},    {"beaten", "beat"},
        {"bent", "bend"},    {"bound", "bind"},     {"bled", "bleed"},
        {"blew", "blow"},    {"blown", "blow"},     {"bred", "breed"},
        {"clung", "cling"},  {"dug", "dig"},        {"fed", "feed"},
        {"fled", "flee"},    {"flung", "fling"},    {"froze", "freeze"},
        {"frozen", "freeze"},{"hung", "hang"},      {"lent", "lend"},
        {"lit", "light"},    {"rode", "ride"},      {"ridden", "ride"},
        {"sank", "sink"},    {"sunk", "sink"},      {"shone", "shine"},
        {"shot", "shoot"},   {"sped", "speed"},     {"spun", "spin"},
        {"sprang", "spring"},{"sprung", "spring"},  {"stole", "steal"},
        {"stolen", "steal"}, {"struck", "strike"},  {"stuck", "stick"},
        {"stung", "sting"},  {"swept", "sweep"},    {"swore", "swear"},
        {"sworn", "swear"},  {"swung", "swing"},    {"tore", "tear"},
        {"torn", "tear"},    {"woke", "wake"},      {"woken", "wake"},
        {"wept", "weep"},    {"wound", "wind"},     {"withdrew", "withdraw"},
        {"withdrawn", "withdraw"},                  {"knelt", "kneel"},
        {"lay", "lie"},      {"lain", "lie"},
    };
    return table;
}

namespace {

bool is_consonant(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) &&
           c != 'a' && c != 'e' && c != 'i' && c != 'o' && c != 'u';
}

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() > suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

// Candidates in rule order: -ies>y, -es>e, -es>0, -s>0, -ied>y, -ed>e,
// -ed>0, -ing>e, -ing>0, then doubled-consonant collapse before -ed/-ing.
std::vector<std::string> suffix_candidates(std::string_view w) {
    std::vector<std::string> out;
    auto stem = [&](std::size_t strip, std::string_view add) {
        std::string c(w.substr(0, w.size() - strip));
        c += add;
        if (!c.empty()) out.push_back(std::move(c));
    };
    if (ends_with(w, "ies")) stem(3, "y");
    if (ends_with(w, "es")) {
        stem(2, "e");
        stem(2, "");
    }
    if (ends_with(w, "s")) stem(1, "");
    if (ends_with(w, "ied")) stem(3, "y");
    if (ends_with(w, "ed")) {
        stem(2, "e");
        stem(2, "");
    }
    if (ends_with(w, "ing")) {
        stem(3, "e");
        stem(3, "");
    }
    for (std::string_view suffix : {"ed", "ing"}) {
        if (!ends_with(w, suffix)) continue;
        std::string c(w.substr(0, w.size() - suffix.size()));
        if (c.size() >= 2 && c[c.size() - 1] == c[c.size() - 2] && is_consonant(c.back())) {
            c.pop_back();
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace

std::string lemmatize(std::string_view word, Pos pos, const Lexicon& lexicon) {
    if (lexicon.find(pos, word)) return std::string(word);
    if (pos == Pos::verb) {
        auto it = irregular_verbs().find(word);
        if (it != irregular_verbs().end() && lexicon.find(pos, it->second))
            return std::string(it->second);
    }
    for (const std::string& candidate : suffix_candidates(word))
        if (lexicon.find(pos, candidate)) return candidate;
    return std::string(word);
}

TaggedDocument tag_supersenses(const Document& doc, const Lexicon& lexicon) {
    TaggedDocument out;
    out.doc = doc;
    out.tokens = tokenize(doc.text);
    out.tags.assign(out.tokens.size(), -1);
    for (std::size_t i = 0; i < out.tokens.size(); ++i) {
        const Token& tok = out.tokens[i];
        if (!tok.is_word) continue;
        ++out.word_count;
        const std::string lower = to_lower_ascii(tok.text);
        const LexiconEntry* noun = lexicon.find(Pos::noun, lemmatize(lower, Pos::noun, lexicon));
        const LexiconEntry* verb = lexicon.find(Pos::verb, lemmatize(lower, Pos::verb, lexicon));
        if (noun && (!verb || noun->score >= verb->score)) {
            out.tags[i] = static_cast<std::int16_t>(noun->supersense);
        } else if (verb) {
            out.tags[i] = static_cast<std::int16_t>(verb->supersense);
        }
    }
    return out;
}

std::vector<TaggedDocument> tag_dataset(const Dataset& ds, const Lexicon& lexicon) {
    std::vector<TaggedDocument> out(ds.size());
    parallel_for(ds.size(), [&](std::size_t i) { out[i] = tag_supersenses(ds[i], lexicon); });
    return out;
}

void export_pretagged(const std::vector<TaggedDocument>& docs,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write pre-tagged file: " + path.string());
    for (const TaggedDocument& td : docs) {
        if (td.doc.id.find('\t') != std::string::npos ||
            td.doc.id.find('\n') != std::string::npos)
            throw ValidationError("pre-tagged export: doc id '" + td.doc.id +
                                  "' contains tab or newline");
        for (std::size_t i = 0; i < td.tokens.size(); ++i) {
            out << td.doc.id << '\t' << i << '\t' << td.tokens[i].text << '\t';
            if (td.tags[i] >= 0) {
                out << kSupersenses[static_cast<std::size_t>(td.tags[i])];
            } else {
                out << 'O';
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<TaggedDocument> ingest_pretagged(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open pre-tagged file: " + path.string());

    std::vector<TaggedDocument> out;
    std::unordered_set<std::string> finished;
    std::string current_id;
    std::vector<std::string> token_texts;
    std::vector<std::int16_t> tags;

    auto flush = [&]() {
        if (current_id.empty()) return;
        TaggedDocument td;
        td.doc.id = current_id;
        std::string text;
        std::size_t pos = 0;
        td.tokens.reserve(token_texts.size());
        for (std::size_t i = 0; i < token_texts.size(); ++i) {
            if (i > 0) {
                text += ' ';
                ++pos;
            }
            const std::string& t = token_texts[i];
            td.tokens.push_back(Token{t, token_is_word(t), pos, pos + t.size()});
            text += t;
            pos += t.size();
        }
        td.doc.text = std::move(text);
        td.tags = tags;
        td.word_count = static_cast<std::size_t>(
            std::count_if(td.tokens.begin(), td.tokens.end(),
                          [](const Token& t) { return t.is_word; }));
        out.push_back(std::move(td));
        finished.insert(current_id);
        token_texts.clear();
        tags.clear();
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const std::string where =
            "pre-tagged " + path.string() + " line " + std::to_string(line_no);
        const auto fields = split_char(line, '\t');
        if (fields.size() != 4)
            throw ParseError(where + ": expected `doc_id\\ttoken_index\\ttoken\\ttag`");
        const std::string doc_id(fields[0]);
        if (doc_id.empty()) throw ParseError(where + ": empty doc_id");
        if (fields[2].empty()) throw ParseError(where + ": empty token");
        if (!all_digits(fields[1])) throw ParseError(where + ": non-numeric token index");

        if (doc_id != current_id) {
            flush();
            if (finished.count(doc_id))
                throw ParseError(where + ": rows for doc '" + doc_id + "' are not contiguous");
            current_id = doc_id;
        }
        const std::size_t index = static_cast<std::size_t>(std::stoull(std::string(fields[1])));
        if (index != token_texts.size())
            throw ParseError(where + ": token index gap (expected " +
                             std::to_string(token_texts.size()) + ", got " +
                             std::to_string(index) + ")");

        std::int16_t tag = -1;
        if (fields[3] != "O") {
            auto idx = supersense_index(fields[3]);
            if (!idx)
                throw ValidationError(where + ": unknown supersense label '" +
                                      std::string(fields[3]) + "'");
            if (!token_is_word(fields[2]))
                throw ValidationError(where + ": punctuation token cannot carry a supersense");
            tag = static_cast<std::int16_t>(*idx);
        }
        token_texts.emplace_back(fields[2]);
        tags.push_back(tag);
    }
    flush();
    return out;
}

std::array<std::vector<TokenCount>, kNumSupersenses> top_tokens_report(
    const std::vector<TaggedDocument>& docs, int k) {
    if (k < 1) throw ValidationError("top_tokens_report: k must be >= 1");

    std::array<std::map<std::string, std::size_t>, kNumSupersenses> counts;
    for (const TaggedDocument& td : docs) {
        for (std::size_t i = 0; i < td.tokens.size(); ++i) {
            if (td.tags[i] < 0) continue;
            ++counts[static_cast<std::size_t>(td.tags[i])][to_lower_ascii(td.tokens[i].text)];
        }
    }

    std::array<std::vector<TokenCount>, kNumSupersenses> out;
    for (std::size_t s = 0; s < kNumSupersenses; ++s) {
        std::vector<TokenCount> rows;
        rows.reserve(counts[s].size());
        for (const auto& [token, count] : counts[s]) rows.push_back(TokenCount{token, count});
        std::sort(rows.begin(), rows.end(), [](const TokenCount& a, const TokenCount& b) {
            if (a.count != b.count) return a.count > b.count;
            return a.token < b.token;
        });
        if (rows.size() > static_cast<std::size_t>(k)) rows.resize(static_cast<std::size_t>(k));
        out[s] = std::move(rows);
    }
    return out;
}

}  // namespace fictsense
