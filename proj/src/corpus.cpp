#include "fictsense/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "fictsense/errors.hpp"
#include "fictsense/rng.hpp"
#include "fictsense/supersense.hpp"

namespace fictsense {

namespace {

using nlohmann::json;

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Non-ASCII bytes count as word material so UTF-8 letters stay inside words.
bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string_view label_name(Label label) {
    return label == Label::fiction ? "fiction" : "nonfiction";
}

std::optional<Label> parse_label(std::string_view name) {
    if (name == "fiction") return Label::fiction;
    if (name == "nonfiction") return Label::nonfiction;
    return std::nullopt;
}

bool token_is_word(std::string_view text) {
    return std::any_of(text.begin(), text.end(),
                       [](char c) { return is_word_byte(static_cast<unsigned char>(c)); });
}

Dataset::Dataset(std::string name, std::vector<Document> documents)
    : name_(std::move(name)), documents_(std::move(documents)) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(documents_.size());
    for (const Document& doc : documents_) {
        if (doc.id.empty()) throw ValidationError("dataset '" + name_ + "': empty document id");
        if (!seen.insert(doc.id).second)
            throw ValidationError("dataset '" + name_ + "': duplicate document id '" + doc.id + "'");
    }
}

ClassCounts Dataset::counts() const {
    ClassCounts c;
    for (const Document& doc : documents_) {
        if (!doc.label) {
            ++c.unlabeled;
        } else if (*doc.label == Label::fiction) {
            ++c.fiction;
        } else {
            ++c.nonfiction;
        }
    }
    return c;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (is_space_byte(text[i])) {
            ++i;
            continue;
        }
        const std::size_t chunk_begin = i;
        while (i < n && !is_space_byte(text[i])) ++i;
        const std::string_view chunk = text.substr(chunk_begin, i - chunk_begin);

        std::size_t first = std::string_view::npos;
        std::size_t last = std::string_view::npos;
        for (std::size_t k = 0; k < chunk.size(); ++k) {
            if (is_word_byte(static_cast<unsigned char>(chunk[k]))) {
                if (first == std::string_view::npos) first = k;
                last = k;
            }
        }

        auto push = [&](std::size_t b, std::size_t e, bool word) {
            out.push_back(Token{std::string(chunk.substr(b, e - b)), word, chunk_begin + b,
                                chunk_begin + e});
        };

        if (first == std::string_view::npos) {
            push(0, chunk.size(), false);  // punctuation-only chunk
        } else {
            if (first > 0) push(0, first, false);
            push(first, last + 1, true);
            if (last + 1 < chunk.size()) push(last + 1, chunk.size(), false);
        }
    }
    return out;
}

namespace {

// '.', '!', '?' are one byte; the ellipsis is UTF-8 E2 80 A6.
std::size_t terminal_len(std::string_view text, std::size_t i) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') return 1;
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0xA6)
        return 3;
    return 0;
}

bool is_abbreviation(std::string_view word) {
    static const std::unordered_set<std::string> kAbbrev = {"mr", "mrs", "dr",  "st",
                                                            "vs", "etc", "e.g", "i.e"};
    return kAbbrev.count(to_lower_ascii(word)) > 0;
}

// The whitespace-delimited word ending at `pos`, with leading quotes and
// brackets stripped so '("e.g' still matches its abbreviation.
std::string_view word_before(std::string_view text, std::size_t pos) {
    std::size_t b = pos;
    while (b > 0 && !is_space_byte(text[b - 1])) --b;
    std::string_view w = text.substr(b, pos - b);
    while (!w.empty() && !is_word_byte(static_cast<unsigned char>(w.front()))) w.remove_prefix(1);
    return w;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space_byte(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space_byte(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;

    auto flush = [&](std::size_t end) {
        std::string_view piece = trim(text.substr(start, end - start));
        if (!piece.empty()) out.emplace_back(piece);
        start = end;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t tl = terminal_len(text, i);
        if (tl == 0) {
            ++i;
            continue;
        }
        const std::size_t run_begin = i;
        std::size_t run_terminals = 0;
        std::size_t dots = 0;
        while (i < text.size() && (tl = terminal_len(text, i)) != 0) {
            if (text[i] == '.') ++dots;
            ++run_terminals;
            i += tl;
        }
        // Boundaries only occur where the next sentence could start, i.e.
        // before whitespace or at the end of the text.
        if (i < text.size() && !is_space_byte(text[i])) continue;
        if (run_terminals == 1 && dots == 1) {
            const std::string_view word = word_before(text, run_begin);
            if (is_abbreviation(word)) continue;
            if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) continue;
        }
        flush(i);
    }
    flush(text.size());
    return out;
}

namespace {

Document document_from_record(const json& j, const std::filesystem::path& manifest_dir,
                              const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": record is not a JSON object");
    static const std::unordered_set<std::string> kKeys = {"id", "text", "path", "label", "corpus",
                                                          "meta"};
    for (const auto& item : j.items()) {
        if (!kKeys.count(item.key()))
            throw ValidationError(where + ": unknown key '" + item.key() + "'");
    }
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
        throw ValidationError(where + ": missing or empty 'id'");

    Document doc;
    doc.id = j["id"].get<std::string>();

    const bool has_text = j.contains("text");
    const bool has_path = j.contains("path");
    if (has_text == has_path)
        throw ValidationError(where + ": record must have exactly one of 'text' or 'path'");
    if (has_text) {
        if (!j["text"].is_string()) throw ValidationError(where + ": 'text' must be a string");
        doc.text = j["text"].get<std::string>();
    } else {
        if (!j["path"].is_string()) throw ValidationError(where + ": 'path' must be a string");
        std::filesystem::path p(j["path"].get<std::string>());
        if (p.is_relative()) p = manifest_dir / p;
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError("cannot read document file: " + p.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        doc.text = buf.str();
    }
    if (j.contains("label")) {
        if (!j["label"].is_string()) throw ValidationError(where + ": 'label' must be a string");
        auto label = parse_label(j["label"].get<std::string>());
        if (!label)
            throw ValidationError(where + ": unknown label '" + j["label"].get<std::string>() +
                                  "'");
        doc.label = label;
    }
    if (j.contains("corpus")) {
        if (!j["corpus"].is_string()) throw ValidationError(where + ": 'corpus' must be a string");
        doc.corpus = j["corpus"].get<std::string>();
    }
    if (j.contains("meta")) {
        if (!j["meta"].is_object()) throw ValidationError(where + ": 'meta' must be an object");
        for (const auto& item : j["meta"].items()) {
            if (!item.value().is_string())
                throw ValidationError(where + ": meta value for '" + item.key() +
                                      "' must be a string");
            doc.meta[item.key()] = item.value().get<std::string>();
        }
    }
    return doc;
}

}  // namespace

Dataset load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    const std::filesystem::path dir = path.parent_path();

    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = "manifest " + path.string() + " line " + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(where + ": " + e.what());
        }
        docs.push_back(document_from_record(j, dir, where));
    }
    return Dataset(path.stem().string(), std::move(docs));
}

void save_manifest(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    for (const Document& doc : ds.documents()) {
        json j;
        j["id"] = doc.id;
        j["text"] = doc.text;
        if (doc.label) j["label"] = std::string(label_name(*doc.label));
        if (!doc.corpus.empty()) j["corpus"] = doc.corpus;
        if (!doc.meta.empty()) {
            json m = json::object();
            for (const auto& [k, v] : doc.meta) m[k] = v;
            j["meta"] = m;
        }
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Document sample_page(const Document& doc, int n_tokens, std::uint64_t seed) {
    if (n_tokens < 1) throw ValidationError("sample_page: n_tokens must be >= 1");
    const std::vector<Token> tokens = tokenize(doc.text);
    if (tokens.empty())
        throw ValidationError("sample_page: document '" + doc.id + "' has no tokens");

    const std::size_t want = static_cast<std::size_t>(n_tokens);
    const std::size_t take = std::min(want, tokens.size());
    std::size_t start = 0;
    if (tokens.size() > take) {
        Rng rng(derive_seed(seed, doc.id));
        start = static_cast<std::size_t>(rng.uniform_below(tokens.size() - take + 1));
    }
    Document out = doc;
    const std::size_t from = tokens[start].begin;
    const std::size_t to = tokens[start + take - 1].end;
    out.text = std::string(doc.text.substr(from, to - from));
    out.id = doc.id + "#p" + std::to_string(start) + "-" + std::to_string(start + take);
    return out;
}

std::pair<std::vector<WindowAnchor>, std::vector<WindowAnchor>> eligible_window_anchors(
    const Dataset& ds, int max_sentences) {
    if (max_sentences < 1)
        throw ValidationError("window anchors: max_sentences must be >= 1");
    std::vector<WindowAnchor> fiction, nonfiction;
    for (std::size_t d = 0; d < ds.size(); ++d) {
        const Document& doc = ds[d];
        if (!doc.label) continue;
        const std::size_t count = segment_sentences(doc.text).size();
        if (count < static_cast<std::size_t>(max_sentences)) continue;
        const std::size_t anchors = count - static_cast<std::size_t>(max_sentences) + 1;
        auto& bucket = (*doc.label == Label::fiction) ? fiction : nonfiction;
        for (std::size_t i = 0; i < anchors; ++i) bucket.push_back(WindowAnchor{d, i});
    }
    return {std::move(fiction), std::move(nonfiction)};
}

std::vector<Dataset> build_window_datasets(const Dataset& ds, const WindowSpec& spec) {
    if (spec.max_sentences < 1)
        throw ValidationError("window spec: max_sentences must be >= 1");
    if (spec.passages_per_set < 2 || spec.passages_per_set % 2 != 0)
        throw ValidationError("window spec: passages_per_set must be a positive even number");
    long split_total = 0;
    for (int s : spec.split_sizes) {
        if (s < 0) throw ValidationError("window spec: negative split size");
        split_total += s;
    }
    if (split_total > spec.passages_per_set)
        throw ValidationError("window spec: split sizes sum to " + std::to_string(split_total) +
                              ", more than passages_per_set " +
                              std::to_string(spec.passages_per_set));

    auto [fiction, nonfiction] = eligible_window_anchors(ds, spec.max_sentences);
    const std::size_t per_class = static_cast<std::size_t>(spec.passages_per_set) / 2;
    if (fiction.size() < per_class || nonfiction.size() < per_class) {
        const std::size_t achievable = 2 * std::min(fiction.size(), nonfiction.size());
        throw ValidationError(
            "window spec: not enough eligible anchors for " +
            std::to_string(spec.passages_per_set) + " passages (fiction " +
            std::to_string(fiction.size()) + ", nonfiction " + std::to_string(nonfiction.size()) +
            "; achievable passages_per_set = " + std::to_string(achievable) + ")");
    }

    auto pick = [&](const std::vector<WindowAnchor>& pool, std::string_view cls) {
        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(spec.seed, std::string("windows/") + std::string(cls)));
        rng.shuffle(order);
        order.resize(per_class);
        std::vector<WindowAnchor> chosen;
        chosen.reserve(per_class);
        for (std::size_t idx : order) chosen.push_back(pool[idx]);
        return chosen;
    };

    std::vector<WindowAnchor> anchors = pick(fiction, "fiction");
    {
        std::vector<WindowAnchor> non = pick(nonfiction, "nonfiction");
        anchors.insert(anchors.end(), non.begin(), non.end());
    }
    std::sort(anchors.begin(), anchors.end(), [](const WindowAnchor& a, const WindowAnchor& b) {
        return a.doc_index != b.doc_index ? a.doc_index < b.doc_index
                                          : a.sentence_index < b.sentence_index;
    });

    // Segment each contributing document once.
    std::map<std::size_t, std::vector<std::string>> sentences;
    for (const WindowAnchor& a : anchors)
        if (!sentences.count(a.doc_index)) sentences[a.doc_index] = segment_sentences(ds[a.doc_index].text);

    std::vector<Dataset> out;
    out.reserve(static_cast<std::size_t>(spec.max_sentences));
    for (int k = 1; k <= spec.max_sentences; ++k) {
        std::vector<Document> passages;
        passages.reserve(anchors.size());
        for (const WindowAnchor& a : anchors) {
            const Document& src = ds[a.doc_index];
            const auto& sents = sentences[a.doc_index];
            Document p;
            p.id = src.id + "#w" + std::to_string(a.sentence_index);
            p.label = src.label;
            p.corpus = src.corpus;
            p.meta = src.meta;
            p.meta["window_anchor"] = std::to_string(a.sentence_index);
            std::string text;
            for (int s = 0; s < k; ++s) {
                if (s > 0) text += ' ';
                text += sents[a.sentence_index + static_cast<std::size_t>(s)];
            }
            p.text = std::move(text);
            passages.push_back(std::move(p));
        }
        out.emplace_back(ds.name() + "/w" + std::to_string(k), std::move(passages));
    }
    return out;
}

std::array<Dataset, 3> balanced_split(const Dataset& ds, SplitSizes sizes, std::uint64_t seed) {
    for (int s : {sizes.train, sizes.validation, sizes.test}) {
        if (s < 0) throw ValidationError("balanced_split: negative split size");
        if (s % 2 != 0)
            throw ValidationError("balanced_split: split sizes must be even for exact balance");
    }

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Document& doc = ds[i];
        if (!doc.label)
            throw ValidationError("balanced_split: document '" + doc.id + "' has no label");
        by_class[static_cast<int>(*doc.label)].push_back(i);
    }

    const std::size_t need = static_cast<std::size_t>(sizes.train + sizes.validation + sizes.test) / 2;
    for (int c : {0, 1}) {
        if (by_class[c].size() < need) {
            const std::string_view cls = label_name(static_cast<Label>(c));
            throw ValidationError("balanced_split: class " + std::string(cls) + " has " +
                                  std::to_string(by_class[c].size()) + " members, needs " +
                                  std::to_string(need) + " (short by " +
                                  std::to_string(need - by_class[c].size()) + ")");
        }
    }

    // 0 = train, 1 = validation, 2 = test, 3 = unused remainder.
    std::vector<int> assignment(ds.size(), 3);
    for (int c : {0, 1}) {
        Rng rng(derive_seed(seed, std::string("split/") +
                                       std::string(label_name(static_cast<Label>(c)))));
        rng.shuffle(by_class[c]);
        std::size_t pos = 0;
        const std::size_t quota[3] = {static_cast<std::size_t>(sizes.train) / 2,
                                      static_cast<std::size_t>(sizes.validation) / 2,
                                      static_cast<std::size_t>(sizes.test) / 2};
        for (int part = 0; part < 3; ++part)
            for (std::size_t j = 0; j < quota[part]; ++j) assignment[by_class[c][pos++]] = part;
    }

    std::vector<Document> parts[3];
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (assignment[i] < 3) parts[assignment[i]].push_back(ds[i]);

    return {Dataset(ds.name() + "/train", std::move(parts[0])),
            Dataset(ds.name() + "/validation", std::move(parts[1])),
            Dataset(ds.name() + "/test", std::move(parts[2]))};
}

// ---------------------------------------------------------------------------
// Synthetic corpus generator
// ---------------------------------------------------------------------------

namespace {

struct SynthTables {
    // Word choices per supersense, index-aligned with kSupersenses.
    std::array<std::vector<std::string_view>, kNumSupersenses> words;
    std::vector<std::string_view> fillers;
    std::vector<SyntheticVocabEntry> flat;
};

const SynthTables& synth_tables() {
    static const SynthTables tables = [] {
        SynthTables t;
        auto add = [&t](std::string_view name, std::initializer_list<std::string_view> ws) {
            const int idx = *supersense_index(name);
            t.words[static_cast<std::size_t>(idx)].assign(ws);
            for (std::string_view w : ws) t.flat.push_back(SyntheticVocabEntry{w, idx});
        };
        add("noun.act", {"way", "work", "job", "task"});
        add("noun.animal", {"dog", "horse", "cat", "bird", "wolf"});
        add("noun.artifact", {"door", "room", "house", "car", "knife"});
        add("noun.attribute", {"voice", "power", "beauty", "courage"});
        add("noun.body", {"eye", "eyes", "head", "hand", "hands", "face", "hair", "arm"});
        add("noun.cognition", {"mind", "idea", "memory", "attention"});
        add("noun.communication", {"word", "words", "question", "story", "name", "song"});
        add("noun.event", {"accident", "miracle", "adventure", "incident"});
        add("noun.feeling", {"love", "fear", "anger", "joy", "sorrow"});
        add("noun.food", {"bread", "meat", "wine", "cake", "soup"});
        add("noun.group", {"people", "family", "army", "crowd", "nation", "committee"});
        add("noun.location", {"city", "village", "north", "region"});
        add("noun.motive", {"reason", "motive", "urge", "incentive"});
        add("noun.object", {"river", "moon", "rock", "star", "mountain"});
        add("noun.person", {"man", "woman", "child", "friend", "king", "soldier"});
        add("noun.phenomenon", {"wind", "rain", "storm", "fog", "lightning"});
        add("noun.plant", {"tree", "flower", "rose", "oak", "grass"});
        add("noun.possession", {"money", "wealth", "price", "property"});
        add("noun.process", {"growth", "decay", "erosion", "development"});
        add("noun.quantity", {"mile", "dozen", "inch", "ton"});
        add("noun.relation", {"part", "portion", "percentage", "ratio"});
        add("noun.shape", {"circle", "square", "curve", "angle", "line"});
        add("noun.state", {"death", "peace", "trouble", "illness", "chaos"});
        add("noun.substance", {"water", "air", "oil", "iron", "wood", "stone"});
        add("noun.time", {"time", "year", "day", "night", "morning", "moment", "hour"});
        add("verb.body", {"smile", "smiled", "laugh", "laughed", "wear", "wearing", "sleep",
                          "wink"});
        add("verb.change", {"become", "became", "begin", "began", "change", "increase", "shrink"});
        add("verb.cognition", {"know", "knew", "think", "remember", "believe", "forget"});
        add("verb.communication",
            {"say", "said", "ask", "asked", "tell", "told", "speak", "answer"});
        add("verb.competition", {"fight", "fought", "play", "played", "win", "won", "defend"});
        add("verb.consumption", {"eat", "ate", "drink", "feast"});
        add("verb.contact", {"touch", "touched", "hold", "held", "pull", "pulled", "push", "grab"});
        add("verb.creation", {"make", "made", "build", "built", "write", "wrote", "compose"});
        add("verb.emotion", {"adore", "worry", "suffer", "enjoy", "despise"});
        add("verb.motion",
            {"run", "ran", "walk", "walked", "go", "went", "come", "came", "travel", "jump"});
        add("verb.perception", {"see", "saw", "look", "looked", "hear", "heard", "watch", "feel",
                                "felt", "stare"});
        add("verb.possession", {"give", "gave", "buy", "bought", "pay", "paid", "own", "lend"});
        add("verb.social", {"help", "helped", "marry", "married", "join", "joined", "visit"});
        add("verb.stative", {"exist", "remain", "belong", "depend", "stay"});
        add("verb.weather", {"drizzle", "thunder", "snow", "sleet"});

        t.fillers = {"the",   "a",     "an",     "of",    "and",   "to",      "in",    "on",
                     "at",    "by",    "with",   "from",  "for",   "not",     "but",   "or",
                     "if",    "so",    "as",     "he",    "she",   "it",      "they",  "we",
                     "you",   "i",     "him",    "them",  "her",   "his",     "their", "its",
                     "my",    "your",  "our",    "this",  "that",  "these",   "those", "there",
                     "here",  "then",  "when",   "while", "because", "about", "into",  "over",
                     "under", "again", "once",   "very",  "too",   "just",    "also",  "was",
                     "were",  "is",    "are",    "be",    "been",  "being",   "had",   "have",
                     "has",   "do",    "did",    "does",  "will",  "would",   "can",   "could",
                     "should", "may",  "might",  "must",  "shall"};
        return t;
    }();
    return tables;
}

constexpr int kFictionMarkers[] = {35, 4, 31, 34};   // verb.perception, noun.body,
                                                     // verb.contact, verb.motion
constexpr int kNonfictionMarkers[] = {10, 0, 24};    // noun.group, noun.act, noun.time

constexpr double kFictionMarkerMass = 0.03;
constexpr double kNonfictionMarkerMass = 0.04;
constexpr double kOtherMass = 0.24 / 33.0;
constexpr double kFillerMass = 0.52;

// 41 categories: the 40 supersenses plus the filler bucket at index 40.
std::array<double, kNumSupersenses + 1> category_masses(Label cls, double divergence) {
    std::array<double, kNumSupersenses + 1> m;
    m.fill(kOtherMass);
    const double fic_scale = (cls == Label::fiction) ? 1.0 + divergence : 1.0 - divergence;
    const double non_scale = (cls == Label::fiction) ? 1.0 - divergence : 1.0 + divergence;
    for (int s : kFictionMarkers) m[static_cast<std::size_t>(s)] = kFictionMarkerMass * fic_scale;
    for (int s : kNonfictionMarkers)
        m[static_cast<std::size_t>(s)] = kNonfictionMarkerMass * non_scale;
    m[kNumSupersenses] = kFillerMass;
    return m;
}

}  // namespace

std::span<const SyntheticVocabEntry> synthetic_vocabulary() { return synth_tables().flat; }

std::span<const std::string_view> synthetic_fillers() { return synth_tables().fillers; }

std::span<const int> fiction_marker_supersenses() { return {kFictionMarkers, 4}; }

std::span<const int> nonfiction_marker_supersenses() { return {kNonfictionMarkers, 3}; }

double synthetic_base_mass(int supersense) {
    for (int s : kFictionMarkers)
        if (s == supersense) return kFictionMarkerMass;
    for (int s : kNonfictionMarkers)
        if (s == supersense) return kNonfictionMarkerMass;
    return kOtherMass;
}

Dataset generate_synthetic_corpus(int n_per_class, int tokens_per_doc, double divergence,
                                  std::uint64_t seed) {
    if (n_per_class < 1) throw ValidationError("synthetic corpus: n_per_class must be >= 1");
    if (tokens_per_doc < 1) throw ValidationError("synthetic corpus: tokens_per_doc must be >= 1");
    if (!(divergence >= 0.0 && divergence <= 1.0))
        throw ValidationError("synthetic corpus: divergence must be in [0, 1]");

    const SynthTables& tables = synth_tables();
    const auto masses = std::array{category_masses(Label::fiction, divergence),
                                   category_masses(Label::nonfiction, divergence)};
    std::array<std::array<double, kNumSupersenses + 1>, 2> cumulative{};
    for (int c : {0, 1}) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= kNumSupersenses; ++k) {
            acc += masses[static_cast<std::size_t>(c)][k];
            cumulative[static_cast<std::size_t>(c)][k] = acc;
        }
    }

    auto make_doc = [&](Label cls, int index) {
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "%s-%05d",
                      cls == Label::fiction ? "fic" : "non", index);
        Document doc;
        doc.id = idbuf;
        doc.label = cls;
        doc.corpus = "SYNTH";

        Rng rng(derive_seed(seed, doc.id));
        const auto& cum = cumulative[static_cast<std::size_t>(cls)];
        std::string text;
        text.reserve(static_cast<std::size_t>(tokens_per_doc) * 7);

        int remaining = tokens_per_doc;
        while (remaining > 0) {
            const int len = std::min<int>(remaining, 5 + static_cast<int>(rng.uniform_below(8)));
            for (int w = 0; w < len; ++w) {
                const double r = rng.unit_real() * cum.back();
                std::size_t cat = 0;
                while (cat < kNumSupersenses && r >= cum[cat]) ++cat;
                std::string_view word;
                if (cat == kNumSupersenses) {
                    word = tables.fillers[rng.uniform_below(tables.fillers.size())];
                } else {
                    const auto& choices = tables.words[cat];
                    word = choices[rng.uniform_below(choices.size())];
                }
                const std::size_t at = text.size();
                text += word;
                if (w == 0)
                    text[at] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[at])));
                if (w + 1 < len) text += ' ';
            }
            text += '.';
            remaining -= len;
            if (remaining > 0) text += ' ';
        }
        doc.text = std::move(text);
        return doc;
    };

    std::vector<Document> docs;
    docs.reserve(2 * static_cast<std::size_t>(n_per_class));
    for (int i = 0; i < n_per_class; ++i) docs.push_back(make_doc(Label::fiction, i));
    for (int i = 0; i < n_per_class; ++i) docs.push_back(make_doc(Label::nonfiction, i));
    return Dataset("synthetic", std::move(docs));
}

}  // namespace fictsense
