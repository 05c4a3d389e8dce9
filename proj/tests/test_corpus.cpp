#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fictsense/corpus.hpp"
#include "fictsense/errors.hpp"
#include "fictsense/features.hpp"
#include "fictsense/rng.hpp"
#include "fictsense/tagger.hpp"
#include "helpers.hpp"

using namespace fictsense;
using testutil::make_doc;
using testutil::temp_path;
using testutil::write_file;

namespace {

std::string strip_whitespace(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\f' && c != '\v') out += c;
    return out;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    for (const Token& t : tokens) out.push_back(t.text);
    return out;
}

}  // namespace

TEST_CASE("tokenize splits words from adjacent punctuation") {
    const auto tokens = tokenize("He smiled, wearing a hat.");
    REQUIRE(tokens.size() == 7);
    CHECK(token_texts(tokens) ==
          std::vector<std::string>{"He", "smiled", ",", "wearing", "a", "hat", "."});
    CHECK(tokens[0].is_word);
    CHECK_FALSE(tokens[2].is_word);
    CHECK_FALSE(tokens[6].is_word);
}

TEST_CASE("tokenize edge cases") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \n\t ").empty());

    const auto apostrophe = tokenize("don't");
    REQUIRE(apostrophe.size() == 1);
    CHECK(apostrophe[0].text == "don't");
    CHECK(apostrophe[0].is_word);

    const auto quoted = tokenize("\"(hello)!\"");
    REQUIRE(quoted.size() == 3);
    CHECK(quoted[0].text == "\"(");
    CHECK(quoted[1].text == "hello");
    CHECK(quoted[2].text == ")!\"");
    CHECK(quoted[1].is_word);
    CHECK_FALSE(quoted[0].is_word);

    const auto dashes = tokenize("-- --");
    REQUIRE(dashes.size() == 2);
    CHECK_FALSE(dashes[0].is_word);

    const auto hyphen = tokenize("well-known");
    REQUIRE(hyphen.size() == 1);
    CHECK(hyphen[0].text == "well-known");
}

TEST_CASE("tokenize covers every non-whitespace byte in order") {
    Rng rng(99);
    const std::string alphabet = "ab c.',!-\"x9 (\t)\nz";
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const auto len = rng.uniform_below(60);
        for (std::uint64_t i = 0; i < len; ++i)
            text += alphabet[rng.uniform_below(alphabet.size())];
        const auto tokens = tokenize(text);
        std::string joined;
        for (const Token& t : tokens) {
            joined += t.text;
            CHECK(text.substr(t.begin, t.end - t.begin) == t.text);
        }
        CHECK(joined == strip_whitespace(text));
    }
}

TEST_CASE("segment_sentences basic boundaries") {
    CHECK(segment_sentences("He ran. She laughed.") ==
          std::vector<std::string>{"He ran.", "She laughed."});
    CHECK(segment_sentences("Wait... really?!") ==
          std::vector<std::string>{"Wait...", "really?!"});
    CHECK(segment_sentences("no terminal punctuation here") ==
          std::vector<std::string>{"no terminal punctuation here"});
    CHECK(segment_sentences("").empty());
    CHECK(segment_sentences("   ").empty());
}

TEST_CASE("segment_sentences honors abbreviations and initials") {
    CHECK(segment_sentences("Mr. Smith left.") == std::vector<std::string>{"Mr. Smith left."});
    CHECK(segment_sentences("J. K. Rowling wrote.") ==
          std::vector<std::string>{"J. K. Rowling wrote."});
    CHECK(segment_sentences("Fruit, e.g. apples. Then pears.") ==
          std::vector<std::string>{"Fruit, e.g. apples.", "Then pears."});
    CHECK(segment_sentences("It rained\xE2\x80\xA6 then stopped.") ==
          std::vector<std::string>{"It rained\xE2\x80\xA6", "then stopped."});
}

TEST_CASE("segment_sentences covers all non-whitespace text in order") {
    const std::string text = "One two. Three?! \"Four\" e.g. five... Mr. Six\nseven";
    const auto sentences = segment_sentences(text);
    std::string joined;
    for (const auto& s : sentences) joined += s;
    CHECK(strip_whitespace(joined) == strip_whitespace(text));
}

TEST_CASE("dataset validates ids") {
    CHECK_THROWS_AS(Dataset("d", {make_doc("a", "x"), make_doc("a", "y")}), ValidationError);
    CHECK_THROWS_AS(Dataset("d", {make_doc("", "x")}), ValidationError);

    const Dataset ds("d", {make_doc("a", "x", Label::fiction), make_doc("b", "y")});
    CHECK(ds.counts().fiction == 1);
    CHECK(ds.counts().unlabeled == 1);
}

TEST_CASE("manifest load round-trips records") {
    const auto path = temp_path("manifest.jsonl");
    write_file(path,
               R"({"id":"a","text":"A tale.","label":"fiction","corpus":"T","meta":{"k":"v"}})"
               "\n"
               R"({"id":"b","text":"A memoir.","label":"nonfiction"})"
               "\n");
    const Dataset ds = load_manifest(path);
    REQUIRE(ds.size() == 2);
    CHECK(ds.counts().fiction == 1);
    CHECK(ds.counts().nonfiction == 1);
    CHECK(ds[0].meta.at("k") == "v");
    CHECK(ds[0].corpus == "T");

    const auto out = temp_path("roundtrip.jsonl");
    save_manifest(ds, out);
    const Dataset back = load_manifest(out);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == ds[0].id);
    CHECK(back[0].text == ds[0].text);
    CHECK(back[0].label == ds[0].label);
    CHECK(back[0].meta == ds[0].meta);
}

TEST_CASE("manifest loads text from referenced files") {
    const auto txt = temp_path("body.txt");
    write_file(txt, "File contents here.");
    const auto path = temp_path("ref.jsonl");
    write_file(path, std::string(R"({"id":"a","path":")") + txt.filename().string() + "\"}\n");
    const Dataset ds = load_manifest(path);
    CHECK(ds[0].text == "File contents here.");
}

TEST_CASE("manifest error cases") {
    CHECK_THROWS_AS(load_manifest(temp_path("missing.jsonl")), IoError);

    const auto bad_ref = temp_path("badref.jsonl");
    write_file(bad_ref, R"({"id":"a","path":"/nonexistent/file.txt"})" "\n");
    CHECK_THROWS_WITH_AS(load_manifest(bad_ref),
                         doctest::Contains("/nonexistent/file.txt"), IoError);

    const auto dup = temp_path("dup.jsonl");
    write_file(dup, R"({"id":"a","text":"x"})" "\n" R"({"id":"a","text":"y"})" "\n");
    CHECK_THROWS_WITH_AS(load_manifest(dup), doctest::Contains("'a'"), ValidationError);

    const auto bad_label = temp_path("badlabel.jsonl");
    write_file(bad_label, R"({"id":"a","text":"x","label":"poetry"})" "\n");
    CHECK_THROWS_WITH_AS(load_manifest(bad_label), doctest::Contains("line 1"), ValidationError);

    const auto unknown = temp_path("unknown.jsonl");
    write_file(unknown, R"({"id":"a","text":"x","genre":"novel"})" "\n");
    CHECK_THROWS_WITH_AS(load_manifest(unknown), doctest::Contains("genre"), ValidationError);

    const auto both = temp_path("both.jsonl");
    write_file(both, R"({"id":"a","text":"x","path":"y"})" "\n");
    CHECK_THROWS_AS(load_manifest(both), ValidationError);

    const auto bad_json = temp_path("badjson.jsonl");
    write_file(bad_json, "{not json\n");
    CHECK_THROWS_AS(load_manifest(bad_json), ParseError);
}

TEST_CASE("manifest handles collection-scale record counts") {
    const auto path = temp_path("big.jsonl");
    std::string lines;
    for (int i = 0; i < 2754; ++i)
        lines += R"({"id":"doc)" + std::to_string(i) + R"(","text":"Words here.","label":")" +
                 (i % 2 == 0 ? "fiction" : "nonfiction") + "\"}\n";
    write_file(path, lines);
    const Dataset ds = load_manifest(path);
    CHECK(ds.size() == 2754);
}

TEST_CASE("sample_page draws a contiguous seeded span") {
    std::string text;
    for (int i = 0; i < 1000; ++i) text += "w" + std::to_string(i) + " ";
    const Document doc = make_doc("doc1", text, Label::fiction);

    const Document page = sample_page(doc, 350, 42);
    const auto page_tokens = tokenize(page.text);
    CHECK(page_tokens.size() == 350);
    CHECK(page.label == Label::fiction);

    // Span containment: the page's token sequence occurs contiguously in
    // the source token sequence.
    const auto source_tokens = token_texts(tokenize(doc.text));
    const auto page_texts = token_texts(page_tokens);
    const auto at = std::search(source_tokens.begin(), source_tokens.end(), page_texts.begin(),
                                page_texts.end());
    REQUIRE(at != source_tokens.end());
    const auto start = static_cast<std::size_t>(at - source_tokens.begin());
    CHECK(start <= 650);
    CHECK(page.id == "doc1#p" + std::to_string(start) + "-" + std::to_string(start + 350));

    // Determinism.
    CHECK(sample_page(doc, 350, 42).text == page.text);
    CHECK(sample_page(doc, 350, 43).id != page.id);
}

TEST_CASE("sample_page clips short documents and rejects empty ones") {
    std::string text;
    for (int i = 0; i < 200; ++i) text += "w ";
    const Document doc = make_doc("short", text);
    const Document page = sample_page(doc, 350, 1);
    CHECK(tokenize(page.text).size() == 200);

    CHECK_THROWS_AS(sample_page(make_doc("empty", "   "), 350, 1), ValidationError);
    CHECK_THROWS_AS(sample_page(doc, 0, 1), ValidationError);
}

TEST_CASE("window anchors enumerate exactly the valid starts") {
    std::string text;
    for (int i = 0; i < 10; ++i) text += "Sentence number " + std::to_string(i) + " here. ";
    const Dataset ds("d", {make_doc("a", text, Label::fiction)});
    const auto [fiction, nonfiction] = eligible_window_anchors(ds, 5);
    REQUIRE(fiction.size() == 6);  // i + 5 <= 10 leaves i in 0..5
    CHECK(nonfiction.empty());
    for (std::size_t i = 0; i < 6; ++i) CHECK(fiction[i].sentence_index == i);
}

namespace {

Dataset window_source(int docs_per_class, int sentences_per_doc) {
    std::vector<Document> docs;
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < docs_per_class; ++d) {
            std::string text;
            for (int s = 0; s < sentences_per_doc; ++s)
                text += "Class " + std::to_string(c) + " doc " + std::to_string(d) +
                        " sentence " + std::to_string(s) + " runs along. ";
            docs.push_back(make_doc((c == 0 ? "f" : "n") + std::to_string(d), text,
                                    c == 0 ? Label::fiction : Label::nonfiction));
        }
    }
    return Dataset("mini", std::move(docs));
}

}  // namespace

TEST_CASE("build_window_datasets nests passages exactly") {
    const Dataset ds = window_source(4, 12);
    WindowSpec spec;
    spec.max_sentences = 4;
    spec.passages_per_set = 20;
    spec.split_sizes = {12, 4, 4};
    spec.seed = 5;

    const auto windows = build_window_datasets(ds, spec);
    REQUIRE(windows.size() == 4);
    for (const Dataset& w : windows) {
        CHECK(w.size() == 20);
        CHECK(w.counts().fiction == 10);
        CHECK(w.counts().nonfiction == 10);
    }
    // Same anchors in the same order across lengths; nesting is textual.
    for (int k = 1; k < 4; ++k) {
        const Dataset& shorter = windows[static_cast<std::size_t>(k - 1)];
        const Dataset& longer = windows[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < longer.size(); ++i) {
            CHECK(longer[i].id == shorter[i].id);
            REQUIRE(longer[i].text.size() > shorter[i].text.size());
            CHECK(longer[i].text.substr(0, shorter[i].text.size()) == shorter[i].text);
            CHECK(longer[i].text[shorter[i].text.size()] == ' ');
        }
    }
    // Determinism.
    const auto again = build_window_datasets(ds, spec);
    for (std::size_t k = 0; k < windows.size(); ++k)
        for (std::size_t i = 0; i < windows[k].size(); ++i) {
            CHECK(again[k][i].id == windows[k][i].id);
            CHECK(again[k][i].text == windows[k][i].text);
        }
}

TEST_CASE("build_window_datasets reports the achievable maximum") {
    const Dataset ds = window_source(2, 6);  // 3 anchors per doc, 6 per class at max=4
    WindowSpec spec;
    spec.max_sentences = 4;
    spec.passages_per_set = 100;
    spec.split_sizes = {60, 20, 20};
    spec.seed = 1;
    CHECK_THROWS_WITH_AS(build_window_datasets(ds, spec),
                         doctest::Contains("achievable passages_per_set = 12"), ValidationError);

    spec.passages_per_set = 21;
    spec.split_sizes = {11, 5, 5};
    CHECK_THROWS_AS(build_window_datasets(ds, spec), ValidationError);  // odd

    spec.passages_per_set = 12;
    spec.split_sizes = {10, 2, 2};  // sums past the passage count
    CHECK_THROWS_WITH_AS(build_window_datasets(ds, spec), doctest::Contains("split sizes sum"),
                         ValidationError);
}

TEST_CASE("balanced_split is exact, disjoint, and seeded") {
    const Dataset ds = window_source(20, 1);  // 20 fiction + 20 nonfiction
    const auto splits = balanced_split(ds, SplitSizes{20, 8, 10}, 3);
    CHECK(splits[0].size() == 20);
    CHECK(splits[1].size() == 8);
    CHECK(splits[2].size() == 10);
    std::set<std::string> seen;
    for (const Dataset& split : splits) {
        CHECK(split.counts().fiction == split.counts().nonfiction);
        for (const Document& doc : split.documents()) CHECK(seen.insert(doc.id).second);
    }
    CHECK(seen.size() == 38);

    const auto again = balanced_split(ds, SplitSizes{20, 8, 10}, 3);
    for (int p : {0, 1, 2})
        for (std::size_t i = 0; i < splits[static_cast<std::size_t>(p)].size(); ++i)
            CHECK(again[static_cast<std::size_t>(p)][i].id ==
                  splits[static_cast<std::size_t>(p)][i].id);
}

TEST_CASE("balanced_split smallest case and errors") {
    const Dataset ds = window_source(2, 1);
    const auto splits = balanced_split(ds, SplitSizes{2, 0, 0}, 9);
    CHECK(splits[0].counts().fiction == 1);
    CHECK(splits[0].counts().nonfiction == 1);
    CHECK(splits[1].empty());

    CHECK_THROWS_WITH_AS(balanced_split(ds, SplitSizes{6, 0, 0}, 9),
                         doctest::Contains("short by 1"), ValidationError);
    CHECK_THROWS_AS(balanced_split(ds, SplitSizes{3, 0, 0}, 9), ValidationError);  // odd
    CHECK_THROWS_AS(
        balanced_split(Dataset("u", {make_doc("a", "x")}), SplitSizes{0, 0, 0}, 9),
        ValidationError);  // unlabeled
}

TEST_CASE("synthetic corpus is deterministic and balanced") {
    const Dataset a = generate_synthetic_corpus(5, 60, 0.4, 123);
    const Dataset b = generate_synthetic_corpus(5, 60, 0.4, 123);
    REQUIRE(a.size() == 10);
    CHECK(a.counts().fiction == 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].text == b[i].text);
    }
    const Dataset c = generate_synthetic_corpus(5, 60, 0.4, 124);
    CHECK(c[0].text != a[0].text);

    // Byte-identical manifests for equal seeds.
    const auto pa = temp_path("synth-a.jsonl");
    const auto pb = temp_path("synth-b.jsonl");
    save_manifest(a, pa);
    save_manifest(b, pb);
    CHECK(testutil::read_file(pa) == testutil::read_file(pb));

    CHECK_THROWS_AS(generate_synthetic_corpus(0, 10, 0.2, 1), ValidationError);
    CHECK_THROWS_AS(generate_synthetic_corpus(5, 10, 1.5, 1), ValidationError);
}

TEST_CASE("synthetic divergence shifts marker rates by the designed margin") {
    const double d = 0.3;
    const Dataset ds = generate_synthetic_corpus(200, 500, d, 77);
    const auto tagged = tag_dataset(ds, testutil::mini_lexicon());
    const auto X = featurize_dataset(tagged);

    std::array<double, kNumSupersenses> mean[2] = {{}, {}};
    std::size_t n[2] = {0, 0};
    for (const FeatureVector& fv : X) {
        const auto c = static_cast<std::size_t>(static_cast<int>(*fv.label));
        ++n[c];
        for (std::size_t s = 0; s < kNumSupersenses; ++s) mean[c][s] += fv.values[s];
    }
    for (auto c : {0u, 1u})
        for (double& v : mean[c]) v /= static_cast<double>(n[c]);

    for (int s : fiction_marker_supersenses()) {
        const double expected = 2.0 * d * synthetic_base_mass(s);
        const double got =
            mean[0][static_cast<std::size_t>(s)] - mean[1][static_cast<std::size_t>(s)];
        CHECK(std::abs(got - expected) < 0.004);
    }
    for (int s : nonfiction_marker_supersenses()) {
        const double expected = -2.0 * d * synthetic_base_mass(s);
        const double got =
            mean[0][static_cast<std::size_t>(s)] - mean[1][static_cast<std::size_t>(s)];
        CHECK(std::abs(got - expected) < 0.004);
    }
}

TEST_CASE("marker sign coupling holds across seeds once the corpus is large") {
    for (std::uint64_t seed : {1, 2, 3}) {
        for (double d : {0.1, 0.6}) {
            const Dataset ds = generate_synthetic_corpus(100, 1000, d, seed);  // 1e5 per class
            const auto X = featurize_dataset(tag_dataset(ds, testutil::mini_lexicon()));
            std::array<double, kNumSupersenses> mean[2] = {{}, {}};
            std::size_t n[2] = {0, 0};
            for (const FeatureVector& fv : X) {
                const auto c = static_cast<std::size_t>(static_cast<int>(*fv.label));
                ++n[c];
                for (std::size_t s = 0; s < kNumSupersenses; ++s) mean[c][s] += fv.values[s];
            }
            for (auto c : {0u, 1u})
                for (double& v : mean[c]) v /= static_cast<double>(n[c]);
            for (int s : fiction_marker_supersenses())
                CHECK(mean[0][static_cast<std::size_t>(s)] >
                      mean[1][static_cast<std::size_t>(s)]);
            for (int s : nonfiction_marker_supersenses())
                CHECK(mean[0][static_cast<std::size_t>(s)] <
                      mean[1][static_cast<std::size_t>(s)]);
        }
    }
}
