#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fictsense/corpus.hpp"
#include "fictsense/tagger.hpp"

namespace testutil {

inline std::filesystem::path source_dir() { return std::filesystem::path(FICTSENSE_SOURCE_DIR); }

inline std::filesystem::path cli_path() { return std::filesystem::path(FICTSENSE_CLI_PATH); }

inline std::filesystem::path wordnet_mini_dir() { return source_dir() / "data" / "wordnet_mini"; }

// Fresh unique file path under a per-process temp directory.
inline std::filesystem::path temp_path(const std::string& name) {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("fictsense-test-" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    static int counter = 0;
    return dir / (std::to_string(counter++) + "-" + name);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// The fixture lexicon, compiled once per process.
inline const fictsense::Lexicon& mini_lexicon() {
    static const fictsense::Lexicon lexicon = fictsense::compile_lexicon(
        wordnet_mini_dir() / "index.sense", wordnet_mini_dir() / "lexnames");
    return lexicon;
}

inline fictsense::Document make_doc(std::string id, std::string text,
                                    std::optional<fictsense::Label> label = std::nullopt) {
    fictsense::Document doc;
    doc.id = std::move(id);
    doc.text = std::move(text);
    doc.label = label;
    return doc;
}

}  // namespace testutil
