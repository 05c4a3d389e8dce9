#include "fictsense/features.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "fictsense/errors.hpp"

namespace fictsense {

FeatureVector featurize(const TaggedDocument& tagged) {
    FeatureVector fv;
    fv.doc_id = tagged.doc.id;
    fv.label = tagged.doc.label;
    fv.meta = tagged.doc.meta;
    if (tagged.word_count == 0) return fv;

    std::array<std::size_t, kNumSupersenses> counts{};
    for (std::int16_t tag : tagged.tags)
        if (tag >= 0) ++counts[static_cast<std::size_t>(tag)];
    const double denom = static_cast<double>(tagged.word_count);
    for (std::size_t s = 0; s < kNumSupersenses; ++s)
        fv.values[s] = static_cast<double>(counts[s]) / denom;
    return fv;
}

std::vector<FeatureVector> featurize_dataset(const std::vector<TaggedDocument>& tagged_docs) {
    std::vector<FeatureVector> out;
    out.reserve(tagged_docs.size());
    for (const TaggedDocument& td : tagged_docs) out.push_back(featurize(td));
    return out;
}

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

// Splits one CSV line honoring double-quoted fields.
std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

}  // namespace

void write_feature_csv(const std::vector<FeatureVector>& rows,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write feature csv: " + path.string());
    out << "doc_id,label";
    for (std::string_view name : kSupersenses) out << ',' << name;
    out << '\n';
    char buf[64];
    for (const FeatureVector& fv : rows) {
        out << csv_field(fv.doc_id) << ',';
        if (fv.label) out << label_name(*fv.label);
        for (double v : fv.values) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature csv: " + path.string());

    auto strip_cr = [](std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    };
    std::string line;
    if (!std::getline(in, line)) throw ParseError("feature csv " + path.string() + ": empty file");
    strip_cr(line);
    {
        const auto header = csv_split(line);
        if (header.size() != 2 + kNumSupersenses || header[0] != "doc_id" ||
            header[1] != "label")
            throw ParseError("feature csv " + path.string() + ": unexpected header");
        for (std::size_t s = 0; s < kNumSupersenses; ++s)
            if (header[2 + s] != kSupersenses[s])
                throw ParseError("feature csv " + path.string() +
                                 ": feature order differs from the canonical inventory");
    }

    std::vector<FeatureVector> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = csv_split(line);
        const std::string where =
            "feature csv " + path.string() + " line " + std::to_string(line_no);
        if (fields.size() != 2 + kNumSupersenses)
            throw ParseError(where + ": expected " + std::to_string(2 + kNumSupersenses) +
                             " columns");
        FeatureVector fv;
        fv.doc_id = fields[0];
        if (!fields[1].empty()) {
            auto label = parse_label(fields[1]);
            if (!label) throw ValidationError(where + ": unknown label '" + fields[1] + "'");
            fv.label = label;
        }
        for (std::size_t s = 0; s < kNumSupersenses; ++s) {
            char* end = nullptr;
            fv.values[s] = std::strtod(fields[2 + s].c_str(), &end);
            if (end == fields[2 + s].c_str())
                throw ParseError(where + ": non-numeric value in column " + std::to_string(3 + s));
        }
        rows.push_back(std::move(fv));
    }
    return rows;
}

}  // namespace fictsense
