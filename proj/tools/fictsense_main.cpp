#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fictsense/errors.hpp"
#include "fictsense/runner.hpp"
#include "fictsense/tagger.hpp"

namespace {

using namespace fictsense;

void write_or_print(const std::string& bytes, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << bytes;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write output: " + out_path);
    out << bytes;
    if (!out) throw IoError("write failed: " + out_path);
}

int run(int argc, char** argv) {
    CLI::App app{"fictsense: supersense features and random-forest experiments for "
                 "fiction detection"};
    app.require_subcommand(1);

    // lexicon compile
    auto* lexicon_cmd = app.add_subcommand("lexicon", "lexicon utilities");
    lexicon_cmd->require_subcommand(1);
    auto* compile_cmd = lexicon_cmd->add_subcommand(
        "compile", "compile a WordNet index.sense + lexnames pair into a cache");
    std::string sense_index, lexnames, lexicon_out;
    compile_cmd->add_option("--sense-index", sense_index, "WordNet index.sense file")
        ->required();
    compile_cmd->add_option("--lexnames", lexnames, "WordNet lexnames file")->required();
    compile_cmd->add_option("--out", lexicon_out, "output cache TSV")->required();

    // tag
    auto* tag_cmd = app.add_subcommand("tag", "tag a manifest and write pre-tagged TSV");
    std::string tag_manifest, tag_lexicon, tag_out;
    tag_cmd->add_option("--manifest", tag_manifest, "JSON Lines manifest")->required();
    tag_cmd->add_option("--lexicon", tag_lexicon, "compiled lexicon cache")->required();
    tag_cmd->add_option("--out", tag_out, "output TSV")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    int per_class = 0, tokens_per_doc = 0;
    double divergence = 0.0;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    synth_cmd->add_option("--per-class", per_class, "documents per class")->required();
    synth_cmd->add_option("--tokens-per-doc", tokens_per_doc, "word tokens per document")
        ->required();
    synth_cmd->add_option("--divergence", divergence, "class divergence in [0,1]")->required();
    synth_cmd->add_option("--seed", synth_seed, "generator seed")->required();
    synth_cmd->add_option("--out", synth_out, "output manifest path")->required();

    // experiment run
    auto* experiment_cmd = app.add_subcommand("experiment", "experiment runner");
    experiment_cmd->require_subcommand(1);
    auto* run_cmd = experiment_cmd->add_subcommand("run", "run configured experiments");
    std::vector<std::string> config_paths;
    std::string format = "human", report_out;
    run_cmd->add_option("--config", config_paths, "experiment config JSON (repeatable; "
                        "experiments run sequentially into one report)")
        ->required();
    run_cmd->add_option("--format", format, "output format: human|machine")
        ->check(CLI::IsMember({"human", "machine"}));
    run_cmd->add_option("--out", report_out, "write the report here instead of stdout");

    // report top-tokens
    auto* report_cmd = app.add_subcommand("report", "report utilities");
    report_cmd->require_subcommand(1);
    auto* top_tokens_cmd =
        report_cmd->add_subcommand("top-tokens", "most frequent tokens per supersense");
    std::string tagged_path;
    int top_k = 3;
    top_tokens_cmd->add_option("--tagged", tagged_path, "pre-tagged TSV")->required();
    top_tokens_cmd->add_option("-k", top_k, "tokens per supersense");

    CLI11_PARSE(app, argc, argv);

    if (compile_cmd->parsed()) {
        const Lexicon lexicon = compile_lexicon(sense_index, lexnames);
        save_lexicon_cache(lexicon, lexicon_out);
        std::cout << "compiled " << lexicon.size() << " entries -> " << lexicon_out << "\n";
    } else if (tag_cmd->parsed()) {
        const Lexicon lexicon = load_lexicon_cache(tag_lexicon);
        const Dataset ds = load_manifest(tag_manifest);
        export_pretagged(tag_dataset(ds, lexicon), tag_out);
        std::cout << "tagged " << ds.size() << " documents -> " << tag_out << "\n";
    } else if (synth_cmd->parsed()) {
        const Dataset ds =
            generate_synthetic_corpus(per_class, tokens_per_doc, divergence, synth_seed);
        save_manifest(ds, synth_out);
        std::cout << "wrote " << ds.size() << " documents -> " << synth_out << "\n";
    } else if (run_cmd->parsed()) {
        Report report;
        for (const std::string& config_path : config_paths) {
            const ExperimentConfig config = load_experiment_config(config_path);
            Report one = run_experiment(config);
            for (auto& record : one.records) report.records.push_back(std::move(record));
        }
        const ReportFormat fmt =
            format == "machine" ? ReportFormat::machine : ReportFormat::human_table;
        write_or_print(emit_report(report, fmt), report_out);
    } else if (top_tokens_cmd->parsed()) {
        const auto docs = ingest_pretagged(tagged_path);
        const auto report = top_tokens_report(docs, top_k);
        for (std::size_t s = 0; s < kNumSupersenses; ++s) {
            if (report[s].empty()) continue;
            std::string name(kSupersenses[s]);
            if (name.size() < 22) name.resize(22, ' ');
            std::cout << name;
            for (const TokenCount& tc : report[s])
                std::cout << ' ' << tc.token << '(' << tc.count << ')';
            std::cout << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fictsense::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const fictsense::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const fictsense::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
