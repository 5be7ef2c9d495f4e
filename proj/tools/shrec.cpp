#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shrec/ingest.hpp"
#include "shrec/io.hpp"
#include "shrec/runner.hpp"

namespace {

int cmd_ingest(const std::string& raw_path, const std::string& descriptions_path,
               bool no_knee_filter, const std::string& out_dir) {
    auto raw = shrec::parse_raw(raw_path);
    auto merged = shrec::merge_repetitions(raw);
    std::set<std::string> before_users, before_datasets, before_algorithms;
    for (const auto& it : merged) {
        before_users.insert(it.user);
        before_datasets.insert(it.dataset);
        before_algorithms.insert(it.algorithm);
    }

    shrec::io::ordered_json knee_json;
    knee_json["applied"] = !no_knee_filter;
    std::vector<shrec::Interaction> kept;
    if (no_knee_filter) {
        kept = std::move(merged);
    } else {
        auto [filtered, knee] = shrec::knee_filter_users(merged);
        kept = std::move(filtered);
        knee_json["knee_rank"] = knee.knee_rank;
        knee_json["knee_threshold"] = knee.knee_threshold;
        knee_json["n_removed_users"] = knee.removed_users.size();
        knee_json["removed_users"] = knee.removed_users;
    }

    auto descriptions = shrec::io::read_descriptions_jsonl(descriptions_path);
    // Items orphaned by the bot filter stay in the catalogs as
    // zero-interaction items; only their interactions are gone.
    shrec::Corpus corpus =
        shrec::build_corpus(kept, descriptions, before_datasets, before_algorithms);
    shrec::io::save_corpus(corpus, out_dir);
    {
        auto out = shrec::io::open_output(
            (std::filesystem::path(out_dir) / "knee.json").string());
        out << knee_json.dump(2) << '\n';
    }

    auto stats = shrec::corpus_stats(corpus);
    std::printf("raw rows              %zu\n", raw.size());
    std::printf("merged interactions   %lld\n", stats.n_interactions);
    std::printf("users before filter   %zu\n", before_users.size());
    std::printf("users kept            %lld\n", stats.n_users);
    if (!no_knee_filter)
        std::printf("users removed (knee)  %zu\n",
                    knee_json["removed_users"].size());
    std::printf("corpus written to     %s\n", out_dir.c_str());
    return 0;
}

int cmd_stats(const std::string& corpus_dir) {
    shrec::Corpus corpus = shrec::io::load_corpus(corpus_dir);
    shrec::StatsReport s = shrec::corpus_stats(corpus);
    std::printf("users                            %lld\n", s.n_users);
    std::printf("datasets (with interactions)     %lld\n", s.n_datasets);
    std::printf("algorithms (with interactions)   %lld\n", s.n_algorithms);
    std::printf("interactions                     %lld\n", s.n_interactions);
    std::printf("avg interactions per user        %.2f\n", s.avg_per_user);
    std::printf("avg interactions per dataset     %.2f\n", s.avg_per_dataset);
    std::printf("avg interactions per algorithm   %.2f\n", s.avg_per_algorithm);
    std::printf("datasets without interactions    %lld\n", s.n_datasets_no_interaction);
    std::printf("algorithms without interactions  %lld\n", s.n_algorithms_no_interaction);
    return 0;
}

int cmd_run(const std::string& config_path, bool seed_set, std::uint64_t seed,
            const std::string& out_override) {
    shrec::ExperimentPlan plan = shrec::parse_plan_file(config_path);
    if (seed_set) plan.config.rng_seed = seed;
    if (!out_override.empty()) plan.out_dir = out_override;
    plan.validate();

    shrec::run_experiment(plan);

    std::ifstream csv(std::filesystem::path(plan.out_dir) / "report.csv");
    std::cout << csv.rdbuf();
    std::cerr << "artifacts written to " << plan.out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
    auto in = shrec::io::open_input(
        (std::filesystem::path(in_dir) / "report.json").string());
    shrec::io::ordered_json j = shrec::io::ordered_json::parse(in);
    if (format == "json") {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::vector<shrec::io::ordered_json> rows;
    for (const auto& row : j.at("rows")) rows.push_back(row);
    std::cout << shrec::render_report_csv(rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offline top-n recommender evaluation for data/algorithm sharing platforms"};
    app.require_subcommand(1);

    std::string raw_path, descriptions_path, ingest_out;
    bool no_knee_filter = false;
    auto* ingest = app.add_subcommand("ingest", "Build a clean corpus from raw interaction logs");
    ingest->add_option("--raw", raw_path, "Raw interactions CSV")
        ->required()
        ->check(CLI::ExistingFile);
    ingest->add_option("--descriptions", descriptions_path, "Item descriptions JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    ingest->add_flag("--no-knee-filter", no_knee_filter, "Skip bot-user knee filtering");
    ingest->add_option("--out", ingest_out, "Output corpus directory")->required();

    std::string stats_corpus;
    auto* stats = app.add_subcommand("stats", "Print corpus statistics");
    stats->add_option("--corpus", stats_corpus, "Corpus directory")
        ->required()
        ->check(CLI::ExistingDirectory);

    std::string run_config, run_out;
    std::uint64_t run_seed = 0;
    auto* run = app.add_subcommand("run", "Run the experiment grid from a config file");
    run->add_option("--config", run_config, "Plan file (key = value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* seed_opt = run->add_option("--seed", run_seed, "Override rng_seed");
    run->add_option("--out", run_out, "Override out_dir");

    std::string report_in, report_format = "csv";
    auto* report = app.add_subcommand("report", "Re-render reports from a run directory");
    report->add_option("--in", report_in, "Run output directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    report->add_option("--format", report_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
        if (ingest->parsed())
            return cmd_ingest(raw_path, descriptions_path, no_knee_filter, ingest_out);
        if (stats->parsed()) return cmd_stats(stats_corpus);
        if (run->parsed())
            return cmd_run(run_config, !seed_opt->empty(), run_seed, run_out);
        if (report->parsed()) return cmd_report(report_in, report_format);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
