// mrc: batch evaluation harness for reasoning-consistency experiments.
//
// Subcommands:
//   run              execute a configured evaluation run
//   score            recompute extraction + metrics from stored traces
//   report           render tables / CSV series from run directories
//   validate-config  parse and validate a config file
//
// Exit codes: 0 success, 1 incomplete run, 2 invalid config, 3 client error.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mrc/orchestrator.hpp"
#include "mrc/report.hpp"
#include "mrc/serde.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIncomplete = 1;
constexpr int kExitConfig = 2;
constexpr int kExitClient = 3;

struct RunArgs {
    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::string endpoint;
    std::string model;
    std::vector<std::string> dimensions;
    int coc_k = -1;
    int max_problems = -1;
    int concurrency = -1;
    std::int64_t seed = -1;
};

int cmd_run(const RunArgs& args) {
    mrc::RunConfig cfg;
    try {
        cfg = mrc::RunConfig::from_file(args.config_path);
        if (!args.mode.empty()) {
            auto m = mrc::cache_mode_from_string(args.mode);
            if (!m) throw mrc::ConfigError("invalid --mode '" + args.mode + "'");
            cfg.cache_mode = *m;
        }
        if (!args.endpoint.empty()) cfg.endpoint = args.endpoint;
        if (!args.model.empty()) cfg.model = args.model;
        if (!args.dimensions.empty()) {
            cfg.dimensions.clear();
            for (const auto& d : args.dimensions) {
                auto dim = mrc::dimension_from_string(d);
                if (!dim) throw mrc::ConfigError("invalid --dimension '" + d + "'");
                cfg.dimensions.push_back(*dim);
            }
        }
        if (args.coc_k >= 0) cfg.coc_k = args.coc_k;
        if (args.max_problems >= 0) cfg.max_problems = args.max_problems;
        if (args.concurrency >= 0) cfg.concurrency = args.concurrency;
        if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    std::filesystem::path run_dir = args.out_dir.empty()
                                        ? std::filesystem::path("runs") / ("run-" + cfg.model)
                                        : std::filesystem::path(args.out_dir);
    try {
        mrc::Runner runner(std::move(cfg), run_dir);
        bool complete = runner.execute();
        std::fprintf(stderr, "[run] wrote %s\n", run_dir.string().c_str());
        if (!complete) {
            std::fprintf(stderr, "[run] some problems produced no trace\n");
            return kExitIncomplete;
        }
        return kExitOk;
    } catch (const mrc::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return kExitClient;
    }
}

int cmd_score(const std::string& traces_path, const std::string& gold_path,
              const std::string& gold_format, const std::string& gold_language,
              const std::string& gold_name, const std::string& languages_file,
              const std::string& templates_dir, double tolerance, const std::string& out_path) {
    try {
        auto records = mrc::read_jsonl(traces_path);
        if (records.empty()) throw std::runtime_error("trace file " + traces_path + " is empty");
        std::vector<mrc::SolutionTrace> traces;
        for (const auto& r : records) traces.push_back(mrc::trace_from_json(r));

        auto fmt = mrc::dataset_format_from_string(gold_format);
        if (!fmt) throw std::runtime_error("invalid gold format '" + gold_format + "'");
        mrc::Dataset ds = mrc::load_dataset(gold_path, *fmt, mrc::lang_from_string_or_throw(gold_language),
                                            gold_name);
        std::map<std::string, mrc::NumericAnswer> gold;
        for (const auto& p : ds.problems) gold[p.id] = p.gold_answer;

        mrc::TemplateSet templates = mrc::TemplateSet::load(templates_dir, languages_file);
        auto result = mrc::rescore_traces(std::move(traces), gold, templates.anchor_table(), tolerance);
        std::string text = result.dump(2) + "\n";
        if (out_path.empty())
            std::fputs(text.c_str(), stdout);
        else
            mrc::write_file(out_path, text);
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "score failed: %s\n", e.what());
        return kExitConfig;
    }
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& format,
               const std::string& out_dir) {
    try {
        std::vector<mrc::RunArtifacts> runs;
        for (const auto& d : run_dirs) runs.push_back(mrc::load_run_dir(d));

        if (format == "markdown") {
            std::string md = mrc::render_markdown(runs);
            if (out_dir.empty()) {
                std::fputs(md.c_str(), stdout);
            } else {
                std::filesystem::create_directories(out_dir);
                mrc::write_file(std::filesystem::path(out_dir) / "report.md", md);
                std::fprintf(stderr, "[report] wrote %s/report.md\n", out_dir.c_str());
            }
        } else if (format == "csv") {
            auto files = mrc::render_csv(runs);
            if (out_dir.empty()) {
                for (const auto& [name, content] : files)
                    std::printf("=== %s ===\n%s", name.c_str(), content.c_str());
            } else {
                std::filesystem::create_directories(out_dir);
                for (const auto& [name, content] : files)
                    mrc::write_file(std::filesystem::path(out_dir) / name, content);
                std::fprintf(stderr, "[report] wrote %zu csv files to %s\n", files.size(),
                             out_dir.c_str());
            }
        } else {
            std::fprintf(stderr, "invalid --format '%s' (markdown|csv)\n", format.c_str());
            return kExitConfig;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "report failed: %s\n", e.what());
        return kExitConfig;
    }
}

int cmd_validate(const std::string& config_path) {
    try {
        mrc::RunConfig cfg = mrc::RunConfig::from_file(config_path);
        cfg.validate();
        std::printf("config ok: model=%s, %zu dataset file(s), %zu dimension(s), mrc=%s\n",
                    cfg.model.c_str(), cfg.datasets.size(), cfg.dimensions.size(),
                    cfg.mrc ? "yes" : "no");
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reasoning-consistency evaluation harness for math word problems"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute an evaluation run");
    run->add_option("--config", run_args.config_path, "Config file (JSON)")->required();
    run->add_option("--out", run_args.out_dir, "Run directory (default runs/run-<model>)");
    run->add_option("--mode", run_args.mode, "Cache mode override: live|record|replay");
    run->add_option("--endpoint", run_args.endpoint, "Endpoint base URL override");
    run->add_option("--model", run_args.model, "Model id override");
    run->add_option("--dimension", run_args.dimensions, "Dimension override (repeatable): coc|cpc|clc");
    run->add_option("--coc-k", run_args.coc_k, "Number of exemplar orders");
    run->add_option("--max-problems", run_args.max_problems, "Cap on problems (0 = all)");
    run->add_option("--concurrency", run_args.concurrency, "Worker pool size");
    run->add_option("--seed", run_args.seed, "Run seed");

    std::string traces_path, gold_path, gold_format = "mgsm_tsv", gold_language = "en", gold_name;
    std::string languages_file = "data/languages.json", templates_dir = "data/templates";
    std::string score_out;
    double tolerance = 0.0;
    auto* score = app.add_subcommand("score", "Rescore stored traces offline");
    score->add_option("--traces", traces_path, "traces.jsonl from a run directory")->required();
    score->add_option("--gold", gold_path, "Dataset file with gold answers")->required();
    score->add_option("--gold-format", gold_format, "gsm8k_jsonl|mgsm_tsv");
    score->add_option("--gold-language", gold_language, "Language code of the gold file");
    score->add_option("--gold-name", gold_name,
                      "Dataset name used for problem ids (default: the file stem)");
    score->add_option("--languages-file", languages_file, "Language table (anchor phrases)");
    score->add_option("--templates-dir", templates_dir, "Prompt template directory");
    score->add_option("--tolerance", tolerance, "Absolute answer tolerance (default exact)");
    score->add_option("--out", score_out, "Write metrics JSON here instead of stdout");

    std::vector<std::string> run_dirs;
    std::string format = "markdown", report_out;
    auto* report = app.add_subcommand("report", "Render tables from run directories");
    report->add_option("--run-dir", run_dirs, "Run directory (repeatable)")->required();
    report->add_option("--format", format, "markdown|csv");
    report->add_option("--out", report_out, "Directory for rendered files (default stdout)");

    std::string validate_config_path;
    auto* validate = app.add_subcommand("validate-config", "Validate a config file");
    validate->add_option("--config", validate_config_path, "Config file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(run_args);
    if (score->parsed())
        return cmd_score(traces_path, gold_path, gold_format, gold_language, gold_name,
                         languages_file, templates_dir, tolerance, score_out);
    if (report->parsed()) return cmd_report(run_dirs, format, report_out);
    if (validate->parsed()) return cmd_validate(validate_config_path);
    return kExitConfig;
}
