#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mrc/client.hpp"
#include "mrc/dataset.hpp"
#include "mrc/metrics.hpp"
#include "mrc/prompt.hpp"
#include "mrc/templates.hpp"

namespace mrc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetRef {
    std::string path;
    DatasetFormat format = DatasetFormat::MgsmTsv;
    Lang language = Lang::EN;
    std::string name;   // shared across per-language files so rows align
    std::string split;
};

// Everything that parameterizes a run. Loaded from a JSON config file;
// relative paths resolve against the config file's directory.
struct RunConfig {
    std::string model;
    std::string endpoint;  // flag > MRC_BASE_URL > config
    std::vector<DatasetRef> datasets;
    std::string banks_dir;
    std::string templates_dir;
    std::string languages_file;

    std::vector<Dimension> dimensions;
    bool mrc = false;
    int coc_k = 8;
    std::vector<PhrasingSetting> cpc_settings = {kAllSettings.begin(), kAllSettings.end()};
    std::vector<Lang> clc_languages;
    std::vector<Lang> clc_exclusions;

    SamplingParams sampling;
    int samples_per_path = 1;
    int concurrency = 8;
    CacheMode cache_mode = CacheMode::Record;
    std::string cache_dir;  // default: <run_dir>/cache
    std::uint64_t seed = 0;
    bool endpoint_supports_top_k = false;
    int retry_attempts = 4;
    int max_problems = 0;  // 0 = all
    double answer_tolerance = 0.0;

    bool path_scaling = false;
    std::vector<int> path_counts;

    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static RunConfig from_file(const std::filesystem::path& config_path);
    nlohmann::json to_json() const;

    // Structural checks that need no file access; throws ConfigError.
    void validate() const;

    std::vector<Lang> clc_effective_languages() const;
};

// One problem across its per-language variants; gold is shared.
struct ProblemEntry {
    std::string id;
    NumericAnswer gold;
    std::map<Lang, std::string> question_by_lang;

    MathProblem in_language(Lang l) const;
};

struct DimensionOutcome {
    Dimension dimension;
    std::vector<std::string> spec_ids;  // canonical run order
    std::map<std::string, double> per_variation_accuracy;
    double voted_accuracy = 0.0;
    RCScore rc;
    std::vector<VoteResult> votes;
    std::optional<OrderSummary> order_summary;  // COC only
};

struct MrcOutcome {
    int paths_per_problem = 0;
    double voted_accuracy = 0.0;
    RCScore rc;
    std::map<std::string, double> dimension_voted;  // "coc"/"cpc"/"clc"
};

struct ScalingPoint {
    int paths = 0;
    double accuracy = 0.0;
};

struct ScalingOutcome {
    double greedy_accuracy = 0.0;
    std::vector<ScalingPoint> self_consistency;
    std::vector<ScalingPoint> clc;
    std::vector<Lang> languages;
};

// Drives a full run: config -> specs -> plans -> client calls -> traces ->
// metrics, persisting traces.jsonl, metrics.json and manifest.json under
// the run directory. A custom Transport can be injected for tests and for
// the scripted fixture generator; by default the HTTP transport is built
// from the endpoint and MRC_API_KEY.
class Runner {
public:
    Runner(RunConfig config, std::filesystem::path run_dir,
           std::shared_ptr<Transport> transport = nullptr);

    // Loads data, runs every enabled dimension plus MRC / path scaling,
    // writes the run directory. Returns false when some problem ended up
    // with no trace at all (the CLI maps that to a nonzero exit).
    bool execute();

    DimensionOutcome run_dimension(Dimension dim);
    MrcOutcome run_mrc();
    ScalingOutcome run_path_scaling();

    const nlohmann::json& metrics() const { return metrics_; }
    const nlohmann::json& manifest() const { return manifest_; }
    const std::vector<ProblemEntry>& problems() const { return problems_; }

private:
    void load_inputs();
    void build_client();
    // Runs every (problem, spec) pair not yet in the store, bounded by the
    // configured concurrency; one trace per spec (sampled paths arrive as
    // sample-tagged specs).
    void ensure_traces(const std::vector<VariationSpec>& specs, const SamplingParams& sampling);
    std::vector<VariationSpec> dimension_specs(Dimension dim) const;
    const SolutionTrace& trace_for(const std::string& problem_id, const std::string& spec_id) const;
    std::map<std::string, NumericAnswer> gold_map() const;
    void write_outputs();

    RunConfig cfg_;
    std::filesystem::path run_dir_;
    std::shared_ptr<Transport> transport_override_;

    TemplateSet templates_;
    BankMap banks_;
    std::vector<ProblemEntry> problems_;
    AnchorTable anchors_;
    std::unique_ptr<LlmClient> client_;

    std::map<std::pair<std::string, std::string>, SolutionTrace> store_;  // (problem, spec_id)
    std::map<std::string, std::string> dataset_hashes_;
    nlohmann::json metrics_;
    nlohmann::json manifest_;
    double wall_s_ = 0.0;
};

// Recomputes extraction and the per-dimension metrics from stored raw
// generations; no network access. Rescoring with improved extraction rules
// keeps n (the trace count) unchanged. A trace's extraction language is its
// spec language for Language paths and English otherwise (Order and
// Phrasing paths always present the English problem).
nlohmann::json rescore_traces(std::vector<SolutionTrace> traces,
                              const std::map<std::string, NumericAnswer>& gold,
                              const AnchorTable& anchors, double tolerance = 0.0);

}  // namespace mrc
