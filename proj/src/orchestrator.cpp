#include "mrc/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "mrc/serde.hpp"

namespace mrc {

namespace {

using json = nlohmann::json;

// Fixed worker pool over a task list; at most `workers` requests in flight.
// The first exception aborts the remaining tasks and is rethrown.
void parallel_run(int workers, std::vector<std::function<void()>>& tasks) {
    if (tasks.empty()) return;
    std::atomic<size_t> next{0};
    std::atomic<size_t> done{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            {
                std::lock_guard lock(err_mu);
                if (first_error) return;
            }
            try {
                tasks[i]();
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
            size_t d = done.fetch_add(1) + 1;
            if (d == tasks.size() || d % 16 == 0)
                std::fprintf(stderr, "\r[run] %zu/%zu traces", d, tasks.size());
        }
    };
    size_t n = std::min<size_t>(static_cast<size_t>(std::max(1, workers)), tasks.size());
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    std::fprintf(stderr, "\n");
    if (first_error) std::rethrow_exception(first_error);
}

template <typename T>
T parse_enum_or_throw(const std::string& s, std::optional<T> (*parse)(std::string_view),
                      const char* what) {
    auto v = parse(s);
    if (!v) throw ConfigError(std::string("invalid ") + what + ": '" + s + "'");
    return *v;
}

std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
    if (p.empty()) return p;
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return fp.lexically_normal().string();
    return (base / fp).lexically_normal().string();
}

json rc_to_json(const RCScore& rc) {
    json per = json::object();
    for (const auto& [pid, v] : rc.per_problem) per[pid] = v;
    return json{{"mean", rc.mean}, {"n", rc.n}, {"per_problem", per}};
}

json votes_to_json(const std::vector<VoteResult>& votes) {
    json arr = json::array();
    for (const auto& v : votes) {
        json j{{"problem_id", v.problem_id}, {"support", v.support}, {"tie", v.tie}};
        if (v.winner) j["winner"] = json{{"num", v.winner->num}, {"den", v.winner->den}};
        arr.push_back(std::move(j));
    }
    return arr;
}

json dimension_to_json(const DimensionOutcome& o) {
    json per = json::object();
    for (const auto& [sid, acc] : o.per_variation_accuracy) per[sid] = acc;
    json j{{"spec_ids", o.spec_ids},
           {"per_variation_accuracy", per},
           {"voted_accuracy", o.voted_accuracy},
           {"rc", rc_to_json(o.rc)},
           {"votes", votes_to_json(o.votes)}};
    if (o.order_summary)
        j["order_summary"] = json{{"min", o.order_summary->min},
                                  {"mean", o.order_summary->mean},
                                  {"max", o.order_summary->max},
                                  {"coc_accuracy", o.order_summary->coc_accuracy}};
    return j;
}

int expected_stage_count(const VariationSpec& spec) {
    if (spec.dimension != Dimension::Phrasing) return 1;
    switch (*spec.phrasing_setting) {
        case PhrasingSetting::RwS:
        case PhrasingSetting::QPlusRwS:
        case PhrasingSetting::RtSQ: return 2;
        default: return 1;
    }
}

}  // namespace

MathProblem ProblemEntry::in_language(Lang l) const {
    auto it = question_by_lang.find(l);
    if (it == question_by_lang.end())
        throw std::invalid_argument("problem " + id + " has no " + std::string(to_string(l)) + " text");
    MathProblem p;
    p.id = id;
    p.question = it->second;
    p.gold_answer = gold;
    p.language = l;
    return p;
}

RunConfig RunConfig::from_file(const std::filesystem::path& config_path) {
    json j;
    try {
        j = json::parse(read_file(config_path));
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + config_path.string() + ": " + e.what());
    }
    return from_json(j, config_path.parent_path());
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    static const std::set<std::string> known = {
        "model", "endpoint", "datasets", "banks_dir", "templates_dir", "languages_file",
        "dimensions", "mrc", "coc_k", "cpc_settings", "clc_languages", "clc_exclusions",
        "sampling", "samples_per_path", "concurrency", "cache_mode", "cache_dir", "seed",
        "endpoint_supports_top_k", "retry_attempts", "max_problems", "answer_tolerance",
        "path_scaling", "path_counts"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key: '" + key + "'");

    RunConfig c;
    try {
        c.model = j.value("model", std::string{});
        c.endpoint = j.value("endpoint", std::string{});
        for (const auto& d : j.value("datasets", json::array())) {
            DatasetRef ref;
            ref.path = resolve_path(d.at("path").get<std::string>(), base_dir);
            ref.format = parse_enum_or_throw(d.at("format").get<std::string>(),
                                             &dataset_format_from_string, "dataset format");
            ref.language = lang_from_string_or_throw(d.at("language").get<std::string>());
            ref.name = d.value("name", std::filesystem::path(ref.path).stem().string());
            ref.split = d.value("split", std::string{});
            c.datasets.push_back(std::move(ref));
        }
        c.banks_dir = resolve_path(j.value("banks_dir", std::string{}), base_dir);
        c.templates_dir = resolve_path(j.value("templates_dir", std::string{}), base_dir);
        c.languages_file = resolve_path(j.value("languages_file", std::string{}), base_dir);

        c.dimensions.clear();
        for (const auto& d : j.value("dimensions", json::array()))
            c.dimensions.push_back(parse_enum_or_throw(d.get<std::string>(), &dimension_from_string,
                                                       "dimension"));
        c.mrc = j.value("mrc", false);
        c.coc_k = j.value("coc_k", 8);
        if (j.contains("cpc_settings")) {
            c.cpc_settings.clear();
            for (const auto& s : j["cpc_settings"])
                c.cpc_settings.push_back(parse_enum_or_throw(s.get<std::string>(),
                                                             &setting_from_string, "cpc setting"));
        }
        for (const auto& l : j.value("clc_languages", json::array()))
            c.clc_languages.push_back(lang_from_string_or_throw(l.get<std::string>()));
        for (const auto& l : j.value("clc_exclusions", json::array()))
            c.clc_exclusions.push_back(lang_from_string_or_throw(l.get<std::string>()));

        if (j.contains("sampling")) {
            const auto& s = j["sampling"];
            c.sampling.temperature = s.value("temperature", 0.0);
            if (s.contains("top_k") && !s["top_k"].is_null()) c.sampling.top_k = s["top_k"].get<int>();
            c.sampling.max_tokens = s.value("max_tokens", 1024);
            if (s.contains("seed") && !s["seed"].is_null())
                c.sampling.seed = s["seed"].get<std::uint64_t>();
        }
        c.samples_per_path = j.value("samples_per_path", 1);
        c.concurrency = j.value("concurrency", 8);
        c.cache_mode = parse_enum_or_throw(j.value("cache_mode", std::string("record")),
                                           &cache_mode_from_string, "cache_mode");
        c.cache_dir = resolve_path(j.value("cache_dir", std::string{}), base_dir);
        c.seed = j.value("seed", std::uint64_t{0});
        c.endpoint_supports_top_k = j.value("endpoint_supports_top_k", false);
        c.retry_attempts = j.value("retry_attempts", 4);
        c.max_problems = j.value("max_problems", 0);
        c.answer_tolerance = j.value("answer_tolerance", 0.0);
        c.path_scaling = j.value("path_scaling", false);
        for (const auto& n : j.value("path_counts", json::array()))
            c.path_counts.push_back(n.get<int>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

json RunConfig::to_json() const {
    json datasets = json::array();
    for (const auto& d : this->datasets)
        datasets.push_back(json{{"path", d.path},
                                {"format", std::string(to_string(d.format))},
                                {"language", std::string(to_string(d.language))},
                                {"name", d.name},
                                {"split", d.split}});
    json dims = json::array();
    for (Dimension d : dimensions) dims.push_back(std::string(to_string(d)));
    json settings = json::array();
    for (PhrasingSetting s : cpc_settings) settings.push_back(std::string(to_string(s)));
    json clc = json::array();
    for (Lang l : clc_languages) clc.push_back(std::string(to_string(l)));
    json excl = json::array();
    for (Lang l : clc_exclusions) excl.push_back(std::string(to_string(l)));

    json sampling{{"temperature", this->sampling.temperature},
                  {"max_tokens", this->sampling.max_tokens}};
    if (this->sampling.top_k) sampling["top_k"] = *this->sampling.top_k;
    if (this->sampling.seed) sampling["seed"] = *this->sampling.seed;

    return json{{"model", model},
                {"endpoint", endpoint},
                {"datasets", datasets},
                {"banks_dir", banks_dir},
                {"templates_dir", templates_dir},
                {"languages_file", languages_file},
                {"dimensions", dims},
                {"mrc", mrc},
                {"coc_k", coc_k},
                {"cpc_settings", settings},
                {"clc_languages", clc},
                {"clc_exclusions", excl},
                {"sampling", sampling},
                {"samples_per_path", samples_per_path},
                {"concurrency", concurrency},
                {"cache_mode", std::string(to_string(cache_mode))},
                {"cache_dir", cache_dir},
                {"seed", seed},
                {"endpoint_supports_top_k", endpoint_supports_top_k},
                {"retry_attempts", retry_attempts},
                {"max_problems", max_problems},
                {"answer_tolerance", answer_tolerance},
                {"path_scaling", path_scaling},
                {"path_counts", path_counts}};
}

std::vector<Lang> RunConfig::clc_effective_languages() const {
    std::vector<Lang> out;
    for (Lang l : clc_languages)
        if (std::find(clc_exclusions.begin(), clc_exclusions.end(), l) == clc_exclusions.end())
            out.push_back(l);
    return out;
}

void RunConfig::validate() const {
    if (model.empty()) throw ConfigError("config: 'model' is required");
    if (datasets.empty()) throw ConfigError("config: at least one dataset is required");
    if (banks_dir.empty() || templates_dir.empty() || languages_file.empty())
        throw ConfigError("config: banks_dir, templates_dir and languages_file are required");
    if (dimensions.empty() && !mrc && !path_scaling)
        throw ConfigError("config: at least one dimension must be enabled");
    if (coc_k < 1) throw ConfigError("config: coc_k must be >= 1");
    if (samples_per_path < 1) throw ConfigError("config: samples_per_path must be >= 1");
    if (samples_per_path > 1 && sampling.temperature <= 0.0)
        throw ConfigError("config: samples_per_path > 1 needs temperature > 0");
    if (sampling.temperature < 0.0) throw ConfigError("config: temperature must be >= 0");
    if (sampling.max_tokens < 1) throw ConfigError("config: max_tokens must be >= 1");
    if (sampling.top_k && *sampling.top_k < 1) throw ConfigError("config: top_k must be >= 1");
    if (concurrency < 1) throw ConfigError("config: concurrency must be >= 1");
    if (answer_tolerance < 0.0) throw ConfigError("config: answer_tolerance must be >= 0");

    auto has_dim = [&](Dimension d) {
        return std::find(dimensions.begin(), dimensions.end(), d) != dimensions.end();
    };
    auto lang_covered = [&](Lang l) {
        return std::any_of(datasets.begin(), datasets.end(),
                           [&](const DatasetRef& r) { return r.language == l; });
    };
    if ((has_dim(Dimension::Order) || has_dim(Dimension::Phrasing) || mrc || path_scaling) &&
        !lang_covered(Lang::EN))
        throw ConfigError("config: order/phrasing paths present the English problem; an EN dataset is required");
    if (has_dim(Dimension::Language) || mrc || path_scaling) {
        auto langs = clc_effective_languages();
        if (langs.empty() && has_dim(Dimension::Language))
            throw ConfigError("config: clc enabled but no languages remain after exclusions");
        for (Lang l : langs)
            if (!lang_covered(l))
                throw ConfigError("config: no dataset for clc language '" + std::string(to_string(l)) + "'");
    }
    if (has_dim(Dimension::Phrasing) && cpc_settings.empty())
        throw ConfigError("config: cpc enabled but cpc_settings is empty");
    {
        std::set<std::string> seen;
        for (PhrasingSetting s : cpc_settings)
            if (!seen.insert(std::string(to_string(s))).second)
                throw ConfigError("config: duplicate cpc setting");
    }
    if (cache_mode == CacheMode::Replay) {
        if (cache_dir.empty())
            throw ConfigError("config: replay mode requires cache_dir");
        if (!std::filesystem::is_directory(cache_dir))
            throw ConfigError("config: replay mode requires an existing cache directory, got '" +
                              cache_dir + "'");
    }
    if (path_scaling) {
        if (sampling.temperature <= 0.0)
            throw ConfigError("config: path scaling needs temperature > 0");
        if (path_counts.empty()) throw ConfigError("config: path scaling needs path_counts");
        int prev = 0;
        for (int n : path_counts) {
            if (n <= prev) throw ConfigError("config: path_counts must be ascending positive");
            prev = n;
        }
        int langs = static_cast<int>(clc_effective_languages().size());
        if (langs == 0) throw ConfigError("config: path scaling needs clc languages");
        for (int n : path_counts)
            if (n % langs != 0)
                throw ConfigError("config: path count " + std::to_string(n) + " is not divisible by " +
                                  std::to_string(langs) + " languages (N/" + std::to_string(langs) +
                                  " samples per language)");
    }
}

Runner::Runner(RunConfig config, std::filesystem::path run_dir, std::shared_ptr<Transport> transport)
    : cfg_(std::move(config)), run_dir_(std::move(run_dir)), transport_override_(std::move(transport)) {
    cfg_.validate();
    if (cfg_.cache_dir.empty()) cfg_.cache_dir = (run_dir_ / "cache").string();
}

void Runner::load_inputs() {
    if (!problems_.empty()) return;

    templates_ = TemplateSet::load(cfg_.templates_dir, cfg_.languages_file);
    anchors_ = templates_.anchor_table();

    // Banks: every language any path may touch.
    std::set<Lang> needed{Lang::EN};
    for (Lang l : cfg_.clc_effective_languages()) needed.insert(l);
    for (Lang l : needed) {
        auto path = std::filesystem::path(cfg_.banks_dir) / (std::string(to_string(l)) + ".txt");
        banks_[l] = load_exemplar_bank(path, l);
    }

    // Datasets: per-language files of one problem set, aligned by row.
    std::vector<Dataset> loaded;
    for (const auto& ref : cfg_.datasets) {
        Dataset ds = load_dataset(ref.path, ref.format, ref.language, ref.name, ref.split);
        dataset_hashes_[ds.name + ":" + std::string(to_string(ref.language))] =
            sha256_hex(read_file(ref.path));
        loaded.push_back(std::move(ds));
    }
    for (const auto& ds : loaded) {
        if (ds.name != loaded.front().name)
            throw ConfigError("config: multilingual alignment needs a shared dataset name, got '" +
                              ds.name + "' vs '" + loaded.front().name + "'");
        if (ds.problems.size() != loaded.front().problems.size())
            throw ConfigError("dataset " + ds.name + ": row count differs between language files");
    }
    size_t count = loaded.front().problems.size();
    if (cfg_.max_problems > 0) count = std::min(count, static_cast<size_t>(cfg_.max_problems));
    for (size_t row = 0; row < count; ++row) {
        ProblemEntry entry;
        entry.id = loaded.front().problems[row].id;
        entry.gold = loaded.front().problems[row].gold_answer;
        for (const auto& ds : loaded) {
            const MathProblem& p = ds.problems[row];
            if (!(p.gold_answer == entry.gold))
                throw ConfigError("dataset " + ds.name + ": gold answer for row " + std::to_string(row) +
                                  " differs between language files");
            entry.question_by_lang[ds.language] = p.question;
        }
        problems_.push_back(std::move(entry));
    }

    build_client();
}

void Runner::build_client() {
    ClientOptions opts;
    opts.model = cfg_.model;
    opts.mode = cfg_.cache_mode;
    opts.retry.max_attempts = cfg_.retry_attempts;
    opts.template_version = templates_.version();
    opts.endpoint_supports_top_k = cfg_.endpoint_supports_top_k;

    auto cache = std::make_shared<ResponseCache>(cfg_.cache_dir);
    std::shared_ptr<Transport> transport = transport_override_;
    if (!transport && cfg_.cache_mode != CacheMode::Replay) {
        std::string endpoint = cfg_.endpoint;
        if (endpoint.empty()) {
            const char* env = std::getenv("MRC_BASE_URL");
            if (env) endpoint = env;
        }
        if (endpoint.empty())
            throw ConfigError("no endpoint configured: set 'endpoint' in the config or MRC_BASE_URL");
        if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0)
            throw ConfigError("endpoint must start with http:// or https://, got '" + endpoint + "'");
        const char* key = std::getenv("MRC_API_KEY");
        if (!key)
            throw ConfigError("environment variable MRC_API_KEY is required in " +
                              std::string(to_string(cfg_.cache_mode)) + " mode");
        transport = std::make_shared<HttpTransport>(endpoint, key);
    }
    client_ = std::make_unique<LlmClient>(std::move(transport), std::move(cache), std::move(opts));
}

std::vector<VariationSpec> Runner::dimension_specs(Dimension dim) const {
    std::vector<VariationSpec> base;
    switch (dim) {
        case Dimension::Order: {
            try {
                base = gen_order_specs(banks_.at(Lang::EN), cfg_.coc_k, cfg_.seed);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            break;
        }
        case Dimension::Phrasing:
            for (PhrasingSetting s : cfg_.cpc_settings) base.push_back(VariationSpec::phrasing(s));
            break;
        case Dimension::Language:
            for (Lang l : cfg_.clc_effective_languages()) base.push_back(VariationSpec::lang(l));
            break;
    }
    if (cfg_.samples_per_path <= 1) return base;
    std::vector<VariationSpec> tagged;
    for (const auto& spec : base)
        for (int s = 0; s < cfg_.samples_per_path; ++s) {
            VariationSpec t = spec;
            t.sample = s;
            tagged.push_back(std::move(t));
        }
    return tagged;
}

void Runner::ensure_traces(const std::vector<VariationSpec>& specs, const SamplingParams& sampling) {
    load_inputs();
    std::vector<std::function<void()>> tasks;
    std::mutex store_mu;
    for (const auto& entry : problems_) {
        for (const auto& spec : specs) {
            std::string sid = spec.spec_id();
            if (store_.count({entry.id, sid})) continue;
            tasks.push_back([this, &entry, spec, sampling, &store_mu] {
                Lang l = spec.dimension == Dimension::Language ? *spec.language : Lang::EN;
                MathProblem problem = entry.in_language(l);
                PromptPlan plan = build_plan(spec, problem, banks_, templates_);
                auto traces = run_plan(*client_, plan, problem, sampling, 1, anchors_,
                                       templates_.markers(), cfg_.seed);
                std::lock_guard lock(store_mu);
                for (auto& t : traces) store_[{entry.id, t.spec.spec_id()}] = std::move(t);
            });
        }
    }
    parallel_run(cfg_.concurrency, tasks);
}

const SolutionTrace& Runner::trace_for(const std::string& problem_id, const std::string& spec_id) const {
    auto it = store_.find({problem_id, spec_id});
    if (it == store_.end())
        throw std::logic_error("missing trace for " + problem_id + " / " + spec_id);
    return it->second;
}

std::map<std::string, NumericAnswer> Runner::gold_map() const {
    std::map<std::string, NumericAnswer> gold;
    for (const auto& e : problems_) gold[e.id] = e.gold;
    return gold;
}

DimensionOutcome Runner::run_dimension(Dimension dim) {
    load_inputs();
    auto specs = dimension_specs(dim);
    ensure_traces(specs, cfg_.sampling);

    DimensionOutcome out;
    out.dimension = dim;
    for (const auto& s : specs) out.spec_ids.push_back(s.spec_id());

    const auto gold = gold_map();
    for (const auto& sid : out.spec_ids) {
        std::vector<SolutionTrace> traces;
        for (const auto& e : problems_) traces.push_back(trace_for(e.id, sid));
        out.per_variation_accuracy[sid] = accuracy(traces, gold, cfg_.answer_tolerance);
    }

    std::vector<SolutionSet> sets;
    for (const auto& e : problems_) {
        SolutionSet set;
        set.problem_id = e.id;
        for (const auto& sid : out.spec_ids) set.traces.push_back(trace_for(e.id, sid));
        sets.push_back(std::move(set));
    }
    for (const auto& set : sets) out.votes.push_back(majority_vote(set, cfg_.answer_tolerance));
    out.voted_accuracy = accuracy(out.votes, gold, cfg_.answer_tolerance);
    out.rc = compute_rc(sets, cfg_.answer_tolerance);

    if (dim == Dimension::Order && out.spec_ids.size() >= 2) {
        std::vector<double> per_order;
        for (const auto& sid : out.spec_ids) per_order.push_back(out.per_variation_accuracy[sid]);
        out.order_summary = summarize_orders(per_order, out.voted_accuracy);
    }
    return out;
}

MrcOutcome Runner::run_mrc() {
    load_inputs();
    auto specs = compose_mrc_specs(banks_, templates_, cfg_.coc_k, cfg_.cpc_settings,
                                   cfg_.clc_languages, cfg_.clc_exclusions, cfg_.seed);
    ensure_traces(specs, cfg_.sampling);

    MrcOutcome out;
    out.paths_per_problem = static_cast<int>(specs.size());

    const auto gold = gold_map();
    std::vector<SolutionSet> sets;
    std::vector<VoteResult> votes;
    for (const auto& e : problems_) {
        SolutionSet set;
        set.problem_id = e.id;
        for (const auto& s : specs) set.traces.push_back(trace_for(e.id, s.spec_id()));
        votes.push_back(majority_vote(set, cfg_.answer_tolerance));
        sets.push_back(std::move(set));
    }
    out.voted_accuracy = accuracy(votes, gold, cfg_.answer_tolerance);
    out.rc = compute_rc(sets, cfg_.answer_tolerance);
    return out;
}

ScalingOutcome Runner::run_path_scaling() {
    load_inputs();
    if (cfg_.sampling.temperature <= 0.0)
        throw ConfigError("path scaling needs temperature > 0");

    ScalingOutcome out;
    out.languages = cfg_.clc_effective_languages();
    const auto gold = gold_map();
    const std::vector<int> identity = [&] {
        std::vector<int> p(static_cast<size_t>(banks_.at(Lang::EN).size()));
        for (size_t i = 0; i < p.size(); ++i) p[i] = static_cast<int>(i);
        return p;
    }();

    // Local per-arm stores: the same spec id at a different temperature is a
    // different experiment, so scaling never shares traces with the
    // dimension runs (the response cache still dedups identical requests).
    using Key = std::pair<std::string, std::string>;
    auto collect = [&](const std::vector<VariationSpec>& specs, const SamplingParams& sampling,
                       std::map<Key, SolutionTrace>& store) {
        std::vector<std::function<void()>> tasks;
        std::mutex mu;
        for (const auto& entry : problems_) {
            for (const auto& spec : specs) {
                if (store.count({entry.id, spec.spec_id()})) continue;
                tasks.push_back([this, &entry, spec, sampling, &store, &mu] {
                    Lang l = spec.dimension == Dimension::Language ? *spec.language : Lang::EN;
                    MathProblem problem = entry.in_language(l);
                    PromptPlan plan = build_plan(spec, problem, banks_, templates_);
                    auto traces = run_plan(*client_, plan, problem, sampling, 1, anchors_,
                                           templates_.markers(), cfg_.seed);
                    std::lock_guard lock(mu);
                    store[{entry.id, traces[0].spec.spec_id()}] = std::move(traces[0]);
                });
            }
        }
        parallel_run(cfg_.concurrency, tasks);
    };
    auto vote_accuracy = [&](const std::vector<VariationSpec>& specs,
                             const std::map<Key, SolutionTrace>& store) {
        std::vector<VoteResult> votes;
        for (const auto& e : problems_) {
            SolutionSet set;
            set.problem_id = e.id;
            for (const auto& s : specs) set.traces.push_back(store.at({e.id, s.spec_id()}));
            votes.push_back(majority_vote(set, cfg_.answer_tolerance));
        }
        return accuracy(votes, gold, cfg_.answer_tolerance);
    };

    // Greedy baseline: one deterministic English path, identity order.
    {
        SamplingParams greedy;
        greedy.max_tokens = cfg_.sampling.max_tokens;
        std::map<Key, SolutionTrace> store;
        std::vector<VariationSpec> spec{VariationSpec::order(identity)};
        collect(spec, greedy, store);
        std::vector<SolutionTrace> traces;
        for (const auto& e : problems_) traces.push_back(store.at({e.id, spec[0].spec_id()}));
        out.greedy_accuracy = accuracy(traces, gold, cfg_.answer_tolerance);
    }

    // Self-consistency arm: N sampled English paths on the vanilla prompt.
    {
        std::map<Key, SolutionTrace> store;
        for (int n : cfg_.path_counts) {
            std::vector<VariationSpec> specs;
            specs.reserve(static_cast<size_t>(n));
            for (int s = 0; s < n; ++s) specs.push_back(VariationSpec::order(identity, s));
            collect(specs, cfg_.sampling, store);
            out.self_consistency.push_back({n, vote_accuracy(specs, store)});
        }
    }

    // Cross-lingual arm: N/L sampled paths per language.
    {
        const int L = static_cast<int>(out.languages.size());
        std::map<Key, SolutionTrace> store;
        for (int n : cfg_.path_counts) {
            if (n % L != 0)
                throw ConfigError("path count " + std::to_string(n) + " is not divisible by " +
                                  std::to_string(L) + " languages");
            std::vector<VariationSpec> specs;
            specs.reserve(static_cast<size_t>(n));
            for (Lang l : out.languages)
                for (int s = 0; s < n / L; ++s) specs.push_back(VariationSpec::lang(l, s));
            collect(specs, cfg_.sampling, store);
            out.clc.push_back({n, vote_accuracy(specs, store)});
        }
    }
    return out;
}

bool Runner::execute() {
    auto t0 = std::chrono::steady_clock::now();
    load_inputs();

    metrics_ = json{{"model", cfg_.model},
                    {"n_problems", problems_.size()},
                    {"answer_tolerance", cfg_.answer_tolerance},
                    {"dimensions", json::object()}};

    for (Dimension dim : cfg_.dimensions) {
        std::fprintf(stderr, "[run] dimension %s\n", std::string(to_string(dim)).c_str());
        DimensionOutcome out = run_dimension(dim);
        metrics_["dimensions"][std::string(to_string(dim))] = dimension_to_json(out);
    }
    if (cfg_.mrc) {
        std::fprintf(stderr, "[run] mrc composition\n");
        MrcOutcome out = run_mrc();
        json dim_voted = json::object();
        for (const auto& [name, dj] : metrics_["dimensions"].items())
            dim_voted[name] = dj["voted_accuracy"];
        metrics_["mrc"] = json{{"paths_per_problem", out.paths_per_problem},
                               {"voted_accuracy", out.voted_accuracy},
                               {"rc", rc_to_json(out.rc)},
                               {"dimension_voted", dim_voted}};
    }
    if (cfg_.path_scaling) {
        std::fprintf(stderr, "[run] path scaling\n");
        ScalingOutcome out = run_path_scaling();
        json sc = json::array(), clc = json::array(), langs = json::array();
        for (const auto& p : out.self_consistency)
            sc.push_back(json{{"paths", p.paths}, {"accuracy", p.accuracy}});
        for (const auto& p : out.clc) clc.push_back(json{{"paths", p.paths}, {"accuracy", p.accuracy}});
        for (Lang l : out.languages) langs.push_back(std::string(to_string(l)));
        metrics_["path_scaling"] = json{{"greedy_accuracy", out.greedy_accuracy},
                                        {"temperature", cfg_.sampling.temperature},
                                        {"self_consistency", sc},
                                        {"clc", clc},
                                        {"languages", langs}};
        if (cfg_.sampling.top_k) metrics_["path_scaling"]["top_k"] = *cfg_.sampling.top_k;
    }

    wall_s_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs();

    std::set<std::string> with_traces;
    for (const auto& [key, _] : store_) with_traces.insert(key.first);
    bool all_covered = true;
    for (const auto& e : problems_)
        if (!with_traces.count(e.id)) all_covered = false;
    // A scaling-only run keeps its traces in arm-local stores; coverage is
    // then implied by the accuracy computations above having completed.
    if (store_.empty() && cfg_.path_scaling) all_covered = true;
    return all_covered;
}

void Runner::write_outputs() {
    std::filesystem::create_directories(run_dir_);

    std::vector<json> trace_records;
    json trace_keys = json::object();
    json spec_ids = json::array();
    {
        std::set<std::string> seen_specs;
        for (const auto& [key, trace] : store_) {  // std::map: already sorted by (problem, spec)
            trace_records.push_back(to_json(trace));
            if (!trace.cache_keys.empty()) trace_keys[key.first + "|" + key.second] = trace.cache_keys;
            if (seen_specs.insert(key.second).second) spec_ids.push_back(key.second);
        }
    }
    write_jsonl(run_dir_ / "traces.jsonl", trace_records);

    Usage usage = client_ ? client_->total_usage() : Usage{};
    manifest_ = json{{"config", cfg_.to_json()},
                     {"template_version", templates_.version()},
                     {"dataset_hashes", dataset_hashes_},
                     {"spec_ids", spec_ids},
                     {"trace_cache_keys", trace_keys},
                     {"n_problems", problems_.size()},
                     {"totals",
                      {{"wall_s", wall_s_},
                       {"prompt_tokens", usage.prompt_tokens},
                       {"completion_tokens", usage.completion_tokens},
                       {"total_tokens", usage.total_tokens}}}};
    write_file(run_dir_ / "manifest.json", manifest_.dump(2) + "\n");
    write_file(run_dir_ / "metrics.json", metrics_.dump(2) + "\n");
}

json rescore_traces(std::vector<SolutionTrace> traces,
                    const std::map<std::string, NumericAnswer>& gold, const AnchorTable& anchors,
                    double tolerance) {
    if (traces.empty()) throw std::invalid_argument("rescore: no traces");

    std::map<std::string, int> status_counts{{"ok", 0}, {"no_number_found", 0}, {"parse_error", 0}};
    for (auto& t : traces) {
        if (static_cast<int>(t.generations.size()) < expected_stage_count(t.spec)) {
            // The run never finished this plan's stages (rewrite parse
            // failure); the final solve output does not exist to rescore.
            t.extraction_status = ExtractionStatus::ParseError;
            t.extracted_answer.reset();
        } else {
            Lang l = t.spec.language.value_or(Lang::EN);
            auto ex = extract_answer(t.generations.back(), l, anchors);
            t.extraction_status = ex.status;
            t.extracted_answer = ex.answer;
        }
        status_counts[std::string(to_string(t.extraction_status))]++;
    }

    // Regroup per dimension and overall.
    json out{{"n_traces", traces.size()}, {"extraction_status_counts", status_counts}};
    auto score_group = [&](const std::vector<SolutionTrace>& group) -> json {
        std::map<std::string, SolutionSet> by_problem;
        for (const auto& t : group) {
            by_problem[t.problem_id].problem_id = t.problem_id;
            by_problem[t.problem_id].traces.push_back(t);
        }
        std::vector<SolutionSet> sets;
        std::vector<VoteResult> votes;
        for (auto& [pid, set] : by_problem) {
            votes.push_back(majority_vote(set, tolerance));
            sets.push_back(std::move(set));
        }
        json j{{"n_problems", sets.size()}, {"voted_accuracy", accuracy(votes, gold, tolerance)}};
        bool same_n = std::all_of(sets.begin(), sets.end(),
                                  [&](const SolutionSet& s) { return s.n() == sets.front().n(); });
        if (same_n) {
            RCScore rc = compute_rc(sets, tolerance);
            j["rc_mean"] = rc.mean;
            j["n"] = rc.n;
        }
        return j;
    };

    json dims = json::object();
    for (Dimension d : {Dimension::Order, Dimension::Phrasing, Dimension::Language}) {
        std::vector<SolutionTrace> group;
        for (const auto& t : traces)
            if (t.spec.dimension == d) group.push_back(t);
        if (!group.empty()) dims[std::string(to_string(d))] = score_group(group);
    }
    out["dimensions"] = dims;
    out["overall"] = score_group(traces);
    return out;
}

}  // namespace mrc
