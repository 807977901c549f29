#include "mrc/client.hpp"

#include <atomic>
#include <cstdio>
#include <thread>

#include <unistd.h>

#include <httplib.h>

#include "mrc/serde.hpp"
#include "mrc/templates.hpp"

namespace mrc {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json to_json(const CompletionResponse& r) {
    return nlohmann::json{{"text", r.text},
                          {"finish_reason", r.finish_reason},
                          {"usage",
                           {{"prompt_tokens", r.usage.prompt_tokens},
                            {"completion_tokens", r.usage.completion_tokens},
                            {"total_tokens", r.usage.total_tokens}}},
                          {"latency_s", r.latency_s}};
}

CompletionResponse response_from_json(const nlohmann::json& j) {
    CompletionResponse r;
    r.text = j.at("text").get<std::string>();
    r.finish_reason = j.value("finish_reason", std::string{});
    if (j.contains("usage")) {
        const auto& u = j["usage"];
        r.usage.prompt_tokens = u.value("prompt_tokens", std::int64_t{0});
        r.usage.completion_tokens = u.value("completion_tokens", std::int64_t{0});
        r.usage.total_tokens = u.value("total_tokens", std::int64_t{0});
    }
    r.latency_s = j.value("latency_s", 0.0);
    return r;
}

nlohmann::json to_json(const CacheEntry& e) {
    return nlohmann::json{{"request_hash", e.request_hash},
                          {"request", e.request},
                          {"response", to_json(e.response)},
                          {"recorded_at", e.recorded_at}};
}

CacheEntry entry_from_json(const nlohmann::json& j) {
    CacheEntry e;
    e.request_hash = j.at("request_hash").get<std::string>();
    e.request = j.value("request", nlohmann::json::object());
    e.response = response_from_json(j.at("response"));
    e.recorded_at = j.value("recorded_at", std::string{});
    return e;
}

}  // namespace

nlohmann::json request_body(const CompletionRequest& req, bool send_top_k) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json body{{"model", req.model},
                        {"messages", std::move(messages)},
                        {"temperature", req.sampling.temperature},
                        {"max_tokens", req.sampling.max_tokens}};
    if (send_top_k && req.sampling.top_k) body["top_k"] = *req.sampling.top_k;
    if (req.sampling.seed) body["seed"] = *req.sampling.seed;
    return body;
}

std::string request_hash(const CompletionRequest& req, const std::string& template_version) {
    // Hash over the full request intent (top_k included even when the
    // endpoint won't receive it) plus the template version.
    nlohmann::json j = request_body(req, /*send_top_k=*/true);
    j["template_version"] = template_version;
    return sha256_hex(j.dump());
}

HttpTransport::HttpTransport(const std::string& base_url, std::string api_key, int timeout_s)
    : api_key_(std::move(api_key)), timeout_s_(timeout_s) {
    size_t scheme = base_url.find("://");
    size_t slash = scheme == std::string::npos ? base_url.find('/')
                                               : base_url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        host_ = base_url;
    } else {
        host_ = base_url.substr(0, slash);
        path_prefix_ = base_url.substr(slash);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

Transport::Result HttpTransport::post_chat(const std::string& body_json) {
    httplib::Client cli(host_);
    cli.set_connection_timeout(timeout_s_);
    cli.set_read_timeout(timeout_s_);
    cli.set_write_timeout(timeout_s_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body_json, "application/json");
    Result out;
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& hash) const {
    return dir_ / (hash + ".json");
}

std::optional<CacheEntry> ResponseCache::lookup(const std::string& hash) const {
    auto path = path_for(hash);
    if (!std::filesystem::exists(path)) return std::nullopt;
    return entry_from_json(nlohmann::json::parse(read_file(path)));
}

void ResponseCache::store(const CacheEntry& entry) {
    auto path = path_for(entry.request_hash);
    if (std::filesystem::exists(path)) return;  // entries are immutable
    static std::atomic<std::uint64_t> counter{0};
    auto tmp = path;
    tmp += ".tmp." + std::to_string(counter.fetch_add(1)) + "." +
           std::to_string(static_cast<std::uint64_t>(::getpid()));
    write_file(tmp, to_json(entry).dump(2) + "\n");
    std::filesystem::rename(tmp, path);  // atomic within a filesystem
}

LlmClient::LlmClient(std::shared_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache,
                     ClientOptions options)
    : transport_(std::move(transport)), cache_(std::move(cache)), options_(std::move(options)) {
    if (!cache_) throw std::invalid_argument("LlmClient needs a cache");
    if (options_.mode != CacheMode::Replay && !transport_)
        throw std::invalid_argument("LlmClient needs a transport outside replay mode");
    if (!options_.sleep)
        options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string LlmClient::hash_of(const CompletionRequest& request) const {
    return request_hash(request, options_.template_version);
}

Usage LlmClient::total_usage() const {
    std::lock_guard lock(mu_);
    return usage_;
}

CompletionResponse LlmClient::complete(const CompletionRequest& request) {
    const std::string hash = hash_of(request);

    if (options_.mode != CacheMode::Live) {
        if (auto entry = cache_->lookup(hash)) {
            std::lock_guard lock(mu_);
            usage_.prompt_tokens += entry->response.usage.prompt_tokens;
            usage_.completion_tokens += entry->response.usage.completion_tokens;
            usage_.total_tokens += entry->response.usage.total_tokens;
            return entry->response;
        }
        if (options_.mode == CacheMode::Replay) throw ReplayMissError(hash);
    }
    return cached_or_network(hash, request);
}

// Collapses concurrent identical requests onto one network call; the
// followers wait for the leader's result.
CompletionResponse LlmClient::cached_or_network(const std::string& hash,
                                                const CompletionRequest& request) {
    std::shared_ptr<std::promise<CompletionResponse>> my_promise;
    std::shared_future<CompletionResponse> fut;
    {
        std::lock_guard lock(mu_);
        auto it = in_flight_.find(hash);
        if (it != in_flight_.end()) {
            fut = it->second;
        } else {
            my_promise = std::make_shared<std::promise<CompletionResponse>>();
            in_flight_[hash] = my_promise->get_future().share();
        }
    }
    if (!my_promise) return fut.get();

    try {
        CompletionResponse resp = network_call(request);
        CacheEntry entry;
        entry.request_hash = hash;
        entry.request = request_body(request, /*send_top_k=*/true);
        entry.response = resp;
        entry.recorded_at = iso8601_now();
        cache_->store(entry);
        {
            std::lock_guard lock(mu_);
            usage_.prompt_tokens += resp.usage.prompt_tokens;
            usage_.completion_tokens += resp.usage.completion_tokens;
            usage_.total_tokens += resp.usage.total_tokens;
            in_flight_.erase(hash);
        }
        my_promise->set_value(resp);
        return resp;
    } catch (...) {
        {
            std::lock_guard lock(mu_);
            in_flight_.erase(hash);
        }
        my_promise->set_exception(std::current_exception());
        throw;
    }
}

CompletionResponse LlmClient::network_call(const CompletionRequest& request) {
    bool send_top_k = options_.endpoint_supports_top_k;
    if (request.sampling.top_k && !send_top_k) {
        std::lock_guard lock(mu_);
        if (!warned_top_k_) {
            warned_top_k_ = true;
            std::fprintf(stderr,
                         "warning: top_k requested but endpoint_supports_top_k is off; omitting it\n");
        }
    }
    const std::string body = request_body(request, send_top_k).dump();

    auto delay = options_.retry.initial_delay;
    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, options_.retry.max_attempts); ++attempt) {
        if (attempt > 0) {
            options_.sleep(delay);
            auto next = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(delay.count()) * options_.retry.multiplier));
            delay = std::min(next, options_.retry.max_delay);
        }
        auto t0 = std::chrono::steady_clock::now();
        Transport::Result res = transport_->post_chat(body);
        double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (!res.error.empty()) {
            last_error = "connection error: " + res.error;
            continue;  // transient
        }
        if (res.status == 408 || res.status == 429 || res.status >= 500) {
            last_error = "HTTP " + std::to_string(res.status);
            continue;  // transient
        }
        if (res.status != 200) {
            throw std::runtime_error("chat completion failed: HTTP " + std::to_string(res.status) +
                                     ": " + res.body.substr(0, 300));
        }

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(res.body);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(std::string("malformed completion response: ") + e.what());
        }
        if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty() ||
            !j["choices"][0].contains("message"))
            throw std::runtime_error("completion response has no choices[0].message");

        CompletionResponse out;
        out.text = j["choices"][0]["message"].value("content", std::string{});
        out.finish_reason = j["choices"][0].value("finish_reason", std::string{});
        if (j.contains("usage")) {
            out.usage.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
            out.usage.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
            out.usage.total_tokens = j["usage"].value("total_tokens", std::int64_t{0});
        }
        out.latency_s = latency;
        return out;
    }
    throw std::runtime_error("chat completion failed after " +
                             std::to_string(options_.retry.max_attempts) + " attempts; last: " +
                             last_error);
}

std::vector<SolutionTrace> run_plan(LlmClient& client, const PromptPlan& plan, const MathProblem& problem,
                                    const SamplingParams& sampling, int samples_per_stage,
                                    const AnchorTable& anchors, const RewriteMarkers& markers,
                                    std::uint64_t run_seed) {
    if (samples_per_stage < 1) throw std::invalid_argument("run_plan: samples_per_stage must be >= 1");

    std::vector<SolutionTrace> traces;
    for (int s = 0; s < samples_per_stage; ++s) {
        SolutionTrace trace;
        trace.problem_id = problem.id;
        trace.spec = plan.spec;
        if (samples_per_stage > 1) trace.spec.sample = s;

        bool stage_failed = false;
        for (size_t stage_idx = 0; stage_idx < plan.stages.size(); ++stage_idx) {
            const PromptStage& stage = plan.stages[stage_idx];
            std::vector<ChatMessage> messages = stage.messages;

            if (stage.consumes_previous) {
                if (trace.generations.empty()) throw std::logic_error("stage 0 cannot consume previous output");
                auto rewrite = extract_rewritten_question(trace.generations.back(),
                                                          *plan.spec.phrasing_setting, markers);
                if (rewrite.status != ExtractionStatus::Ok) {
                    trace.extraction_status = ExtractionStatus::ParseError;
                    stage_failed = true;
                    break;
                }
                for (auto& m : messages)
                    m.content = render_template(m.content, {{"rewritten_question", rewrite.text}});
            }

            CompletionRequest req;
            req.model = client.model();
            req.messages = std::move(messages);
            req.sampling = sampling;
            if (sampling.temperature > 0.0 && !req.sampling.seed) {
                req.sampling.seed = fnv1a64(std::to_string(run_seed) + "|" + trace.spec.spec_id() + "|" +
                                            problem.id + "|" + std::to_string(stage_idx));
            }
            trace.cache_keys.push_back(client.hash_of(req));
            trace.generations.push_back(client.complete(req).text);
        }

        if (!stage_failed) {
            auto ex = extract_answer(trace.generations.back(), plan.language, anchors);
            trace.extraction_status = ex.status;
            trace.extracted_answer = ex.answer;
        }
        traces.push_back(std::move(trace));
    }
    return traces;
}

}  // namespace mrc
