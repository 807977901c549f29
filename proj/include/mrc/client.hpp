#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mrc/extraction.hpp"
#include "mrc/prompt.hpp"
#include "mrc/types.hpp"

namespace mrc {

// temperature 0 means greedy decoding (the default); top_k is only sent to
// endpoints that advertise support for it. `seed` keeps repeated sampled
// paths distinct under content addressing and is forwarded to the endpoint.
struct SamplingParams {
    double temperature = 0.0;
    std::optional<int> top_k;
    int max_tokens = 1024;
    std::optional<std::uint64_t> seed;
};

struct CompletionRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    SamplingParams sampling;
};

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t total_tokens = 0;
};

struct CompletionResponse {
    std::string text;
    std::string finish_reason;
    Usage usage;
    double latency_s = 0.0;
};

struct CacheEntry {
    std::string request_hash;
    nlohmann::json request;  // echo of the request body, for audit
    CompletionResponse response;
    std::string recorded_at;  // ISO-8601 UTC
};

enum class CacheMode { Live, Record, Replay };

constexpr std::string_view to_string(CacheMode m) {
    switch (m) {
        case CacheMode::Live: return "live";
        case CacheMode::Record: return "record";
        case CacheMode::Replay: return "replay";
    }
    return "??";
}

inline std::optional<CacheMode> cache_mode_from_string(std::string_view s) {
    if (s == "live") return CacheMode::Live;
    if (s == "record") return CacheMode::Record;
    if (s == "replay") return CacheMode::Replay;
    return std::nullopt;
}

// Content-addressed hash of (model, messages, sampling) plus the template
// version string, so edited prompt templates never serve stale cache hits.
std::string request_hash(const CompletionRequest& req, const std::string& template_version);

// JSON body in the chat-completions wire format. top_k is included only
// when `send_top_k` is set.
nlohmann::json request_body(const CompletionRequest& req, bool send_top_k);

// Raw HTTP boundary, swappable for test doubles and the fixture generator.
class Transport {
public:
    virtual ~Transport() = default;
    struct Result {
        int status = 0;
        std::string body;
        std::string error;  // non-empty on connection-level failure
    };
    virtual Result post_chat(const std::string& body_json) = 0;
};

// POSTs to <base_url>/chat/completions with a bearer token.
class HttpTransport : public Transport {
public:
    HttpTransport(const std::string& base_url, std::string api_key, int timeout_s = 120);
    Result post_chat(const std::string& body_json) override;

private:
    std::string host_;  // scheme://host[:port]
    std::string path_prefix_;
    std::string api_key_;
    int timeout_s_;
};

// One file per request hash under a run-scoped directory. Entries are
// immutable once written; writes go through a temp file and an atomic
// rename, so a killed run never leaves a corrupt entry.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);
    std::optional<CacheEntry> lookup(const std::string& hash) const;
    void store(const CacheEntry& entry);  // keeps the existing entry if present
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::filesystem::path path_for(const std::string& hash) const;
};

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds initial_delay{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{16000};
};

class ReplayMissError : public std::runtime_error {
public:
    explicit ReplayMissError(const std::string& hash)
        : std::runtime_error("replay miss: no cache entry for request " + hash +
                             " (replay mode never touches the network)") {}
};

struct ClientOptions {
    std::string model;
    CacheMode mode = CacheMode::Record;
    RetryPolicy retry;
    std::string template_version;
    bool endpoint_supports_top_k = false;
    // Injectable for tests; defaults to a real sleep.
    std::function<void(std::chrono::milliseconds)> sleep;
};

// Executes requests against a Transport with retries, content-addressed
// caching and record/replay. Shareable across workers: the cache does
// atomic writes and identical in-flight requests are collapsed to one call.
class LlmClient {
public:
    LlmClient(std::shared_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache,
              ClientOptions options);

    CompletionResponse complete(const CompletionRequest& request);

    std::string hash_of(const CompletionRequest& request) const;
    CacheMode mode() const { return options_.mode; }
    const std::string& model() const { return options_.model; }
    const std::string& template_version() const { return options_.template_version; }

    // Aggregate usage across every completed call (cache hits included).
    Usage total_usage() const;

private:
    CompletionResponse network_call(const CompletionRequest& request);
    CompletionResponse cached_or_network(const std::string& hash, const CompletionRequest& request);

    std::shared_ptr<Transport> transport_;
    std::shared_ptr<ResponseCache> cache_;
    ClientOptions options_;

    mutable std::mutex mu_;
    std::map<std::string, std::shared_future<CompletionResponse>> in_flight_;
    Usage usage_;
    bool warned_top_k_ = false;
};

// Runs a prompt plan end to end: stages in order, the parsed stage-1
// rewrite feeding consuming stages, one trace per sample. Stage parse
// failures yield a ParseError trace; they never abort the batch.
std::vector<SolutionTrace> run_plan(LlmClient& client, const PromptPlan& plan, const MathProblem& problem,
                                    const SamplingParams& sampling, int samples_per_stage,
                                    const AnchorTable& anchors, const RewriteMarkers& markers,
                                    std::uint64_t run_seed);

}  // namespace mrc
