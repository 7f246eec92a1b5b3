#pragma once

#include "gabm/domain.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>

namespace gabm {

struct CompletionRequest {
    std::string prompt;
    double temperature = 0.0;
    std::string model_id;
    int max_reply_tokens = 1024;
};

struct LiveBackend {
    std::string endpoint_url;                 // chat-completions base, e.g. https://host/v1
    std::string api_key_env = "GABM_API_KEY"; // name of the variable holding the key, never the key
};

struct ScriptedBackend {
    std::uint64_t seed = 0;
};

struct BackendKind;

struct ReplayBackend {
    std::filesystem::path cache_path;
    std::shared_ptr<const BackendKind> fallback; // null: misses are errors, no network access
};

struct BackendKind {
    std::variant<LiveBackend, ScriptedBackend, ReplayBackend> spec;

    static BackendKind live(std::string endpoint_url);
    static BackendKind scripted(std::uint64_t seed);
    static BackendKind replay(std::filesystem::path cache_path, std::optional<BackendKind> fallback = std::nullopt);

    std::string describe() const;
};

struct RetryPolicy {
    int max_attempts = 6;
    std::chrono::milliseconds base_delay{2000};
    double backoff_factor = 2.0;
    std::chrono::milliseconds max_delay{60000};
    std::set<int> retryable_statuses{429, 500, 502, 503};

    /// Wait before attempt k+1 after the k-th failed attempt: base * factor^(k-1), capped at max_delay.
    std::chrono::milliseconds delay(int k) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Digest over (model_id, temperature with two decimals, prompt bytes), hex encoded.
std::string cache_key(const CompletionRequest& req);

class Completer {
public:
    virtual ~Completer() = default;
    virtual std::string complete(const CompletionRequest& req) = 0;
};

// ---- scripted persona oracle --------------------------------------------------

/// Probability that an agent of the given tier follows yesterday's majority.
double follow_probability(std::optional<ConformityTier> tier);

/// Uniform draw in [0, 1) used by the scripted oracle for one agent on one day:
/// std::mt19937_64 seeded with digest_u64("scripted:<seed>:<sha256_hex(name)>:<day>"), first output.
double scripted_draw(std::uint64_t seed, std::string_view agent_name, int day);

/// Facts the oracle recovers from a prompt by inverse templating.
struct OracleView {
    std::string agent_name;
    std::optional<ConformityTier> tier;
    int day = 0;
    ShirtColor own_prior = ShirtColor::Green;
    int prior_blue = 0;
    int n_agents = 0;
};

/// Throws OracleParseError when any of the persona, own-history or coworker blocks is missing.
OracleView parse_oracle_view(std::string_view prompt);

/// One-sentence reasoning and a terminal "Response: <color>" line.
/// Exact ties keep the agent's own prior color.
std::string scripted_reply(std::string_view prompt, std::uint64_t seed);

class ScriptedCompleter final : public Completer {
public:
    explicit ScriptedCompleter(std::uint64_t seed) : seed_(seed) {}
    std::string complete(const CompletionRequest& req) override { return scripted_reply(req.prompt, seed_); }

private:
    std::uint64_t seed_;
};

// ---- live HTTP ----------------------------------------------------------------

class LiveCompleter final : public Completer {
public:
    LiveCompleter(std::string endpoint_url, std::string api_key, RetryPolicy policy, Sleeper sleeper = {});
    std::string complete(const CompletionRequest& req) override;

private:
    std::string scheme_host_port_;
    std::string path_;
    std::string api_key_;
    RetryPolicy policy_;
    Sleeper sleeper_;
};

std::string chat_request_body(const CompletionRequest& req);
/// Content of choices[0].message.content; throws TransportError on a malformed body.
std::string extract_reply(std::string_view response_body);

// ---- record / replay ----------------------------------------------------------

struct CacheRecord {
    std::string key;
    std::string model_id;
    double temperature = 0.0;
    std::string prompt;
    std::string reply;
    std::string timestamp;
};

/// Append-only JSON-lines store. Reads run concurrently; appends are serialized.
class ReplayCache {
public:
    explicit ReplayCache(std::filesystem::path path);

    std::optional<std::string> lookup(const std::string& key) const;
    /// Stores and appends the record unless the key is already present. Returns the stored reply.
    std::string insert(const CacheRecord& record);
    std::size_t size() const;

private:
    std::filesystem::path path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::string> replies_;
};

class ReplayCompleter final : public Completer {
public:
    ReplayCompleter(std::shared_ptr<ReplayCache> cache, std::unique_ptr<Completer> fallback);
    std::string complete(const CompletionRequest& req) override;

private:
    std::shared_ptr<ReplayCache> cache_;
    std::unique_ptr<Completer> fallback_;
};

// ---- client -------------------------------------------------------------------

struct ClientOptions {
    int max_in_flight = 8;
    Sleeper sleeper;
};

/// Thread-safe front end over one backend; bounds the number of concurrent requests.
class CompletionClient {
public:
    CompletionClient(std::unique_ptr<Completer> completer, int max_in_flight);

    std::string complete(const CompletionRequest& req);
    int max_in_flight() const { return max_in_flight_; }

private:
    std::unique_ptr<Completer> completer_;
    int max_in_flight_;
    std::counting_semaphore<> slots_;
};

/// Live backends read the key from the environment variable named in LiveBackend
/// (AuthError when unset) and the endpoint from GABM_API_BASE when endpoint_url is empty.
std::unique_ptr<Completer> make_completer(const BackendKind& backend, const RetryPolicy& policy,
                                          const Sleeper& sleeper = {});
std::shared_ptr<CompletionClient> make_client(const BackendKind& backend, const RetryPolicy& policy,
                                              ClientOptions options = {});

/// One-shot convenience wrapper; batches should share a client instead.
std::string complete(const CompletionRequest& req, const BackendKind& backend, const RetryPolicy& policy);

} // namespace gabm
