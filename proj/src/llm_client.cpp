#include "gabm/digest.hpp"
#include "gabm/errors.hpp"
#include "gabm/llm.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>

namespace gabm {

namespace {

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

} // namespace

BackendKind BackendKind::live(std::string endpoint_url) { return {LiveBackend{std::move(endpoint_url)}}; }

BackendKind BackendKind::scripted(std::uint64_t seed) { return {ScriptedBackend{seed}}; }

BackendKind BackendKind::replay(std::filesystem::path cache_path, std::optional<BackendKind> fallback) {
    ReplayBackend r{std::move(cache_path), nullptr};
    if (fallback) r.fallback = std::make_shared<const BackendKind>(std::move(*fallback));
    return {std::move(r)};
}

std::string BackendKind::describe() const {
    struct Visitor {
        std::string operator()(const LiveBackend& b) const {
            return "live(" + (b.endpoint_url.empty() ? std::string("$GABM_API_BASE") : b.endpoint_url) + ")";
        }
        std::string operator()(const ScriptedBackend& b) const { return "scripted(" + std::to_string(b.seed) + ")"; }
        std::string operator()(const ReplayBackend& b) const {
            return "replay(" + b.cache_path.string() + (b.fallback ? ", " + b.fallback->describe() : std::string()) +
                   ")";
        }
    };
    return std::visit(Visitor{}, spec);
}

std::chrono::milliseconds RetryPolicy::delay(int k) const {
    if (k < 1) return std::chrono::milliseconds(0);
    double ms = static_cast<double>(base_delay.count()) * std::pow(backoff_factor, k - 1);
    ms = std::min(ms, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds(static_cast<long long>(std::llround(ms)));
}

std::string cache_key(const CompletionRequest& req) {
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.2f", req.temperature);
    std::string material = req.model_id;
    material.push_back('\0');
    material += temp;
    material.push_back('\0');
    material += req.prompt;
    return sha256_hex(material);
}

ReplayCompleter::ReplayCompleter(std::shared_ptr<ReplayCache> cache, std::unique_ptr<Completer> fallback)
    : cache_(std::move(cache)), fallback_(std::move(fallback)) {}

std::string ReplayCompleter::complete(const CompletionRequest& req) {
    auto key = cache_key(req);
    if (auto hit = cache_->lookup(key)) return *hit;
    if (!fallback_) throw CacheMiss("no recorded reply for request " + key.substr(0, 16));
    auto reply = fallback_->complete(req);
    return cache_->insert(CacheRecord{key, req.model_id, req.temperature, req.prompt, reply, utc_timestamp()});
}

CompletionClient::CompletionClient(std::unique_ptr<Completer> completer, int max_in_flight)
    : completer_(std::move(completer)), max_in_flight_(max_in_flight), slots_(max_in_flight) {
    if (max_in_flight < 1) throw ConfigError("in-flight limit must be at least 1");
}

std::string CompletionClient::complete(const CompletionRequest& req) {
    if (!(req.temperature >= 0.0 && req.temperature <= 2.0)) throw ConfigError("temperature must lie in [0, 2]");
    slots_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{slots_};
    return completer_->complete(req);
}

std::unique_ptr<Completer> make_completer(const BackendKind& backend, const RetryPolicy& policy,
                                          const Sleeper& sleeper) {
    struct Visitor {
        const RetryPolicy& policy;
        const Sleeper& sleeper;

        std::unique_ptr<Completer> operator()(const LiveBackend& b) const {
            auto key = env_or(b.api_key_env.c_str(), "");
            if (key.empty()) throw AuthError("environment variable " + b.api_key_env + " is not set");
            auto url = b.endpoint_url.empty() ? env_or("GABM_API_BASE", "https://api.openai.com/v1") : b.endpoint_url;
            return std::make_unique<LiveCompleter>(url, key, policy, sleeper);
        }
        std::unique_ptr<Completer> operator()(const ScriptedBackend& b) const {
            return std::make_unique<ScriptedCompleter>(b.seed);
        }
        std::unique_ptr<Completer> operator()(const ReplayBackend& b) const {
            auto cache = std::make_shared<ReplayCache>(b.cache_path);
            std::unique_ptr<Completer> fallback;
            if (b.fallback) fallback = make_completer(*b.fallback, policy, sleeper);
            return std::make_unique<ReplayCompleter>(std::move(cache), std::move(fallback));
        }
    };
    return std::visit(Visitor{policy, sleeper}, backend.spec);
}

std::shared_ptr<CompletionClient> make_client(const BackendKind& backend, const RetryPolicy& policy,
                                              ClientOptions options) {
    return std::make_shared<CompletionClient>(make_completer(backend, policy, options.sleeper), options.max_in_flight);
}

std::string complete(const CompletionRequest& req, const BackendKind& backend, const RetryPolicy& policy) {
    return make_client(backend, policy)->complete(req);
}

} // namespace gabm
