#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "salc/error.hpp"

namespace salc::providers {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role parse_role(std::string_view text);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

/// Pipeline calls always use temperature 0; greedy decoding is the
/// determinism contract the response cache relies on.
struct CompletionRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::optional<std::string> seed_tag;  // bookkeeping only, excluded from identity
};

struct CompletionResult {
    std::string text;
    std::string provider_name;
    bool cached = false;
    std::int64_t latency_ms = 0;
    int attempt_count = 1;
};

struct ProviderPolicy {
    int max_attempts = 3;
    int backoff_base_ms = 100;
    int max_concurrent = 4;
    std::optional<int> requests_per_minute;
};

void validate(const ProviderPolicy& policy);
void validate(const CompletionRequest& request);

/// Stable content hash over (model_id, messages, temperature, max_tokens).
/// seed_tag is deliberately excluded. Same request, same key, across runs
/// and platforms.
std::string cache_key(const CompletionRequest& request);

/// Message contents joined with newlines; what mock script patterns match
/// against.
std::string rendered_prompt(const CompletionRequest& request);

/// Content-addressed response store, optionally persisted as an append-only
/// JSON Lines file ({key, model_id, text, created_at} per line) so runs are
/// resumable. All access is serialized internally.
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(const std::filesystem::path& file);

    std::optional<std::string> lookup(const std::string& key) const;
    void store(const std::string& key, const std::string& model_id, const std::string& text);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::string> entries_;
    std::optional<std::filesystem::path> file_;
    std::ofstream appender_;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    /// Single attempt, no retry, no cache. Throws TransportError/RateLimited.
    virtual std::string complete_once(const CompletionRequest& request) = 0;
};

/// Deterministic scripted provider for tests and offline runs. Scripts are
/// (substring pattern, reply) pairs matched against the rendered prompt;
/// the first registered match wins. Instrumented so tests can assert the
/// concurrency bound and call counts.
class MockProvider : public Provider {
public:
    std::string name() const override { return "mock"; }

    void register_script(std::string pattern, std::string reply);
    void clear_scripts();

    std::string complete_once(const CompletionRequest& request) override;

    int call_count() const;
    int max_in_flight() const;
    /// Per-call artificial delay, for completion-order perturbation tests.
    void set_delay_hook(std::function<std::chrono::milliseconds(const CompletionRequest&)> hook);

private:
    mutable std::mutex mutex_;
    std::vector<std::pair<std::string, std::string>> scripts_;
    int calls_ = 0;
    int in_flight_ = 0;
    int max_in_flight_ = 0;
    std::function<std::chrono::milliseconds(const CompletionRequest&)> delay_hook_;
};

/// Replays a warmed ResponseCache and never touches the network; a miss is a
/// TransportError naming the missing key. This is what CLI runs use unless
/// --live is given.
class CacheOnlyProvider : public Provider {
public:
    explicit CacheOnlyProvider(const ResponseCache& cache) : cache_(cache) {}
    std::string name() const override { return "cache"; }
    std::string complete_once(const CompletionRequest& request) override;

private:
    const ResponseCache& cache_;
};

struct HttpProviderConfig {
    std::string base_url;                      // scheme://host[:port]
    std::string path = "/v1/chat/completions"; // endpoint path is configuration
    std::string api_key;                       // usually from SALC_API_KEY
    int timeout_seconds = 60;
};

/// Chat-completion client over HTTP(S) with JSON bodies: request carries
/// {model, messages, temperature, max_tokens}, the reply text is read from
/// choices[0].message.content.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config);
    ~HttpProvider() override;

    std::string name() const override;
    std::string complete_once(const CompletionRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Sliding-window request budget shared across tasks. Clock and sleeper are
/// injectable so the window logic is testable without real waiting.
class RateLimiter {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit RateLimiter(int per_minute, Clock clock = nullptr, Sleeper sleeper = nullptr);
    void acquire();

private:
    int per_minute_;
    Clock clock_;
    Sleeper sleeper_;
    std::mutex mutex_;
    std::deque<std::chrono::steady_clock::time_point> issued_;
};

/// Policy wrapper around a Provider backend: response cache, bounded retry
/// with exponential backoff, rate limiting, and a max_concurrent semaphore.
/// Shareable across threads.
class ProviderClient {
public:
    ProviderClient(Provider& backend, ProviderPolicy policy, ResponseCache* cache = nullptr);

    CompletionResult complete(const CompletionRequest& request);

    const ProviderPolicy& policy() const { return policy_; }

    /// Deterministic run stats: every complete() call and every distinct
    /// cache key seen, warm or cold.
    std::uint64_t request_count() const;
    std::uint64_t unique_key_count() const;

private:
    void acquire_slot();
    void release_slot();

    Provider& backend_;
    ProviderPolicy policy_;
    ResponseCache* cache_;
    std::optional<RateLimiter> limiter_;

    mutable std::mutex stats_mutex_;
    std::uint64_t requests_ = 0;
    std::set<std::string> keys_seen_;

    std::mutex slot_mutex_;
    std::condition_variable slot_cv_;
    int slots_in_use_ = 0;
};

}  // namespace salc::providers
