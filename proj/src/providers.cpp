#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "salc/providers.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include <json.hpp>

#include "salc/digest.hpp"

namespace salc::providers {

using json = nlohmann::json;
using namespace std::chrono;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "?";
}

Role parse_role(std::string_view text) {
    if (text == "system") return Role::System;
    if (text == "user") return Role::User;
    if (text == "assistant") return Role::Assistant;
    throw Error(ErrorCode::SchemaError, "unknown chat role '" + std::string(text) + "'");
}

void validate(const ProviderPolicy& policy) {
    if (policy.max_attempts < 1) {
        throw Error(ErrorCode::ConfigError, "max_attempts must be >= 1");
    }
    if (policy.max_concurrent < 1) {
        throw Error(ErrorCode::ConfigError, "max_concurrent must be >= 1");
    }
    if (policy.backoff_base_ms < 0) {
        throw Error(ErrorCode::ConfigError, "backoff_base_ms must be >= 0");
    }
    if (policy.requests_per_minute && *policy.requests_per_minute < 1) {
        throw Error(ErrorCode::ConfigError, "requests_per_minute must be >= 1");
    }
}

void validate(const CompletionRequest& request) {
    if (request.model_id.empty()) {
        throw Error(ErrorCode::ConfigError, "completion request needs a model id");
    }
    if (request.messages.empty()) {
        throw Error(ErrorCode::EmptyInput, "completion request needs at least one message");
    }
    if (request.temperature < 0.0) {
        throw Error(ErrorCode::ConfigError, "temperature must be >= 0");
    }
    if (request.max_tokens < 1) {
        throw Error(ErrorCode::ConfigError, "max_tokens must be >= 1");
    }
    for (const auto& message : request.messages) {
        if (message.content.empty() && message.role != Role::Assistant) {
            throw Error(ErrorCode::EmptyField, "only assistant placeholders may be empty");
        }
    }
}

namespace {

std::string canonical_bytes(const CompletionRequest& request) {
    // \x1e / \x1f separators keep field boundaries unambiguous.
    std::string canon;
    canon += "model\x1f";
    canon += request.model_id;
    canon += "\x1etemperature\x1f";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", request.temperature);
    canon += buf;
    canon += "\x1emax_tokens\x1f";
    canon += std::to_string(request.max_tokens);
    for (const auto& message : request.messages) {
        canon += "\x1e";
        canon += to_string(message.role);
        canon += "\x1f";
        canon += message.content;
    }
    return canon;
}

std::int64_t now_epoch_seconds() {
    return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

std::string cache_key(const CompletionRequest& request) {
    return stable_digest(canonical_bytes(request));
}

std::string rendered_prompt(const CompletionRequest& request) {
    std::string out;
    for (std::size_t i = 0; i < request.messages.size(); ++i) {
        if (i > 0) out += '\n';
        out += request.messages[i].content;
    }
    return out;
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(const std::filesystem::path& file) : file_(file) {
    if (std::filesystem::exists(file)) {
        std::ifstream in(file);
        if (!in) {
            throw Error(ErrorCode::IoError, "cannot open cache file " + file.string());
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json record = json::parse(line, nullptr, false);
            if (record.is_discarded() || !record.contains("key") || !record.contains("text")) {
                throw Error(ErrorCode::IoError, "bad cache record at " + file.string() + ":" +
                                                    std::to_string(line_no));
            }
            entries_[record["key"].get<std::string>()] = record["text"].get<std::string>();
        }
    } else if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
    appender_.open(file, std::ios::app);
    if (!appender_) {
        throw Error(ErrorCode::IoError, "cannot append to cache file " + file.string());
    }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::store(const std::string& key, const std::string& model_id,
                          const std::string& text) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, text);
    if (!inserted) return;  // append-only, first write wins
    if (file_) {
        json record{{"key", key},
                    {"model_id", model_id},
                    {"text", text},
                    {"created_at", now_epoch_seconds()}};
        appender_ << record.dump() << '\n';
        appender_.flush();
    }
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

// ---------------------------------------------------------------------------
// MockProvider

void MockProvider::register_script(std::string pattern, std::string reply) {
    std::lock_guard lock(mutex_);
    scripts_.emplace_back(std::move(pattern), std::move(reply));
}

void MockProvider::clear_scripts() {
    std::lock_guard lock(mutex_);
    scripts_.clear();
}

std::string MockProvider::complete_once(const CompletionRequest& request) {
    std::function<std::chrono::milliseconds(const CompletionRequest&)> delay;
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        ++in_flight_;
        max_in_flight_ = std::max(max_in_flight_, in_flight_);
        delay = delay_hook_;
    }
    if (delay) {
        std::this_thread::sleep_for(delay(request));
    }
    const std::string prompt = rendered_prompt(request);
    std::lock_guard lock(mutex_);
    --in_flight_;
    for (const auto& [pattern, reply] : scripts_) {
        if (prompt.find(pattern) != std::string::npos) {
            return reply;
        }
    }
    throw Error(ErrorCode::TransportError, "no mock script matches the rendered prompt");
}

int MockProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

int MockProvider::max_in_flight() const {
    std::lock_guard lock(mutex_);
    return max_in_flight_;
}

void MockProvider::set_delay_hook(
    std::function<std::chrono::milliseconds(const CompletionRequest&)> hook) {
    std::lock_guard lock(mutex_);
    delay_hook_ = std::move(hook);
}

// ---------------------------------------------------------------------------
// CacheOnlyProvider

std::string CacheOnlyProvider::complete_once(const CompletionRequest& request) {
    if (auto hit = cache_.lookup(cache_key(request))) {
        return *hit;
    }
    throw Error(ErrorCode::TransportError,
                "cache miss for key " + cache_key(request) +
                    " and no live provider configured (pass --live)");
}

// ---------------------------------------------------------------------------
// HttpProvider

struct HttpProvider::Impl {
    HttpProviderConfig config;
    std::unique_ptr<httplib::Client> client;
};

HttpProvider::HttpProvider(HttpProviderConfig config) : impl_(std::make_unique<Impl>()) {
    if (config.base_url.empty()) {
        throw Error(ErrorCode::ConfigError, "http provider needs a base URL");
    }
    impl_->config = std::move(config);
    impl_->client = std::make_unique<httplib::Client>(impl_->config.base_url);
    impl_->client->set_connection_timeout(impl_->config.timeout_seconds);
    impl_->client->set_read_timeout(impl_->config.timeout_seconds);
}

HttpProvider::~HttpProvider() = default;

std::string HttpProvider::name() const { return "http:" + impl_->config.base_url; }

std::string HttpProvider::complete_once(const CompletionRequest& request) {
    json body;
    body["model"] = request.model_id;
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    auto messages = json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", to_string(message.role)}, {"content", message.content}});
    }
    body["messages"] = std::move(messages);

    httplib::Headers headers;
    if (!impl_->config.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->config.api_key);
    }

    auto result = impl_->client->Post(impl_->config.path, headers, body.dump(),
                                      "application/json");
    if (!result) {
        throw Error(ErrorCode::TransportError, httplib::to_string(result.error()));
    }
    if (result->status == 429) {
        throw Error(ErrorCode::RateLimited, "provider returned 429");
    }
    if (result->status != 200) {
        throw Error(ErrorCode::TransportError,
                    "provider returned status " + std::to_string(result->status));
    }
    json reply = json::parse(result->body, nullptr, false);
    if (reply.is_discarded()) {
        throw Error(ErrorCode::TransportError, "provider returned unparseable JSON");
    }
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::TransportError, "provider response missing choices[0].message.content");
    }
}

// ---------------------------------------------------------------------------
// RateLimiter

RateLimiter::RateLimiter(int per_minute, Clock clock, Sleeper sleeper)
    : per_minute_(per_minute),
      clock_(clock ? std::move(clock) : [] { return steady_clock::now(); }),
      sleeper_(sleeper ? std::move(sleeper)
                       : [](milliseconds d) { std::this_thread::sleep_for(d); }) {
    if (per_minute_ < 1) {
        throw Error(ErrorCode::ConfigError, "rate limit must be >= 1 per minute");
    }
}

void RateLimiter::acquire() {
    for (;;) {
        milliseconds wait{0};
        {
            std::lock_guard lock(mutex_);
            const auto now = clock_();
            while (!issued_.empty() && now - issued_.front() >= minutes(1)) {
                issued_.pop_front();
            }
            if (static_cast<int>(issued_.size()) < per_minute_) {
                issued_.push_back(now);
                return;
            }
            wait = duration_cast<milliseconds>(issued_.front() + minutes(1) - now) +
                   milliseconds(1);
        }
        sleeper_(wait);
    }
}

// ---------------------------------------------------------------------------
// ProviderClient

ProviderClient::ProviderClient(Provider& backend, ProviderPolicy policy, ResponseCache* cache)
    : backend_(backend), policy_(policy), cache_(cache) {
    validate(policy_);
    if (policy_.requests_per_minute) {
        limiter_.emplace(*policy_.requests_per_minute);
    }
}

void ProviderClient::acquire_slot() {
    std::unique_lock lock(slot_mutex_);
    slot_cv_.wait(lock, [&] { return slots_in_use_ < policy_.max_concurrent; });
    ++slots_in_use_;
}

void ProviderClient::release_slot() {
    {
        std::lock_guard lock(slot_mutex_);
        --slots_in_use_;
    }
    slot_cv_.notify_one();
}

CompletionResult ProviderClient::complete(const CompletionRequest& request) {
    validate(request);
    const std::string key = cache_key(request);
    {
        std::lock_guard lock(stats_mutex_);
        ++requests_;
        keys_seen_.insert(key);
    }

    if (cache_) {
        if (auto hit = cache_->lookup(key)) {
            return {*hit, backend_.name(), /*cached=*/true, /*latency_ms=*/0,
                    /*attempt_count=*/1};
        }
    }

    acquire_slot();
    struct SlotGuard {
        ProviderClient* client;
        ~SlotGuard() { client->release_slot(); }
    } guard{this};

    std::string last_error;
    for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
        if (limiter_) limiter_->acquire();
        const auto start = steady_clock::now();
        try {
            std::string text = backend_.complete_once(request);
            const auto latency =
                duration_cast<milliseconds>(steady_clock::now() - start).count();
            if (cache_) cache_->store(key, request.model_id, text);
            return {std::move(text), backend_.name(), /*cached=*/false, latency, attempt};
        } catch (const Error& error) {
            if (error.code() != ErrorCode::TransportError &&
                error.code() != ErrorCode::RateLimited) {
                throw;
            }
            last_error = error.what();
            if (attempt < policy_.max_attempts) {
                const int shift = error.code() == ErrorCode::RateLimited ? attempt : attempt - 1;
                std::this_thread::sleep_for(
                    milliseconds(policy_.backoff_base_ms) * (1 << shift));
            }
        }
    }
    throw Error(ErrorCode::ExhaustedRetries,
                "gave up after " + std::to_string(policy_.max_attempts) +
                    " attempts; last error: " + last_error);
}

std::uint64_t ProviderClient::request_count() const {
    std::lock_guard lock(stats_mutex_);
    return requests_;
}

std::uint64_t ProviderClient::unique_key_count() const {
    std::lock_guard lock(stats_mutex_);
    return keys_seen_.size();
}

}  // namespace salc::providers
