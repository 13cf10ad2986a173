#include <doctest.h>

#include <atomic>
#include <thread>

#include "salc/providers.hpp"
#include "support/helpers.hpp"

using namespace salc;
using namespace salc::providers;

namespace {

CompletionRequest simple_request(const std::string& content,
                                 const std::string& model = "test-model") {
    CompletionRequest request;
    request.model_id = model;
    request.messages = {{Role::System, "system text"}, {Role::User, content}};
    return request;
}

// Fails a fixed number of times before succeeding; for retry paths.
class FlakyProvider : public Provider {
public:
    FlakyProvider(int failures, ErrorCode code) : failures_(failures), code_(code) {}
    std::string name() const override { return "flaky"; }
    std::string complete_once(const CompletionRequest&) override {
        if (calls_++ < failures_) {
            throw Error(code_, "transient failure");
        }
        return "recovered";
    }
    int calls() const { return calls_; }

private:
    std::atomic<int> calls_{0};
    int failures_;
    ErrorCode code_;
};

}  // namespace

TEST_CASE("cache_key is stable, content-addressed, and ignores seed_tag") {
    const auto request = simple_request("hello");
    CHECK(cache_key(request) == cache_key(request));

    auto other = simple_request("hellp");
    CHECK(cache_key(request) != cache_key(other));

    auto tagged = request;
    tagged.seed_tag = "run-7";
    CHECK(cache_key(request) == cache_key(tagged));

    auto hotter = request;
    hotter.temperature = 0.7;
    CHECK(cache_key(request) != cache_key(hotter));

    auto longer = request;
    longer.max_tokens = 2048;
    CHECK(cache_key(request) != cache_key(longer));

    auto other_model = simple_request("hello", "other-model");
    CHECK(cache_key(request) != cache_key(other_model));

    // role boundaries matter, not just concatenated bytes
    auto moved = request;
    moved.messages = {{Role::System, "system"}, {Role::User, " texthello"}};
    CHECK(cache_key(request) != cache_key(moved));
}

TEST_CASE("mock provider replays scripts, first registered match wins") {
    MockProvider mock;
    mock.register_script("promptX", "out");
    mock.register_script("prompt", "broader");

    ProviderPolicy policy;
    policy.max_attempts = 2;
    policy.backoff_base_ms = 0;
    ResponseCache cache;
    ProviderClient client(mock, policy, &cache);

    auto first = client.complete(simple_request("promptX please"));
    CHECK(first.text == "out");
    CHECK_FALSE(first.cached);
    CHECK(first.attempt_count == 1);

    auto second = client.complete(simple_request("promptX please"));
    CHECK(second.text == "out");
    CHECK(second.cached);
    CHECK(second.latency_ms == 0);
    CHECK(mock.call_count() == 1);

    // the earlier, broader pattern was registered later, so the specific one wins
    auto broad = client.complete(simple_request("prompt only"));
    CHECK(broad.text == "broader");
}

TEST_CASE("mock with no matching script exhausts retries") {
    MockProvider mock;
    mock.register_script("never-matches", "x");
    ProviderPolicy policy;
    policy.max_attempts = 3;
    policy.backoff_base_ms = 0;
    ProviderClient client(mock, policy, nullptr);

    CHECK_THROWS_AS(client.complete(simple_request("something else")), Error);
    CHECK(mock.call_count() == 3);

    mock.clear_scripts();
    try {
        client.complete(simple_request("never-matches"));
        FAIL("expected ExhaustedRetries");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::ExhaustedRetries);
    }
}

TEST_CASE("client retries transport errors with backoff and recovers") {
    FlakyProvider flaky(2, ErrorCode::TransportError);
    ProviderPolicy policy;
    policy.max_attempts = 3;
    policy.backoff_base_ms = 1;
    ProviderClient client(flaky, policy, nullptr);

    const auto result = client.complete(simple_request("x"));
    CHECK(result.text == "recovered");
    CHECK(result.attempt_count == 3);

    FlakyProvider rate_limited(1, ErrorCode::RateLimited);
    ProviderClient limited_client(rate_limited, policy, nullptr);
    CHECK(limited_client.complete(simple_request("y")).text == "recovered");

    // non-retryable errors surface immediately
    class Broken : public Provider {
    public:
        std::string name() const override { return "broken"; }
        std::string complete_once(const CompletionRequest&) override {
            throw Error(ErrorCode::ConfigError, "bad setup");
        }
    } broken;
    ProviderClient broken_client(broken, policy, nullptr);
    try {
        broken_client.complete(simple_request("z"));
        FAIL("expected ConfigError");
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("response cache round-trips arbitrary byte values through its file") {
    const auto dir = test::fresh_temp_dir("cache");
    const auto file = dir / "cache.jsonl";

    test::Rng rng(0x5eed201);
    std::vector<std::pair<std::string, std::string>> entries;
    {
        ResponseCache cache(file);
        for (int i = 0; i < 50; ++i) {
            std::string key = "key-" + std::to_string(i);
            std::string value = rng.ascii(0, 40) + "\nsecond line\t\"quoted\" \\ {json}";
            cache.store(key, "model", value);
            entries.emplace_back(std::move(key), std::move(value));
        }
        for (const auto& [key, value] : entries) {
            REQUIRE(cache.lookup(key).has_value());
            CHECK(*cache.lookup(key) == value);
        }
    }

    // reload from disk
    ResponseCache reloaded(file);
    CHECK(reloaded.size() == entries.size());
    for (const auto& [key, value] : entries) {
        REQUIRE(reloaded.lookup(key).has_value());
        CHECK(*reloaded.lookup(key) == value);
    }
    CHECK_FALSE(reloaded.lookup("missing").has_value());

    std::filesystem::remove_all(dir);
}

TEST_CASE("warm cache serves a whole run with zero backend calls") {
    MockProvider mock;
    mock.register_script("q", "answer");
    ProviderPolicy policy;
    policy.backoff_base_ms = 0;

    const auto dir = test::fresh_temp_dir("warm");
    std::vector<std::string> first_texts, second_texts;
    {
        ResponseCache cache(dir / "c.jsonl");
        ProviderClient client(mock, policy, &cache);
        for (int i = 0; i < 5; ++i) {
            first_texts.push_back(client.complete(simple_request("q" + std::to_string(i))).text);
        }
    }
    const int cold_calls = mock.call_count();
    {
        ResponseCache cache(dir / "c.jsonl");
        ProviderClient client(mock, policy, &cache);
        for (int i = 0; i < 5; ++i) {
            const auto result = client.complete(simple_request("q" + std::to_string(i)));
            second_texts.push_back(result.text);
            CHECK(result.cached);
        }
        CHECK(client.request_count() == 5);
        CHECK(client.unique_key_count() == 5);
    }
    CHECK(mock.call_count() == cold_calls);  // zero new backend calls
    CHECK(first_texts == second_texts);
    std::filesystem::remove_all(dir);
}

TEST_CASE("max_concurrent bounds in-flight requests") {
    MockProvider mock;
    mock.register_script("", "reply");  // empty pattern matches everything
    mock.set_delay_hook([](const CompletionRequest&) { return std::chrono::milliseconds(25); });

    ProviderPolicy policy;
    policy.max_concurrent = 2;
    policy.backoff_base_ms = 0;
    ProviderClient client(mock, policy, nullptr);

    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&client, i] {
            (void)client.complete(simple_request("req" + std::to_string(i)));
        });
    }
    for (auto& thread : threads) thread.join();

    CHECK(mock.call_count() == 8);
    CHECK(mock.max_in_flight() <= 2);
}

TEST_CASE("concurrent cache access stays consistent") {
    const auto dir = test::fresh_temp_dir("cache_threads");
    ResponseCache cache(dir / "cache.jsonl");

    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&cache, t] {
            for (int i = 0; i < 100; ++i) {
                const std::string key = "k" + std::to_string(i % 25);
                cache.store(key, "m", "value-" + std::to_string(i % 25));
                const auto hit = cache.lookup(key);
                if (!hit || hit->rfind("value-", 0) != 0) {
                    throw std::runtime_error("bad read under contention");
                }
                (void)t;
            }
        });
    }
    for (auto& thread : threads) thread.join();
    CHECK(cache.size() == 25);

    // first write won; the file replays to the same state
    ResponseCache reloaded(dir / "cache.jsonl");
    CHECK(reloaded.size() == 25);
    std::filesystem::remove_all(dir);
}

TEST_CASE("rate limiter enforces the sliding window with an injected clock") {
    using namespace std::chrono;
    steady_clock::time_point fake_now{};
    std::vector<milliseconds> sleeps;

    RateLimiter limiter(
        2, [&] { return fake_now; },
        [&](milliseconds wait) {
            sleeps.push_back(wait);
            fake_now += wait;
        });

    limiter.acquire();
    limiter.acquire();
    CHECK(sleeps.empty());

    limiter.acquire();  // third within the same minute must wait
    REQUIRE(sleeps.size() == 1);
    CHECK(sleeps[0] >= milliseconds(60000));

    fake_now += minutes(2);
    limiter.acquire();
    CHECK(sleeps.size() == 1);

    CHECK_THROWS_AS(RateLimiter(0), Error);
}

TEST_CASE("request validation") {
    CompletionRequest request;
    request.model_id = "m";
    CHECK_THROWS_AS(validate(request), Error);  // no messages

    request.messages = {{Role::User, "hi"}};
    CHECK_NOTHROW(validate(request));

    request.temperature = -0.5;
    CHECK_THROWS_AS(validate(request), Error);
    request.temperature = 0.0;

    request.messages.push_back({Role::User, ""});
    CHECK_THROWS_AS(validate(request), Error);  // empty non-assistant content

    request.messages.back() = {Role::Assistant, ""};
    CHECK_NOTHROW(validate(request));  // assistant placeholder may be empty

    ProviderPolicy policy;
    policy.max_attempts = 0;
    CHECK_THROWS_AS(validate(policy), Error);
}
