#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "salc/core.hpp"
#include "salc/providers.hpp"

namespace salc::test {

/// Deterministic generator so every property test is replayable from its seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    int range(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double unit() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }

    std::string ascii(int min_len, int max_len) {
        const int len = range(min_len, max_len);
        std::string out;
        for (int i = 0; i < len; ++i) {
            out.push_back(static_cast<char>(range(32, 126)));
        }
        return out;
    }

private:
    std::uint64_t state_;
};

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("salc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Fixed inputs shared by the prompt snapshot tests and the fixtures.
inline const std::string kInstruction =
    "Summarize the impact of habitat loss on polar bear populations.";
inline const std::string kReference =
    "Melting sea ice forces polar bears to travel farther for food, lowering survival and "
    "reproduction.";
inline const std::string kResponse =
    "Polar bears are struggling because the ice is melting.";
inline const std::string kResponseB = "Climate change affects many animals, including bears.";

inline CriteriaSet fixed_criteria() {
    CriteriaSet set;
    set.instance_id = "snapshot-001";
    set.criteria = {
        {"Relevance", "Does the response address the instruction?", std::nullopt},
        {"Completeness", "Does it cover the key consequences mentioned in the reference?",
         std::nullopt},
    };
    return set;
}

}  // namespace salc::test
