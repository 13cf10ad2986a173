#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "salc/core.hpp"
#include "salc/jsonl.hpp"
#include "salc/providers.hpp"

namespace salc::test {

/// Synthetic HHH-style preference fixture: 20 relative instances, five per
/// category, with mock scripts whose verdicts agree with gold on exactly 15.
/// Expected agreement: overall 15/20, per category Help. 4/5, Harm. 5/5,
/// Hon. 3/5, Other 3/5. `predicted` mirrors what the scripts answer, so an
/// independent oracle can recompute every number from this table alone.
struct HhhFixture {
    std::vector<EvaluationInstance> instances;
    std::vector<std::pair<std::string, std::string>> scripts;  // pattern -> reply
    std::vector<Preference> gold;       // aligned with instances
    std::vector<Preference> predicted;  // aligned with instances
};

inline HhhFixture hhh_fixture() {
    HhhFixture fixture;
    const char* categories[] = {"Help.", "Harm.", "Hon.", "Other"};
    // Instances whose scripted verdict contradicts gold (ids are 1-based).
    const std::vector<int> wrong = {2, 11, 12, 16, 17};

    for (int i = 1; i <= 20; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "hhh-q-%03d", i);

        EvaluationInstance instance;
        instance.id = id;
        instance.mode = Mode::Relative;
        instance.instruction = std::string(id) + " which reply should the assistant send?";
        instance.response_a = "Reply A for " + std::string(id);
        instance.response_b = "Reply B for " + std::string(id);
        instance.category = categories[(i - 1) / 5];
        const Preference gold = i % 2 == 1 ? Preference::A : Preference::B;
        instance.gold_preference = gold;

        const bool miss = std::find(wrong.begin(), wrong.end(), i) != wrong.end();
        const Preference verdict =
            miss ? (gold == Preference::A ? Preference::B : Preference::A) : gold;

        // Stage-specific patterns: the criteria prompt interpolates
        // "### Instruction:\n<id>...", the eval prompt "###User Instruction:".
        fixture.scripts.emplace_back(
            "### Instruction:\n" + std::string(id),
            "1.) **Accuracy** - Is the answer correct?\n"
            "2.) **Safety** - Is the reply harmless?");
        fixture.scripts.emplace_back(
            "###User Instruction:\n" + std::string(id),
            std::string("Feedback: judged ") + id + " [[" +
                (verdict == Preference::A ? "A" : "B") + "]]");

        fixture.gold.push_back(gold);
        fixture.predicted.push_back(verdict);
        fixture.instances.push_back(std::move(instance));
    }
    return fixture;
}

inline void register_scripts(providers::MockProvider& mock, const HhhFixture& fixture) {
    for (const auto& [pattern, reply] : fixture.scripts) {
        mock.register_script(pattern, reply);
    }
}

inline void write_mock_script_file(const std::filesystem::path& path,
                                   const HhhFixture& fixture) {
    std::string out;
    for (const auto& [pattern, reply] : fixture.scripts) {
        out += nlohmann::json{{"pattern", pattern}, {"reply", reply}}.dump() + "\n";
    }
    jsonl::write_atomic(path, out);
}

}  // namespace salc::test
