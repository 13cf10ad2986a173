#include <doctest.h>

#include <set>

#include "salc/distill.hpp"
#include "support/helpers.hpp"

using namespace salc;
using namespace salc::distill;

namespace {

pipeline::PipelineConfig test_config() {
    pipeline::PipelineConfig config;
    config.judge_model_id = "judge-m";
    config.criteria_model_id = "criteria-m";
    config.provider_policy.max_attempts = 3;
    config.provider_policy.backoff_base_ms = 0;
    return config;
}

struct Stack {
    providers::MockProvider mock;
    providers::ResponseCache cache;
    providers::ProviderClient client;
    pipeline::Pipeline pipe;

    Stack() : client(mock, test_config().provider_policy, &cache), pipe(test_config(), client) {}
};

const std::string kTwoFactors =
    "1.) **Clarity** - Is it clear?\n2.) **Depth** - Does it go deep enough?";

}  // namespace

TEST_CASE("select_pair picks unambiguous extremes over the threshold") {
    const std::vector<double> spread{9, 3, 6, 8};
    const auto selection = select_pair(spread, 5.0);
    REQUIRE(selection.has_value());
    CHECK(selection->chosen_index == 0);
    CHECK(selection->rejected_index == 1);
    CHECK(spread[selection->chosen_index] - spread[selection->rejected_index] == 6.0);

    CHECK_FALSE(select_pair(std::vector<double>{5, 4, 4, 3}, 5.0).has_value());  // gap 2
    CHECK_FALSE(select_pair(std::vector<double>{4, 4, 4}, 0.0).has_value());     // all tied
    CHECK_FALSE(select_pair(std::vector<double>{9, 9, 1}, 5.0).has_value());     // max tied
    CHECK_FALSE(select_pair(std::vector<double>{9, 1, 1}, 5.0).has_value());     // min tied
    CHECK_FALSE(select_pair(std::vector<double>{7}, 0.0).has_value());           // one entry
}

TEST_CASE("select_pair over the exhaustive gap grid at threshold 5") {
    for (int gap = 0; gap <= 9; ++gap) {
        const std::vector<double> scores{1.0, 1.0 + gap};  // 1..10 scale
        const auto selection = select_pair(scores, 5.0);
        if (gap >= 5) {
            REQUIRE_MESSAGE(selection.has_value(), "gap " << gap << " must pass");
            CHECK(scores[selection->chosen_index] > scores[selection->rejected_index]);
        } else {
            CHECK_MESSAGE(!selection.has_value(), "gap " << gap << " must be filtered");
        }
    }
}

TEST_CASE("generate_preference_pairs scores groups and applies the filter") {
    Stack stack;
    // Shared rubric per group, keyed on the group's first response.
    stack.mock.register_script("### Response A:\ng1-first", kTwoFactors);
    stack.mock.register_script("### Response A:\ng2-first", kTwoFactors);
    stack.mock.register_script("### Response A:\ng3-first", kTwoFactors);
    // Group 4's rubric never parses.
    stack.mock.register_script("### Response A:\ng4-first", "no factor lines at all");

    // Reference-free absolute scoring per response.
    auto score_script = [&](const std::string& response, int score) {
        stack.mock.register_script("### Response:\n" + response,
                                   "Feedback: scored [RESULT] " + std::to_string(score));
    };
    score_script("g1-first", 5);
    score_script("g1-second", 1);
    score_script("g1-third", 3);
    score_script("g2-first", 4);
    score_script("g2-second", 4);
    score_script("g3-first", 4);
    score_script("g3-second", 3);

    std::vector<datasets::ResponseGroup> groups = {
        {"g1", "first instruction", {"g1-first", "g1-second", "g1-third"}},
        {"g2", "second instruction", {"g2-first", "g2-second"}},
        {"g3", "third instruction", {"g3-first", "g3-second"}},
        {"g4", "fourth instruction", {"g4-first", "g4-second"}},
    };

    const auto result = generate_preference_pairs(groups, stack.pipe, 3.0);
    CHECK(result.kept == 1);
    CHECK(result.skipped_tie == 1);
    CHECK(result.skipped_gap == 1);
    CHECK(result.skipped_error == 1);
    REQUIRE(result.pairs.size() == 1);
    const auto& pair = result.pairs[0];
    CHECK(pair.instruction == "first instruction");
    CHECK(pair.chosen == "g1-first");
    CHECK(pair.rejected == "g1-second");
    CHECK(pair.chosen_score == 5.0);
    CHECK(pair.rejected_score == 1.0);
    CHECK(pair.gap == 4.0);

    REQUIRE(result.outcomes.size() == 4);
    CHECK(result.outcomes[1].skip_reason == "tie");
    CHECK(result.outcomes[2].skip_reason == "gap");
    CHECK(result.outcomes[3].skip_reason.find("unparseable") != std::string::npos);
}

TEST_CASE("every emitted pair satisfies its invariants") {
    const std::vector<double> scores{2.5, 4.5, 1.0, 3.0};
    const auto selection = select_pair(scores, 2.0);
    REQUIRE(selection.has_value());
    PreferencePair pair;
    pair.instruction = "x";
    pair.chosen = "a";
    pair.rejected = "b";
    pair.chosen_score = scores[selection->chosen_index];
    pair.rejected_score = scores[selection->rejected_index];
    pair.gap = pair.chosen_score - pair.rejected_score;
    CHECK_NOTHROW(validate(pair, 2.0));

    pair.rejected_score = pair.chosen_score;
    CHECK_THROWS_AS(validate(pair, 2.0), Error);
}

TEST_CASE("export_ft_criteria gates targets through the parser and reconciles counts") {
    Stack stack;
    for (int i = 1; i <= 5; ++i) {
        const std::string marker = "fc-" + std::to_string(i) + " write";
        if (i == 3) {
            stack.mock.register_script(marker, "rambling, factor-free teacher output");
        } else {
            stack.mock.register_script(marker, kTwoFactors);
        }
    }

    std::vector<EvaluationInstance> instances;
    for (int i = 1; i <= 5; ++i) {
        EvaluationInstance instance;
        instance.id = "fc-" + std::to_string(i);
        instance.mode = Mode::Absolute;
        instance.instruction = instance.id + " write a haiku about rivers";
        instance.response = "water moves " + instance.id;
        instance.reference = "reference haiku " + instance.id;
        instances.push_back(std::move(instance));
    }

    const auto result = export_ft_criteria(instances, stack.pipe);
    CHECK(result.examples.size() == 4);
    CHECK(result.excluded == 1);
    CHECK(result.examples.size() + result.excluded == instances.size());
    REQUIRE(result.exclusion_reasons.size() == 1);
    CHECK(result.exclusion_reasons[0].find("fc-3") != std::string::npos);

    for (const auto& example : result.examples) {
        CHECK(example.kind == SftKind::Criteria);
        REQUIRE(example.input_messages.size() == 2);
        CHECK(example.input_messages[1].content.find("### Instruction:") !=
              std::string::npos);
        CHECK_NOTHROW(parse::parse_criteria(example.target));
    }
}

TEST_CASE("export_ft_judge produces eval prompts with teacher criteria filled in") {
    Stack stack;
    stack.mock.register_script("identify important factors", kTwoFactors);
    stack.mock.register_script("fj-1 explain", "Feedback: solid work [RESULT] 4");
    stack.mock.register_script("fj-2 explain", "Feedback: thin [RESULT] 2");
    stack.mock.register_script("fj-3 explain", "no marker in this one");

    std::vector<EvaluationInstance> instances;
    for (int i = 1; i <= 3; ++i) {
        EvaluationInstance instance;
        instance.id = "fj-" + std::to_string(i);
        instance.mode = Mode::Absolute;
        instance.instruction = instance.id + " explain erosion";
        instance.response = "an answer " + instance.id;
        instance.reference = "the reference " + instance.id;
        instances.push_back(std::move(instance));
    }

    const auto result = export_ft_judge(instances, stack.pipe);
    CHECK(result.examples.size() == 2);
    CHECK(result.excluded == 1);
    CHECK(result.examples.size() + result.excluded == instances.size());

    for (const auto& example : result.examples) {
        CHECK(example.kind == SftKind::Judge);
        // the system message carries the serialized teacher criteria
        CHECK(example.input_messages[0].content.find("**Clarity**") != std::string::npos);
        const auto parsed = parse::parse_absolute_result(example.target);
        CHECK(parsed.score >= 1.0);
        CHECK(parsed.score <= 5.0);
    }
}

TEST_CASE("writers emit the documented file schemas deterministically") {
    const auto dir = test::fresh_temp_dir("distill_out");

    std::vector<PreferencePair> pairs{{"inst", "good", "bad", 5.0, 1.0, 4.0}};
    write_preference_pairs(dir / "pairs.jsonl", pairs);
    const auto pair_records = jsonl::read_records(dir / "pairs.jsonl");
    REQUIRE(pair_records.size() == 1);
    const auto& row = pair_records[0].value;
    const std::set<std::string> expected_keys{"prompt", "chosen", "rejected", "chosen_score",
                                              "rejected_score"};
    std::set<std::string> actual_keys;
    for (const auto& [key, value] : row.items()) actual_keys.insert(key);
    CHECK(actual_keys == expected_keys);
    CHECK(row["prompt"] == "inst");
    CHECK(row["chosen_score"] == 5.0);

    std::vector<SftExample> examples{
        {{{providers::Role::System, "sys"}, {providers::Role::User, "usr"}},
         "1.) **A** - b",
         SftKind::Criteria}};
    write_sft_examples(dir / "sft.jsonl", examples);
    const auto first_bytes = jsonl::read_file(dir / "sft.jsonl");
    write_sft_examples(dir / "sft.jsonl", examples);
    CHECK(jsonl::read_file(dir / "sft.jsonl") == first_bytes);

    const auto sft_records = jsonl::read_records(dir / "sft.jsonl");
    REQUIRE(sft_records.size() == 1);
    CHECK(sft_records[0].value["messages"][0]["role"] == "system");
    CHECK(sft_records[0].value["target"] == "1.) **A** - b");

    std::filesystem::remove_all(dir);
}
