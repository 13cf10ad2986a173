#include "salc/distill.hpp"

#include <algorithm>
#include <sstream>

#include "salc/json_io.hpp"
#include "salc/jsonl.hpp"
#include "salc/parse.hpp"
#include "salc/prompts.hpp"

namespace salc::distill {

using nlohmann::json;

void validate(const PreferencePair& pair, double threshold) {
    if (!(pair.chosen_score > pair.rejected_score)) {
        throw Error(ErrorCode::SchemaError, "chosen_score must exceed rejected_score");
    }
    if (pair.gap != pair.chosen_score - pair.rejected_score) {
        throw Error(ErrorCode::SchemaError, "gap must equal chosen_score - rejected_score");
    }
    if (pair.gap < threshold) {
        throw Error(ErrorCode::SchemaError, "gap below the configured threshold");
    }
}

std::optional<Selection> select_pair(std::span<const double> scores, double threshold) {
    if (scores.size() < 2) return std::nullopt;
    std::size_t best = 0, worst = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
        if (scores[i] < scores[worst]) worst = i;
    }
    // Ambiguous extremes are skipped rather than broken arbitrarily.
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i != best && scores[i] == scores[best]) return std::nullopt;
        if (i != worst && scores[i] == scores[worst]) return std::nullopt;
    }
    if (scores[best] - scores[worst] < threshold) return std::nullopt;
    return Selection{best, worst};
}

PrefGenResult generate_preference_pairs(std::span<const datasets::ResponseGroup> groups,
                                        pipeline::Pipeline& pipe, double threshold) {
    PrefGenResult result;
    for (const auto& group : groups) {
        GroupOutcome outcome;
        outcome.group_id = group.id;
        try {
            if (group.responses.size() < 2) {
                throw Error(ErrorCode::TooFewResponses,
                            "group '" + group.id + "' has fewer than two responses");
            }
            const CriteriaSet criteria =
                pipe.generate_group_criteria(group.id, group.instruction, group.responses);

            std::vector<double> scores;
            for (std::size_t i = 0; i < group.responses.size(); ++i) {
                EvaluationInstance candidate;
                candidate.id = group.id + "#" + std::to_string(i);
                candidate.mode = Mode::Absolute;
                candidate.instruction = group.instruction;
                candidate.response = group.responses[i];
                const Assessment assessment = pipe.evaluate_absolute(candidate, criteria);
                scores.push_back(assessment.absolute_score.value());
            }

            const auto selection = select_pair(scores, threshold);
            if (!selection) {
                const double max = *std::max_element(scores.begin(), scores.end());
                const double min = *std::min_element(scores.begin(), scores.end());
                const bool tied =
                    std::count(scores.begin(), scores.end(), max) > 1 ||
                    std::count(scores.begin(), scores.end(), min) > 1;
                outcome.skip_reason = tied ? "tie" : "gap";
                tied ? ++result.skipped_tie : ++result.skipped_gap;
            } else {
                PreferencePair pair;
                pair.instruction = group.instruction;
                pair.chosen = group.responses[selection->chosen_index];
                pair.rejected = group.responses[selection->rejected_index];
                pair.chosen_score = scores[selection->chosen_index];
                pair.rejected_score = scores[selection->rejected_index];
                pair.gap = pair.chosen_score - pair.rejected_score;
                validate(pair, threshold);
                outcome.pair = pair;
                result.pairs.push_back(std::move(pair));
                ++result.kept;
            }
        } catch (const Error& error) {
            outcome.skip_reason = error.what();
            ++result.skipped_error;
        }
        result.outcomes.push_back(std::move(outcome));
    }
    return result;
}

namespace {

SftExportResult export_impl(std::span<const EvaluationInstance> instances,
                            pipeline::Pipeline& pipe, SftKind kind) {
    SftExportResult result;
    for (const auto& instance : instances) {
        try {
            if (instance.mode != Mode::Absolute || !instance.reference) {
                throw Error(ErrorCode::SchemaError,
                            "SFT export needs absolute instances with references ('" +
                                instance.id + "')");
            }
            const auto teacher_criteria = pipe.generate_criteria_raw(instance);

            SftExample example;
            example.kind = kind;
            if (kind == SftKind::Criteria) {
                example.input_messages =
                    prompts::render_absolute_criteria(instance.instruction, *instance.reference,
                                                      instance.response)
                        .messages;
                example.target = teacher_criteria.raw_text;
                // Export gate: the target must re-parse as criteria.
                parse::parse_criteria(example.target, pipe.config().parse_policy);
            } else {
                const auto judged = pipe.judge_absolute_raw(instance, teacher_criteria.criteria);
                example.input_messages =
                    prompts::render_absolute_eval(instance.instruction, teacher_criteria.criteria,
                                                  *instance.reference, instance.response)
                        .messages;
                example.target = judged.raw_text;
                parse::parse_absolute_result(example.target, pipe.config().parse_policy);
            }
            result.examples.push_back(std::move(example));
        } catch (const Error& error) {
            ++result.excluded;
            result.exclusion_reasons.push_back(instance.id + ": " + error.what());
        }
    }
    return result;
}

}  // namespace

SftExportResult export_ft_criteria(std::span<const EvaluationInstance> instances,
                                   pipeline::Pipeline& pipe) {
    return export_impl(instances, pipe, SftKind::Criteria);
}

SftExportResult export_ft_judge(std::span<const EvaluationInstance> instances,
                                pipeline::Pipeline& pipe) {
    return export_impl(instances, pipe, SftKind::Judge);
}

void write_preference_pairs(const std::filesystem::path& path,
                            std::span<const PreferencePair> pairs) {
    std::ostringstream out;
    for (const auto& pair : pairs) {
        out << json{{"prompt", pair.instruction},
                    {"chosen", pair.chosen},
                    {"rejected", pair.rejected},
                    {"chosen_score", pair.chosen_score},
                    {"rejected_score", pair.rejected_score}}
                   .dump()
            << '\n';
    }
    jsonl::write_atomic(path, out.str());
}

void write_sft_examples(const std::filesystem::path& path,
                        std::span<const SftExample> examples) {
    std::ostringstream out;
    for (const auto& example : examples) {
        json messages = json::array();
        for (const auto& message : example.input_messages) {
            messages.push_back(json_io::to_json(message));
        }
        out << json{{"messages", std::move(messages)}, {"target", example.target}}.dump()
            << '\n';
    }
    jsonl::write_atomic(path, out.str());
}

}  // namespace salc::distill
