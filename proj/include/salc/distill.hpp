#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salc/datasets.hpp"
#include "salc/pipeline.hpp"
#include "salc/providers.hpp"

namespace salc::distill {

struct PreferencePair {
    std::string instruction;
    std::string chosen;
    std::string rejected;
    double chosen_score = 0.0;
    double rejected_score = 0.0;
    double gap = 0.0;  // chosen_score - rejected_score, >= the threshold used
};

void validate(const PreferencePair& pair, double threshold);

/// Pure pair selection: highest and lowest score, skipped when either extreme
/// is ambiguous (tied) or the gap is under the threshold. This is the whole
/// filter; the pipeline only supplies the scores.
struct Selection {
    std::size_t chosen_index = 0;
    std::size_t rejected_index = 0;
};
std::optional<Selection> select_pair(std::span<const double> scores, double threshold);

struct GroupOutcome {
    std::string group_id;
    std::optional<PreferencePair> pair;
    std::string skip_reason;  // "tie", "gap", or an error description
};

struct PrefGenResult {
    std::vector<PreferencePair> pairs;
    std::vector<GroupOutcome> outcomes;  // one per input group, in order
    std::size_t kept = 0;
    std::size_t skipped_tie = 0;
    std::size_t skipped_gap = 0;
    std::size_t skipped_error = 0;
};

/// Scores every response in every group with reference-free absolute
/// evaluation against one shared per-group rubric, then applies select_pair.
/// The threshold has no default anywhere: the score scale is dataset-declared
/// and must be chosen consciously.
PrefGenResult generate_preference_pairs(std::span<const datasets::ResponseGroup> groups,
                                        pipeline::Pipeline& pipe, double threshold);

enum class SftKind { Criteria, Judge };

struct SftExample {
    std::vector<providers::ChatMessage> input_messages;
    std::string target;  // teacher output, verbatim
    SftKind kind = SftKind::Criteria;
};

struct SftExportResult {
    std::vector<SftExample> examples;
    std::size_t excluded = 0;
    std::vector<std::string> exclusion_reasons;  // aligned with excluded instances
};

/// One example per instance: input is the rendered criteria prompt, target is
/// the teacher's criteria text. Targets that fail to re-parse are excluded
/// and counted; inputs always reconcile as examples + exclusions.
SftExportResult export_ft_criteria(std::span<const EvaluationInstance> instances,
                                   pipeline::Pipeline& pipe);

/// Inputs are the rendered eval prompt with the teacher's criteria filled in;
/// targets are the teacher's "Feedback: ... [RESULT] n" text, re-parse gated.
SftExportResult export_ft_judge(std::span<const EvaluationInstance> instances,
                                pipeline::Pipeline& pipe);

void write_preference_pairs(const std::filesystem::path& path,
                            std::span<const PreferencePair> pairs);
void write_sft_examples(const std::filesystem::path& path,
                        std::span<const SftExample> examples);

}  // namespace salc::distill
