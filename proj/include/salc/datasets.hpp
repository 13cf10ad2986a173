#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "salc/core.hpp"
#include "salc/jsonl.hpp"

namespace salc::datasets {

/// A normalized dataset file: one JSONL row per instance in the documented
/// eleven-key schema, uniform dataset name, unique ids.
struct NormalizedFile {
    std::string dataset;
    std::vector<EvaluationInstance> instances;
};

NormalizedFile load_normalized(const std::filesystem::path& path);

void write_normalized(const std::filesystem::path& path, const std::string& dataset,
                      std::span<const EvaluationInstance> instances);

/// HHH-style preference rows: {"input", "targets": [t0, t1], "preferred": 0|1,
/// "subset"}. targets[0] becomes response A, so preferred 0 means gold A.
/// Subsets map onto the categories Help. / Harm. / Hon. / Other.
std::vector<EvaluationInstance> adapt_hhh(const std::vector<jsonl::Record>& raw);

struct PairwiseResult {
    std::vector<EvaluationInstance> instances;
    std::size_t tie_excluded = 0;
};

/// Pairwise comparison rows carrying an instruction (or multi-turn "turns",
/// where only the last turn is kept), two answers (strings, or arrays whose
/// last element is kept), and optionally a winner. Winner labels accept both
/// human and model variants: A/B, model_a/model_b, 1/2. Rows whose winner is
/// "tie" are excluded and counted, never guessed.
PairwiseResult adapt_pairwise(const std::vector<jsonl::Record>& raw,
                              const std::string& dataset_name);

/// Instruction/response/reference rows in the feedback-collection shape
/// ("orig_"-prefixed keys accepted). The original rubric, score and feedback
/// are dropped from the instance; the score is kept separately as gold_score
/// for correlation reporting only.
std::vector<EvaluationInstance> adapt_feedback_collection(const std::vector<jsonl::Record>& raw);

struct ResponseGroup {
    std::string id;
    std::string instruction;
    std::vector<std::string> responses;  // source order preserved
};

/// Rows with an instruction and >= 2 candidate completions (strings or
/// objects with a "response" key). No reference answers exist here.
std::vector<ResponseGroup> adapt_ultrafeedback(const std::vector<jsonl::Record>& raw);

}  // namespace salc::datasets
