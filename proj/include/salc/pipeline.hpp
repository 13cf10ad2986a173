#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "salc/core.hpp"
#include "salc/parse.hpp"
#include "salc/prompts.hpp"
#include "salc/providers.hpp"

namespace salc::pipeline {

enum class WeightingMode { Holistic, ExplicitWeights };

/// criteria_model_id may differ from judge_model_id (distilled two-model
/// split); using the same id for both reproduces the single-model setting.
struct PipelineConfig {
    std::string judge_model_id;
    std::string criteria_model_id;
    WeightingMode weighting_mode = WeightingMode::Holistic;
    parse::ParsePolicy parse_policy;
    providers::ProviderPolicy provider_policy;
    int max_tokens = 1024;  // temperature is pinned to 0, not configurable
};

void validate(const PipelineConfig& config);

/// Stable hex digest of the full config; names the run directory.
std::string config_hash(const PipelineConfig& config);

struct InstanceOutcome {
    std::string instance_id;
    std::optional<Assessment> assessment;
    std::string failure_reason;  // set when assessment is absent
};

struct RunReport {
    std::string dataset_name;
    std::vector<InstanceOutcome> per_instance;  // sorted by instance id
    std::size_t parsed_count = 0;
    std::size_t unparseable_count = 0;
    std::map<std::string, double> metric_block;
    std::map<std::string, std::string> metric_errors;  // metric -> why it is absent
    std::map<std::string, std::map<std::string, double>> per_category;
    std::string config_digest;
    std::uint64_t completion_requests = 0;  // deterministic: same warm or cold
    std::uint64_t distinct_cache_keys = 0;
};

nlohmann::json report_to_json(const RunReport& report);
std::string report_table(const RunReport& report);

/// Two-stage orchestrator: generate criteria for an instance, then judge the
/// response(s) against exactly those criteria. Parse failures are retried up
/// to provider_policy.max_attempts with a one-line corrective reminder
/// appended to the conversation (a bare retry is pointless at temperature 0);
/// an instance that never parses is recorded as unparseable, never dropped
/// silently.
class Pipeline {
public:
    Pipeline(PipelineConfig config, providers::ProviderClient& client);

    const PipelineConfig& config() const { return config_; }

    CriteriaSet generate_criteria(const EvaluationInstance& instance);

    /// Shared rubric for a response group: the relative criteria prompt over
    /// the first two candidates, so every candidate is scored on one scale.
    CriteriaSet generate_group_criteria(const std::string& group_id,
                                        const std::string& instruction,
                                        std::span<const std::string> responses);

    Assessment evaluate_absolute(const EvaluationInstance& instance);
    Assessment evaluate_absolute(const EvaluationInstance& instance, const CriteriaSet& criteria);
    Assessment evaluate_relative(const EvaluationInstance& instance);
    Assessment evaluate_relative(const EvaluationInstance& instance, const CriteriaSet& criteria);

    /// Evaluates every instance under bounded concurrency and reduces to a
    /// report keyed and sorted by instance id, so completion order never
    /// changes the result. Per-instance failures are recorded, not thrown.
    RunReport run_benchmark(const std::string& dataset_name,
                            std::span<const EvaluationInstance> instances);

    /// Raw judge text kept alongside the parsed value, for exports whose
    /// targets must be teacher output verbatim.
    struct RawCriteria {
        std::string raw_text;
        CriteriaSet criteria;
    };
    struct RawJudgement {
        std::string raw_text;
        parse::AbsoluteResult result;
    };
    RawCriteria generate_criteria_raw(const EvaluationInstance& instance);
    RawJudgement judge_absolute_raw(const EvaluationInstance& instance,
                                    const CriteriaSet& criteria);

    /// Per-instance artifacts (criteria, raw judge text, assessments) written
    /// as JSON Lines under dir/<config-hash>/, sorted by instance id.
    void persist_artifacts(const std::filesystem::path& run_dir) const;

private:
    struct RawRecord {
        std::string instance_id;
        std::string stage;  // "criteria" | "eval"
        std::string text;
    };

    providers::CompletionRequest base_request(const std::string& model_id,
                                              const prompts::RenderedPrompt& prompt) const;
    std::string complete_with_format_retry(providers::CompletionRequest request,
                                           const std::string& reminder,
                                           const std::function<void(const std::string&)>& try_parse);
    void record_raw(const std::string& instance_id, const std::string& stage,
                    const std::string& text);
    void record_criteria(const CriteriaSet& criteria);
    void record_assessment(const Assessment& assessment);

    Assessment evaluate_absolute_impl(const EvaluationInstance& instance,
                                      const CriteriaSet& criteria);
    Assessment evaluate_relative_impl(const EvaluationInstance& instance,
                                      const CriteriaSet& criteria);

    PipelineConfig config_;
    providers::ProviderClient& client_;

    mutable std::mutex artifacts_mutex_;
    std::vector<RawRecord> raw_records_;
    std::vector<CriteriaSet> criteria_records_;
    std::vector<Assessment> assessment_records_;
};

}  // namespace salc::pipeline
