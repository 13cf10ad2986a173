#include "salc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include "salc/digest.hpp"
#include "salc/json_io.hpp"
#include "salc/jsonl.hpp"
#include "salc/metrics.hpp"

namespace salc::pipeline {

using nlohmann::json;
using providers::ChatMessage;
using providers::CompletionRequest;
using providers::Role;

namespace {

constexpr std::string_view kCriteriaReminder =
    "Reminder: respond with numbered factor lines only, each formatted exactly as "
    "`1.) **FactorName** - description`.";
constexpr std::string_view kAbsoluteReminder =
    "Reminder: end your reply with `[RESULT]` followed by a single integer between 1 and 5.";
constexpr std::string_view kVerdictReminder =
    "Reminder: end your reply with your final verdict token, exactly `[[A]]` or `[[B]]`.";
constexpr std::string_view kExplicitAbsoluteExtension =
    "After your feedback, list each factor on its own line formatted exactly as "
    "`1. score=<integer 1-5> weight=<decimal between 0 and 1>`, with weights summing to 1.";
constexpr std::string_view kExplicitRelativeExtension =
    "After your feedback, output a `### Response A:` section and then a `### Response B:` "
    "section; under each, list each factor on its own line formatted exactly as "
    "`1. score=<integer 1-5> weight=<decimal between 0 and 1>`, with weights summing to 1.";
constexpr std::string_view kExplicitReminder =
    "Reminder: one line per factor, formatted exactly as "
    "`1. score=<integer 1-5> weight=<decimal between 0 and 1>`, weights summing to 1.";

bool is_format_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedOutput:
        case ErrorCode::OutOfRange:
        case ErrorCode::WeightSumError:
        case ErrorCode::EmptyCriteria:
        case ErrorCode::EmptyInput:
        case ErrorCode::NonMonotonicNumbering:
            return true;
        default:
            return false;
    }
}

}  // namespace

void validate(const PipelineConfig& config) {
    if (config.judge_model_id.empty() || config.criteria_model_id.empty()) {
        throw Error(ErrorCode::ConfigError, "judge and criteria model ids must be nonempty");
    }
    if (config.max_tokens < 1) {
        throw Error(ErrorCode::ConfigError, "max_tokens must be >= 1");
    }
    providers::validate(config.provider_policy);
}

std::string config_hash(const PipelineConfig& config) {
    std::string canon;
    canon += "judge\x1f" + config.judge_model_id;
    canon += "\x1e"
             "criteria\x1f" +
             config.criteria_model_id;
    canon += "\x1e"
             "weighting\x1f";
    canon += config.weighting_mode == WeightingMode::Holistic ? "holistic" : "explicit";
    canon += "\x1e"
             "strict_scores\x1f";
    canon += config.parse_policy.strict_integer_scores ? '1' : '0';
    canon += "\x1e"
             "numbering_variants\x1f";
    canon += config.parse_policy.accept_numbering_variants ? '1' : '0';
    canon += "\x1e"
             "verdict\x1f";
    canon += config.parse_policy.verdict_occurrence == parse::VerdictOccurrence::Last ? "last"
                                                                                      : "first";
    canon += "\x1e"
             "max_attempts\x1f" +
             std::to_string(config.provider_policy.max_attempts);
    canon += "\x1e"
             "max_tokens\x1f" +
             std::to_string(config.max_tokens);
    return stable_digest(canon);
}

Pipeline::Pipeline(PipelineConfig config, providers::ProviderClient& client)
    : config_(std::move(config)), client_(client) {
    validate(config_);
}

CompletionRequest Pipeline::base_request(const std::string& model_id,
                                         const prompts::RenderedPrompt& prompt) const {
    CompletionRequest request;
    request.model_id = model_id;
    request.messages = prompt.messages;
    request.temperature = 0.0;
    request.max_tokens = config_.max_tokens;
    return request;
}

std::string Pipeline::complete_with_format_retry(
    CompletionRequest request, const std::string& reminder,
    const std::function<void(const std::string&)>& try_parse) {
    const int max_attempts = config_.provider_policy.max_attempts;
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        providers::CompletionResult result = client_.complete(request);
        try {
            try_parse(result.text);
            return result.text;
        } catch (const Error& error) {
            if (!is_format_error(error.code())) throw;
            last_error = error.what();
            // A bare retry replays the same greedy completion; escalate by
            // appending the reply and a one-line format reminder instead.
            request.messages.push_back({Role::Assistant, result.text});
            request.messages.push_back({Role::User, reminder});
        }
    }
    throw Error(ErrorCode::MalformedOutput,
                "unparseable after " + std::to_string(max_attempts) +
                    " attempts; last error: " + last_error);
}

void Pipeline::record_raw(const std::string& instance_id, const std::string& stage,
                          const std::string& text) {
    std::lock_guard lock(artifacts_mutex_);
    raw_records_.push_back({instance_id, stage, text});
}

void Pipeline::record_criteria(const CriteriaSet& criteria) {
    std::lock_guard lock(artifacts_mutex_);
    criteria_records_.push_back(criteria);
}

void Pipeline::record_assessment(const Assessment& assessment) {
    std::lock_guard lock(artifacts_mutex_);
    assessment_records_.push_back(assessment);
}

CriteriaSet Pipeline::generate_criteria(const EvaluationInstance& instance) {
    return generate_criteria_raw(instance).criteria;
}

Pipeline::RawCriteria Pipeline::generate_criteria_raw(const EvaluationInstance& instance) {
    validate(instance);
    prompts::RenderedPrompt prompt;
    if (instance.mode == Mode::Relative) {
        prompt = prompts::render_relative_criteria(instance.instruction, instance.response_a,
                                                   instance.response_b);
    } else if (instance.reference) {
        prompt = prompts::render_absolute_criteria(instance.instruction, *instance.reference,
                                                   instance.response);
    } else {
        prompt = prompts::render_reference_free_criteria(instance.instruction, instance.response);
    }

    CriteriaSet parsed;
    const std::string raw = complete_with_format_retry(
        base_request(config_.criteria_model_id, prompt), std::string(kCriteriaReminder),
        [&](const std::string& text) { parsed = parse::parse_criteria(text, config_.parse_policy); });
    parsed.instance_id = instance.id;
    parsed.source = CriteriaSource::Generated;
    record_raw(instance.id, "criteria", raw);
    record_criteria(parsed);
    return {raw, std::move(parsed)};
}

CriteriaSet Pipeline::generate_group_criteria(const std::string& group_id,
                                              const std::string& instruction,
                                              std::span<const std::string> responses) {
    if (responses.size() < 2) {
        throw Error(ErrorCode::TooFewResponses, "group criteria need at least two responses");
    }
    auto prompt = prompts::render_relative_criteria(instruction, responses[0], responses[1]);
    CriteriaSet parsed;
    const std::string raw = complete_with_format_retry(
        base_request(config_.criteria_model_id, prompt), std::string(kCriteriaReminder),
        [&](const std::string& text) { parsed = parse::parse_criteria(text, config_.parse_policy); });
    parsed.instance_id = group_id;
    parsed.source = CriteriaSource::Generated;
    record_raw(group_id, "criteria", raw);
    record_criteria(parsed);
    return parsed;
}

Assessment Pipeline::evaluate_absolute(const EvaluationInstance& instance) {
    validate(instance);
    if (instance.mode != Mode::Absolute) {
        throw Error(ErrorCode::SchemaError,
                    "evaluate_absolute needs an Absolute instance, got '" + instance.id + "'");
    }
    return evaluate_absolute_impl(instance, generate_criteria(instance));
}

Assessment Pipeline::evaluate_absolute(const EvaluationInstance& instance,
                                       const CriteriaSet& criteria) {
    validate(instance);
    if (instance.mode != Mode::Absolute) {
        throw Error(ErrorCode::SchemaError,
                    "evaluate_absolute needs an Absolute instance, got '" + instance.id + "'");
    }
    return evaluate_absolute_impl(instance, criteria);
}

Assessment Pipeline::evaluate_absolute_impl(const EvaluationInstance& instance,
                                            const CriteriaSet& criteria) {
    const auto prompt =
        instance.reference
            ? prompts::render_absolute_eval(instance.instruction, criteria, *instance.reference,
                                            instance.response)
            : prompts::render_reference_free_eval(instance.instruction, criteria,
                                                  instance.response);

    Assessment assessment;
    assessment.instance_id = instance.id;
    assessment.criteria_used = criteria;

    if (config_.weighting_mode == WeightingMode::Holistic) {
        auto request = base_request(config_.judge_model_id, prompt);
        parse::AbsoluteResult parsed;
        const std::string raw = complete_with_format_retry(
            std::move(request), std::string(kAbsoluteReminder), [&](const std::string& text) {
                parsed = parse::parse_absolute_result(text, config_.parse_policy);
            });
        assessment.feedback = parsed.feedback;
        assessment.absolute_score = parsed.score;
        record_raw(instance.id, "eval", raw);
    } else {
        auto request = base_request(config_.judge_model_id, prompt);
        request.messages.push_back({Role::User, std::string(kExplicitAbsoluteExtension)});
        std::vector<parse::ExplicitScore> parsed;
        const std::string raw = complete_with_format_retry(
            std::move(request), std::string(kExplicitReminder), [&](const std::string& text) {
                auto scores = parse::parse_explicit_scores(text);
                if (scores.size() != criteria.criteria.size()) {
                    throw Error(ErrorCode::MalformedOutput,
                                "expected " + std::to_string(criteria.criteria.size()) +
                                    " score lines, got " + std::to_string(scores.size()));
                }
                parsed = std::move(scores);
            });
        std::vector<PerCriterionScore> scores;
        std::vector<double> weights;
        for (const auto& entry : parsed) {
            scores.push_back(entry.score);
            weights.push_back(entry.weight);
        }
        assessment.feedback = raw;
        assessment.absolute_score = aggregate_absolute(scores, weights);
        assessment.per_criterion = std::move(scores);
        record_raw(instance.id, "eval", raw);
    }
    validate(assessment);
    record_assessment(assessment);
    return assessment;
}

Assessment Pipeline::evaluate_relative(const EvaluationInstance& instance) {
    validate(instance);
    if (instance.mode != Mode::Relative) {
        throw Error(ErrorCode::SchemaError,
                    "evaluate_relative needs a Relative instance, got '" + instance.id + "'");
    }
    return evaluate_relative_impl(instance, generate_criteria(instance));
}

Assessment Pipeline::evaluate_relative(const EvaluationInstance& instance,
                                       const CriteriaSet& criteria) {
    validate(instance);
    if (instance.mode != Mode::Relative) {
        throw Error(ErrorCode::SchemaError,
                    "evaluate_relative needs a Relative instance, got '" + instance.id + "'");
    }
    return evaluate_relative_impl(instance, criteria);
}

Assessment Pipeline::evaluate_relative_impl(const EvaluationInstance& instance,
                                            const CriteriaSet& criteria) {
    const auto prompt = prompts::render_relative_eval(instance.instruction, criteria,
                                                      instance.response_a, instance.response_b);

    Assessment assessment;
    assessment.instance_id = instance.id;
    assessment.criteria_used = criteria;

    if (config_.weighting_mode == WeightingMode::Holistic) {
        parse::VerdictResult parsed;
        const std::string raw = complete_with_format_retry(
            base_request(config_.judge_model_id, prompt), std::string(kVerdictReminder),
            [&](const std::string& text) {
                parsed = parse::parse_relative_verdict(text, config_.parse_policy);
            });
        assessment.feedback = parsed.feedback;
        assessment.verdict = parsed.verdict;
        record_raw(instance.id, "eval", raw);
    } else {
        auto request = base_request(config_.judge_model_id, prompt);
        request.messages.push_back({Role::User, std::string(kExplicitRelativeExtension)});
        std::vector<parse::ExplicitScore> side_a, side_b;
        const std::string raw = complete_with_format_retry(
            std::move(request), std::string(kExplicitReminder), [&](const std::string& text) {
                auto [a, b] = parse::parse_explicit_scores_relative(text);
                if (a.size() != criteria.criteria.size() || b.size() != criteria.criteria.size()) {
                    throw Error(ErrorCode::MalformedOutput,
                                "per-side score lines must cover every criterion");
                }
                side_a = std::move(a);
                side_b = std::move(b);
            });
        std::vector<PerCriterionScore> scores_a, scores_b;
        std::vector<double> weights_a, weights_b;
        for (const auto& entry : side_a) {
            scores_a.push_back(entry.score);
            weights_a.push_back(entry.weight);
        }
        for (const auto& entry : side_b) {
            scores_b.push_back(entry.score);
            weights_b.push_back(entry.weight);
        }
        const auto [score_a, score_b] =
            aggregate_relative(scores_a, scores_b, weights_a, weights_b);
        assessment.feedback = raw;
        assessment.verdict = induce_preference(score_a, score_b);  // Tie possible here
        record_raw(instance.id, "eval", raw);
    }
    validate(assessment);
    record_assessment(assessment);
    return assessment;
}

Pipeline::RawJudgement Pipeline::judge_absolute_raw(const EvaluationInstance& instance,
                                                    const CriteriaSet& criteria) {
    validate(instance);
    const auto prompt =
        instance.reference
            ? prompts::render_absolute_eval(instance.instruction, criteria, *instance.reference,
                                            instance.response)
            : prompts::render_reference_free_eval(instance.instruction, criteria,
                                                  instance.response);
    parse::AbsoluteResult parsed;
    const std::string raw = complete_with_format_retry(
        base_request(config_.judge_model_id, prompt), std::string(kAbsoluteReminder),
        [&](const std::string& text) {
            parsed = parse::parse_absolute_result(text, config_.parse_policy);
        });
    record_raw(instance.id, "eval", raw);
    return {raw, std::move(parsed)};
}

RunReport Pipeline::run_benchmark(const std::string& dataset_name,
                                  std::span<const EvaluationInstance> instances) {
    {
        std::set<std::string> ids;
        for (const auto& instance : instances) {
            if (!ids.insert(instance.id).second) {
                throw Error(ErrorCode::DuplicateId,
                            "duplicate instance id '" + instance.id + "' in dataset");
            }
        }
    }

    const std::size_t n = instances.size();
    std::vector<InstanceOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            const EvaluationInstance& instance = instances[i];
            InstanceOutcome outcome;
            outcome.instance_id = instance.id;
            try {
                outcome.assessment = instance.mode == Mode::Relative
                                         ? evaluate_relative(instance)
                                         : evaluate_absolute(instance);
            } catch (const Error& error) {
                outcome.failure_reason = error.what();
            } catch (const std::exception& error) {
                outcome.failure_reason = std::string("unexpected: ") + error.what();
            }
            outcomes[i] = std::move(outcome);
        }
    };

    const int thread_count =
        static_cast<int>(std::min<std::size_t>(config_.provider_policy.max_concurrent,
                                               std::max<std::size_t>(n, 1)));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();

    std::sort(outcomes.begin(), outcomes.end(),
              [](const InstanceOutcome& a, const InstanceOutcome& b) {
                  return a.instance_id < b.instance_id;
              });

    RunReport report;
    report.dataset_name = dataset_name;
    report.per_instance = std::move(outcomes);
    for (const auto& outcome : report.per_instance) {
        outcome.assessment ? ++report.parsed_count : ++report.unparseable_count;
    }
    report.config_digest = config_hash(config_);
    report.completion_requests = client_.request_count();
    report.distinct_cache_keys = client_.unique_key_count();

    std::map<std::string, const EvaluationInstance*> by_id;
    for (const auto& instance : instances) by_id[instance.id] = &instance;

    auto compute_block = [&](const std::vector<const InstanceOutcome*>& subset,
                             std::map<std::string, double>& block,
                             std::map<std::string, std::string>* errors) {
        std::vector<Preference> preds, gold;
        metrics::PairedSample scores;
        for (const InstanceOutcome* outcome : subset) {
            if (!outcome->assessment) continue;
            const EvaluationInstance* instance = by_id.at(outcome->instance_id);
            if (instance->gold_preference && outcome->assessment->verdict) {
                preds.push_back(*outcome->assessment->verdict);
                gold.push_back(*instance->gold_preference);
            }
            if (instance->gold_score && outcome->assessment->absolute_score) {
                scores.x.push_back(*outcome->assessment->absolute_score);
                scores.y.push_back(*instance->gold_score);
            }
        }
        if (!preds.empty()) {
            const auto agreement = metrics::preference_agreement(preds, gold);
            block["accuracy"] = agreement.accuracy;
            block["macro_f1"] = agreement.macro_f1;
            block["preference_count"] = static_cast<double>(preds.size());
        }
        if (scores.x.size() >= 2) {
            block["score_count"] = static_cast<double>(scores.x.size());
            struct Entry {
                const char* name;
                double (*fn)(const metrics::PairedSample&);
            };
            for (const Entry& entry :
                 {Entry{"pearson", metrics::pearson}, Entry{"spearman", metrics::spearman},
                  Entry{"kendall_tau_b", metrics::kendall_tau_b}}) {
                try {
                    block[entry.name] = entry.fn(scores);
                } catch (const Error& error) {
                    if (errors) (*errors)[entry.name] = std::string(to_string(error.code()));
                }
            }
        }
    };

    std::vector<const InstanceOutcome*> all;
    std::map<std::string, std::vector<const InstanceOutcome*>> by_category;
    for (const auto& outcome : report.per_instance) {
        all.push_back(&outcome);
        const EvaluationInstance* instance = by_id.at(outcome.instance_id);
        if (instance->category) by_category[*instance->category].push_back(&outcome);
    }
    compute_block(all, report.metric_block, &report.metric_errors);
    for (const auto& [category, subset] : by_category) {
        std::map<std::string, double> block;
        block["count"] = static_cast<double>(subset.size());
        compute_block(subset, block, nullptr);
        report.per_category[category] = std::move(block);
    }
    return report;
}

json report_to_json(const RunReport& report) {
    json per_instance = json::array();
    for (const auto& outcome : report.per_instance) {
        json entry;
        entry["instance_id"] = outcome.instance_id;
        if (outcome.assessment) {
            entry["status"] = "ok";
            entry["assessment"] = json_io::to_json(*outcome.assessment);
            entry["reason"] = nullptr;
        } else {
            entry["status"] = "unparseable";
            entry["assessment"] = nullptr;
            entry["reason"] = outcome.failure_reason;
        }
        per_instance.push_back(std::move(entry));
    }
    return json{{"dataset_name", report.dataset_name},
                {"instances_total", report.parsed_count + report.unparseable_count},
                {"parsed_count", report.parsed_count},
                {"unparseable_count", report.unparseable_count},
                {"metrics", report.metric_block},
                {"metric_errors", report.metric_errors},
                {"per_category", report.per_category},
                {"per_instance", std::move(per_instance)},
                {"provenance",
                 {{"config_hash", report.config_digest},
                  {"cache", {{"completion_requests", report.completion_requests},
                             {"distinct_keys", report.distinct_cache_keys}}}}}};
}

std::string report_table(const RunReport& report) {
    std::ostringstream out;
    out << "dataset: " << report.dataset_name << "\n";
    out << "instances: " << report.parsed_count + report.unparseable_count << " (parsed "
        << report.parsed_count << ", unparseable " << report.unparseable_count << ")\n";
    auto print_block = [&](const std::string& label,
                           const std::map<std::string, double>& block) {
        out << label << ":";
        if (block.empty()) out << " (no metrics)";
        for (const auto& [name, value] : block) {
            out << " " << name << "=" << value;
        }
        out << "\n";
    };
    print_block("overall", report.metric_block);
    for (const auto& [category, block] : report.per_category) {
        print_block("  " + category, block);
    }
    for (const auto& [metric, why] : report.metric_errors) {
        out << "  (" << metric << " unavailable: " << why << ")\n";
    }
    return out.str();
}

void Pipeline::persist_artifacts(const std::filesystem::path& run_dir) const {
    std::vector<RawRecord> raw;
    std::vector<CriteriaSet> criteria;
    std::vector<Assessment> assessments;
    {
        std::lock_guard lock(artifacts_mutex_);
        raw = raw_records_;
        criteria = criteria_records_;
        assessments = assessment_records_;
    }
    std::stable_sort(raw.begin(), raw.end(), [](const RawRecord& a, const RawRecord& b) {
        return std::tie(a.instance_id, a.stage) < std::tie(b.instance_id, b.stage);
    });
    std::stable_sort(criteria.begin(), criteria.end(),
                     [](const CriteriaSet& a, const CriteriaSet& b) {
                         return a.instance_id < b.instance_id;
                     });
    std::stable_sort(assessments.begin(), assessments.end(),
                     [](const Assessment& a, const Assessment& b) {
                         return a.instance_id < b.instance_id;
                     });

    const auto dir = run_dir / config_hash(config_);
    std::filesystem::create_directories(dir);

    std::ostringstream raw_out;
    for (const auto& record : raw) {
        raw_out << json{{"instance_id", record.instance_id},
                        {"stage", record.stage},
                        {"text", record.text}}
                       .dump()
                << '\n';
    }
    jsonl::write_atomic(dir / "raw.jsonl", raw_out.str());

    std::ostringstream criteria_out;
    for (const auto& set : criteria) {
        criteria_out << json_io::to_json(set).dump() << '\n';
    }
    jsonl::write_atomic(dir / "criteria.jsonl", criteria_out.str());

    std::ostringstream assessments_out;
    for (const auto& assessment : assessments) {
        assessments_out << json_io::to_json(assessment).dump() << '\n';
    }
    jsonl::write_atomic(dir / "assessments.jsonl", assessments_out.str());
}

}  // namespace salc::pipeline
