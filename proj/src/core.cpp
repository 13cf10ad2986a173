#include "salc/core.hpp"

#include <cmath>

namespace salc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::WeightSumError: return "WeightSumError";
        case ErrorCode::EmptyCriteria: return "EmptyCriteria";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::EmptyField: return "EmptyField";
        case ErrorCode::MalformedOutput: return "MalformedOutput";
        case ErrorCode::NonMonotonicNumbering: return "NonMonotonicNumbering";
        case ErrorCode::AmbiguousVerdict: return "AmbiguousVerdict";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::RateLimited: return "RateLimited";
        case ErrorCode::ExhaustedRetries: return "ExhaustedRetries";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::AllTied: return "AllTied";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::TooFewResponses: return "TooFewResponses";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

std::string_view to_string(Mode mode) {
    return mode == Mode::Absolute ? "absolute" : "relative";
}

std::string_view to_string(Preference pref) {
    switch (pref) {
        case Preference::A: return "A";
        case Preference::B: return "B";
        case Preference::Tie: return "Tie";
    }
    return "?";
}

void validate(const EvaluationInstance& instance) {
    if (instance.id.empty()) {
        throw Error(ErrorCode::SchemaError, "instance id must be nonempty");
    }
    if (instance.instruction.empty()) {
        throw Error(ErrorCode::SchemaError, "instance '" + instance.id + "' has empty instruction");
    }
    if (instance.mode == Mode::Absolute) {
        if (instance.response.empty()) {
            throw Error(ErrorCode::SchemaError,
                        "absolute instance '" + instance.id + "' must carry one response");
        }
        if (!instance.response_a.empty() || !instance.response_b.empty()) {
            throw Error(ErrorCode::SchemaError,
                        "absolute instance '" + instance.id + "' must not carry response_a/response_b");
        }
    } else {
        if (instance.response_a.empty() || instance.response_b.empty()) {
            throw Error(ErrorCode::SchemaError,
                        "relative instance '" + instance.id + "' must carry response_a and response_b");
        }
        if (!instance.response.empty()) {
            throw Error(ErrorCode::SchemaError,
                        "relative instance '" + instance.id + "' must not carry a single response");
        }
    }
    if (instance.gold_preference && *instance.gold_preference == Preference::Tie) {
        throw Error(ErrorCode::SchemaError,
                    "instance '" + instance.id + "' gold_preference must be A or B");
    }
}

void validate(const CriteriaSet& set) {
    if (set.criteria.empty()) {
        throw Error(ErrorCode::EmptyCriteria, "criteria set must contain at least one criterion");
    }
    bool all_weighted = true;
    double sum = 0.0;
    for (const auto& criterion : set.criteria) {
        if (criterion.name.empty()) {
            throw Error(ErrorCode::SchemaError, "criterion name must be nonempty");
        }
        if (criterion.weight) {
            if (*criterion.weight < 0.0 || *criterion.weight > 1.0) {
                throw Error(ErrorCode::OutOfRange, "criterion weight must lie in [0,1]");
            }
            sum += *criterion.weight;
        } else {
            all_weighted = false;
        }
    }
    if (all_weighted && std::abs(sum - 1.0) > kWeightSumTolerance) {
        throw Error(ErrorCode::WeightSumError,
                    "criterion weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

void validate(const Assessment& assessment) {
    if (assessment.absolute_score && assessment.verdict) {
        throw Error(ErrorCode::SchemaError,
                    "assessment carries both an absolute score and a verdict");
    }
    if (assessment.absolute_score &&
        (*assessment.absolute_score < 1.0 || *assessment.absolute_score > 5.0)) {
        throw Error(ErrorCode::OutOfRange, "absolute score must lie in [1,5]");
    }
}

double aggregate_absolute(std::span<const PerCriterionScore> scores,
                          std::span<const double> weights) {
    if (scores.empty() || weights.empty()) {
        throw Error(ErrorCode::EmptyCriteria, "aggregate requires at least one criterion");
    }
    if (scores.size() != weights.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(scores.size()) + " scores vs " +
                        std::to_string(weights.size()) + " weights");
    }
    double weight_sum = 0.0;
    for (double weight : weights) {
        if (weight < 0.0) {
            throw Error(ErrorCode::OutOfRange, "weights must be nonnegative");
        }
        weight_sum += weight;
    }
    if (std::abs(weight_sum - 1.0) > kWeightSumTolerance) {
        throw Error(ErrorCode::WeightSumError,
                    "weights sum to " + std::to_string(weight_sum) + ", expected 1");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        if (scores[j].score < 1 || scores[j].score > 5) {
            throw Error(ErrorCode::OutOfRange, "per-criterion scores must lie in [1,5]");
        }
        total += weights[j] * static_cast<double>(scores[j].score);
    }
    return total;
}

std::pair<double, double> aggregate_relative(std::span<const PerCriterionScore> scores_a,
                                             std::span<const PerCriterionScore> scores_b,
                                             std::span<const double> weights_a,
                                             std::span<const double> weights_b) {
    return {aggregate_absolute(scores_a, weights_a), aggregate_absolute(scores_b, weights_b)};
}

Preference induce_preference(double score_a, double score_b) {
    if (score_a > score_b) return Preference::A;
    if (score_b > score_a) return Preference::B;
    return Preference::Tie;
}

}  // namespace salc
