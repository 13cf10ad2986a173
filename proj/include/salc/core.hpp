#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "salc/error.hpp"

namespace salc {

enum class Mode { Absolute, Relative };

/// Three-valued judge outcome. Holistic relative judging only ever yields
/// A or B; Tie can arise when a preference is induced from two absolute
/// scores, and benchmark scoring counts it as a miss.
enum class Preference { A, B, Tie };

std::string_view to_string(Mode mode);
std::string_view to_string(Preference pref);

/// One judging task. Absolute mode carries exactly one response and may carry
/// a reference answer; Relative mode carries two responses and no reference.
struct EvaluationInstance {
    std::string id;
    std::string instruction;
    std::optional<std::string> reference;
    Mode mode = Mode::Absolute;
    std::string response;     // Absolute
    std::string response_a;   // Relative
    std::string response_b;   // Relative
    std::optional<std::string> category;     // e.g. "Help." / "Harm." / "Hon." / "Other"
    std::optional<Preference> gold_preference;  // A or B only
    std::optional<double> gold_score;           // retained for correlation reporting
};

/// Throws SchemaError when mode-dependent field constraints are violated.
void validate(const EvaluationInstance& instance);

struct Criterion {
    std::string name;         // short label, e.g. "Relevance"
    std::string description;  // framed as a question
    std::optional<double> weight;  // in [0,1] when present
};

enum class CriteriaSource { Generated, Imported };

struct CriteriaSet {
    std::vector<Criterion> criteria;
    CriteriaSource source = CriteriaSource::Generated;
    std::string instance_id;
};

/// Nonempty names, weights in [0,1]; when every criterion carries a weight
/// the weights must sum to 1 within 1e-9.
void validate(const CriteriaSet& set);

struct PerCriterionScore {
    int criterion_index = 0;  // position in the CriteriaSet
    int score = 0;            // integer in [1,5]
};

struct Assessment {
    std::string instance_id;
    std::string feedback;
    std::optional<double> absolute_score;  // in [1,5], Absolute assessments
    std::optional<Preference> verdict;     // Relative assessments
    std::optional<std::vector<PerCriterionScore>> per_criterion;
    CriteriaSet criteria_used;
};

void validate(const Assessment& assessment);

inline constexpr double kWeightSumTolerance = 1e-9;

/// Weighted sum of per-criterion scores. Weights must be nonnegative and sum
/// to 1 within kWeightSumTolerance; the result is bounded by the min and max
/// score and therefore stays inside [1,5].
double aggregate_absolute(std::span<const PerCriterionScore> scores,
                          std::span<const double> weights);

/// Both sides aggregated independently; the two criteria weightings may
/// differ per side.
std::pair<double, double> aggregate_relative(std::span<const PerCriterionScore> scores_a,
                                             std::span<const PerCriterionScore> scores_b,
                                             std::span<const double> weights_a,
                                             std::span<const double> weights_b);

/// A iff score_a > score_b, B iff score_b > score_a, Tie on exact equality.
Preference induce_preference(double score_a, double score_b);

}  // namespace salc
