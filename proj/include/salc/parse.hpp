#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "salc/core.hpp"

namespace salc::parse {

enum class VerdictOccurrence { First, Last };

/// Defaults favor recovery: decimal scores accepted, numbering variants
/// ("1." / "1)") accepted alongside the canonical "1.)", and the last
/// verdict token wins because judges often restate the options before
/// committing.
struct ParsePolicy {
    bool strict_integer_scores = false;
    bool accept_numbering_variants = true;
    VerdictOccurrence verdict_occurrence = VerdictOccurrence::Last;
};

struct ParseWarning {
    ErrorCode code = ErrorCode::NonMonotonicNumbering;
    std::string message;
};

struct AbsoluteResult {
    std::string feedback;
    double score = 0.0;
};

struct VerdictResult {
    std::string feedback;
    Preference verdict = Preference::A;
};

struct ExplicitScore {
    PerCriterionScore score;
    double weight = 0.0;
};

/// One criterion per line matching `<index><sep> **<name>** - <description>`.
/// Lines that do not match are skipped; zero matches is MalformedOutput.
/// Skipped or repeated indices are reported through `warnings`, never thrown.
CriteriaSet parse_criteria(std::string_view text, const ParsePolicy& policy = {},
                           std::vector<ParseWarning>* warnings = nullptr);

/// Splits on the final "[RESULT]" marker (case-sensitive, bracket-exact).
/// Feedback is the text before it, trimmed, with a leading "Feedback:"
/// stripped. Strict mode rejects decimal scores.
AbsoluteResult parse_absolute_result(std::string_view text, const ParsePolicy& policy = {});

/// Scans for "[[A]]" / "[[B]]" and picks the occurrence the policy names;
/// feedback is the text with that token removed, trimmed.
VerdictResult parse_relative_verdict(std::string_view text, const ParsePolicy& policy = {});

/// Line grammar `<index>. score=<1-5> weight=<0..1>`, indices consecutive
/// from 1. Weights within 5% of summing to 1 are renormalized to exactly 1;
/// anything further off is WeightSumError.
std::vector<ExplicitScore> parse_explicit_scores(std::string_view text);

/// Two explicit-score blocks under `### Response A:` / `### Response B:`
/// headers, parsed independently per side.
std::pair<std::vector<ExplicitScore>, std::vector<ExplicitScore>>
parse_explicit_scores_relative(std::string_view text);

}  // namespace salc::parse
