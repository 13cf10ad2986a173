#include "salc/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace salc::parse {

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

struct Cursor {
    std::string_view rest;

    void skip_spaces() {
        while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) {
            rest.remove_prefix(1);
        }
    }

    bool consume(std::string_view token) {
        if (rest.substr(0, token.size()) != token) return false;
        rest.remove_prefix(token.size());
        return true;
    }

    // Returns false when no digits are present.
    bool read_int(long& value) {
        const char* begin = rest.data();
        const char* end = begin + rest.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr == begin) return false;
        rest.remove_prefix(static_cast<std::size_t>(ptr - begin));
        return true;
    }
};

// `<digits>` + separator. Canonical separator is ".)"; "." and ")" alone are
// accepted only under accept_numbering_variants.
bool read_numbering(Cursor& cursor, bool accept_variants, long& index) {
    cursor.skip_spaces();
    if (!cursor.read_int(index) || index < 0) return false;
    if (cursor.consume(".)")) return true;
    if (accept_variants && (cursor.consume(".") || cursor.consume(")"))) return true;
    return false;
}

struct CriterionLine {
    long index = 0;
    std::string name;
    std::string description;
};

bool match_criterion_line(std::string_view line, bool accept_variants, CriterionLine& out) {
    Cursor cursor{line};
    if (!read_numbering(cursor, accept_variants, out.index)) return false;
    cursor.skip_spaces();
    if (!cursor.consume("**")) return false;
    const auto close = cursor.rest.find("**");
    if (close == std::string_view::npos || close == 0) return false;
    out.name = std::string(cursor.rest.substr(0, close));
    cursor.rest.remove_prefix(close + 2);
    // Exactly " - " so descriptions round-trip byte-for-byte.
    if (!cursor.consume(" - ")) return false;
    out.description = std::string(cursor.rest);
    return true;
}

}  // namespace

CriteriaSet parse_criteria(std::string_view text, const ParsePolicy& policy,
                           std::vector<ParseWarning>* warnings) {
    if (text.empty()) {
        throw Error(ErrorCode::EmptyInput, "empty judge output");
    }
    CriteriaSet set;
    set.source = CriteriaSource::Generated;

    long expected = 1;
    bool monotonic = true;
    for (std::string_view line : split_lines(text)) {
        CriterionLine parsed;
        if (!match_criterion_line(line, policy.accept_numbering_variants, parsed)) continue;
        if (parsed.index != expected) monotonic = false;
        expected = parsed.index + 1;
        set.criteria.push_back(Criterion{parsed.name, parsed.description, std::nullopt});
    }

    if (set.criteria.empty()) {
        throw Error(ErrorCode::MalformedOutput, "no criterion lines found");
    }
    if (!monotonic && warnings) {
        warnings->push_back({ErrorCode::NonMonotonicNumbering,
                             "criterion numbering skips or repeats indices"});
    }
    return set;
}

AbsoluteResult parse_absolute_result(std::string_view text, const ParsePolicy& policy) {
    if (text.empty()) {
        throw Error(ErrorCode::EmptyInput, "empty judge output");
    }
    constexpr std::string_view kMarker = "[RESULT]";
    const auto marker = text.rfind(kMarker);
    if (marker == std::string_view::npos) {
        throw Error(ErrorCode::MalformedOutput, "no [RESULT] marker");
    }

    std::string_view feedback = trim(text.substr(0, marker));
    constexpr std::string_view kPrefix = "Feedback:";
    if (feedback.substr(0, kPrefix.size()) == kPrefix) {
        feedback = trim(feedback.substr(kPrefix.size()));
    }

    Cursor cursor{text.substr(marker + kMarker.size())};
    cursor.skip_spaces();
    const bool negative = !cursor.rest.empty() && cursor.rest[0] == '-';
    long integral = 0;
    if (!cursor.read_int(integral)) {
        throw Error(ErrorCode::MalformedOutput, "no score after [RESULT]");
    }
    const double sign = negative ? -1.0 : 1.0;
    double score = static_cast<double>(integral);
    const bool has_fraction = cursor.rest.size() >= 2 && cursor.rest[0] == '.' &&
                              std::isdigit(static_cast<unsigned char>(cursor.rest[1]));
    if (has_fraction) {
        if (policy.strict_integer_scores) {
            throw Error(ErrorCode::MalformedOutput,
                        "strict policy requires an integer score, got a decimal");
        }
        cursor.rest.remove_prefix(1);
        double scale = 0.1;
        while (!cursor.rest.empty() && std::isdigit(static_cast<unsigned char>(cursor.rest[0]))) {
            score += sign * scale * (cursor.rest[0] - '0');
            scale /= 10.0;
            cursor.rest.remove_prefix(1);
        }
    }
    if (score < 1.0 || score > 5.0) {
        throw Error(ErrorCode::OutOfRange, "score " + std::to_string(score) + " outside [1,5]");
    }
    return {std::string(feedback), score};
}

VerdictResult parse_relative_verdict(std::string_view text, const ParsePolicy& policy) {
    if (text.empty()) {
        throw Error(ErrorCode::EmptyInput, "empty judge output");
    }
    struct Token {
        std::size_t pos;
        Preference verdict;
    };
    std::vector<Token> tokens;
    for (auto [needle, verdict] :
         {std::pair{std::string_view("[[A]]"), Preference::A},
          std::pair{std::string_view("[[B]]"), Preference::B}}) {
        std::size_t pos = 0;
        while ((pos = text.find(needle, pos)) != std::string_view::npos) {
            tokens.push_back({pos, verdict});
            pos += needle.size();
        }
    }
    if (tokens.empty()) {
        throw Error(ErrorCode::MalformedOutput, "no [[A]]/[[B]] verdict token");
    }
    std::sort(tokens.begin(), tokens.end(),
              [](const Token& a, const Token& b) { return a.pos < b.pos; });
    const Token chosen = policy.verdict_occurrence == VerdictOccurrence::Last
                             ? tokens.back()
                             : tokens.front();

    std::string feedback(text);
    feedback.erase(chosen.pos, 5);
    return {std::string(trim(feedback)), chosen.verdict};
}

std::vector<ExplicitScore> parse_explicit_scores(std::string_view text) {
    if (text.empty()) {
        throw Error(ErrorCode::EmptyInput, "empty judge output");
    }
    std::vector<ExplicitScore> scores;
    for (std::string_view line : split_lines(text)) {
        Cursor cursor{line};
        long index = 0;
        if (!read_numbering(cursor, /*accept_variants=*/true, index)) continue;
        cursor.skip_spaces();
        if (!cursor.consume("score=")) continue;
        long score = 0;
        if (!cursor.read_int(score)) continue;
        if (!cursor.rest.empty() && cursor.rest[0] == '.') {
            throw Error(ErrorCode::MalformedOutput, "per-criterion scores must be integers");
        }
        cursor.skip_spaces();
        if (!cursor.consume("weight=")) continue;
        const bool negative = !cursor.rest.empty() && cursor.rest[0] == '-';
        long whole = 0;
        if (!cursor.read_int(whole)) continue;
        double weight = static_cast<double>(whole);
        if (!cursor.rest.empty() && cursor.rest[0] == '.') {
            cursor.rest.remove_prefix(1);
            double scale = 0.1;
            const double fraction_sign = negative ? -1.0 : 1.0;
            while (!cursor.rest.empty() &&
                   std::isdigit(static_cast<unsigned char>(cursor.rest[0]))) {
                weight += fraction_sign * scale * (cursor.rest[0] - '0');
                scale /= 10.0;
                cursor.rest.remove_prefix(1);
            }
        }
        cursor.skip_spaces();
        if (!cursor.rest.empty()) continue;  // trailing junk, not a score line

        if (score < 1 || score > 5) {
            throw Error(ErrorCode::OutOfRange,
                        "score " + std::to_string(score) + " outside [1,5]");
        }
        if (weight < 0.0 || weight > 1.0) {
            throw Error(ErrorCode::OutOfRange, "weight outside [0,1]");
        }
        if (index != static_cast<long>(scores.size()) + 1) {
            throw Error(ErrorCode::MalformedOutput,
                        "score lines must be numbered consecutively from 1");
        }
        scores.push_back({PerCriterionScore{static_cast<int>(index - 1),
                                            static_cast<int>(score)},
                          weight});
    }
    if (scores.empty()) {
        throw Error(ErrorCode::MalformedOutput, "no score lines found");
    }

    double sum = 0.0;
    for (const auto& entry : scores) sum += entry.weight;
    if (std::abs(sum - 1.0) > 0.05) {
        throw Error(ErrorCode::WeightSumError,
                    "weights sum to " + std::to_string(sum) +
                        ", outside the 5% renormalization band");
    }
    for (auto& entry : scores) entry.weight /= sum;
    return scores;
}

std::pair<std::vector<ExplicitScore>, std::vector<ExplicitScore>>
parse_explicit_scores_relative(std::string_view text) {
    if (text.empty()) {
        throw Error(ErrorCode::EmptyInput, "empty judge output");
    }
    constexpr std::string_view kHeaderA = "### Response A:";
    constexpr std::string_view kHeaderB = "### Response B:";
    const auto pos_a = text.find(kHeaderA);
    const auto pos_b = text.find(kHeaderB, pos_a == std::string_view::npos ? 0 : pos_a);
    if (pos_a == std::string_view::npos || pos_b == std::string_view::npos || pos_b < pos_a) {
        throw Error(ErrorCode::MalformedOutput,
                    "expected '### Response A:' then '### Response B:' sections");
    }
    auto block_a = text.substr(pos_a + kHeaderA.size(), pos_b - pos_a - kHeaderA.size());
    auto block_b = text.substr(pos_b + kHeaderB.size());
    return {parse_explicit_scores(block_a), parse_explicit_scores(block_b)};
}

}  // namespace salc::parse
