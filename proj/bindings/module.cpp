#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "salc/core.hpp"
#include "salc/metrics.hpp"
#include "salc/parse.hpp"
#include "salc/prompts.hpp"
#include "salc/providers.hpp"

namespace py = pybind11;

namespace {

using namespace salc;

Preference preference_from_string(const std::string& label) {
    if (label == "A") return Preference::A;
    if (label == "B") return Preference::B;
    if (label == "Tie") return Preference::Tie;
    throw Error(ErrorCode::SchemaError, "preference must be 'A', 'B' or 'Tie'");
}

CriteriaSet criteria_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    CriteriaSet set;
    for (const auto& [name, description] : pairs) {
        set.criteria.push_back({name, description, std::nullopt});
    }
    return set;
}

std::vector<py::dict> messages_to_python(const prompts::RenderedPrompt& prompt) {
    std::vector<py::dict> out;
    for (const auto& message : prompt.messages) {
        py::dict entry;
        entry["role"] = std::string(providers::to_string(message.role));
        entry["content"] = message.content;
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "salc core operations: score aggregation, judge-output parsing, prompt "
              "rendering and the agreement/correlation/text-overlap metrics";

    py::register_exception<Error>(m, "SalcError");

    m.def(
        "aggregate_absolute",
        [](const std::vector<int>& scores, const std::vector<double>& weights) {
            std::vector<PerCriterionScore> typed;
            for (std::size_t i = 0; i < scores.size(); ++i) {
                typed.push_back({static_cast<int>(i), scores[i]});
            }
            return aggregate_absolute(typed, weights);
        },
        py::arg("scores"), py::arg("weights"),
        "Weighted sum of integer per-criterion scores; weights must sum to 1.");

    m.def(
        "aggregate_relative",
        [](const std::vector<int>& scores_a, const std::vector<int>& scores_b,
           const std::vector<double>& weights_a, const std::vector<double>& weights_b) {
            std::vector<PerCriterionScore> typed_a, typed_b;
            for (std::size_t i = 0; i < scores_a.size(); ++i)
                typed_a.push_back({static_cast<int>(i), scores_a[i]});
            for (std::size_t i = 0; i < scores_b.size(); ++i)
                typed_b.push_back({static_cast<int>(i), scores_b[i]});
            return aggregate_relative(typed_a, typed_b, weights_a, weights_b);
        },
        py::arg("scores_a"), py::arg("scores_b"), py::arg("weights_a"), py::arg("weights_b"));

    m.def(
        "induce_preference",
        [](double score_a, double score_b) {
            return std::string(to_string(induce_preference(score_a, score_b)));
        },
        py::arg("score_a"), py::arg("score_b"));

    m.def(
        "pearson",
        [](std::vector<double> x, std::vector<double> y) {
            return metrics::pearson({std::move(x), std::move(y)});
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "spearman",
        [](std::vector<double> x, std::vector<double> y) {
            return metrics::spearman({std::move(x), std::move(y)});
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "kendall_tau_b",
        [](std::vector<double> x, std::vector<double> y) {
            return metrics::kendall_tau_b({std::move(x), std::move(y)});
        },
        py::arg("x"), py::arg("y"));

    m.def(
        "preference_agreement",
        [](const std::vector<std::string>& predictions, const std::vector<std::string>& gold) {
            std::vector<Preference> preds, truth;
            for (const auto& label : predictions) preds.push_back(preference_from_string(label));
            for (const auto& label : gold) truth.push_back(preference_from_string(label));
            const auto result = metrics::preference_agreement(preds, truth);
            return std::make_pair(result.accuracy, result.macro_f1);
        },
        py::arg("predictions"), py::arg("gold"),
        "Returns (accuracy, macro_f1) over the classes A and B; Tie never matches.");

    m.def(
        "rouge_n",
        [](const std::string& candidate, const std::string& reference, int n) {
            const auto score = metrics::rouge_n(candidate, reference, n);
            return std::make_tuple(score.precision, score.recall, score.f1);
        },
        py::arg("candidate"), py::arg("reference"), py::arg("n") = 1);
    m.def(
        "rouge_l",
        [](const std::string& candidate, const std::string& reference) {
            const auto score = metrics::rouge_l(candidate, reference);
            return std::make_tuple(score.precision, score.recall, score.f1);
        },
        py::arg("candidate"), py::arg("reference"));
    m.def("bleu", &metrics::bleu, py::arg("candidate"), py::arg("reference"),
          py::arg("max_n") = 4);
    m.def(
        "tokenize",
        [](const std::string& text) { return metrics::tokenize(text); },
        py::arg("text"));

    m.def(
        "parse_criteria",
        [](const std::string& text) {
            const auto set = parse::parse_criteria(text);
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& criterion : set.criteria) {
                out.emplace_back(criterion.name, criterion.description);
            }
            return out;
        },
        py::arg("text"), "Returns (name, description) pairs in output order.");

    m.def(
        "parse_absolute_result",
        [](const std::string& text, bool strict) {
            parse::ParsePolicy policy;
            policy.strict_integer_scores = strict;
            const auto result = parse::parse_absolute_result(text, policy);
            return std::make_pair(result.feedback, result.score);
        },
        py::arg("text"), py::arg("strict") = false);

    m.def(
        "parse_relative_verdict",
        [](const std::string& text, const std::string& occurrence) {
            parse::ParsePolicy policy;
            policy.verdict_occurrence = occurrence == "first" ? parse::VerdictOccurrence::First
                                                              : parse::VerdictOccurrence::Last;
            const auto result = parse::parse_relative_verdict(text, policy);
            return std::make_pair(result.feedback, std::string(to_string(result.verdict)));
        },
        py::arg("text"), py::arg("occurrence") = "last");

    m.def(
        "serialize_criteria",
        [](const std::vector<std::pair<std::string, std::string>>& criteria) {
            return prompts::serialize_criteria(criteria_from_pairs(criteria));
        },
        py::arg("criteria"));

    m.def(
        "render_absolute_criteria",
        [](const std::string& instruction, const std::string& reference,
           const std::string& response) {
            return messages_to_python(
                prompts::render_absolute_criteria(instruction, reference, response));
        },
        py::arg("instruction"), py::arg("reference"), py::arg("response"));
    m.def(
        "render_relative_criteria",
        [](const std::string& instruction, const std::string& response_a,
           const std::string& response_b) {
            return messages_to_python(
                prompts::render_relative_criteria(instruction, response_a, response_b));
        },
        py::arg("instruction"), py::arg("response_a"), py::arg("response_b"));
    m.def(
        "render_absolute_eval",
        [](const std::string& instruction,
           const std::vector<std::pair<std::string, std::string>>& criteria,
           const std::string& reference, const std::string& response) {
            return messages_to_python(prompts::render_absolute_eval(
                instruction, criteria_from_pairs(criteria), reference, response));
        },
        py::arg("instruction"), py::arg("criteria"), py::arg("reference"), py::arg("response"));
    m.def(
        "render_relative_eval",
        [](const std::string& instruction,
           const std::vector<std::pair<std::string, std::string>>& criteria,
           const std::string& response_a, const std::string& response_b) {
            return messages_to_python(prompts::render_relative_eval(
                instruction, criteria_from_pairs(criteria), response_a, response_b));
        },
        py::arg("instruction"), py::arg("criteria"), py::arg("response_a"),
        py::arg("response_b"));
    m.def(
        "render_reference_free_eval",
        [](const std::string& instruction,
           const std::vector<std::pair<std::string, std::string>>& criteria,
           const std::string& response) {
            return messages_to_python(prompts::render_reference_free_eval(
                instruction, criteria_from_pairs(criteria), response));
        },
        py::arg("instruction"), py::arg("criteria"), py::arg("response"));

    m.def(
        "cache_key",
        [](const std::string& model_id,
           const std::vector<std::pair<std::string, std::string>>& messages, double temperature,
           int max_tokens) {
            providers::CompletionRequest request;
            request.model_id = model_id;
            for (const auto& [role, content] : messages) {
                request.messages.push_back({providers::parse_role(role), content});
            }
            request.temperature = temperature;
            request.max_tokens = max_tokens;
            return providers::cache_key(request);
        },
        py::arg("model_id"), py::arg("messages"), py::arg("temperature") = 0.0,
        py::arg("max_tokens") = 1024,
        "Stable content hash identifying a completion request.");
}
