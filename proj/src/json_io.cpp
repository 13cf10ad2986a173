#include "salc/json_io.hpp"

namespace salc::json_io {

using nlohmann::json;

namespace {

json opt_str(const std::optional<std::string>& value) {
    return value ? json(*value) : json(nullptr);
}

json str_or_null(const std::string& value) {
    return value.empty() ? json(nullptr) : json(value);
}

std::string where(std::size_t line_no) {
    return line_no ? "line " + std::to_string(line_no) + ": " : "";
}

std::string require_string(const json& row, const char* key, std::size_t line_no) {
    if (!row.contains(key) || !row[key].is_string() || row[key].get<std::string>().empty()) {
        throw Error(ErrorCode::SchemaError,
                    where(line_no) + "missing or empty field '" + key + "'");
    }
    return row[key].get<std::string>();
}

std::optional<std::string> optional_string(const json& row, const char* key,
                                           std::size_t line_no) {
    if (!row.contains(key) || row[key].is_null()) return std::nullopt;
    if (!row[key].is_string()) {
        throw Error(ErrorCode::SchemaError, where(line_no) + "field '" + key + "' must be a string");
    }
    auto text = row[key].get<std::string>();
    if (text.empty()) return std::nullopt;
    return text;
}

}  // namespace

json to_json(const providers::ChatMessage& message) {
    return {{"role", std::string(providers::to_string(message.role))},
            {"content", message.content}};
}

providers::ChatMessage chat_message_from_json(const json& value) {
    if (!value.is_object() || !value.contains("role") || !value.contains("content")) {
        throw Error(ErrorCode::SchemaError, "chat message needs 'role' and 'content'");
    }
    return {providers::parse_role(value["role"].get<std::string>()),
            value["content"].get<std::string>()};
}

json to_json(const Criterion& criterion) {
    return {{"name", criterion.name},
            {"description", criterion.description},
            {"weight", criterion.weight ? json(*criterion.weight) : json(nullptr)}};
}

json to_json(const CriteriaSet& set) {
    auto criteria = json::array();
    for (const auto& criterion : set.criteria) criteria.push_back(to_json(criterion));
    return {{"instance_id", set.instance_id},
            {"source", set.source == CriteriaSource::Generated ? "generated" : "imported"},
            {"criteria", std::move(criteria)}};
}

CriteriaSet criteria_set_from_json(const json& value) {
    CriteriaSet set;
    set.instance_id = value.value("instance_id", std::string{});
    set.source = value.value("source", std::string{"generated"}) == "imported"
                     ? CriteriaSource::Imported
                     : CriteriaSource::Generated;
    if (!value.contains("criteria") || !value["criteria"].is_array()) {
        throw Error(ErrorCode::SchemaError, "criteria set needs a 'criteria' array");
    }
    for (const auto& item : value["criteria"]) {
        Criterion criterion;
        criterion.name = require_string(item, "name", 0);
        criterion.description = item.value("description", std::string{});
        if (item.contains("weight") && !item["weight"].is_null()) {
            criterion.weight = item["weight"].get<double>();
        }
        set.criteria.push_back(std::move(criterion));
    }
    validate(set);
    return set;
}

json to_json(const Assessment& assessment) {
    json per_criterion(nullptr);
    if (assessment.per_criterion) {
        per_criterion = json::array();
        for (const auto& score : *assessment.per_criterion) {
            per_criterion.push_back(
                {{"criterion_index", score.criterion_index}, {"score", score.score}});
        }
    }
    return {{"instance_id", assessment.instance_id},
            {"feedback", assessment.feedback},
            {"absolute_score",
             assessment.absolute_score ? json(*assessment.absolute_score) : json(nullptr)},
            {"verdict",
             assessment.verdict ? json(std::string(to_string(*assessment.verdict)))
                                : json(nullptr)},
            {"per_criterion", std::move(per_criterion)},
            {"criteria_used", to_json(assessment.criteria_used)}};
}

json instance_to_json(const EvaluationInstance& instance, const std::string& dataset) {
    json row;
    row["id"] = instance.id;
    row["dataset"] = dataset;
    row["mode"] = std::string(to_string(instance.mode));
    row["instruction"] = instance.instruction;
    row["reference"] = opt_str(instance.reference);
    row["response"] = str_or_null(instance.response);
    row["response_a"] = str_or_null(instance.response_a);
    row["response_b"] = str_or_null(instance.response_b);
    row["gold_preference"] =
        instance.gold_preference ? json(std::string(to_string(*instance.gold_preference)))
                                 : json(nullptr);
    row["gold_score"] = instance.gold_score ? json(*instance.gold_score) : json(nullptr);
    row["category"] = opt_str(instance.category);
    return row;
}

EvaluationInstance instance_from_json(const json& row, std::size_t line_no) {
    if (!row.is_object()) {
        throw Error(ErrorCode::SchemaError, where(line_no) + "row must be a JSON object");
    }
    EvaluationInstance instance;
    instance.id = require_string(row, "id", line_no);
    instance.instruction = require_string(row, "instruction", line_no);

    const std::string mode = require_string(row, "mode", line_no);
    if (mode == "absolute") {
        instance.mode = Mode::Absolute;
    } else if (mode == "relative") {
        instance.mode = Mode::Relative;
    } else {
        throw Error(ErrorCode::SchemaError,
                    where(line_no) + "mode must be 'absolute' or 'relative', got '" + mode + "'");
    }

    instance.reference = optional_string(row, "reference", line_no);
    instance.response = optional_string(row, "response", line_no).value_or("");
    instance.response_a = optional_string(row, "response_a", line_no).value_or("");
    instance.response_b = optional_string(row, "response_b", line_no).value_or("");
    instance.category = optional_string(row, "category", line_no);

    if (auto gold = optional_string(row, "gold_preference", line_no)) {
        if (*gold == "A") {
            instance.gold_preference = Preference::A;
        } else if (*gold == "B") {
            instance.gold_preference = Preference::B;
        } else {
            throw Error(ErrorCode::SchemaError,
                        where(line_no) + "gold_preference must be 'A' or 'B'");
        }
    }
    if (row.contains("gold_score") && !row["gold_score"].is_null()) {
        if (!row["gold_score"].is_number()) {
            throw Error(ErrorCode::SchemaError, where(line_no) + "gold_score must be a number");
        }
        instance.gold_score = row["gold_score"].get<double>();
    }

    try {
        validate(instance);
    } catch (const Error& error) {
        throw Error(ErrorCode::SchemaError, where(line_no) + error.what());
    }
    return instance;
}

}  // namespace salc::json_io
