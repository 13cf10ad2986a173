#pragma once

#include <json.hpp>

#include "salc/core.hpp"
#include "salc/providers.hpp"

namespace salc::json_io {

nlohmann::json to_json(const providers::ChatMessage& message);
providers::ChatMessage chat_message_from_json(const nlohmann::json& value);

nlohmann::json to_json(const Criterion& criterion);
nlohmann::json to_json(const CriteriaSet& set);
CriteriaSet criteria_set_from_json(const nlohmann::json& value);

nlohmann::json to_json(const Assessment& assessment);

/// The normalized dataset row: all eleven keys always present, null when a
/// field does not apply. `dataset` is carried alongside the instance.
nlohmann::json instance_to_json(const EvaluationInstance& instance, const std::string& dataset);
EvaluationInstance instance_from_json(const nlohmann::json& value, std::size_t line_no);

}  // namespace salc::json_io
