#include "salc/datasets.hpp"

#include <set>
#include <sstream>

#include "salc/json_io.hpp"

namespace salc::datasets {

using nlohmann::json;

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line) + ": ";
}

void check_unique_ids(const std::vector<EvaluationInstance>& instances) {
    std::set<std::string> seen;
    for (const auto& instance : instances) {
        if (!seen.insert(instance.id).second) {
            throw Error(ErrorCode::DuplicateId, "duplicate instance id '" + instance.id + "'");
        }
    }
}

// Accepts either `key` or `orig_<key>`.
const json* field(const json& row, const std::string& key) {
    if (row.contains(key) && !row[key].is_null()) return &row[key];
    const std::string prefixed = "orig_" + key;
    if (row.contains(prefixed) && !row[prefixed].is_null()) return &row[prefixed];
    return nullptr;
}

std::string text_field(const json& row, const std::string& key, std::size_t line) {
    const json* value = field(row, key);
    if (!value || !value->is_string() || value->get<std::string>().empty()) {
        throw Error(ErrorCode::SchemaError,
                    "line " + std::to_string(line) + ": missing field '" + key + "'");
    }
    return value->get<std::string>();
}

// Multi-turn fields arrive as arrays; only the final turn is evaluated.
std::string last_turn(const json& value, const std::string& key, std::size_t line) {
    if (value.is_string()) {
        auto text = value.get<std::string>();
        if (text.empty()) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(line) + ": empty field '" + key + "'");
        }
        return text;
    }
    if (value.is_array() && !value.empty() && value.back().is_string()) {
        return value.back().get<std::string>();
    }
    throw Error(ErrorCode::SchemaError,
                "line " + std::to_string(line) + ": field '" + key +
                    "' must be a string or a nonempty string array");
}

std::string category_from_subset(std::string subset) {
    for (auto& c : subset) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (subset.rfind("help", 0) == 0) return "Help.";
    if (subset.rfind("harm", 0) == 0) return "Harm.";
    if (subset.rfind("hon", 0) == 0) return "Hon.";
    return "Other";
}

std::string row_id(const json& row, const char* prefix, std::size_t ordinal) {
    if (row.contains("id") && row["id"].is_string() && !row["id"].get<std::string>().empty()) {
        return row["id"].get<std::string>();
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%04zu", prefix, ordinal);
    return buf;
}

}  // namespace

NormalizedFile load_normalized(const std::filesystem::path& path) {
    NormalizedFile file;
    for (const auto& record : jsonl::read_records(path)) {
        EvaluationInstance instance = json_io::instance_from_json(record.value, record.line);
        const std::string dataset = record.value.value("dataset", std::string{});
        if (dataset.empty()) {
            throw Error(ErrorCode::SchemaError,
                        where(path, record.line) + "missing field 'dataset'");
        }
        if (file.dataset.empty()) {
            file.dataset = dataset;
        } else if (file.dataset != dataset) {
            throw Error(ErrorCode::SchemaError,
                        where(path, record.line) + "mixed dataset names in one file");
        }
        file.instances.push_back(std::move(instance));
    }
    check_unique_ids(file.instances);
    return file;
}

void write_normalized(const std::filesystem::path& path, const std::string& dataset,
                      std::span<const EvaluationInstance> instances) {
    std::ostringstream out;
    for (const auto& instance : instances) {
        out << json_io::instance_to_json(instance, dataset).dump() << '\n';
    }
    jsonl::write_atomic(path, out.str());
}

std::vector<EvaluationInstance> adapt_hhh(const std::vector<jsonl::Record>& raw) {
    std::vector<EvaluationInstance> instances;
    std::size_t ordinal = 0;
    for (const auto& record : raw) {
        ++ordinal;
        const json& row = record.value;
        EvaluationInstance instance;
        instance.id = row_id(row, "hhh", ordinal);
        instance.mode = Mode::Relative;
        instance.instruction = text_field(row, "input", record.line);

        if (!row.contains("targets") || !row["targets"].is_array() ||
            row["targets"].size() != 2) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(record.line) +
                            ": 'targets' must be an array of exactly two responses");
        }
        instance.response_a = last_turn(row["targets"][0], "targets[0]", record.line);
        instance.response_b = last_turn(row["targets"][1], "targets[1]", record.line);

        if (!row.contains("preferred") || !row["preferred"].is_number_integer()) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(record.line) + ": missing 'preferred' index");
        }
        const auto preferred = row["preferred"].get<int>();
        if (preferred != 0 && preferred != 1) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(record.line) + ": 'preferred' must be 0 or 1");
        }
        instance.gold_preference = preferred == 0 ? Preference::A : Preference::B;
        instance.category = category_from_subset(row.value("subset", std::string{}));
        validate(instance);
        instances.push_back(std::move(instance));
    }
    check_unique_ids(instances);
    return instances;
}

PairwiseResult adapt_pairwise(const std::vector<jsonl::Record>& raw,
                              const std::string& dataset_name) {
    PairwiseResult result;
    std::size_t ordinal = 0;
    for (const auto& record : raw) {
        ++ordinal;
        const json& row = record.value;

        std::optional<Preference> gold;
        if (row.contains("winner") && !row["winner"].is_null()) {
            std::string winner = row["winner"].is_string()
                                     ? row["winner"].get<std::string>()
                                     : row["winner"].dump();
            if (winner == "tie") {
                ++result.tie_excluded;
                continue;
            }
            if (winner == "A" || winner == "model_a" || winner == "1") {
                gold = Preference::A;
            } else if (winner == "B" || winner == "model_b" || winner == "2") {
                gold = Preference::B;
            } else {
                throw Error(ErrorCode::SchemaError,
                            "line " + std::to_string(record.line) + ": unknown winner label '" +
                                winner + "'");
            }
        }

        EvaluationInstance instance;
        instance.id = row_id(row, dataset_name.c_str(), ordinal);
        instance.mode = Mode::Relative;
        const json* instruction = field(row, "instruction");
        if (!instruction && row.contains("turns")) instruction = &row["turns"];
        if (!instruction) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(record.line) + ": missing 'instruction' or 'turns'");
        }
        instance.instruction = last_turn(*instruction, "instruction", record.line);
        const json* answer_a = field(row, "answer_a");
        const json* answer_b = field(row, "answer_b");
        if (!answer_a || !answer_b) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(record.line) + ": missing 'answer_a'/'answer_b'");
        }
        instance.response_a = last_turn(*answer_a, "answer_a", record.line);
        instance.response_b = last_turn(*answer_b, "answer_b", record.line);
        instance.gold_preference = gold;
        if (row.contains("category") && row["category"].is_string()) {
            instance.category = row["category"].get<std::string>();
        }
        validate(instance);
        result.instances.push_back(std::move(instance));
    }
    check_unique_ids(result.instances);
    return result;
}

std::vector<EvaluationInstance> adapt_feedback_collection(const std::vector<jsonl::Record>& raw) {
    std::vector<EvaluationInstance> instances;
    std::size_t ordinal = 0;
    for (const auto& record : raw) {
        ++ordinal;
        const json& row = record.value;
        EvaluationInstance instance;
        instance.id = row_id(row, "fc", ordinal);
        instance.mode = Mode::Absolute;
        instance.instruction = text_field(row, "instruction", record.line);
        instance.response = text_field(row, "response", record.line);
        instance.reference = text_field(row, "reference_answer", record.line);
        // The original rubric/feedback never reach the instance; the score is
        // kept only as a correlation target.
        if (const json* score = field(row, "score"); score && score->is_number()) {
            instance.gold_score = score->get<double>();
        }
        validate(instance);
        instances.push_back(std::move(instance));
    }
    check_unique_ids(instances);
    return instances;
}

std::vector<ResponseGroup> adapt_ultrafeedback(const std::vector<jsonl::Record>& raw) {
    std::vector<ResponseGroup> groups;
    std::size_t ordinal = 0;
    for (const auto& record : raw) {
        ++ordinal;
        const json& row = record.value;
        ResponseGroup group;
        group.id = row_id(row, "uf", ordinal);
        group.instruction = text_field(row, "instruction", record.line);
        if (!row.contains("completions") || !row["completions"].is_array()) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(record.line) + ": missing 'completions' array");
        }
        for (const auto& completion : row["completions"]) {
            if (completion.is_string()) {
                group.responses.push_back(completion.get<std::string>());
            } else if (completion.is_object() && completion.contains("response") &&
                       completion["response"].is_string()) {
                group.responses.push_back(completion["response"].get<std::string>());
            } else {
                throw Error(ErrorCode::SchemaError,
                            "line " + std::to_string(record.line) +
                                ": completions must be strings or objects with a 'response'");
            }
        }
        if (group.responses.size() < 2) {
            throw Error(ErrorCode::TooFewResponses,
                        "line " + std::to_string(record.line) +
                            ": preference groups need at least two responses");
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

}  // namespace salc::datasets
