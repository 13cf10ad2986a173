#include "salc/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "salc/datasets.hpp"
#include "salc/distill.hpp"
#include "salc/json_io.hpp"
#include "salc/jsonl.hpp"
#include "salc/pipeline.hpp"
#include "salc/providers.hpp"

namespace salc::cli {

namespace {

using pipeline::Pipeline;
using pipeline::PipelineConfig;
using pipeline::WeightingMode;

// Plain key = value lines, '#' comments. Flags beat environment beats file
// beats defaults.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::map<std::string, std::string> entries;
    if (path.empty()) return entries;
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ConfigError, "cannot open config file " + path);
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw Error(ErrorCode::ConfigError,
                            path + ":" + std::to_string(line_no) + ": expected key = value");
            }
            continue;
        }
        auto trim = [](std::string text) {
            const auto first = text.find_first_not_of(" \t\r");
            const auto last = text.find_last_not_of(" \t\r");
            return first == std::string::npos ? std::string{}
                                              : text.substr(first, last - first + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) entries[key] = value;
    }
    return entries;
}

struct Options {
    std::string config_file;
    std::string base_url;
    std::string endpoint_path = "/v1/chat/completions";
    std::string judge_model;
    std::string criteria_model;
    std::string weighting = "holistic";
    bool strict_scores = false;
    bool no_numbering_variants = false;
    std::string verdict_occurrence = "last";
    int max_attempts = 3;
    int backoff_ms = 100;
    int max_concurrent = 4;
    int rpm = 0;  // 0 = unlimited
    int max_tokens = 1024;
    std::string run_dir = "runs";
    std::string cache_file;
    bool live = false;
    std::string mock_script;
    bool strict = false;
};

struct Resolved {
    Options opts;
    PipelineConfig config;
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value && *value ? value : fallback;
}

Resolved resolve(const CLI::App& app, Options opts) {
    const auto file = read_config_file(opts.config_file);
    auto from_file = [&](const char* key, const std::string& fallback) {
        auto it = file.find(key);
        return it == file.end() ? fallback : it->second;
    };
    auto resolve_str = [&](const char* flag, std::string& slot, const char* env,
                           const char* file_key) {
        if (app.count(flag) == 0) {
            slot = env ? env_or(env, from_file(file_key, slot)) : from_file(file_key, slot);
        }
    };
    auto resolve_int = [&](const char* flag, int& slot, const char* file_key) {
        if (app.count(flag) == 0) {
            const std::string text = from_file(file_key, "");
            if (!text.empty()) slot = std::stoi(text);
        }
    };

    resolve_str("--base-url", opts.base_url, "SALC_BASE_URL", "base_url");
    resolve_str("--judge-model", opts.judge_model, "SALC_JUDGE_MODEL", "judge_model");
    resolve_str("--criteria-model", opts.criteria_model, "SALC_CRITERIA_MODEL", "criteria_model");
    resolve_str("--weighting", opts.weighting, nullptr, "weighting");
    resolve_str("--verdict-occurrence", opts.verdict_occurrence, nullptr, "verdict_occurrence");
    resolve_str("--run-dir", opts.run_dir, "SALC_RUN_DIR", "run_dir");
    resolve_str("--cache", opts.cache_file, nullptr, "cache_file");
    resolve_int("--max-attempts", opts.max_attempts, "max_attempts");
    resolve_int("--backoff-ms", opts.backoff_ms, "backoff_ms");
    resolve_int("--max-concurrent", opts.max_concurrent, "max_concurrent");
    resolve_int("--rpm", opts.rpm, "requests_per_minute");
    resolve_int("--max-tokens", opts.max_tokens, "max_tokens");

    if (opts.judge_model.empty()) opts.judge_model = "gpt-4o";
    if (opts.criteria_model.empty()) opts.criteria_model = opts.judge_model;

    PipelineConfig config;
    config.judge_model_id = opts.judge_model;
    config.criteria_model_id = opts.criteria_model;
    if (opts.weighting == "holistic") {
        config.weighting_mode = WeightingMode::Holistic;
    } else if (opts.weighting == "explicit") {
        config.weighting_mode = WeightingMode::ExplicitWeights;
    } else {
        throw Error(ErrorCode::ConfigError,
                    "--weighting must be 'holistic' or 'explicit', got '" + opts.weighting + "'");
    }
    config.parse_policy.strict_integer_scores = opts.strict_scores;
    config.parse_policy.accept_numbering_variants = !opts.no_numbering_variants;
    if (opts.verdict_occurrence == "last") {
        config.parse_policy.verdict_occurrence = parse::VerdictOccurrence::Last;
    } else if (opts.verdict_occurrence == "first") {
        config.parse_policy.verdict_occurrence = parse::VerdictOccurrence::First;
    } else {
        throw Error(ErrorCode::ConfigError, "--verdict-occurrence must be 'first' or 'last'");
    }
    config.provider_policy.max_attempts = opts.max_attempts;
    config.provider_policy.backoff_base_ms = opts.backoff_ms;
    config.provider_policy.max_concurrent = opts.max_concurrent;
    if (opts.rpm > 0) config.provider_policy.requests_per_minute = opts.rpm;
    config.max_tokens = opts.max_tokens;
    pipeline::validate(config);

    if (opts.cache_file.empty()) {
        opts.cache_file =
            (std::filesystem::path(opts.run_dir) / pipeline::config_hash(config) / "cache.jsonl")
                .string();
    }
    return {std::move(opts), std::move(config)};
}

/// Owns the provider stack for one command invocation.
struct ProviderStack {
    providers::ResponseCache cache;
    std::unique_ptr<providers::Provider> backend;
    std::unique_ptr<providers::ProviderClient> client;

    ProviderStack(const Resolved& resolved) : cache(resolved.opts.cache_file) {
        const Options& opts = resolved.opts;
        if (opts.live && !opts.mock_script.empty()) {
            throw Error(ErrorCode::ConfigError, "--live and --mock-script are exclusive");
        }
        if (opts.live) {
            providers::HttpProviderConfig http;
            http.base_url = opts.base_url;
            http.path = opts.endpoint_path;
            http.api_key = env_or("SALC_API_KEY", "");
            if (http.base_url.empty()) {
                throw Error(ErrorCode::ConfigError, "--live needs --base-url or SALC_BASE_URL");
            }
            if (http.api_key.empty()) {
                throw Error(ErrorCode::ConfigError, "--live needs SALC_API_KEY in the environment");
            }
            backend = std::make_unique<providers::HttpProvider>(std::move(http));
        } else if (!opts.mock_script.empty()) {
            auto mock = std::make_unique<providers::MockProvider>();
            for (const auto& record : jsonl::read_records(opts.mock_script)) {
                if (!record.value.contains("pattern") || !record.value.contains("reply")) {
                    throw Error(ErrorCode::SchemaError,
                                opts.mock_script + ":" + std::to_string(record.line) +
                                    ": mock scripts need 'pattern' and 'reply'");
                }
                mock->register_script(record.value["pattern"].get<std::string>(),
                                      record.value["reply"].get<std::string>());
            }
            backend = std::move(mock);
        } else {
            backend = std::make_unique<providers::CacheOnlyProvider>(cache);
        }
        client = std::make_unique<providers::ProviderClient>(
            *backend, resolved.config.provider_policy, &cache);
    }
};

datasets::NormalizedFile load_dataset(const std::string& input, const std::string& adapter,
                                      const std::string& dataset_name) {
    if (adapter == "normalized") {
        auto file = datasets::load_normalized(input);
        if (!dataset_name.empty()) file.dataset = dataset_name;
        return file;
    }
    const auto records = jsonl::read_records(input);
    datasets::NormalizedFile file;
    if (adapter == "hhh") {
        file.dataset = dataset_name.empty() ? "hhh" : dataset_name;
        file.instances = datasets::adapt_hhh(records);
    } else if (adapter == "pairwise") {
        file.dataset = dataset_name.empty() ? "pairwise" : dataset_name;
        auto result = datasets::adapt_pairwise(records, file.dataset);
        if (result.tie_excluded > 0) {
            std::cerr << "note: excluded " << result.tie_excluded << " tie-labeled rows\n";
        }
        file.instances = std::move(result.instances);
    } else if (adapter == "feedback-collection") {
        file.dataset = dataset_name.empty() ? "feedback-collection" : dataset_name;
        file.instances = datasets::adapt_feedback_collection(records);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown dataset adapter '" + adapter + "'");
    }
    return file;
}

int run_criteria(const Resolved& resolved, const std::string& input, const std::string& adapter,
                 const std::string& dataset_name, const std::string& out_path) {
    ProviderStack stack(resolved);
    Pipeline pipe(resolved.config, *stack.client);
    const auto dataset = load_dataset(input, adapter, dataset_name);

    std::ostringstream out;
    std::size_t failures = 0;
    for (const auto& instance : dataset.instances) {
        nlohmann::json row;
        row["instance_id"] = instance.id;
        try {
            const CriteriaSet criteria = pipe.generate_criteria(instance);
            row["status"] = "ok";
            row["criteria"] = json_io::to_json(criteria);
            row["error"] = nullptr;
        } catch (const Error& error) {
            ++failures;
            row["status"] = "unparseable";
            row["criteria"] = nullptr;
            row["error"] = std::string(error.what());
        }
        out << row.dump() << '\n';
    }
    jsonl::write_atomic(out_path, out.str());
    std::cout << "criteria: " << dataset.instances.size() - failures << " ok, " << failures
              << " unparseable -> " << out_path << "\n";
    return failures > 0 && resolved.opts.strict ? 1 : 0;
}

int run_eval(const Resolved& resolved, const std::string& input, const std::string& adapter,
             const std::string& dataset_name, const std::string& out_path) {
    ProviderStack stack(resolved);
    Pipeline pipe(resolved.config, *stack.client);
    const auto dataset = load_dataset(input, adapter, dataset_name);

    std::ostringstream out;
    std::size_t failures = 0;
    for (const auto& instance : dataset.instances) {
        nlohmann::json row;
        row["instance_id"] = instance.id;
        try {
            const Assessment assessment = instance.mode == Mode::Relative
                                              ? pipe.evaluate_relative(instance)
                                              : pipe.evaluate_absolute(instance);
            row["status"] = "ok";
            row["assessment"] = json_io::to_json(assessment);
            row["error"] = nullptr;
        } catch (const Error& error) {
            ++failures;
            row["status"] = "unparseable";
            row["assessment"] = nullptr;
            row["error"] = std::string(error.what());
        }
        out << row.dump() << '\n';
    }
    jsonl::write_atomic(out_path, out.str());
    std::cout << "eval: " << dataset.instances.size() - failures << " ok, " << failures
              << " unparseable -> " << out_path << "\n";
    return failures > 0 && resolved.opts.strict ? 1 : 0;
}

int run_bench(const Resolved& resolved, const std::string& input, const std::string& adapter,
              const std::string& dataset_name, const std::string& out_path) {
    ProviderStack stack(resolved);
    Pipeline pipe(resolved.config, *stack.client);
    const auto dataset = load_dataset(input, adapter, dataset_name);

    const auto report = pipe.run_benchmark(dataset.dataset, dataset.instances);
    jsonl::write_atomic(out_path, pipeline::report_to_json(report).dump(2) + "\n");
    pipe.persist_artifacts(resolved.opts.run_dir);
    std::cout << pipeline::report_table(report);
    std::cout << "report -> " << out_path << "\n";
    return report.unparseable_count > 0 && resolved.opts.strict ? 1 : 0;
}

int run_prefgen(const Resolved& resolved, const std::string& input, double threshold,
                const std::string& out_path) {
    ProviderStack stack(resolved);
    Pipeline pipe(resolved.config, *stack.client);
    const auto groups = datasets::adapt_ultrafeedback(jsonl::read_records(input));

    const auto result = distill::generate_preference_pairs(groups, pipe, threshold);
    distill::write_preference_pairs(out_path, result.pairs);
    std::cout << "prefgen: kept " << result.kept << ", skipped " << result.skipped_tie
              << " tie / " << result.skipped_gap << " gap / " << result.skipped_error
              << " error -> " << out_path << "\n";
    return 0;
}

int run_export_sft(const Resolved& resolved, const std::string& input,
                   const std::string& adapter, const std::string& kind,
                   const std::string& out_path) {
    ProviderStack stack(resolved);
    Pipeline pipe(resolved.config, *stack.client);

    std::vector<EvaluationInstance> instances;
    if (adapter == "normalized") {
        instances = datasets::load_normalized(input).instances;
    } else if (adapter == "feedback-collection") {
        instances = datasets::adapt_feedback_collection(jsonl::read_records(input));
    } else {
        throw Error(ErrorCode::ConfigError, "unknown dataset adapter '" + adapter + "'");
    }

    distill::SftExportResult result;
    if (kind == "criteria") {
        result = distill::export_ft_criteria(instances, pipe);
    } else if (kind == "judge") {
        result = distill::export_ft_judge(instances, pipe);
    } else {
        throw Error(ErrorCode::ConfigError, "--kind must be 'criteria' or 'judge'");
    }
    distill::write_sft_examples(out_path, result.examples);
    std::cout << "export-sft (" << kind << "): " << result.examples.size() << " examples, "
              << result.excluded << " excluded -> " << out_path << "\n";
    for (const auto& reason : result.exclusion_reasons) {
        std::cerr << "excluded: " << reason << "\n";
    }
    return result.excluded > 0 && resolved.opts.strict ? 1 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"salc - LLM-as-judge harness with instance-specific criteria generation"};
    app.fallthrough();

    Options opts;
    app.add_option("--config", opts.config_file, "plain key=value config file");
    app.add_option("--base-url", opts.base_url, "chat-completion endpoint base URL");
    app.add_option("--endpoint-path", opts.endpoint_path, "endpoint path")
        ->capture_default_str();
    app.add_option("--judge-model", opts.judge_model, "judge model id");
    app.add_option("--criteria-model", opts.criteria_model,
                   "criteria model id (defaults to the judge model)");
    app.add_option("--weighting", opts.weighting, "holistic | explicit")
        ->capture_default_str();
    app.add_flag("--strict-scores", opts.strict_scores, "reject decimal judge scores");
    app.add_flag("--no-numbering-variants", opts.no_numbering_variants,
                 "only accept the canonical '1.)' criterion numbering");
    app.add_option("--verdict-occurrence", opts.verdict_occurrence, "first | last")
        ->capture_default_str();
    app.add_option("--max-attempts", opts.max_attempts, "provider + format retry budget")
        ->capture_default_str();
    app.add_option("--backoff-ms", opts.backoff_ms, "base retry backoff")
        ->capture_default_str();
    app.add_option("--max-concurrent", opts.max_concurrent, "in-flight request bound")
        ->capture_default_str();
    app.add_option("--rpm", opts.rpm, "requests-per-minute budget (0 = unlimited)");
    app.add_option("--max-tokens", opts.max_tokens, "completion token limit")
        ->capture_default_str();
    app.add_option("--run-dir", opts.run_dir, "run artifact directory")
        ->capture_default_str();
    app.add_option("--cache", opts.cache_file,
                   "response cache file (default <run-dir>/<config-hash>/cache.jsonl)");
    app.add_flag("--live", opts.live, "allow live provider calls (sole nondeterminism source)");
    app.add_option("--mock-script", opts.mock_script,
                   "scripted mock provider: JSONL of {pattern, reply}");
    app.add_flag("--strict", opts.strict, "nonzero exit when any instance is unparseable");

    std::string input, out_path, adapter = "normalized", dataset_name, kind;
    std::string sft_adapter = "feedback-collection";
    double threshold = 0.0;

    auto* cmd_criteria = app.add_subcommand("criteria", "generate per-instance criteria");
    cmd_criteria->add_option("input", input, "dataset file")->required();
    cmd_criteria->add_option("--out", out_path, "criteria JSONL output")->required();
    cmd_criteria->add_option("--adapter", adapter,
                             "normalized | hhh | pairwise | feedback-collection");
    cmd_criteria->add_option("--dataset-name", dataset_name, "dataset label");

    auto* cmd_eval = app.add_subcommand("eval", "criteria + judging per instance");
    cmd_eval->add_option("input", input, "dataset file")->required();
    cmd_eval->add_option("--out", out_path, "assessment JSONL output")->required();
    cmd_eval->add_option("--adapter", adapter, "normalized | hhh | pairwise | feedback-collection");
    cmd_eval->add_option("--dataset-name", dataset_name, "dataset label");

    auto* cmd_bench = app.add_subcommand("bench", "full benchmark run with agreement metrics");
    cmd_bench->add_option("input", input, "dataset file")->required();
    cmd_bench->add_option("--out", out_path, "report JSON output")->required();
    cmd_bench->add_option("--adapter", adapter, "normalized | hhh | pairwise | feedback-collection");
    cmd_bench->add_option("--dataset-name", dataset_name, "dataset label");

    auto* cmd_prefgen = app.add_subcommand("prefgen", "score response groups into DPO pairs");
    cmd_prefgen->add_option("input", input, "response-group file")->required();
    cmd_prefgen->add_option("--out", out_path, "preference pair JSONL output")->required();
    cmd_prefgen
        ->add_option("--threshold", threshold,
                     "minimum chosen-rejected score gap; scale-dependent, no default")
        ->required();

    auto* cmd_export = app.add_subcommand("export-sft", "teacher-run training data export");
    cmd_export->add_option("input", input, "dataset file")->required();
    cmd_export->add_option("--out", out_path, "SFT JSONL output")->required();
    cmd_export->add_option("--kind", kind, "criteria | judge")->required();
    cmd_export->add_option("--adapter", sft_adapter, "normalized | feedback-collection");

    app.require_subcommand(1);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Resolved resolved = resolve(app, std::move(opts));
        if (cmd_criteria->parsed()) {
            return run_criteria(resolved, input, adapter, dataset_name, out_path);
        }
        if (cmd_eval->parsed()) {
            return run_eval(resolved, input, adapter, dataset_name, out_path);
        }
        if (cmd_bench->parsed()) {
            return run_bench(resolved, input, adapter, dataset_name, out_path);
        }
        if (cmd_prefgen->parsed()) {
            return run_prefgen(resolved, input, threshold, out_path);
        }
        if (cmd_export->parsed()) {
            return run_export_sft(resolved, input, sft_adapter, kind, out_path);
        }
        return 2;
    } catch (const Error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
}

}  // namespace salc::cli
