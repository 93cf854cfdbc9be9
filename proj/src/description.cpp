#include "datadesc/description.hpp"

#include <fmt/format.h>

#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

std::string_view to_string(DescriptionMode mode) noexcept { return mode == DescriptionMode::UFD ? "UFD" : "SFD"; }

DescriptionMode description_mode_from_string(std::string_view name) {
    const auto lower = to_lower(name);
    if (lower == "ufd") return DescriptionMode::UFD;
    if (lower == "sfd") return DescriptionMode::SFD;
    throw ConfigError(fmt::format("description mode must be UFD or SFD, got '{}'", name));
}

nlohmann::json description_config_to_json(const DescriptionConfig& config) {
    return {{"sp_enabled", config.sp_enabled},
            {"sfd_enabled", config.sfd_enabled},
            {"exec_mode", to_string(config.exec_mode)},
            {"model", config.model}};
}

nlohmann::json description_record_to_jsonl(const DescriptionRecord& record) {
    return {{"dataset_id", record.dataset_id},
            {"mode", to_string(record.mode)},
            {"config", description_config_to_json(record.config)},
            {"text", record.text},
            {"tokens_in", record.input_tokens},
            {"tokens_out", record.output_tokens}};
}

nlohmann::json description_record_to_json(const DescriptionRecord& record) {
    auto j = description_record_to_jsonl(record);
    j["prompt"] = record.prompt;
    j["initial_description"] = record.initial_description ? nlohmann::json(*record.initial_description) : nullptr;
    j["calls"] = record.calls;
    j["warnings"] = record.warnings;
    return j;
}

std::string build_ufd_prompt(const GenerationContext& context, const PromptTemplates& templates) {
    return render_template(templates.get("ufd"), {{"D_sample", context.d_sample},
                                                  {"D_profile", context.d_profile},
                                                  {"D_semantic", context.d_semantic},
                                                  {"D_topic", context.d_topic}});
}

std::string build_sfd_prompt(const std::string& topic, const std::string& initial_description,
                             const PromptTemplates& templates) {
    return render_template(templates.get("sfd"), {{"D_topic", topic},
                                                  {"D_initial_description", initial_description},
                                                  {"Template", trim(templates.get("sfd_structure"))}});
}

namespace {

void account(DescriptionRecord& record, const CompletionResult& result) {
    record.input_tokens += result.input_tokens;
    record.output_tokens += result.output_tokens;
    record.latency_ms += result.latency_ms;
    ++record.calls;
}

}  // namespace

DescriptionRecord generate_ufd(const GenerationContext& context, const Gateway& gateway,
                               const GenerationOptions& options) {
    DescriptionRecord record;
    record.dataset_id = options.dataset_id;
    record.mode = DescriptionMode::UFD;
    record.config = options.config;
    record.prompt = build_ufd_prompt(context, options.templates);

    CompletionRequest request;
    request.user_prompt = record.prompt;
    request.temperature = gateway.default_temperature();
    request.tag = Stage::Ufd;
    request.dataset_id = options.dataset_id;
    try {
        auto result = gateway.complete(request);
        account(record, result);
        record.text = trim(result.text);
    } catch (const ProviderUnavailable& e) {
        throw GenerationError(fmt::format("UFD generation failed for '{}': {}", options.dataset_id, e.what()));
    }
    return record;
}

std::size_t count_sfd_sections(const std::string& text) {
    const auto lower = to_lower(text);
    auto has = [&](std::string_view header) { return lower.find(to_lower(header)) != std::string::npos; };
    std::size_t count = 0;
    if (has("Key Themes or Topics") || has("Related Topics")) ++count;
    for (auto header : {"Applications and Use Cases", "Concepts and Synonyms", "Keywords and Themes",
                        "Additional Context"}) {
        if (has(header)) ++count;
    }
    return count;
}

bool sfd_structure_ok(const std::string& text) {
    return to_lower(text).find("dataset overview") != std::string::npos && count_sfd_sections(text) >= 3;
}

DescriptionRecord generate_sfd(const DatasetTopic& topic, const std::string& initial_description,
                               const Gateway& gateway, const GenerationOptions& options) {
    DescriptionRecord record;
    record.dataset_id = options.dataset_id;
    record.mode = DescriptionMode::SFD;
    record.config = options.config;
    record.initial_description = initial_description;
    record.prompt = build_sfd_prompt(topic.topic, initial_description, options.templates);

    CompletionRequest request;
    request.user_prompt = record.prompt;
    request.temperature = gateway.default_temperature();
    request.tag = Stage::Sfd;
    request.dataset_id = options.dataset_id;
    try {
        auto result = gateway.complete(request);
        account(record, result);
        record.text = trim(result.text);
        if (!sfd_structure_ok(record.text)) {
            gateway.events().record({{"event", "sfd_structure_reprompt"}, {"dataset_id", options.dataset_id}});
            request.user_prompt = record.prompt + "\n\n" + options.templates.get("sfd_reminder");
            auto retry = gateway.complete(request);
            account(record, retry);
            record.text = trim(retry.text);
            if (!sfd_structure_ok(record.text)) {
                record.warnings.push_back(
                    fmt::format("SFD for '{}' lacks the expected sections; accepted as-is", options.dataset_id));
                gateway.events().record({{"event", "sfd_structure_accepted"}, {"dataset_id", options.dataset_id}});
            }
        }
    } catch (const ProviderUnavailable& e) {
        throw GenerationError(fmt::format("SFD generation failed for '{}': {}", options.dataset_id, e.what()));
    }
    return record;
}

std::string config_key(const DescriptionConfig& config, const PipelineOptions& options) {
    nlohmann::json key = description_config_to_json(config);
    key["sample_size"] = options.sample_size;
    key["value_sample_size"] = options.value_sample_size;
    key["seed"] = options.seed;
    if (config.exec_mode == ExecMode::Grouped) key["batch_size"] = options.flags.exec.batch_size;
    const auto label = fmt::format("{}{}-{}", config.sp_enabled ? "sp" : "nosp", config.sfd_enabled ? "-sfd" : "-nosfd",
                                   to_string(config.exec_mode));
    return label + "-" + stable_hash_hex(key.dump()).substr(0, 10);
}

namespace {

void persist(const std::filesystem::path& dir, const std::string& name, const nlohmann::json& value) {
    write_file_atomic(dir / name, value.dump(2) + "\n");
}

}  // namespace

PipelineResult run_pipeline(const TableHandle& table, const Gateway& gateway, const PipelineOptions& options) {
    PipelineResult result;
    result.dataset_id = table.dataset_id;
    result.warnings = table.ingest_warnings;

    DescriptionConfig config;
    config.sp_enabled = options.flags.sp;
    config.sfd_enabled = options.flags.sfd;
    config.exec_mode = options.flags.exec.mode;
    config.model = gateway.model_name();

    GenerationOptions generation;
    generation.templates = options.templates;
    generation.dataset_id = table.dataset_id;
    generation.config = config;

    const auto title = trim(table.title).empty() ? table.dataset_id : table.title;

    result.content_profile = profile_table(table, options.profile_workers);
    result.context.d_profile = render_content_summary(result.content_profile);
    result.context.d_sample = render_row_sample(table, sample_rows(table, options.sample_size, options.seed));

    if (options.flags.sp) {
        SemanticOptions semantic;
        semantic.exec = options.flags.exec;
        semantic.value_sample_size = options.value_sample_size;
        semantic.seed = options.seed;
        semantic.json_retries = options.json_retries;
        semantic.prompts = options.semantic_prompts
                               ? options.semantic_prompts
                               : std::make_shared<TemplateSemanticPromptBuilder>(options.templates);
        semantic.dataset_id = table.dataset_id;
        result.semantic = profile_dataset(table, gateway, semantic);
        result.warnings.insert(result.warnings.end(), result.semantic->warnings.begin(), result.semantic->warnings.end());
        result.context.d_semantic = result.semantic->combined;

        TopicOptions topic_options{options.templates, table.dataset_id};
        result.topic = generate_topic(title, table.original_description, result.context.d_sample, gateway, topic_options,
                                      &result.warnings);
        result.context.d_topic = result.topic->topic;
    }

    std::optional<DescriptionRecord> ufd;
    try {
        ufd = generate_ufd(result.context, gateway, generation);
        result.records.push_back(*ufd);
    } catch (const GenerationError& e) {
        result.errors.emplace_back(e.what());
        gateway.events().record({{"event", "dataset_failed"}, {"dataset_id", table.dataset_id}, {"cause", e.what()}});
    }

    if (ufd && options.flags.sfd) {
        const auto topic = result.topic ? *result.topic : DatasetTopic{normalize_topic(title)};
        try {
            auto sfd = generate_sfd(topic, ufd->text, gateway, generation);
            result.warnings.insert(result.warnings.end(), sfd.warnings.begin(), sfd.warnings.end());
            result.records.push_back(std::move(sfd));
        } catch (const GenerationError& e) {
            result.errors.emplace_back(e.what());
            gateway.events().record({{"event", "sfd_failed"}, {"dataset_id", table.dataset_id}, {"cause", e.what()}});
        }
    }

    if (options.artifacts_dir) {
        const auto dir = *options.artifacts_dir / table.dataset_id;
        persist(dir, "content_profile.json", result.content_profile);
        write_file_atomic(dir / "content_summary.txt", result.context.d_profile);
        if (result.semantic) persist(dir, "semantic_summary.json", semantic_summary_to_json(*result.semantic));
        if (result.topic) persist(dir, "topic.json", {{"topic", result.topic->topic}});
        for (const auto& record : result.records) {
            persist(dir, to_lower(to_string(record.mode)) + ".json", description_record_to_json(record));
        }
        persist(dir, "warnings.json", {{"warnings", result.warnings}, {"errors", result.errors}});
        write_file_atomic(dir / "cost.csv", gateway.ledger().slice(table.dataset_id).to_csv());
    }
    return result;
}

}  // namespace datadesc
