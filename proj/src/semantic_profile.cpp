#include "datadesc/semantic_profile.hpp"

#include <cctype>

#include <fmt/format.h>

#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

namespace {

std::string key_form(std::string_view key) {
    std::string out;
    for (unsigned char c : key) {
        if (std::isalnum(c)) out += static_cast<char>(std::tolower(c));
    }
    return out;
}

const nlohmann::json* find_key(const nlohmann::json& object, std::initializer_list<std::string_view> names) {
    for (const auto& [key, value] : object.items()) {
        const auto form = key_form(key);
        for (auto name : names) {
            if (form == name) return &value;
        }
    }
    return nullptr;
}

std::string coerce_text(const nlohmann::json* value) {
    if (value == nullptr || value->is_null()) return {};
    if (value->is_string()) return trim(value->get<std::string>());
    if (value->is_array()) {
        std::vector<std::string> parts;
        for (const auto& element : *value) {
            auto text = coerce_text(&element);
            if (!text.empty()) parts.push_back(std::move(text));
        }
        return join(parts, ", ");
    }
    if (value->is_object()) return value->dump();
    return value->dump();
}

bool coerce_bool(const nlohmann::json* value) {
    if (value == nullptr || value->is_null()) return false;
    if (value->is_boolean()) return value->get<bool>();
    if (value->is_number()) return value->get<double>() != 0.0;
    if (value->is_string()) {
        const auto text = to_lower(trim(value->get<std::string>()));
        return text == "true" || text == "yes" || text == "y" || text == "1";
    }
    return false;
}

std::string strip_final_period(std::string text) {
    while (!text.empty() && text.back() == '.') text.pop_back();
    return text;
}

std::string join_samples(const std::vector<std::string>& values) { return join(values, ", "); }

std::vector<std::string> column_samples(const TableHandle& table, std::size_t column, const SemanticOptions& options) {
    return sample_column_values(table, column, options.value_sample_size, options.seed + column);
}

std::shared_ptr<const SemanticPromptBuilder> prompts_or_default(const SemanticOptions& options) {
    if (options.prompts) return options.prompts;
    static const auto fallback = std::make_shared<TemplateSemanticPromptBuilder>();
    return fallback;
}

}  // namespace

std::string_view to_string(ExecMode mode) noexcept {
    switch (mode) {
        case ExecMode::Sequential: return "seq";
        case ExecMode::Concurrent: return "mt";
        case ExecMode::Grouped: return "gp";
    }
    return "seq";
}

ExecMode exec_mode_from_string(std::string_view name) {
    if (name == "seq" || name == "sequential") return ExecMode::Sequential;
    if (name == "mt" || name == "concurrent") return ExecMode::Concurrent;
    if (name == "gp" || name == "grouped") return ExecMode::Grouped;
    throw ConfigError(fmt::format("exec mode must be seq, mt or gp, got '{}'", name));
}

TemplateSemanticPromptBuilder::TemplateSemanticPromptBuilder(PromptTemplates templates)
    : templates_(std::move(templates)) {}

std::string TemplateSemanticPromptBuilder::instructions() const {
    return render_template(templates_.get("semantic_instructions"),
                           {{"template", trim(templates_.get("semantic_template"))},
                            {"response_example", trim(templates_.get("semantic_response_example"))}});
}

std::string TemplateSemanticPromptBuilder::column_payload(const std::string& column_name,
                                                          const std::vector<std::string>& sample_values) const {
    return render_template(templates_.get("semantic_column"),
                           {{"column_name", column_name}, {"sample_values", join_samples(sample_values)}});
}

std::string TemplateSemanticPromptBuilder::repair_instruction() const { return templates_.get("semantic_repair"); }

SemanticColumnProfile semantic_profile_from_json(const std::string& column_name, const nlohmann::json& object) {
    if (!object.is_object()) throw SemanticParseError("semantic reply is not a JSON object", object.dump());
    SemanticColumnProfile p;
    p.column_name = column_name;
    bool recognised = false;

    if (const auto* temporal = find_key(object, {"temporal"}); temporal != nullptr) {
        recognised = true;
        if (temporal->is_object()) {
            p.temporal.is_temporal = coerce_bool(find_key(*temporal, {"istemporal", "temporal"}));
            p.temporal.resolution = coerce_text(find_key(*temporal, {"resolution"}));
        } else {
            p.temporal.is_temporal = coerce_bool(temporal);
        }
    }
    if (const auto* spatial = find_key(object, {"spatial"}); spatial != nullptr) {
        recognised = true;
        if (spatial->is_object()) {
            p.spatial.is_spatial = coerce_bool(find_key(*spatial, {"isspatial", "spatial"}));
            p.spatial.resolution = coerce_text(find_key(*spatial, {"resolution"}));
        } else {
            p.spatial.is_spatial = coerce_bool(spatial);
        }
    }
    auto text_field = [&](std::initializer_list<std::string_view> names, std::string& out) {
        if (const auto* value = find_key(object, names); value != nullptr) {
            recognised = true;
            out = coerce_text(value);
        }
    };
    text_field({"entitytype"}, p.entity_type);
    text_field({"dataformat"}, p.data_format);
    text_field({"domainspecifictypes", "domainspecifictype"}, p.domain_specific_types);
    text_field({"functionusagecontext", "usagecontext"}, p.usage_context);

    if (!recognised) throw SemanticParseError("semantic reply has none of the template keys", object.dump());
    if (!p.temporal.is_temporal) p.temporal.resolution.clear();
    if (!p.spatial.is_spatial) p.spatial.resolution.clear();
    return p;
}

nlohmann::json semantic_profile_to_json(const SemanticColumnProfile& p) {
    return {{"column_name", p.column_name},
            {"Temporal", {{"isTemporal", p.temporal.is_temporal}, {"resolution", p.temporal.resolution}}},
            {"Spatial", {{"isSpatial", p.spatial.is_spatial}, {"resolution", p.spatial.resolution}}},
            {"Entity Type", p.entity_type},
            {"Data Format", p.data_format},
            {"Domain-Specific Types", p.domain_specific_types},
            {"Function/Usage Context", p.usage_context}};
}

nlohmann::json parse_model_json(const std::string& reply) {
    auto text = trim(reply);
    if (text.rfind("```", 0) == 0) {
        const auto first_newline = text.find('\n');
        const auto closing = text.rfind("```");
        if (first_newline != std::string::npos && closing != std::string::npos && closing > first_newline) {
            text = trim(std::string_view(text).substr(first_newline + 1, closing - first_newline - 1));
        }
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SemanticParseError(std::string("reply is not valid JSON: ") + e.what(), reply);
    }
}

SemanticColumnProfile profile_column(const std::string& column_name, const std::vector<std::string>& sample_values,
                                     const Gateway& gateway, const SemanticOptions& options, std::size_t item) {
    const auto prompts = prompts_or_default(options);
    CompletionRequest request;
    request.system_instructions = prompts->instructions();
    request.user_prompt = prompts->column_payload(column_name, sample_values);
    request.temperature = gateway.default_temperature();
    request.tag = Stage::SemanticProfile;
    request.dataset_id = options.dataset_id;
    request.item = item;

    const auto base_prompt = request.user_prompt;
    std::string last_reply;
    std::string last_error;
    for (int attempt = 0; attempt <= options.json_retries; ++attempt) {
        if (attempt > 0) request.user_prompt = base_prompt + "\n" + prompts->repair_instruction();
        last_reply = gateway.complete(request).text;
        try {
            return semantic_profile_from_json(column_name, parse_model_json(last_reply));
        } catch (const SemanticParseError& e) {
            last_error = e.what();
            gateway.events().record({{"event", "semantic_parse_retry"},
                                     {"dataset_id", options.dataset_id},
                                     {"column", column_name},
                                     {"attempt", attempt + 1},
                                     {"cause", last_error}});
        }
    }
    throw SemanticParseError(fmt::format("column '{}': {}", column_name, last_error), last_reply);
}

std::string serialize_column_profile(const SemanticColumnProfile& p) {
    std::string out = fmt::format("**{}**:", p.column_name);
    if (auto entity = strip_final_period(p.entity_type); !entity.empty()) {
        out += fmt::format(" Represents {}.", to_lower(entity));
    }
    if (p.temporal.is_temporal) {
        out += p.temporal.resolution.empty()
                   ? std::string(" Contains temporal data.")
                   : fmt::format(" Contains temporal data (resolution: {}).", p.temporal.resolution);
    }
    if (p.spatial.is_spatial) {
        out += p.spatial.resolution.empty()
                   ? std::string(" Contains spatial data.")
                   : fmt::format(" Contains spatial data (resolution: {}).", p.spatial.resolution);
    }
    if (auto domain = strip_final_period(p.domain_specific_types); !domain.empty()) {
        out += fmt::format(" Domain-specific type: {}.", to_lower(domain));
    }
    if (auto usage = strip_final_period(p.usage_context); !usage.empty()) {
        out += fmt::format(" Function/Usage Context: {}.", usage);
    }
    return out;
}

namespace {

struct ColumnOutcome {
    SemanticColumnProfile profile;
    std::optional<std::string> warning;
};

ColumnOutcome profile_column_or_degrade(const TableHandle& table, std::size_t c, const Gateway& gateway,
                                        const SemanticOptions& options) {
    const auto& name = table.column_names[c];
    try {
        return {profile_column(name, column_samples(table, c, options), gateway, options, c), std::nullopt};
    } catch (const Error& e) {
        gateway.events().record(
            {{"event", "semantic_degraded"}, {"dataset_id", options.dataset_id}, {"column", name}, {"cause", e.what()}});
        SemanticColumnProfile empty;
        empty.column_name = name;
        return {std::move(empty), fmt::format("semantic profile of column '{}' degraded to empty: {}", name, e.what())};
    }
}

// One grouped completion for columns [begin, end). Returns nullopt when the
// whole batch failed; individual entries are nullopt when only that element
// was unusable.
std::optional<std::vector<std::optional<SemanticColumnProfile>>> profile_batch(
    const TableHandle& table, std::size_t begin, std::size_t end, std::size_t batch_index, const Gateway& gateway,
    const SemanticOptions& options) {
    const auto prompts = prompts_or_default(options);
    CompletionRequest request;
    request.system_instructions = prompts->instructions();
    for (std::size_t c = begin; c < end; ++c) {
        request.user_prompt += prompts->column_payload(table.column_names[c], column_samples(table, c, options));
    }
    request.temperature = gateway.default_temperature();
    request.tag = Stage::SemanticProfile;
    request.dataset_id = options.dataset_id;
    request.item = batch_index;
    const auto base_prompt = request.user_prompt;
    const std::size_t count = end - begin;

    for (int attempt = 0; attempt <= options.json_retries; ++attempt) {
        if (attempt > 0) request.user_prompt = base_prompt + "\n" + prompts->repair_instruction();
        std::string reply;
        try {
            reply = gateway.complete(request).text;
        } catch (const ProviderUnavailable&) {
            return std::nullopt;
        }
        try {
            auto parsed = parse_model_json(reply);
            if (count == 1 && parsed.is_object()) parsed = nlohmann::json::array({parsed});
            if (!parsed.is_array() || parsed.size() != count) {
                throw SemanticParseError(fmt::format("expected a JSON array of {} objects", count), reply);
            }
            std::vector<std::optional<SemanticColumnProfile>> out(count);
            for (std::size_t k = 0; k < count; ++k) {
                try {
                    out[k] = semantic_profile_from_json(table.column_names[begin + k], parsed[k]);
                } catch (const SemanticParseError&) {
                    out[k] = std::nullopt;
                }
            }
            return out;
        } catch (const SemanticParseError& e) {
            gateway.events().record({{"event", "semantic_parse_retry"},
                                     {"dataset_id", options.dataset_id},
                                     {"batch", batch_index},
                                     {"attempt", attempt + 1},
                                     {"cause", e.what()}});
        }
    }
    return std::nullopt;
}

}  // namespace

SemanticSummary profile_dataset(const TableHandle& table, const Gateway& gateway, const SemanticOptions& options) {
    const std::size_t n = table.column_count();
    std::vector<ColumnOutcome> outcomes(n);

    switch (options.exec.mode) {
        case ExecMode::Sequential:
            for (std::size_t c = 0; c < n; ++c) outcomes[c] = profile_column_or_degrade(table, c, gateway, options);
            break;
        case ExecMode::Concurrent:
            if (options.exec.workers == 0) throw ContractViolation("concurrent mode needs at least one worker");
            parallel_for(n, options.exec.workers,
                         [&](std::size_t c) { outcomes[c] = profile_column_or_degrade(table, c, gateway, options); });
            break;
        case ExecMode::Grouped: {
            if (options.exec.batch_size == 0) throw ContractViolation("grouped mode needs batch_size >= 1");
            const auto batch = options.exec.batch_size;
            for (std::size_t begin = 0, index = 0; begin < n; begin += batch, ++index) {
                const auto end = std::min(n, begin + batch);
                auto results = profile_batch(table, begin, end, index, gateway, options);
                if (!results) {
                    gateway.events().record(
                        {{"event", "grouped_batch_fallback"}, {"dataset_id", options.dataset_id}, {"batch", index}});
                }
                for (std::size_t c = begin; c < end; ++c) {
                    if (results && (*results)[c - begin]) {
                        outcomes[c] = {std::move(*(*results)[c - begin]), std::nullopt};
                    } else {
                        outcomes[c] = profile_column_or_degrade(table, c, gateway, options);
                    }
                }
            }
            break;
        }
    }

    SemanticSummary summary;
    for (auto& outcome : outcomes) {
        summary.column_summaries.push_back(serialize_column_profile(outcome.profile));
        summary.profiles.push_back(std::move(outcome.profile));
        if (outcome.warning) summary.warnings.push_back(std::move(*outcome.warning));
    }
    summary.combined = join(summary.column_summaries, "\n");
    return summary;
}

nlohmann::json semantic_summary_to_json(const SemanticSummary& summary) {
    auto profiles = nlohmann::json::array();
    for (const auto& p : summary.profiles) profiles.push_back(semantic_profile_to_json(p));
    return {{"profiles", profiles},
            {"column_summaries", summary.column_summaries},
            {"combined", summary.combined},
            {"warnings", summary.warnings}};
}

std::string normalize_topic(std::string_view raw) {
    std::string line;
    for (const auto& candidate : split(raw, '\n')) {
        auto t = trim(candidate);
        if (!t.empty()) {
            line = std::move(t);
            break;
        }
    }
    // Drop an echoed label such as "Topic (2-3 words):".
    if (auto colon = line.find(':'); colon != std::string::npos && to_lower(line.substr(0, colon)).find("topic") != std::string::npos) {
        line = line.substr(colon + 1);
    }

    std::string cleaned;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const auto c = static_cast<unsigned char>(line[i]);
        // U+2018/2019/201C/201D curly quotes.
        if (c == 0xE2 && i + 2 < line.size() && static_cast<unsigned char>(line[i + 1]) == 0x80) {
            const auto third = static_cast<unsigned char>(line[i + 2]);
            if (third == 0x98 || third == 0x99 || third == 0x9C || third == 0x9D) {
                cleaned += ' ';
                i += 2;
                continue;
            }
        }
        if (c < 0x80 && std::ispunct(c) && c != '-' && c != '&' && c != '/') {
            cleaned += ' ';
        } else {
            cleaned += static_cast<char>(c);
        }
    }
    std::vector<std::string> words;
    for (const auto& word : split(cleaned, ' ')) {
        auto w = trim(word);
        if (!w.empty()) words.push_back(std::move(w));
        if (words.size() == 3) break;
    }
    return join(words, " ");
}

std::string render_row_sample(const TableHandle& table, const RowSample& sample) {
    std::vector<std::string> lines;
    lines.push_back(join(table.column_names, ","));
    for (const auto& row : sample.rows) lines.push_back(join(row, ","));
    return join(lines, "\n");
}

std::string build_topic_prompt(const PromptTemplates& templates, const std::string& title,
                               const std::optional<std::string>& original_description,
                               const std::string& dataset_sample) {
    return render_template(templates.get("topic"), {{"title", title},
                                                    {"original_description", original_description},
                                                    {"dataset_sample", dataset_sample}});
}

DatasetTopic generate_topic(const std::string& title, const std::optional<std::string>& original_description,
                            const std::string& dataset_sample, const Gateway& gateway, const TopicOptions& options,
                            std::vector<std::string>* warnings) {
    const auto effective_title = trim(title).empty() ? options.dataset_id : title;
    if (trim(effective_title).empty()) throw ContractViolation("generate_topic needs a title or dataset id");
    auto title_fallback = [&](const std::string& reason) {
        if (warnings) warnings->push_back("topic generation fell back to the title: " + reason);
        gateway.events().record({{"event", "topic_fallback"}, {"dataset_id", options.dataset_id}, {"cause", reason}});
        return DatasetTopic{normalize_topic(effective_title)};
    };

    CompletionRequest request;
    request.user_prompt = build_topic_prompt(options.templates, effective_title, original_description, dataset_sample);
    request.temperature = gateway.default_temperature();
    request.tag = Stage::Topic;
    request.dataset_id = options.dataset_id;
    try {
        auto topic = normalize_topic(gateway.complete(request).text);
        if (topic.empty()) return title_fallback("empty topic after normalisation");
        return {std::move(topic)};
    } catch (const ProviderUnavailable& e) {
        return title_fallback(e.what());
    }
}

}  // namespace datadesc
