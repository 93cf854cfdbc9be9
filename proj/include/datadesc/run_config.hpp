#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "datadesc/llm.hpp"
#include "datadesc/retrieval.hpp"
#include "datadesc/semantic_profile.hpp"

namespace datadesc {

struct JudgeConfig {
    std::string label;
    ProviderConfig provider;
};

struct RunConfig {
    ProviderConfig provider;
    std::vector<JudgeConfig> judges;
    ExecConfig exec;
    bool sp = true;
    bool sfd = true;
    std::size_t sample_size = 5;
    std::size_t value_sample_size = 5;
    std::uint64_t seed = 0;
    int json_retries = 3;
    Bm25Params bm25;
    bool prepend_title = false;
    Gain gain = Gain::Exponential;
    std::vector<std::size_t> ks{5, 10, 15, 20};
    std::size_t pairs_per_dataset = 10;
    std::size_t jobs = 1;
    std::optional<std::filesystem::path> corpus_manifest;
    std::optional<std::filesystem::path> benchmark_dir;
    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> templates_dir;
};

/// Replaces ${NAME} with the environment value. Unset variables throw
/// ConfigError; "$${" escapes a literal "${".
std::string interpolate_env(std::string_view text);

/// Interpolates every string in the document, then reads it. Relative
/// paths resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& config);

/// workers >= 1, batch_size >= 1, ks non-empty and strictly ascending,
/// sample sizes >= 1, jobs >= 1. Throws ConfigError.
void validate(const RunConfig& config);

}  // namespace datadesc
