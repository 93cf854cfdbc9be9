#include "datadesc/run_config.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

std::string interpolate_env(std::string_view text) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.compare(i, 3, "$${") == 0) {
            out += "${";
            i += 3;
            continue;
        }
        if (text.compare(i, 2, "${") == 0) {
            const auto close = text.find('}', i + 2);
            if (close == std::string_view::npos) throw ConfigError(fmt::format("unterminated ${{ in '{}'", text));
            const std::string name(text.substr(i + 2, close - i - 2));
            const char* value = std::getenv(name.c_str());
            if (!value) throw ConfigError(fmt::format("environment variable '{}' is not set", name));
            out += value;
            i = close + 1;
            continue;
        }
        out += text[i++];
    }
    return out;
}

namespace {

void interpolate_all(nlohmann::json& node) {
    if (node.is_string()) {
        node = interpolate_env(node.get<std::string>());
    } else if (node.is_structured()) {
        for (auto& child : node) interpolate_all(child);
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& document, const std::filesystem::path& base_dir) {
    auto j = document;
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    RunConfig c;
    try {
        // Credentials stay as variable names in the provider section, so only
        // the remaining strings are interpolated eagerly.
        for (auto& [key, value] : j.items()) {
            if (key != "provider" && key != "judges") interpolate_all(value);
        }
        const auto base = base_dir.string();
        auto provider_section = [&](nlohmann::json section) {
            for (auto& [key, value] : section.items()) {
                if (key != "credential_env") interpolate_all(value);
            }
            return provider_config_from_json(section, base);
        };
        if (j.contains("provider")) c.provider = provider_section(j["provider"]);
        if (j.contains("judges")) {
            for (const auto& judge : j["judges"]) {
                JudgeConfig jc;
                jc.provider = provider_section(judge.at("provider"));
                jc.label = judge.value("label", jc.provider.model);
                c.judges.push_back(std::move(jc));
            }
        }
        if (j.contains("exec")) {
            const auto& e = j["exec"];
            if (e.contains("mode")) c.exec.mode = exec_mode_from_string(e["mode"].get<std::string>());
            c.exec.workers = e.value("workers", c.exec.workers);
            c.exec.batch_size = e.value("batch_size", c.exec.batch_size);
        }
        if (j.contains("ablation")) {
            c.sp = j["ablation"].value("sp", c.sp);
            c.sfd = j["ablation"].value("sfd", c.sfd);
        }
        c.sample_size = j.value("sample_size", c.sample_size);
        c.value_sample_size = j.value("value_sample_size", c.value_sample_size);
        c.seed = j.value("seed", c.seed);
        c.json_retries = j.value("json_retries", c.json_retries);
        if (j.contains("bm25")) {
            const auto& b = j["bm25"];
            c.bm25.k1 = b.value("k1", c.bm25.k1);
            c.bm25.b = b.value("b", c.bm25.b);
            c.bm25.epsilon = b.value("epsilon", c.bm25.epsilon);
            c.prepend_title = b.value("prepend_title", c.prepend_title);
        }
        if (j.contains("gain")) {
            const auto gain = to_lower(j["gain"].get<std::string>());
            if (gain == "exponential") {
                c.gain = Gain::Exponential;
            } else if (gain == "linear") {
                c.gain = Gain::Linear;
            } else {
                throw ConfigError(fmt::format("gain must be exponential or linear, got '{}'", gain));
            }
        }
        if (j.contains("ks")) c.ks = j["ks"].get<std::vector<std::size_t>>();
        c.pairs_per_dataset = j.value("pairs_per_dataset", c.pairs_per_dataset);
        c.jobs = j.value("jobs", c.jobs);
        if (j.contains("paths")) {
            const auto& p = j["paths"];
            if (p.contains("corpus_manifest")) c.corpus_manifest = resolve(base_dir, p["corpus_manifest"]);
            if (p.contains("benchmark_dir")) c.benchmark_dir = resolve(base_dir, p["benchmark_dir"]);
            if (p.contains("output_dir")) c.output_dir = resolve(base_dir, p["output_dir"]);
            if (p.contains("templates_dir")) c.templates_dir = resolve(base_dir, p["templates_dir"]);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    validate(c);
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return run_config_from_json(document, path.parent_path());
}

nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["provider"] = provider_config_to_json(c.provider);
    j["judges"] = nlohmann::json::array();
    for (const auto& judge : c.judges) {
        j["judges"].push_back({{"label", judge.label}, {"provider", provider_config_to_json(judge.provider)}});
    }
    j["exec"] = {{"mode", to_string(c.exec.mode)}, {"workers", c.exec.workers}, {"batch_size", c.exec.batch_size}};
    j["ablation"] = {{"sp", c.sp}, {"sfd", c.sfd}};
    j["sample_size"] = c.sample_size;
    j["value_sample_size"] = c.value_sample_size;
    j["seed"] = c.seed;
    j["json_retries"] = c.json_retries;
    j["bm25"] = {{"k1", c.bm25.k1}, {"b", c.bm25.b}, {"epsilon", c.bm25.epsilon}, {"prepend_title", c.prepend_title}};
    j["gain"] = c.gain == Gain::Exponential ? "exponential" : "linear";
    j["ks"] = c.ks;
    j["pairs_per_dataset"] = c.pairs_per_dataset;
    j["jobs"] = c.jobs;
    nlohmann::json paths = {{"output_dir", c.output_dir.string()}};
    if (c.corpus_manifest) paths["corpus_manifest"] = c.corpus_manifest->string();
    if (c.benchmark_dir) paths["benchmark_dir"] = c.benchmark_dir->string();
    if (c.templates_dir) paths["templates_dir"] = c.templates_dir->string();
    j["paths"] = paths;
    return j;
}

void validate(const RunConfig& c) {
    if (c.exec.workers < 1) throw ConfigError("workers must be >= 1");
    if (c.exec.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (c.ks.empty()) throw ConfigError("ks must not be empty");
    for (std::size_t i = 0; i < c.ks.size(); ++i) {
        if (c.ks[i] < 1) throw ConfigError("every k must be >= 1");
        if (i > 0 && c.ks[i] <= c.ks[i - 1]) throw ConfigError("ks must be strictly ascending");
    }
    if (c.sample_size < 1) throw ConfigError("sample_size must be >= 1");
    if (c.value_sample_size < 1) throw ConfigError("value_sample_size must be >= 1");
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (c.json_retries < 0) throw ConfigError("json_retries must be >= 0");
    if (c.bm25.k1 < 0 || c.bm25.b < 0 || c.bm25.b > 1) throw ConfigError("bm25 needs k1 >= 0 and b in [0, 1]");
}

}  // namespace datadesc
