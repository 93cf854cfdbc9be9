#include "datadesc/templates.hpp"

#include <algorithm>
#include <cctype>

#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

namespace detail {
const std::map<std::string, std::string>& builtin_templates();
}

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

}  // namespace

std::string render_template(std::string_view text, const TemplateVars& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            out += text[i++];
            continue;
        }
        const auto close = text.find('}', i + 1);
        if (close == std::string_view::npos) {
            out.append(text.substr(i));
            break;
        }
        const auto inner = text.substr(i + 1, close - i - 1);
        if (inner.size() > 1 && inner[0] == '?' && is_identifier(inner.substr(1))) {
            const auto name = inner.substr(1);
            const std::string end_tag = "{/" + std::string(name) + "}";
            const auto end = text.find(end_tag, close + 1);
            if (end == std::string_view::npos) {
                throw ConfigError("template section {?" + std::string(name) + "} is not closed");
            }
            auto it = vars.find(name);
            if (it != vars.end() && it->second) {
                out += render_template(text.substr(close + 1, end - close - 1), vars);
            }
            i = end + end_tag.size();
            continue;
        }
        if (is_identifier(inner)) {
            if (auto it = vars.find(inner); it != vars.end()) {
                if (it->second) out += *it->second;
                i = close + 1;
                continue;
            }
        }
        out += '{';
        ++i;
    }
    return out;
}

std::vector<std::string> template_placeholders(std::string_view text) {
    std::vector<std::string> names;
    std::size_t i = 0;
    while ((i = text.find('{', i)) != std::string_view::npos) {
        const auto close = text.find('}', i + 1);
        if (close == std::string_view::npos) break;
        auto inner = text.substr(i + 1, close - i - 1);
        if (!inner.empty() && (inner[0] == '?' || inner[0] == '/')) inner.remove_prefix(1);
        if (is_identifier(inner)) {
            std::string name(inner);
            if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
        }
        ++i;
    }
    return names;
}

PromptTemplates PromptTemplates::builtin() {
    PromptTemplates templates;
    for (const auto& [name, text] : detail::builtin_templates()) templates.texts_.emplace(name, text);
    return templates;
}

PromptTemplates PromptTemplates::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
    auto templates = builtin();
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt") continue;
        templates.set(entry.path().stem().string(), read_file(entry.path()));
    }
    return templates;
}

const std::string& PromptTemplates::get(std::string_view name) const {
    auto it = texts_.find(name);
    if (it == texts_.end()) throw ConfigError("unknown prompt template '" + std::string(name) + "'");
    return it->second;
}

void PromptTemplates::set(std::string name, std::string text) { texts_[std::move(name)] = std::move(text); }

std::vector<std::string> PromptTemplates::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : texts_) out.push_back(name);
    return out;
}

}  // namespace datadesc
