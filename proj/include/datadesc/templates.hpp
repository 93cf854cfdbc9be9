#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace datadesc {

/// Values for placeholder substitution. A name mapped to nullopt counts as
/// absent: its optional sections are dropped and bare uses render empty.
using TemplateVars = std::map<std::string, std::optional<std::string>, std::less<>>;

/// Fills a prompt template.
///
///   {name}            replaced by the value of `name` when `name` is a key of
///                     `vars`; any other brace text (JSON examples) is kept.
///   {?name}...{/name} kept only when `name` has a value.
///
/// Substituted values are never rescanned.
std::string render_template(std::string_view text, const TemplateVars& vars);

/// Placeholder names referenced by a template, in first-use order.
std::vector<std::string> template_placeholders(std::string_view text);

/// Named prompt templates. Defaults are compiled in from templates/*.txt;
/// a directory of same-named files overrides any subset of them.
class PromptTemplates {
public:
    static PromptTemplates builtin();
    static PromptTemplates from_directory(const std::filesystem::path& dir);

    const std::string& get(std::string_view name) const;
    void set(std::string name, std::string text);
    std::vector<std::string> names() const;

private:
    std::map<std::string, std::string, std::less<>> texts_;
};

}  // namespace datadesc
