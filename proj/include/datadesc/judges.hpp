#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "datadesc/llm.hpp"
#include "datadesc/templates.hpp"

namespace datadesc {

enum class Dimension { Completeness, Conciseness, Readability };

inline constexpr std::array<Dimension, 3> kDimensions{Dimension::Completeness, Dimension::Conciseness,
                                                      Dimension::Readability};

std::string_view to_string(Dimension dimension) noexcept;

struct PointwiseScores {
    int completeness = 0;
    int conciseness = 0;
    int readability = 0;

    int operator[](Dimension dimension) const;
    bool operator==(const PointwiseScores&) const = default;
};

/// Finds "Completeness: X, Conciseness: Y, Readability: Z" anywhere in the
/// reply, case- and whitespace-insensitive. Scores outside 1..10 reject.
std::optional<PointwiseScores> parse_pointwise(std::string_view reply);

struct JudgeOptions {
    PromptTemplates templates = PromptTemplates::builtin();
    std::string dataset_id;
    std::size_t item = 0;
};

std::string build_pointwise_prompt(std::string_view description, const PromptTemplates& templates);

/// Judge temperature is 0. An unparseable reply is retried once; a second
/// failure throws ScoringParseError.
PointwiseScores judge_pointwise(std::string_view description, const Gateway& gateway, const JudgeOptions& options = {});

enum class Winner { A, B, Tie };
enum class PresentationOrder { AB, BA };

std::string_view to_string(Winner winner) noexcept;
std::string_view to_string(PresentationOrder order) noexcept;

/// Per-dimension verdicts in presentation terms (A = first shown).
std::optional<std::array<Winner, 3>> parse_pairwise(std::string_view reply);

std::string build_pairwise_prompt(std::string_view first, std::string_view second, const PromptTemplates& templates);

struct PairwiseOutcome {
    std::string dataset_id;
    std::string method_a;
    std::string method_b;
    Dimension dimension = Dimension::Completeness;
    /// Relative to method_a / method_b, not to the presentation.
    Winner winner = Winner::Tie;
    PresentationOrder order = PresentationOrder::AB;
};

struct WinRate {
    std::string method;
    Dimension dimension = Dimension::Completeness;
    double victories = 0;
    std::size_t comparisons = 0;

    double rate() const { return comparisons ? victories / static_cast<double>(comparisons) : 0.0; }
};

struct PairwiseReport {
    std::string judge;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sampled_pairs;
    std::vector<PairwiseOutcome> outcomes;
    /// Sorted by method, then dimension.
    std::vector<WinRate> win_rates;
    std::size_t dropped_judgments = 0;
    std::vector<std::string> errors;

    std::optional<WinRate> find(std::string_view method, Dimension dimension) const;
};

/// dataset_id -> method label -> description text.
using MethodCorpus = std::map<std::string, std::map<std::string, std::string>>;

struct PairwiseOptions {
    std::size_t pairs_per_dataset = 10;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    PromptTemplates templates = PromptTemplates::builtin();
};

/// Uniform sample without replacement of min(count, all) unordered pairs of
/// distinct methods; each pair is ordered (lower label first).
std::vector<std::pair<std::string, std::string>> sample_method_pairs(const std::vector<std::string>& methods,
                                                                     std::size_t count, std::uint64_t seed);

/// Each sampled pair is judged in both presentation orders. A tie is half
/// a victory for each side; failed judgments drop out of both counts.
PairwiseReport judge_pairwise(const MethodCorpus& corpus, const Gateway& gateway, const PairwiseOptions& options = {});

/// Win rates over already collected outcomes.
std::vector<WinRate> win_rates(const std::vector<PairwiseOutcome>& outcomes);

struct PointwiseRecord {
    std::string dataset_id;
    std::string method;
    std::string judge;
    PointwiseScores scores;
};

struct JudgeHandle {
    std::string label;
    const Gateway* gateway = nullptr;
};

struct CrossEvaluationOptions {
    bool pointwise = true;
    bool pairwise = true;
    /// Model that produced the descriptions; a judge sharing it is flagged.
    std::string generator_model;
    PairwiseOptions pairwise_options;
};

struct CrossEvaluationReport {
    std::vector<std::string> judges;
    std::vector<PointwiseRecord> pointwise;
    std::vector<PairwiseReport> pairwise;
    std::vector<std::string> warnings;
    std::vector<std::string> errors;
};

/// Runs the configured judges over every (dataset, method) description.
CrossEvaluationReport cross_evaluate(const MethodCorpus& corpus, const std::vector<JudgeHandle>& judges,
                                     const CrossEvaluationOptions& options = {});

/// "dataset_id,method,judge,completeness,conciseness,readability"
std::string pointwise_to_csv(const std::vector<PointwiseRecord>& records);
/// "method,dimension,judge,win_rate"
std::string win_rates_to_csv(const std::vector<PairwiseReport>& reports);
/// Mean pointwise score per method with one column per (metric, judge).
std::string render_cross_table(const CrossEvaluationReport& report);

}  // namespace datadesc
