#include "datadesc/judges.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "datadesc/csv.hpp"
#include "datadesc/dataset.hpp"
#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

std::string_view to_string(Dimension dimension) noexcept {
    switch (dimension) {
        case Dimension::Completeness: return "completeness";
        case Dimension::Conciseness: return "conciseness";
        case Dimension::Readability: return "readability";
    }
    return "completeness";
}

int PointwiseScores::operator[](Dimension dimension) const {
    switch (dimension) {
        case Dimension::Completeness: return completeness;
        case Dimension::Conciseness: return conciseness;
        case Dimension::Readability: return readability;
    }
    return 0;
}

std::optional<PointwiseScores> parse_pointwise(std::string_view reply) {
    static const std::regex pattern(
        R"(completeness\s*[:=]\s*(\d+)[^0-9a-z]+conciseness\s*[:=]\s*(\d+)[^0-9a-z]+readability\s*[:=]\s*(\d+))",
        std::regex::icase);
    std::match_results<std::string_view::const_iterator> match;
    if (!std::regex_search(reply.begin(), reply.end(), match, pattern)) return std::nullopt;
    PointwiseScores scores;
    int* slots[] = {&scores.completeness, &scores.conciseness, &scores.readability};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto digits = match[i + 1].str();
        if (digits.size() > 2) return std::nullopt;
        const int value = std::stoi(digits);
        if (value < 1 || value > 10) return std::nullopt;
        *slots[i] = value;
    }
    return scores;
}

std::string build_pointwise_prompt(std::string_view description, const PromptTemplates& templates) {
    return render_template(templates.get("judge_pointwise"), {{"description", std::string(description)}});
}

namespace {

template <typename Parsed, typename Parser>
Parsed ask_with_parse_retry(CompletionRequest request, const Gateway& gateway, Parser parse, std::string_view what) {
    std::string last;
    for (int attempt = 0; attempt < 2; ++attempt) {
        last = gateway.complete(request).text;
        if (auto parsed = parse(last)) return *parsed;
        gateway.events().record({{"event", "judge_parse_failure"},
                                 {"tag", to_string(request.tag)},
                                 {"dataset_id", request.dataset_id},
                                 {"item", request.item},
                                 {"attempt", attempt + 1}});
    }
    throw ScoringParseError(fmt::format("unparseable {} reply for '{}'", what, request.dataset_id), last);
}

}  // namespace

PointwiseScores judge_pointwise(std::string_view description, const Gateway& gateway, const JudgeOptions& options) {
    CompletionRequest request;
    request.user_prompt = build_pointwise_prompt(description, options.templates);
    request.temperature = 0.0;
    request.tag = Stage::JudgePointwise;
    request.dataset_id = options.dataset_id;
    request.item = options.item;
    return ask_with_parse_retry<PointwiseScores>(std::move(request), gateway, parse_pointwise, "pointwise judge");
}

std::string_view to_string(Winner winner) noexcept {
    switch (winner) {
        case Winner::A: return "a";
        case Winner::B: return "b";
        case Winner::Tie: return "tie";
    }
    return "tie";
}

std::string_view to_string(PresentationOrder order) noexcept { return order == PresentationOrder::AB ? "ab" : "ba"; }

std::optional<std::array<Winner, 3>> parse_pairwise(std::string_view reply) {
    static const std::regex pattern(
        R"(completeness\s*[:=]\s*(?:description\s+)?(a|b|tie)\b[^a-z]+conciseness\s*[:=]\s*(?:description\s+)?(a|b|tie)\b[^a-z]+readability\s*[:=]\s*(?:description\s+)?(a|b|tie)\b)",
        std::regex::icase);
    std::match_results<std::string_view::const_iterator> match;
    if (!std::regex_search(reply.begin(), reply.end(), match, pattern)) return std::nullopt;
    std::array<Winner, 3> verdicts{};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto token = to_lower(match[i + 1].str());
        verdicts[i] = token == "a" ? Winner::A : token == "b" ? Winner::B : Winner::Tie;
    }
    return verdicts;
}

std::string build_pairwise_prompt(std::string_view first, std::string_view second, const PromptTemplates& templates) {
    return render_template(templates.get("judge_pairwise"),
                           {{"description_a", std::string(first)}, {"description_b", std::string(second)}});
}

std::optional<WinRate> PairwiseReport::find(std::string_view method, Dimension dimension) const {
    for (const auto& rate : win_rates) {
        if (rate.method == method && rate.dimension == dimension) return rate;
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> sample_method_pairs(const std::vector<std::string>& methods,
                                                                     std::size_t count, std::uint64_t seed) {
    std::vector<std::string> sorted(methods);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::pair<std::string, std::string>> all;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) all.emplace_back(sorted[i], sorted[j]);
    }
    const auto take = std::min(count, all.size());
    SeededRng rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
        const auto pick = i + static_cast<std::size_t>(rng.below(all.size() - i));
        std::swap(all[i], all[pick]);
    }
    all.resize(take);
    return all;
}

std::vector<WinRate> win_rates(const std::vector<PairwiseOutcome>& outcomes) {
    std::map<std::pair<std::string, Dimension>, WinRate> table;
    auto slot = [&](const std::string& method, Dimension dimension) -> WinRate& {
        auto& rate = table[{method, dimension}];
        rate.method = method;
        rate.dimension = dimension;
        return rate;
    };
    for (const auto& outcome : outcomes) {
        auto& a = slot(outcome.method_a, outcome.dimension);
        auto& b = slot(outcome.method_b, outcome.dimension);
        ++a.comparisons;
        ++b.comparisons;
        switch (outcome.winner) {
            case Winner::A: a.victories += 1; break;
            case Winner::B: b.victories += 1; break;
            case Winner::Tie:
                a.victories += 0.5;
                b.victories += 0.5;
                break;
        }
    }
    std::vector<WinRate> rates;
    for (auto& [key, rate] : table) rates.push_back(rate);
    return rates;
}

PairwiseReport judge_pairwise(const MethodCorpus& corpus, const Gateway& gateway, const PairwiseOptions& options) {
    PairwiseReport report;
    report.judge = gateway.model_name();

    struct Job {
        std::string dataset_id;
        std::string method_a;
        std::string method_b;
        PresentationOrder order;
        std::size_t item;
    };
    std::vector<Job> jobs;
    for (const auto& [dataset_id, methods] : corpus) {
        std::vector<std::string> labels;
        for (const auto& [method, text] : methods) labels.push_back(method);
        if (labels.size() < 2) {
            report.errors.push_back(fmt::format("dataset '{}' has fewer than two methods; skipped", dataset_id));
            continue;
        }
        auto pairs = sample_method_pairs(labels, options.pairs_per_dataset, options.seed ^ stable_hash(dataset_id));
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            jobs.push_back({dataset_id, pairs[p].first, pairs[p].second, PresentationOrder::AB, 2 * p});
            jobs.push_back({dataset_id, pairs[p].first, pairs[p].second, PresentationOrder::BA, 2 * p + 1});
        }
        report.sampled_pairs[dataset_id] = std::move(pairs);
    }

    std::vector<std::optional<std::array<Winner, 3>>> verdicts(jobs.size());
    std::vector<std::string> failures(jobs.size());
    parallel_for(jobs.size(), options.workers, [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto& methods = corpus.at(job.dataset_id);
        const auto& text_a = methods.at(job.method_a);
        const auto& text_b = methods.at(job.method_b);
        CompletionRequest request;
        request.user_prompt = job.order == PresentationOrder::AB
                                  ? build_pairwise_prompt(text_a, text_b, options.templates)
                                  : build_pairwise_prompt(text_b, text_a, options.templates);
        request.temperature = 0.0;
        request.tag = Stage::JudgePairwise;
        request.dataset_id = job.dataset_id;
        request.item = job.item;
        try {
            verdicts[i] = ask_with_parse_retry<std::array<Winner, 3>>(std::move(request), gateway, parse_pairwise,
                                                                      "pairwise judge");
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& job = jobs[i];
        if (!verdicts[i]) {
            ++report.dropped_judgments;
            report.errors.push_back(fmt::format("{} {} vs {} ({}): {}", job.dataset_id, job.method_a, job.method_b,
                                                to_string(job.order), failures[i]));
            gateway.events().record({{"event", "judge_dropped"},
                                     {"dataset_id", job.dataset_id},
                                     {"method_a", job.method_a},
                                     {"method_b", job.method_b},
                                     {"order", to_string(job.order)}});
            continue;
        }
        for (std::size_t d = 0; d < kDimensions.size(); ++d) {
            auto winner = (*verdicts[i])[d];
            if (job.order == PresentationOrder::BA && winner != Winner::Tie) {
                winner = winner == Winner::A ? Winner::B : Winner::A;
            }
            report.outcomes.push_back({job.dataset_id, job.method_a, job.method_b, kDimensions[d], winner, job.order});
        }
    }
    report.win_rates = win_rates(report.outcomes);
    return report;
}

CrossEvaluationReport cross_evaluate(const MethodCorpus& corpus, const std::vector<JudgeHandle>& judges,
                                     const CrossEvaluationOptions& options) {
    CrossEvaluationReport report;
    if (judges.empty()) throw ConfigError("cross evaluation needs at least one judge");
    if (judges.size() == 1) {
        report.warnings.push_back(
            fmt::format("only one judge ('{}') configured; no cross-model evaluation", judges.front().label));
    }
    for (const auto& judge : judges) {
        report.judges.push_back(judge.label);
        if (!options.generator_model.empty() && judge.gateway->model_name() == options.generator_model) {
            report.warnings.push_back(
                fmt::format("judge '{}' uses the generator model '{}'", judge.label, options.generator_model));
        }
    }

    struct Item {
        std::string dataset_id;
        std::string method;
        std::size_t index;
    };
    std::vector<Item> items;
    for (const auto& [dataset_id, methods] : corpus) {
        std::size_t index = 0;
        for (const auto& [method, text] : methods) items.push_back({dataset_id, method, index++});
    }

    for (const auto& judge : judges) {
        if (options.pointwise) {
            std::vector<std::optional<PointwiseScores>> scores(items.size());
            std::vector<std::string> failures(items.size());
            parallel_for(items.size(), options.pairwise_options.workers, [&](std::size_t i) {
                JudgeOptions judge_options{options.pairwise_options.templates, items[i].dataset_id, items[i].index};
                try {
                    scores[i] = judge_pointwise(corpus.at(items[i].dataset_id).at(items[i].method), *judge.gateway,
                                                judge_options);
                } catch (const Error& e) {
                    failures[i] = e.what();
                }
            });
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (scores[i]) {
                    report.pointwise.push_back({items[i].dataset_id, items[i].method, judge.label, *scores[i]});
                } else {
                    report.errors.push_back(fmt::format("pointwise {} / {} / {}: {}", judge.label, items[i].dataset_id,
                                                        items[i].method, failures[i]));
                }
            }
        }
        if (options.pairwise) {
            auto pairwise = judge_pairwise(corpus, *judge.gateway, options.pairwise_options);
            pairwise.judge = judge.label;
            for (const auto& error : pairwise.errors) report.errors.push_back(judge.label + ": " + error);
            report.pairwise.push_back(std::move(pairwise));
        }
    }
    return report;
}

std::string pointwise_to_csv(const std::vector<PointwiseRecord>& records) {
    std::string out = "dataset_id,method,judge,completeness,conciseness,readability\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{},{}\n", csv::escape_field(r.dataset_id), csv::escape_field(r.method),
                           csv::escape_field(r.judge), r.scores.completeness, r.scores.conciseness,
                           r.scores.readability);
    }
    return out;
}

std::string win_rates_to_csv(const std::vector<PairwiseReport>& reports) {
    std::string out = "method,dimension,judge,win_rate\n";
    for (const auto& report : reports) {
        for (const auto& rate : report.win_rates) {
            out += fmt::format("{},{},{},{:.6f}\n", csv::escape_field(rate.method), to_string(rate.dimension),
                               csv::escape_field(report.judge), rate.rate());
        }
    }
    return out;
}

std::string render_cross_table(const CrossEvaluationReport& report) {
    std::set<std::string> methods;
    std::map<std::tuple<std::string, std::string, Dimension>, std::pair<double, std::size_t>> sums;
    for (const auto& record : report.pointwise) {
        methods.insert(record.method);
        for (auto dimension : kDimensions) {
            auto& [sum, count] = sums[{record.method, record.judge, dimension}];
            sum += record.scores[dimension];
            ++count;
        }
    }
    std::size_t width = 6;
    for (const auto& method : methods) width = std::max(width, method.size());
    std::string out = fmt::format("{:<{}}", "Method", width);
    for (auto dimension : kDimensions) {
        for (const auto& judge : report.judges) {
            out += fmt::format("  {:>14}", fmt::format("{}[{}]", to_string(dimension).substr(0, 6), judge));
        }
    }
    out += "\n";
    for (const auto& method : methods) {
        out += fmt::format("{:<{}}", method, width);
        for (auto dimension : kDimensions) {
            for (const auto& judge : report.judges) {
                auto it = sums.find({method, judge, dimension});
                if (it == sums.end() || it->second.second == 0) {
                    out += fmt::format("  {:>14}", "-");
                } else {
                    out += fmt::format("  {:>14.2f}", it->second.first / static_cast<double>(it->second.second));
                }
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace datadesc
