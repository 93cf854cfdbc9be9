#include "datadesc/quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "datadesc/retrieval.hpp"
#include "datadesc/stemmer.hpp"

namespace datadesc {

namespace {

using Tokens = std::vector<std::string>;

double f1(double overlap, double candidate_total, double reference_total) {
    if (overlap <= 0 || candidate_total <= 0 || reference_total <= 0) return 0.0;
    const double p = overlap / candidate_total;
    const double r = overlap / reference_total;
    return 2 * p * r / (p + r);
}

double rouge_n(const Tokens& candidate, const Tokens& reference, std::size_t n) {
    if (candidate.size() < n || reference.size() < n) return 0.0;
    auto grams = [n](const Tokens& tokens) {
        std::map<std::vector<std::string>, std::size_t> counts;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            ++counts[Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                            tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
        }
        return counts;
    };
    const auto cand = grams(candidate);
    const auto ref = grams(reference);
    std::size_t overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) overlap += std::min(count, it->second);
    }
    return f1(static_cast<double>(overlap), static_cast<double>(candidate.size() - n + 1),
              static_cast<double>(reference.size() - n + 1));
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (const auto& token : a) {
        std::size_t diagonal = 0;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t above = row[j];
            row[j] = token == b[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
            diagonal = above;
        }
    }
    return row[b.size()];
}

}  // namespace

RougeScores rouge(std::string_view candidate, std::string_view reference) {
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    RougeScores scores;
    if (cand.empty() || ref.empty()) return scores;
    scores.rouge_1_f = rouge_n(cand, ref, 1);
    scores.rouge_2_f = rouge_n(cand, ref, 2);
    scores.rouge_l_f = f1(static_cast<double>(lcs_length(cand, ref)), static_cast<double>(cand.size()),
                          static_cast<double>(ref.size()));
    return scores;
}

namespace {

// Matches candidate tokens to unmatched reference tokens with equal keys,
// preferring the reference position right after the previous match so
// contiguous runs stay in one chunk.
std::size_t align_stage(const Tokens& cand_keys, const Tokens& ref_keys, std::vector<std::optional<std::size_t>>& cand_to_ref,
                        std::vector<bool>& ref_used) {
    std::size_t added = 0;
    for (std::size_t i = 0; i < cand_keys.size(); ++i) {
        if (cand_to_ref[i]) continue;
        std::optional<std::size_t> preferred;
        if (i > 0 && cand_to_ref[i - 1]) {
            const auto next = *cand_to_ref[i - 1] + 1;
            if (next < ref_keys.size() && !ref_used[next] && ref_keys[next] == cand_keys[i]) preferred = next;
        }
        if (!preferred) {
            for (std::size_t j = 0; j < ref_keys.size(); ++j) {
                if (!ref_used[j] && ref_keys[j] == cand_keys[i]) {
                    preferred = j;
                    break;
                }
            }
        }
        if (preferred) {
            cand_to_ref[i] = preferred;
            ref_used[*preferred] = true;
            ++added;
        }
    }
    return added;
}

}  // namespace

MeteorAlignment meteor_alignment(std::string_view candidate, std::string_view reference) {
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    MeteorAlignment out;
    out.candidate_length = cand.size();
    out.reference_length = ref.size();
    if (cand.empty() || ref.empty()) return out;

    std::vector<std::optional<std::size_t>> cand_to_ref(cand.size());
    std::vector<bool> ref_used(ref.size(), false);
    out.exact_matches = align_stage(cand, ref, cand_to_ref, ref_used);

    Tokens cand_stems;
    Tokens ref_stems;
    for (const auto& t : cand) cand_stems.push_back(porter_stem(t));
    for (const auto& t : ref) ref_stems.push_back(porter_stem(t));
    out.stem_matches = align_stage(cand_stems, ref_stems, cand_to_ref, ref_used);

    out.matches = out.exact_matches + out.stem_matches;
    if (out.matches == 0) return out;

    bool in_chunk = false;
    std::size_t previous = 0;
    for (const auto& target : cand_to_ref) {
        if (!target) {
            in_chunk = false;
            continue;
        }
        if (!in_chunk || *target != previous + 1) ++out.chunks;
        in_chunk = true;
        previous = *target;
    }

    const auto m = static_cast<double>(out.matches);
    out.precision = m / static_cast<double>(cand.size());
    out.recall = m / static_cast<double>(ref.size());
    out.fmean = 10 * out.precision * out.recall / (out.recall + 9 * out.precision);
    out.penalty = 0.5 * std::pow(static_cast<double>(out.chunks) / m, 3);
    out.score = out.fmean * (1 - out.penalty);
    return out;
}

double meteor(std::string_view candidate, std::string_view reference) {
    return meteor_alignment(candidate, reference).score;
}

ReferenceScores reference_scores(std::string_view candidate, std::string_view reference) {
    const auto r = rouge(candidate, reference);
    return {meteor(candidate, reference), r.rouge_1_f, r.rouge_2_f, r.rouge_l_f};
}

}  // namespace datadesc
