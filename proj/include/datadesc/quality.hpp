#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace datadesc {

struct RougeScores {
    double rouge_1_f = 0;
    double rouge_2_f = 0;
    double rouge_l_f = 0;
};

/// F1 over the retrieval tokenizer's output. N-gram overlaps are clipped;
/// ROUGE-L uses the longest common subsequence. An empty side scores 0.
RougeScores rouge(std::string_view candidate, std::string_view reference);

struct MeteorAlignment {
    std::size_t matches = 0;
    std::size_t exact_matches = 0;
    std::size_t stem_matches = 0;
    std::size_t chunks = 0;
    std::size_t candidate_length = 0;
    std::size_t reference_length = 0;
    double precision = 0;
    double recall = 0;
    double fmean = 0;
    double penalty = 0;
    double score = 0;
};

/// Exact then Porter-stem unigram alignment, no synonym stage.
/// fmean = 10PR / (R + 9P), penalty = 0.5 (chunks / m)^3.
MeteorAlignment meteor_alignment(std::string_view candidate, std::string_view reference);
double meteor(std::string_view candidate, std::string_view reference);

struct ReferenceScores {
    double meteor = 0;
    double rouge_1_f = 0;
    double rouge_2_f = 0;
    double rouge_l_f = 0;
};

ReferenceScores reference_scores(std::string_view candidate, std::string_view reference);

}  // namespace datadesc
