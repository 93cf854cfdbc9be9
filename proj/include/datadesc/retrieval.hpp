#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "datadesc/dataset.hpp"

namespace datadesc {

/// Lowercases and splits on every non-alphanumeric byte. No stemming, no
/// stopwords; shared by indexing and querying.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
    /// Negative IDFs are replaced by epsilon times the mean positive IDF.
    double epsilon = 0.25;
};

struct Posting {
    std::string doc_id;
    std::size_t term_frequency = 0;
};

class Bm25Index {
public:
    using Postings = std::map<std::string, std::vector<Posting>, std::less<>>;
    using DocLengths = std::map<std::string, std::size_t, std::less<>>;

    /// Derives avgdl and the floored IDFs from raw statistics.
    static Bm25Index from_parts(Postings postings, DocLengths doc_lengths, const Bm25Params& params);

    const Postings& postings() const { return postings_; }
    const DocLengths& doc_lengths() const { return doc_lengths_; }
    std::size_t doc_count() const { return doc_lengths_.size(); }
    double average_doc_length() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }

    std::size_t document_frequency(std::string_view term) const;
    /// Floored IDF; 0 for terms outside the vocabulary.
    double idf(std::string_view term) const;
    /// IDF before the epsilon floor.
    double raw_idf(std::string_view term) const;

private:
    Postings postings_;
    DocLengths doc_lengths_;
    std::map<std::string, double, std::less<>> idf_;
    double avgdl_ = 0;
    Bm25Params params_;
};

/// Throws EmptyCorpusError when `docs` is empty.
Bm25Index build_index(const std::map<std::string, std::string>& docs, const Bm25Params& params = {});

nlohmann::json index_to_json(const Bm25Index& index);
Bm25Index index_from_json(const nlohmann::json& j);

struct RankedEntry {
    std::string dataset_id;
    double score = 0;
};

struct RankedList {
    std::string query_id;
    std::vector<RankedEntry> ranking;
};

struct ScoreOptions {
    /// Cap on zero-score documents appended after the scored ones.
    std::size_t max_zero_score_docs = std::numeric_limits<std::size_t>::max();
};

/// Scores every document; ties broken by dataset_id ascending.
RankedList score(std::string_view query, const Bm25Index& index, std::string query_id = {},
                 const ScoreOptions& options = {});

enum class Gain { Exponential, Linear };

using Judgments = std::map<std::string, int, std::less<>>;

/// Unjudged documents count as grade 0; a query without any positive grade
/// scores 0. Throws ContractViolation when k == 0.
double ndcg_at_k(const RankedList& ranking, const Judgments& judgments, std::size_t k,
                 Gain gain = Gain::Exponential);

struct Query {
    std::string query_id;
    std::string text;
};

struct MinAvgMax {
    double min = 0;
    double avg = 0;
    double max = 0;
};

struct BenchmarkStats {
    std::size_t query_count = 0;
    MinAvgMax relevant_tables_per_query;
    MinAvgMax judged_tables_per_query;
    std::size_t table_count = 0;
    std::optional<MinAvgMax> rows_per_table;
    std::optional<MinAvgMax> columns_per_table;
};

struct BenchmarkBundle {
    std::vector<Query> queries;
    std::map<std::string, Judgments, std::less<>> qrels;
    std::set<std::string, std::less<>> corpus_ids;
    std::vector<ManifestEntry> manifest;
    std::filesystem::path directory;
};

std::vector<Query> read_queries(const std::filesystem::path& path);
std::map<std::string, Judgments, std::less<>> read_qrels(const std::filesystem::path& path);

/// Reads queries.tsv, qrels.tsv and manifest.jsonl from `dir`. Throws
/// ValidationError listing every dangling or negative judgment.
BenchmarkBundle load_benchmark(const std::filesystem::path& dir);

/// Table shapes are read from the corpus CSVs only when asked.
BenchmarkStats benchmark_stats(const BenchmarkBundle& bundle, bool with_table_shapes = false);
std::string render_benchmark_stats(const std::string& name, const BenchmarkStats& stats);

struct EvaluationOptions {
    std::vector<std::size_t> ks{5, 10, 15, 20};
    Bm25Params bm25;
    Gain gain = Gain::Exponential;
    bool prepend_title = false;
    std::size_t workers = 1;
};

struct EvaluationResult {
    std::string method;
    std::vector<std::size_t> ks;
    std::vector<double> mean_ndcg;
    /// per_query[q][i] is NDCG at ks[i] for bundle.queries[q].
    std::vector<std::vector<double>> per_query;
    std::vector<std::string> warnings;
};

/// Corpus datasets without a description are indexed as empty text.
EvaluationResult evaluate(const BenchmarkBundle& bundle, const std::map<std::string, std::string>& descriptions,
                          const std::string& method, const EvaluationOptions& options = {});

/// Rows "method,k,mean_ndcg"; the header is included when asked.
std::string evaluation_to_csv(const std::vector<EvaluationResult>& results, bool with_header = true);
std::string render_evaluation_table(const std::vector<EvaluationResult>& results);

}  // namespace datadesc
