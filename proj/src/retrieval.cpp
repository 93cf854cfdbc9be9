#include "datadesc/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "datadesc/csv.hpp"
#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto byte = static_cast<unsigned char>(ch);
        if (std::isalnum(byte)) {
            current.push_back(static_cast<char>(std::tolower(byte)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::size_t Bm25Index::document_frequency(std::string_view term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

double Bm25Index::raw_idf(std::string_view term) const {
    const auto n = static_cast<double>(document_frequency(term));
    const auto total = static_cast<double>(doc_count());
    return std::log((total - n + 0.5) / (n + 0.5));
}

double Bm25Index::idf(std::string_view term) const {
    auto it = idf_.find(term);
    return it == idf_.end() ? 0.0 : it->second;
}

Bm25Index Bm25Index::from_parts(Postings postings, DocLengths doc_lengths, const Bm25Params& params) {
    if (doc_lengths.empty()) throw EmptyCorpusError("cannot build an index over an empty corpus");
    Bm25Index index;
    index.params_ = params;
    index.postings_ = std::move(postings);
    index.doc_lengths_ = std::move(doc_lengths);
    std::size_t total_length = 0;
    for (const auto& [doc_id, length] : index.doc_lengths_) total_length += length;
    index.avgdl_ = static_cast<double>(total_length) / static_cast<double>(index.doc_lengths_.size());

    double positive_sum = 0;
    std::size_t positive_count = 0;
    std::vector<std::string_view> negative;
    for (const auto& [term, term_postings] : index.postings_) {
        for (const auto& posting : term_postings) {
            if (posting.term_frequency == 0 || !index.doc_lengths_.contains(posting.doc_id)) {
                throw ValidationError(fmt::format("invalid posting for term '{}'", term));
            }
        }
        const double value = index.raw_idf(term);
        index.idf_[term] = value;
        if (value > 0) {
            positive_sum += value;
            ++positive_count;
        } else if (value < 0) {
            negative.push_back(term);
        }
    }
    const double floor = positive_count ? params.epsilon * positive_sum / static_cast<double>(positive_count) : 0.0;
    for (auto term : negative) index.idf_.find(term)->second = floor;
    return index;
}

Bm25Index build_index(const std::map<std::string, std::string>& docs, const Bm25Params& params) {
    if (docs.empty()) throw EmptyCorpusError("cannot build an index over an empty corpus");
    Bm25Index::Postings postings;
    Bm25Index::DocLengths lengths;
    for (const auto& [doc_id, text] : docs) {
        const auto tokens = tokenize(text);
        lengths[doc_id] = tokens.size();
        std::map<std::string, std::size_t> counts;
        for (const auto& token : tokens) ++counts[token];
        for (auto& [term, tf] : counts) postings[term].push_back({doc_id, tf});
    }
    return Bm25Index::from_parts(std::move(postings), std::move(lengths), params);
}

nlohmann::json index_to_json(const Bm25Index& index) {
    nlohmann::json postings = nlohmann::json::object();
    for (const auto& [term, list] : index.postings()) {
        auto& out = postings[term];
        for (const auto& p : list) out.push_back({p.doc_id, p.term_frequency});
    }
    nlohmann::json lengths = nlohmann::json::object();
    for (const auto& [doc_id, length] : index.doc_lengths()) lengths[doc_id] = length;
    return {{"params", {{"k1", index.params().k1}, {"b", index.params().b}, {"epsilon", index.params().epsilon}}},
            {"doc_count", index.doc_count()},
            {"average_doc_length", index.average_doc_length()},
            {"doc_lengths", lengths},
            {"postings", postings}};
}

Bm25Index index_from_json(const nlohmann::json& j) {
    try {
        Bm25Params params;
        params.k1 = j.at("params").at("k1").get<double>();
        params.b = j.at("params").at("b").get<double>();
        params.epsilon = j.at("params").at("epsilon").get<double>();
        Bm25Index::DocLengths lengths;
        for (const auto& [doc_id, length] : j.at("doc_lengths").items()) lengths[doc_id] = length.get<std::size_t>();
        Bm25Index::Postings postings;
        for (const auto& [term, list] : j.at("postings").items()) {
            auto& out = postings[term];
            for (const auto& p : list) out.push_back({p.at(0).get<std::string>(), p.at(1).get<std::size_t>()});
        }
        return Bm25Index::from_parts(std::move(postings), std::move(lengths), params);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedInputError(std::string("index file: ") + e.what());
    }
}

RankedList score(std::string_view query, const Bm25Index& index, std::string query_id, const ScoreOptions& options) {
    const auto& params = index.params();
    const double avgdl = index.average_doc_length();
    std::map<std::string_view, double> scores;
    for (const auto& term : tokenize(query)) {
        auto it = index.postings().find(term);
        if (it == index.postings().end()) continue;
        const double idf = index.idf(term);
        for (const auto& posting : it->second) {
            const auto tf = static_cast<double>(posting.term_frequency);
            const auto length = static_cast<double>(index.doc_lengths().at(posting.doc_id));
            const double ratio = avgdl > 0 ? length / avgdl : 0.0;
            scores[posting.doc_id] += idf * tf * (params.k1 + 1) / (tf + params.k1 * (1 - params.b + params.b * ratio));
        }
    }

    RankedList result;
    result.query_id = std::move(query_id);
    std::vector<RankedEntry> zero;
    for (const auto& [doc_id, length] : index.doc_lengths()) {
        auto it = scores.find(doc_id);
        const double value = it == scores.end() ? 0.0 : it->second;
        if (value != 0.0) {
            result.ranking.push_back({doc_id, value});
        } else if (zero.size() < options.max_zero_score_docs) {
            zero.push_back({doc_id, 0.0});
        }
    }
    // Doc ids arrive sorted, so a stable sort on score keeps the id tie rule.
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [](const RankedEntry& a, const RankedEntry& b) { return a.score > b.score; });
    // Negative scores can only arise from a negative epsilon; keep them after zeros.
    auto first_negative = std::find_if(result.ranking.begin(), result.ranking.end(),
                                       [](const RankedEntry& e) { return e.score < 0; });
    result.ranking.insert(first_negative, zero.begin(), zero.end());
    return result;
}

namespace {

double gain_of(int grade, Gain gain) {
    if (grade <= 0) return 0.0;
    return gain == Gain::Exponential ? std::exp2(static_cast<double>(grade)) - 1.0 : static_cast<double>(grade);
}

}  // namespace

double ndcg_at_k(const RankedList& ranking, const Judgments& judgments, std::size_t k, Gain gain) {
    if (k == 0) throw ContractViolation("ndcg_at_k requires k >= 1");
    std::vector<int> ideal;
    for (const auto& [doc_id, grade] : judgments) {
        if (grade > 0) ideal.push_back(grade);
    }
    if (ideal.empty()) return 0.0;
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    double dcg = 0;
    for (std::size_t i = 0; i < std::min(k, ranking.ranking.size()); ++i) {
        auto it = judgments.find(ranking.ranking[i].dataset_id);
        if (it != judgments.end()) dcg += gain_of(it->second, gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    double idcg = 0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
        idcg += gain_of(ideal[i], gain) / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg / idcg;
}

namespace {

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> rows;
    for (auto line : split(read_file(path), '\n')) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split(line, '\t'));
    }
    return rows;
}

int parse_grade(const std::string& text, const std::filesystem::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
    throw MalformedInputError(fmt::format("{}:{}: grade '{}' is not an integer", path.string(), line, text));
}

}  // namespace

std::vector<Query> read_queries(const std::filesystem::path& path) {
    std::vector<Query> queries;
    std::size_t line = 0;
    for (auto& row : read_tsv(path)) {
        ++line;
        if (line == 1 && row[0] == "query_id") continue;
        if (row.size() < 2) {
            throw MalformedInputError(fmt::format("{}:{}: expected query_id<TAB>query_text", path.string(), line));
        }
        // Tabs inside the query text survive as spaces.
        std::vector<std::string> rest(row.begin() + 1, row.end());
        queries.push_back({trim(row[0]), trim(join(rest, " "))});
    }
    return queries;
}

std::map<std::string, Judgments, std::less<>> read_qrels(const std::filesystem::path& path) {
    std::map<std::string, Judgments, std::less<>> qrels;
    std::size_t line = 0;
    for (auto& row : read_tsv(path)) {
        ++line;
        if (line == 1 && row[0] == "query_id") continue;
        if (row.size() != 3) {
            throw MalformedInputError(
                fmt::format("{}:{}: expected query_id<TAB>dataset_id<TAB>grade", path.string(), line));
        }
        qrels[trim(row[0])][trim(row[1])] = parse_grade(trim(row[2]), path, line);
    }
    return qrels;
}

BenchmarkBundle load_benchmark(const std::filesystem::path& dir) {
    BenchmarkBundle bundle;
    bundle.directory = dir;
    for (auto name : {"queries.tsv", "qrels.tsv", "manifest.jsonl"}) {
        if (!std::filesystem::exists(dir / name)) {
            throw IoError(fmt::format("benchmark directory {} lacks {}", dir.string(), name));
        }
    }
    bundle.queries = read_queries(dir / "queries.tsv");
    bundle.qrels = read_qrels(dir / "qrels.tsv");
    bundle.manifest = read_manifest(dir / "manifest.jsonl");
    for (const auto& entry : bundle.manifest) bundle.corpus_ids.insert(entry.dataset_id);

    std::set<std::string, std::less<>> query_ids;
    for (const auto& query : bundle.queries) {
        if (!query_ids.insert(query.query_id).second) {
            throw ValidationError(fmt::format("duplicate query id '{}'", query.query_id));
        }
    }
    std::vector<std::string> offenders;
    for (const auto& [query_id, judgments] : bundle.qrels) {
        if (!query_ids.contains(query_id)) offenders.push_back(fmt::format("unknown query '{}'", query_id));
        for (const auto& [dataset_id, grade] : judgments) {
            if (!bundle.corpus_ids.contains(dataset_id)) {
                offenders.push_back(fmt::format("{} -> unknown dataset '{}'", query_id, dataset_id));
            }
            if (grade < 0) offenders.push_back(fmt::format("{} -> {} has negative grade {}", query_id, dataset_id, grade));
        }
    }
    if (!offenders.empty()) {
        throw ValidationError(fmt::format("invalid qrels in {}: {}", dir.string(), join(offenders, "; ")));
    }
    return bundle;
}

namespace {

MinAvgMax summarize(const std::vector<double>& values) {
    MinAvgMax out;
    if (values.empty()) return out;
    out.min = *std::min_element(values.begin(), values.end());
    out.max = *std::max_element(values.begin(), values.end());
    out.avg = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return out;
}

}  // namespace

BenchmarkStats benchmark_stats(const BenchmarkBundle& bundle, bool with_table_shapes) {
    BenchmarkStats stats;
    stats.query_count = bundle.queries.size();
    stats.table_count = bundle.corpus_ids.size();
    std::vector<double> relevant;
    std::vector<double> judged;
    for (const auto& query : bundle.queries) {
        auto it = bundle.qrels.find(query.query_id);
        double positives = 0;
        double total = 0;
        if (it != bundle.qrels.end()) {
            total = static_cast<double>(it->second.size());
            for (const auto& [dataset_id, grade] : it->second) positives += grade > 0 ? 1 : 0;
        }
        relevant.push_back(positives);
        judged.push_back(total);
    }
    stats.relevant_tables_per_query = summarize(relevant);
    stats.judged_tables_per_query = summarize(judged);
    if (with_table_shapes) {
        std::vector<double> rows;
        std::vector<double> columns;
        for (const auto& entry : bundle.manifest) {
            const auto table = ingest_entry(entry);
            rows.push_back(static_cast<double>(table.row_count()));
            columns.push_back(static_cast<double>(table.column_count()));
        }
        stats.rows_per_table = summarize(rows);
        stats.columns_per_table = summarize(columns);
    }
    return stats;
}

std::string render_benchmark_stats(const std::string& name, const BenchmarkStats& stats) {
    auto triple = [](const MinAvgMax& v) { return fmt::format("{:.2f}/{:g}/{:g}", v.avg, v.min, v.max); };
    std::string out = fmt::format("{:<16} {:>8} {:>22} {:>22} {:>11}", "Benchmark", "#Queries",
                                  "Rel.Tabs/Query avg/min/max", "Tabs/Query avg/min/max", "Tabs/Bench");
    if (stats.rows_per_table) out += fmt::format(" {:>26} {:>22}", "Rows/Tab avg/min/max", "Cols/Tab avg/min/max");
    out += "\n";
    out += fmt::format("{:<16} {:>8} {:>26} {:>22} {:>11}", name, stats.query_count,
                       triple(stats.relevant_tables_per_query), triple(stats.judged_tables_per_query),
                       stats.table_count);
    if (stats.rows_per_table) {
        out += fmt::format(" {:>26} {:>22}", triple(*stats.rows_per_table), triple(*stats.columns_per_table));
    }
    out += "\n";
    return out;
}

EvaluationResult evaluate(const BenchmarkBundle& bundle, const std::map<std::string, std::string>& descriptions,
                          const std::string& method, const EvaluationOptions& options) {
    EvaluationResult result;
    result.method = method;
    result.ks = options.ks;
    if (options.ks.empty()) throw ContractViolation("evaluate requires at least one k");

    std::map<std::string, std::string> docs;
    for (const auto& entry : bundle.manifest) {
        auto it = descriptions.find(entry.dataset_id);
        std::string text;
        if (it == descriptions.end()) {
            result.warnings.push_back(fmt::format("no description for '{}'; indexed as empty text", entry.dataset_id));
        } else {
            text = it->second;
        }
        if (options.prepend_title && !entry.title.empty()) text = entry.title + "\n" + text;
        docs[entry.dataset_id] = std::move(text);
    }
    const auto index = build_index(docs, options.bm25);

    static const Judgments kNoJudgments;
    result.per_query.assign(bundle.queries.size(), std::vector<double>(options.ks.size(), 0.0));
    parallel_for(bundle.queries.size(), options.workers, [&](std::size_t q) {
        const auto& query = bundle.queries[q];
        const auto ranked = score(query.text, index, query.query_id);
        auto it = bundle.qrels.find(query.query_id);
        const auto& judgments = it == bundle.qrels.end() ? kNoJudgments : it->second;
        for (std::size_t i = 0; i < options.ks.size(); ++i) {
            result.per_query[q][i] = ndcg_at_k(ranked, judgments, options.ks[i], options.gain);
        }
    });

    result.mean_ndcg.assign(options.ks.size(), 0.0);
    for (std::size_t i = 0; i < options.ks.size(); ++i) {
        double sum = 0;
        for (const auto& row : result.per_query) sum += row[i];
        result.mean_ndcg[i] = result.per_query.empty() ? 0.0 : sum / static_cast<double>(result.per_query.size());
    }
    return result;
}

std::string evaluation_to_csv(const std::vector<EvaluationResult>& results, bool with_header) {
    std::string out = with_header ? "method,k,mean_ndcg\n" : "";
    for (const auto& result : results) {
        for (std::size_t i = 0; i < result.ks.size(); ++i) {
            out += fmt::format("{},{},{:.6f}\n", csv::escape_field(result.method), result.ks[i], result.mean_ndcg[i]);
        }
    }
    return out;
}

std::string render_evaluation_table(const std::vector<EvaluationResult>& results) {
    std::size_t width = 6;
    for (const auto& result : results) width = std::max(width, result.method.size());
    std::string out = fmt::format("{:<{}}", "Method", width);
    if (!results.empty()) {
        for (auto k : results.front().ks) out += fmt::format("  {:>8}", fmt::format("NDCG@{}", k));
    }
    out += "\n";
    for (const auto& result : results) {
        out += fmt::format("{:<{}}", result.method, width);
        for (double value : result.mean_ndcg) out += fmt::format("  {:>8.3f}", value);
        out += "\n";
    }
    return out;
}

}  // namespace datadesc
