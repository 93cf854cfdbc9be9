#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "datadesc/content_profile.hpp"
#include "datadesc/error.hpp"
#include "datadesc/llm.hpp"
#include "datadesc/quality.hpp"
#include "datadesc/retrieval.hpp"
#include "datadesc/semantic_profile.hpp"
#include "datadesc/stemmer.hpp"

namespace py = pybind11;
using namespace datadesc;

namespace {

ContentProfile profile_file(const std::filesystem::path& path, std::size_t workers) {
    return profile_table(ingest_csv(path, path.stem().string(), path.stem().string()), workers);
}

std::vector<std::pair<std::string, double>> ranking_pairs(const RankedList& list) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(list.ranking.size());
    for (const auto& e : list.ranking) out.emplace_back(e.dataset_id, e.score);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dataset description toolkit: profiling, retrieval and quality metrics.";

    m.def("profile_json", [](const std::filesystem::path& path, std::size_t workers) {
        return nlohmann::json(profile_file(path, workers)).dump();
    }, py::arg("path"), py::arg("workers") = 1, "Content profile of a CSV file as a JSON string.");
    m.def("content_summary", [](const std::filesystem::path& path, std::size_t workers) {
        return render_content_summary(profile_file(path, workers));
    }, py::arg("path"), py::arg("workers") = 1);

    m.def("serialize_column_profile", [](const std::string& column, const std::string& profile_json) {
        return serialize_column_profile(semantic_profile_from_json(column, nlohmann::json::parse(profile_json)));
    }, py::arg("column"), py::arg("profile_json"));
    m.def("normalize_topic", &normalize_topic);
    m.def("count_tokens", &count_tokens);

    m.def("tokenize", &tokenize);
    py::class_<Bm25Index>(m, "Bm25Index")
        .def(py::init([](const std::map<std::string, std::string>& docs, double k1, double b, double epsilon) {
                 return build_index(docs, {k1, b, epsilon});
             }),
             py::arg("docs"), py::arg("k1") = 1.5, py::arg("b") = 0.75, py::arg("epsilon") = 0.25)
        .def("idf", [](const Bm25Index& index, const std::string& term) { return index.idf(term); })
        .def_property_readonly("doc_count", &Bm25Index::doc_count)
        .def_property_readonly("average_doc_length", &Bm25Index::average_doc_length)
        .def("score", [](const Bm25Index& index, const std::string& query) { return ranking_pairs(score(query, index)); });

    m.def("ndcg_at_k", [](const std::vector<std::string>& ranking, const std::map<std::string, int>& grades,
                          std::size_t k, bool linear) {
        RankedList list;
        for (const auto& id : ranking) list.ranking.push_back({id, 0});
        Judgments judgments(grades.begin(), grades.end());
        return ndcg_at_k(list, judgments, k, linear ? Gain::Linear : Gain::Exponential);
    }, py::arg("ranking"), py::arg("grades"), py::arg("k"), py::arg("linear") = false);

    m.def("rouge", [](const std::string& candidate, const std::string& reference) {
        const auto r = rouge(candidate, reference);
        return std::map<std::string, double>{{"rouge_1", r.rouge_1_f}, {"rouge_2", r.rouge_2_f}, {"rouge_l", r.rouge_l_f}};
    });
    m.def("meteor", [](const std::string& candidate, const std::string& reference) { return meteor(candidate, reference); });
    m.def("porter_stem", [](const std::string& word) { return porter_stem(word); });

    py::register_exception<Error>(m, "DatadescError");
}
