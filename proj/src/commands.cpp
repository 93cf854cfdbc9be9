#include "datadesc/commands.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "datadesc/content_profile.hpp"
#include "datadesc/csv.hpp"
#include "datadesc/error.hpp"
#include "datadesc/judges.hpp"
#include "datadesc/quality.hpp"
#include "datadesc/retrieval.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

namespace fs = std::filesystem;

RunConfig resolve_run_config(const CommonOverrides& o) {
    RunConfig config = o.config ? load_run_config(*o.config) : RunConfig{};
    if (o.exec) config.exec.mode = exec_mode_from_string(*o.exec);
    if (o.workers) config.exec.workers = *o.workers;
    if (o.batch_size) config.exec.batch_size = *o.batch_size;
    if (o.no_sp) config.sp = false;
    if (o.no_sfd) config.sfd = false;
    if (o.sample_size) config.sample_size = *o.sample_size;
    if (o.seed) config.seed = *o.seed;
    if (o.ks) config.ks = *o.ks;
    if (o.jobs) config.jobs = *o.jobs;
    if (o.output_dir) config.output_dir = *o.output_dir;
    if (o.manifest) config.corpus_manifest = *o.manifest;
    if (o.benchmark_dir) config.benchmark_dir = *o.benchmark_dir;
    validate(config);
    return config;
}

ModeSelection mode_selection_from_string(std::string_view name) {
    const auto lower = to_lower(name);
    if (lower == "auto") return ModeSelection::Auto;
    if (lower == "ufd") return ModeSelection::UFD;
    if (lower == "sfd") return ModeSelection::SFD;
    if (lower == "all") return ModeSelection::All;
    throw ConfigError(fmt::format("mode must be auto, UFD, SFD or all, got '{}'", name));
}

namespace {

PromptTemplates templates_for(const RunConfig& config) {
    return config.templates_dir ? PromptTemplates::from_directory(*config.templates_dir) : PromptTemplates::builtin();
}

std::string jsonl(const std::vector<nlohmann::json>& lines) {
    std::string out;
    for (const auto& line : lines) out += line.dump() + "\n";
    return out;
}

// Maps library exceptions onto exit codes. Anything else is a bug and
// propagates.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
    } catch (const MalformedInputError& e) {
        err << "malformed input: " << e.what() << "\n";
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
    } catch (const EmptyCorpusError& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitFatal;
}

}  // namespace

int cmd_profile(const ProfileArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto table = ingest_csv(args.csv, args.csv.stem().string(), args.title.empty() ? args.csv.stem().string() : args.title);
        for (const auto& warning : table.ingest_warnings) err << "warning: " << warning << "\n";
        const auto profile = profile_table(table, args.workers);
        const std::string text = args.json ? nlohmann::json(profile).dump(2) + "\n" : render_content_summary(profile);
        if (args.output) {
            write_file_atomic(*args.output, text);
        } else {
            out << text;
        }
        return kExitOk;
    });
}

DescribeRun run_describe(const RunConfig& config, const Gateway& gateway, std::ostream& err,
                         std::shared_ptr<const SemanticPromptBuilder> semantic_prompts) {
    if (!config.corpus_manifest) throw ConfigError("describe needs a corpus manifest (paths.corpus_manifest or --manifest)");
    const auto entries = read_manifest(*config.corpus_manifest);
    if (entries.empty()) throw ValidationError("corpus manifest is empty");

    PipelineOptions options;
    options.flags.sp = config.sp;
    options.flags.sfd = config.sfd;
    options.flags.exec = config.exec;
    options.sample_size = config.sample_size;
    options.value_sample_size = config.value_sample_size;
    options.seed = config.seed;
    options.json_retries = config.json_retries;
    options.templates = templates_for(config);
    options.semantic_prompts = std::move(semantic_prompts);

    DescriptionConfig description_config{config.sp, config.sfd, config.exec.mode, gateway.model_name()};
    DescribeRun run;
    run.run_dir = config.output_dir / config_key(description_config, options);
    options.artifacts_dir = run.run_dir;

    std::vector<std::optional<PipelineResult>> results(entries.size());
    std::vector<std::string> failures(entries.size());
    parallel_for(entries.size(), config.jobs, [&](std::size_t i) {
        try {
            const auto table = ingest_entry(entries[i]);
            results[i] = run_pipeline(table, gateway, options);
        } catch (const Error& e) {
            failures[i] = e.what();
            gateway.events().record(
                {{"event", "dataset_failed"}, {"dataset_id", entries[i].dataset_id}, {"cause", e.what()}});
        }
    });

    std::vector<nlohmann::json> description_lines;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& id = entries[i].dataset_id;
        if (!results[i]) {
            run.errors.push_back({{"dataset_id", id}, {"stage", "ingest"}, {"message", failures[i]}});
            continue;
        }
        for (const auto& warning : results[i]->warnings) err << "warning: " << id << ": " << warning << "\n";
        for (const auto& error : results[i]->errors) {
            run.errors.push_back({{"dataset_id", id}, {"stage", "generate"}, {"message", error}});
        }
        for (const auto& record : results[i]->records) {
            description_lines.push_back(description_record_to_jsonl(record));
            run.records.push_back(record);
        }
    }

    auto config_json = run_config_to_json(config);
    config_json["config_key"] = run.run_dir.filename().string();
    config_json["model"] = gateway.model_name();
    write_file_atomic(run.run_dir / "config.json", config_json.dump(2) + "\n");
    write_file_atomic(run.run_dir / "descriptions.jsonl", jsonl(description_lines));
    write_file_atomic(run.run_dir / "errors.jsonl", jsonl(run.errors));
    write_file_atomic(run.run_dir / "events.jsonl", gateway.events().to_jsonl());

    if (run.records.empty() || !run.errors.empty()) run.exit_code = kExitPartial;
    return run;
}

int cmd_describe(const DescribeArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto config = resolve_run_config(args.common);
        const auto gateway = make_gateway(config.provider);
        const auto run = run_describe(config, gateway, err);
        for (const auto& error : run.errors) err << "error: " << error.dump() << "\n";
        out << fmt::format("run directory: {}\nrecords: {}\nerrors: {}\n", run.run_dir.string(), run.records.size(),
                           run.errors.size());
        return run.exit_code;
    });
}

std::vector<DescriptionLine> read_descriptions(const fs::path& path) {
    std::vector<DescriptionLine> lines;
    std::size_t number = 0;
    for (auto raw : split(read_file(path), '\n')) {
        ++number;
        if (trim(raw).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(raw);
            DescriptionLine line;
            line.dataset_id = j.at("dataset_id").get<std::string>();
            line.mode = description_mode_from_string(j.at("mode").get<std::string>());
            line.text = j.at("text").get<std::string>();
            line.tokens_in = j.value("tokens_in", std::size_t{0});
            line.tokens_out = j.value("tokens_out", std::size_t{0});
            line.config = j.value("config", nlohmann::json::object());
            lines.push_back(std::move(line));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedInputError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
        } catch (const ConfigError& e) {
            throw MalformedInputError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
        }
    }
    return lines;
}

std::map<std::string, std::string> select_descriptions(const std::vector<DescriptionLine>& lines, ModeSelection mode) {
    std::map<std::string, std::string> selected;
    for (const auto& line : lines) {
        const bool wanted = mode == ModeSelection::Auto || mode == ModeSelection::All ||
                            (mode == ModeSelection::UFD && line.mode == DescriptionMode::UFD) ||
                            (mode == ModeSelection::SFD && line.mode == DescriptionMode::SFD);
        if (!wanted) continue;
        if (mode == ModeSelection::Auto && line.mode == DescriptionMode::UFD && selected.contains(line.dataset_id)) {
            continue;
        }
        selected[line.dataset_id] = line.text;
    }
    return selected;
}

int cmd_index(const IndexArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto config = resolve_run_config(args.common);
        const auto docs = select_descriptions(read_descriptions(args.descriptions), args.mode);
        const auto index = build_index(docs, config.bm25);
        write_file_atomic(args.output, index_to_json(index).dump() + "\n");
        out << fmt::format("indexed {} documents, {} terms, avgdl {:.3f} -> {}\n", index.doc_count(),
                           index.postings().size(), index.average_doc_length(), args.output.string());
        return kExitOk;
    });
}

int cmd_search(const SearchArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        nlohmann::json document;
        try {
            document = nlohmann::json::parse(read_file(args.index));
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedInputError(fmt::format("{}: {}", args.index.string(), e.what()));
        }
        const auto index = index_from_json(document);
        const auto ranked = score(args.query, index);
        for (std::size_t i = 0; i < std::min(args.top, ranked.ranking.size()); ++i) {
            out << fmt::format("{}\t{}\t{:.6f}\n", i + 1, ranked.ranking[i].dataset_id, ranked.ranking[i].score);
        }
        return kExitOk;
    });
}

namespace {

// Replaces the rows of `method` in an existing results file, keeping the rest.
std::string merge_results(const fs::path& path, const EvaluationResult& result) {
    std::string merged = "method,k,mean_ndcg\n";
    if (fs::exists(path)) {
        auto rows = csv::parse(read_file(path));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!rows[i].empty() && rows[i][0] != result.method) merged += csv::format_record(rows[i]) + "\n";
        }
    }
    return merged + evaluation_to_csv({result}, false);
}

}  // namespace

int cmd_eval_retrieval(const EvalRetrievalArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto config = resolve_run_config(args.common);
        if (!config.benchmark_dir) throw ConfigError("eval-retrieval needs a benchmark directory");
        if (args.original == args.descriptions.has_value()) {
            throw ConfigError("give exactly one of --descriptions or --original");
        }
        const auto bundle = load_benchmark(*config.benchmark_dir);

        std::map<std::string, std::string> docs;
        std::string label;
        if (args.original) {
            for (const auto& entry : bundle.manifest) docs[entry.dataset_id] = entry.description.value_or("");
            label = args.method_label.value_or("Original");
        } else {
            docs = select_descriptions(read_descriptions(*args.descriptions), args.mode);
            label = args.method_label.value_or(args.descriptions->stem().string());
        }

        EvaluationOptions options;
        options.ks = config.ks;
        options.bm25 = config.bm25;
        options.gain = args.linear_gain ? Gain::Linear : config.gain;
        options.prepend_title = args.prepend_title || config.prepend_title;
        options.workers = config.jobs;
        const auto result = evaluate(bundle, docs, label, options);
        for (const auto& warning : result.warnings) err << "warning: " << warning << "\n";

        const auto path = args.results.value_or(config.output_dir / "retrieval_results.csv");
        write_file_atomic(path, merge_results(path, result));
        out << render_evaluation_table({result});
        return kExitOk;
    });
}

namespace {

std::map<std::string, std::string> original_descriptions(const RunConfig& config) {
    fs::path manifest;
    if (config.corpus_manifest) {
        manifest = *config.corpus_manifest;
    } else if (config.benchmark_dir) {
        manifest = *config.benchmark_dir / "manifest.jsonl";
    } else {
        throw ConfigError("reference scoring needs a corpus manifest or benchmark directory");
    }
    std::map<std::string, std::string> originals;
    for (const auto& entry : read_manifest(manifest)) {
        if (entry.description && !trim(*entry.description).empty()) originals[entry.dataset_id] = *entry.description;
    }
    return originals;
}

}  // namespace

int cmd_eval_quality(const EvalQualityArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto config = resolve_run_config(args.common);
        if (args.descriptions.empty()) throw ConfigError("eval-quality needs at least one --descriptions file");
        if (!args.method_labels.empty() && args.method_labels.size() != args.descriptions.size()) {
            throw ConfigError("give one --method-label per --descriptions file");
        }

        MethodCorpus corpus;
        for (std::size_t i = 0; i < args.descriptions.size(); ++i) {
            const auto label = args.method_labels.empty() ? args.descriptions[i].stem().string() : args.method_labels[i];
            const auto lines = read_descriptions(args.descriptions[i]);
            if (args.mode == ModeSelection::All) {
                for (const auto& line : lines) {
                    corpus[line.dataset_id][fmt::format("{}-{}", label, to_string(line.mode))] = line.text;
                }
            } else {
                for (auto& [dataset_id, text] : select_descriptions(lines, args.mode)) corpus[dataset_id][label] = text;
            }
        }

        const auto quality_dir = config.output_dir / "quality";
        bool partial = false;
        const double scale = args.percent ? 100.0 : 1.0;

        if (args.reference || args.include_original) {
            const auto originals = original_descriptions(config);
            if (args.reference) {
                std::string rows = "dataset_id,method,meteor,rouge1_f,rouge2_f,rougeL_f\n";
                std::map<std::string, std::pair<ReferenceScores, std::size_t>> means;
                for (const auto& [dataset_id, methods] : corpus) {
                    auto it = originals.find(dataset_id);
                    if (it == originals.end()) {
                        err << "warning: no original description for '" << dataset_id << "'; reference scores skipped\n";
                        continue;
                    }
                    for (const auto& [method, text] : methods) {
                        const auto s = reference_scores(text, it->second);
                        rows += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", csv::escape_field(dataset_id),
                                            csv::escape_field(method), s.meteor, s.rouge_1_f, s.rouge_2_f, s.rouge_l_f);
                        auto& [sum, count] = means[method];
                        sum.meteor += s.meteor;
                        sum.rouge_1_f += s.rouge_1_f;
                        sum.rouge_2_f += s.rouge_2_f;
                        sum.rouge_l_f += s.rouge_l_f;
                        ++count;
                    }
                }
                write_file_atomic(quality_dir / "reference_scores.csv", rows);
                out << fmt::format("{:<24} {:>8} {:>8} {:>8} {:>8}\n", "Method", "METEOR", "ROUGE", "ROUGE-1",
                                   "ROUGE-2");
                for (const auto& [method, entry] : means) {
                    const auto n = static_cast<double>(entry.second);
                    out << fmt::format("{:<24} {:>8.3f} {:>8.3f} {:>8.3f} {:>8.3f}\n", method,
                                       scale * entry.first.meteor / n, scale * entry.first.rouge_l_f / n,
                                       scale * entry.first.rouge_1_f / n, scale * entry.first.rouge_2_f / n);
                }
            }
            if (args.include_original) {
                for (const auto& [dataset_id, text] : originals) {
                    if (corpus.contains(dataset_id)) corpus[dataset_id]["Original"] = text;
                }
            }
        }

        if (args.pointwise || args.pairwise) {
            std::vector<JudgeConfig> judge_configs = config.judges;
            if (judge_configs.empty()) judge_configs.push_back({config.provider.model, config.provider});
            std::vector<Gateway> gateways;
            gateways.reserve(judge_configs.size());
            for (const auto& judge : judge_configs) gateways.push_back(make_gateway(judge.provider));
            std::vector<JudgeHandle> handles;
            for (std::size_t i = 0; i < judge_configs.size(); ++i) handles.push_back({judge_configs[i].label, &gateways[i]});

            CrossEvaluationOptions options;
            options.pointwise = args.pointwise;
            options.pairwise = args.pairwise;
            options.generator_model = config.provider.model;
            options.pairwise_options.pairs_per_dataset = config.pairs_per_dataset;
            options.pairwise_options.seed = config.seed;
            options.pairwise_options.workers = config.jobs;
            options.pairwise_options.templates = templates_for(config);
            const auto report = cross_evaluate(corpus, handles, options);
            for (const auto& warning : report.warnings) err << "warning: " << warning << "\n";
            for (const auto& error : report.errors) err << "error: " << error << "\n";
            partial = !report.errors.empty();
            if (args.pointwise) {
                write_file_atomic(quality_dir / "pointwise.csv", pointwise_to_csv(report.pointwise));
                out << render_cross_table(report);
            }
            if (args.pairwise) {
                write_file_atomic(quality_dir / "win_rates.csv", win_rates_to_csv(report.pairwise));
                for (const auto& pairwise : report.pairwise) {
                    for (const auto& rate : pairwise.win_rates) {
                        out << fmt::format("win rate [{}] {} {}: {:.3f} ({}/{})\n", pairwise.judge, rate.method,
                                           to_string(rate.dimension), rate.rate(), format_float(rate.victories),
                                           rate.comparisons);
                    }
                }
            }
            std::string events;
            for (const auto& gateway : gateways) events += gateway.events().to_jsonl();
            write_file_atomic(quality_dir / "events.jsonl", events);
        }
        return partial ? kExitPartial : kExitOk;
    });
}

int cmd_bench_stats(const BenchStatsArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.benchmarks.empty()) throw ConfigError("bench-stats needs at least one benchmark directory");
        for (const auto& dir : args.benchmarks) {
            const auto bundle = load_benchmark(dir);
            auto name = dir.filename().string();
            if (name.empty()) name = dir.parent_path().filename().string();
            out << render_benchmark_stats(name, benchmark_stats(bundle, args.shapes));
        }
        return kExitOk;
    });
}

std::vector<RunCost> collect_costs(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("run directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "cost.csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::map<fs::path, RunCost> runs;
    for (const auto& file : files) {
        const auto dataset_id = file.parent_path().filename().string();
        const auto run_dir = file.parent_path().parent_path();
        auto& run = runs[run_dir];
        if (run.run_dir.empty()) {
            run.run_dir = run_dir;
            run.exec_mode = "unknown";
            if (fs::exists(run_dir / "config.json")) {
                try {
                    const auto config = nlohmann::json::parse(read_file(run_dir / "config.json"));
                    run.exec_mode = config.at("exec").at("mode").get<std::string>();
                } catch (const nlohmann::json::exception&) {
                }
            }
        }
        const auto rows = csv::parse(read_file(file));
        if (rows.empty() || rows[0] != csv::Record{"tag", "input_tokens", "output_tokens", "latency_ms"}) {
            throw MalformedInputError(file.string() + ": unexpected cost header");
        }
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() != 4) throw MalformedInputError(fmt::format("{}:{}: expected 4 fields", file.string(), i + 1));
            StageCost cost;
            try {
                cost = {1, std::stoull(row[1]), std::stoull(row[2]), std::stod(row[3])};
            } catch (const std::exception&) {
                throw MalformedInputError(fmt::format("{}:{}: non-numeric cost", file.string(), i + 1));
            }
            for (auto* slot : {&run.by_stage[row[0]], &run.by_dataset[dataset_id]}) {
                slot->calls += cost.calls;
                slot->input_tokens += cost.input_tokens;
                slot->output_tokens += cost.output_tokens;
                slot->latency_ms += cost.latency_ms;
            }
            if (row[0] == to_string(Stage::SemanticProfile)) run.semantic_input_tokens[dataset_id] += cost.input_tokens;
        }
    }
    std::vector<RunCost> out;
    for (auto& [path, run] : runs) {
        if (!run.by_stage.empty()) out.push_back(std::move(run));
    }
    if (out.empty()) throw ValidationError("no cost entries found under " + dir.string());
    return out;
}

std::string render_cost_report(const std::vector<RunCost>& runs) {
    std::string out;
    auto mean = [](double total, std::size_t calls) { return calls ? total / static_cast<double>(calls) : 0.0; };
    for (const auto& run : runs) {
        out += fmt::format("run {} (exec {})\n", run.run_dir.string(), run.exec_mode);
        out += fmt::format("  {:<18} {:>6} {:>12} {:>10} {:>12} {:>10} {:>12} {:>10}\n", "stage", "calls", "in total",
                           "in mean", "out total", "out mean", "ms total", "ms mean");
        StageCost total;
        for (const auto& [stage, c] : run.by_stage) {
            out += fmt::format("  {:<18} {:>6} {:>12} {:>10.1f} {:>12} {:>10.1f} {:>12.1f} {:>10.1f}\n", stage, c.calls,
                               c.input_tokens, mean(static_cast<double>(c.input_tokens), c.calls), c.output_tokens,
                               mean(static_cast<double>(c.output_tokens), c.calls), c.latency_ms,
                               mean(c.latency_ms, c.calls));
            total.calls += c.calls;
            total.input_tokens += c.input_tokens;
            total.output_tokens += c.output_tokens;
            total.latency_ms += c.latency_ms;
        }
        out += fmt::format("  {:<18} {:>6} {:>12} {:>10} {:>12} {:>10} {:>12.1f}\n", "total", total.calls,
                           total.input_tokens, "", total.output_tokens, "", total.latency_ms);
        out += fmt::format("  per dataset ({}):\n", run.by_dataset.size());
        for (const auto& [dataset_id, c] : run.by_dataset) {
            out += fmt::format("    {:<24} {:>6} calls {:>10} in {:>10} out {:>12.1f} ms\n", dataset_id, c.calls,
                               c.input_tokens, c.output_tokens, c.latency_ms);
        }
    }

    // Grouped vs per-column semantic profiling, per dataset present in both.
    std::map<std::string, std::size_t> grouped;
    std::map<std::string, std::size_t> per_column;
    for (const auto& run : runs) {
        auto& target = run.exec_mode == "gp" ? grouped : per_column;
        if (run.exec_mode == "unknown") continue;
        for (const auto& [dataset_id, tokens] : run.semantic_input_tokens) {
            target.try_emplace(dataset_id, tokens);
        }
    }
    bool header = false;
    for (const auto& [dataset_id, g] : grouped) {
        auto it = per_column.find(dataset_id);
        if (it == per_column.end()) continue;
        if (!header) {
            out += "group prompting (semantic-profile input tokens):\n";
            header = true;
        }
        const auto p = it->second;
        const double change = p ? 100.0 * (static_cast<double>(g) - static_cast<double>(p)) / static_cast<double>(p) : 0.0;
        out += fmt::format("  {:<24} grouped {:>8} per-column {:>8} delta {:+.1f}% {}\n", dataset_id, g, p, change,
                           g < p ? "[grouped < per-column]" : "[FLAG: grouped >= per-column]");
    }
    return out;
}

int cmd_cost_report(const CostReportArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        out << render_cost_report(collect_costs(args.run_dir));
        return kExitOk;
    });
}

}  // namespace datadesc
