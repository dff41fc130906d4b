#include "surveyclust/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "surveyclust/baseline.hpp"
#include "surveyclust/digest.hpp"
#include "surveyclust/ingest.hpp"

#ifndef SURVEYCLUST_VERSION
#define SURVEYCLUST_VERSION "0.0.0"
#endif

namespace surveyclust {

namespace {

template <typename T>
T read_value(const YAML::Node& node, const std::string& field) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("field '" + field + "' has an invalid value");
    }
}

template <typename T>
std::vector<T> read_list(const YAML::Node& node, const std::string& field) {
    if (node.IsScalar()) return {read_value<T>(node, field)};
    if (!node.IsSequence()) throw ConfigError("field '" + field + "' must be a list");
    std::vector<T> out;
    for (const auto& item : node) out.push_back(read_value<T>(item, field));
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_relative() && !base.empty() ? base / p : p;
}

std::string read_text(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(std::string("cannot read ") + what + " " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw IoError("cannot write " + path.string());
}

void check_range(const char* field, double value, double lo, double hi) {
    if (!(value >= lo && value <= hi)) {
        std::ostringstream msg;
        msg << "field '" << field << "' = " << value << " must lie in [" << lo << ", " << hi << "]";
        throw ConfigError(msg.str());
    }
}

// Runs `body` as stage `name`, mapping failures onto the pipeline's error classes.
template <typename F>
auto run_stage(const std::string& name, F&& body) {
    try {
        return body();
    } catch (const IoError& e) {
        throw IoError("stage " + name + ": " + e.what());
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

struct Job {
    Method method;
    std::uint64_t seed;
    std::vector<std::size_t> ks;  // one for partitional methods, all for hierarchical ones
};

}  // namespace

std::string to_string(KModesInit init) { return init == KModesInit::Huang ? "huang" : "random"; }

KModesInit parse_kmodes_init(const std::string& text) {
    if (text == "random") return KModesInit::Random;
    if (text == "huang") return KModesInit::Huang;
    throw ConfigError("unknown k-modes initialisation '" + text + "' (expected random or huang)");
}

NeedPolicy parse_need_policy(const std::string& text) {
    if (text == "scored") return {};
    try {
        std::size_t used = 0;
        const long value = std::stol(text, &used);
        if (used == text.size() && value >= 1) return NeedPolicy{static_cast<std::size_t>(value)};
    } catch (const std::exception&) {
    }
    throw ConfigError("need cluster policy must be 'scored' or a cluster number >= 1, got '" + text + "'");
}

ReductionConfig parse_reduction_config(const YAML::Node& node, ReductionConfig config) {
    if (!node) return config;
    if (!node.IsMap()) throw ConfigError("reduction settings must be a mapping");
    for (const auto& entry : node) {
        const auto key = entry.first.as<std::string>();
        const YAML::Node& v = entry.second;
        const std::string field = "reduction." + key;
        if (key == "questions") {
            config.questions = read_list<std::string>(v, field);
        } else if (key == "correlation_threshold") {
            config.correlation_threshold = read_value<double>(v, field);
        } else if (key == "drop_threshold") {
            config.prune.drop_threshold = read_value<double>(v, field);
        } else if (key == "manual_drop") {
            config.prune.manual_drop = v.IsNull() ? std::vector<std::string>{} : read_list<std::string>(v, field);
        } else if (key == "basis") {
            config.basis = parse_pca_basis(read_value<std::string>(v, field));
        } else if (key == "loading_threshold") {
            config.loading_threshold = read_value<double>(v, field);
        } else if (key == "varimax_normalize") {
            config.varimax_normalize = read_value<bool>(v, field);
        } else if (key == "varimax_max_iter") {
            config.varimax_max_iter = read_value<int>(v, field);
        } else if (key == "varimax_tol") {
            config.varimax_tol = read_value<double>(v, field);
        } else {
            throw ConfigError("unknown field '" + field + "'");
        }
    }
    check_range("reduction.correlation_threshold", config.correlation_threshold, 0.0, 1.0);
    check_range("reduction.drop_threshold", config.prune.drop_threshold, 0.0, 1.0);
    check_range("reduction.loading_threshold", config.loading_threshold, 0.0, 1.0);
    if (config.varimax_max_iter < 1) throw ConfigError("field 'reduction.varimax_max_iter' must be positive");
    if (!(config.varimax_tol > 0.0)) throw ConfigError("field 'reduction.varimax_tol' must be positive");
    return config;
}

ReductionConfig load_reduction_config(const std::filesystem::path& path) {
    const std::string text = read_text(path, "reduction config");
    try {
        const YAML::Node root = YAML::Load(text);
        return parse_reduction_config(root["reduction"] ? root["reduction"] : root);
    } catch (const YAML::Exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void PipelineConfig::validate() const {
    if (schema_path.empty()) throw ConfigError("missing field 'schema'");
    if (input_path.empty()) throw ConfigError("missing field 'input'");
    if (output_dir.empty()) throw ConfigError("missing field 'output_dir'");
    check_range("alpha", alpha, 1e-12, 0.5 - 1e-12);
    if (cluster.methods.empty()) throw ConfigError("field 'cluster.methods' needs at least one method");
    if (cluster.ks.empty()) throw ConfigError("field 'cluster.k' needs at least one value");
    for (std::size_t k : cluster.ks) {
        if (k < 1) throw ConfigError("field 'cluster.k' values must be at least 1");
    }
    if (cluster.seeds.empty()) throw ConfigError("field 'cluster.seeds' needs at least one seed");
    check_range("evaluation.degenerate_high", degeneracy.high, 0.0, 1.0);
    check_range("evaluation.degenerate_low", degeneracy.low, 0.0, 1.0);
}

PipelineConfig parse_pipeline_config(const std::string& text, const std::filesystem::path& base_dir) {
    PipelineConfig config;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config root must be a mapping");
    try {
        for (const auto& entry : root) {
            const auto key = entry.first.as<std::string>();
            const YAML::Node& v = entry.second;
            if (key == "schema") {
                config.schema_path = resolve(base_dir, read_value<std::string>(v, key));
            } else if (key == "input") {
                config.input_path = resolve(base_dir, read_value<std::string>(v, key));
            } else if (key == "output_dir") {
                config.output_dir = resolve(base_dir, read_value<std::string>(v, key));
            } else if (key == "delimiter") {
                const auto d = read_value<std::string>(v, key);
                if (d.size() != 1) throw ConfigError("field 'delimiter' must be a single character");
                config.delimiter = d[0];
            } else if (key == "alpha") {
                config.alpha = read_value<double>(v, key);
            } else if (key == "reduction") {
                config.reduction = parse_reduction_config(v);
            } else if (key == "cluster") {
                if (!v.IsMap()) throw ConfigError("field 'cluster' must be a mapping");
                for (const auto& c : v) {
                    const auto ckey = c.first.as<std::string>();
                    const std::string field = "cluster." + ckey;
                    if (ckey == "methods") {
                        config.cluster.methods.clear();
                        for (const auto& m : read_list<std::string>(c.second, field)) {
                            config.cluster.methods.push_back(parse_method(m));
                        }
                    } else if (ckey == "k") {
                        config.cluster.ks = read_list<std::size_t>(c.second, field);
                    } else if (ckey == "seeds") {
                        config.cluster.seeds = read_list<std::uint64_t>(c.second, field);
                    } else if (ckey == "standardize") {
                        config.cluster.standardize = read_value<bool>(c.second, field);
                    } else if (ckey == "metric") {
                        config.cluster.metric = parse_metric(read_value<std::string>(c.second, field));
                    } else if (ckey == "kmodes_init") {
                        config.cluster.kmodes_init = parse_kmodes_init(read_value<std::string>(c.second, field));
                    } else if (ckey == "max_iter") {
                        config.cluster.max_iter = read_value<std::size_t>(c.second, field);
                    } else {
                        throw ConfigError("unknown field '" + field + "'");
                    }
                }
            } else if (key == "evaluation") {
                if (!v.IsMap()) throw ConfigError("field 'evaluation' must be a mapping");
                for (const auto& e : v) {
                    const auto ekey = e.first.as<std::string>();
                    const std::string field = "evaluation." + ekey;
                    if (ekey == "need_cluster") {
                        config.need = parse_need_policy(read_value<std::string>(e.second, field));
                    } else if (ekey == "degenerate_high") {
                        config.degeneracy.high = read_value<double>(e.second, field);
                    } else if (ekey == "degenerate_low") {
                        config.degeneracy.low = read_value<double>(e.second, field);
                    } else {
                        throw ConfigError("unknown field '" + field + "'");
                    }
                }
            } else {
                throw ConfigError("unknown field '" + key + "'");
            }
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (config.schema_path.empty()) throw ConfigError("missing field 'schema'");
    if (config.input_path.empty()) throw ConfigError("missing field 'input'");
    PipelineConfig probe = config;
    if (probe.output_dir.empty()) probe.output_dir = ".";
    probe.validate();
    return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_pipeline_config(text.str(), path.parent_path());
}

nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
    std::vector<std::string> methods;
    for (Method m : c.cluster.methods) methods.push_back(to_string(m));
    return {{"schema", c.schema_path.filename().string()},
            {"input", c.input_path.filename().string()},
            {"delimiter", std::string(1, c.delimiter)},
            {"alpha", c.alpha},
            {"reduction",
             {{"questions", c.reduction.questions},
              {"correlation_threshold", c.reduction.correlation_threshold},
              {"drop_threshold", c.reduction.prune.drop_threshold},
              {"manual_drop", c.reduction.prune.manual_drop},
              {"basis", to_string(c.reduction.basis)},
              {"loading_threshold", c.reduction.loading_threshold},
              {"varimax_normalize", c.reduction.varimax_normalize},
              {"varimax_max_iter", c.reduction.varimax_max_iter},
              {"varimax_tol", c.reduction.varimax_tol}}},
            {"cluster",
             {{"methods", methods},
              {"k", c.cluster.ks},
              {"seeds", c.cluster.seeds},
              {"standardize", c.cluster.standardize},
              {"metric", to_string(c.cluster.metric)},
              {"kmodes_init", to_string(c.cluster.kmodes_init)},
              {"max_iter", c.cluster.max_iter}}},
            {"evaluation",
             {{"need_cluster",
               c.need.manual_cluster ? nlohmann::json(*c.need.manual_cluster) : nlohmann::json("scored")},
              {"degenerate_high", c.degeneracy.high},
              {"degenerate_low", c.degeneracy.low}}}};
}

std::string model_stem(Method method, std::size_t k, std::uint64_t seed) {
    std::string stem = to_string(method) + "_k" + std::to_string(k);
    if (!is_hierarchical(method)) stem += "_s" + std::to_string(seed);
    return stem;
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::function<void(const std::string&)>& progress) {
    config.validate();
    auto say = [&](const std::string& message) {
        if (progress) progress(message);
    };
    const auto started = std::chrono::system_clock::now();
    PipelineResult result;
    result.output_dir = config.output_dir;
    const std::filesystem::path& out = config.output_dir;

    if (!std::filesystem::exists(config.schema_path)) throw IoError("schema " + config.schema_path.string() + " not found");
    if (!std::filesystem::exists(config.input_path)) throw IoError("input " + config.input_path.string() + " not found");
    const SurveySchema schema = load_schema(config.schema_path);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());

    std::vector<std::pair<std::string, std::filesystem::path>> artifacts;
    auto stage_dir = [&](const std::string& name) {
        const auto dir = out / name;
        std::filesystem::remove_all(dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        return dir;
    };
    auto emit = [&](const std::filesystem::path& path, const std::string& content) {
        write_text(path, content);
        artifacts.emplace_back(std::filesystem::relative(path, out).generic_string(), path);
    };
    auto track = [&](const std::filesystem::path& path) {
        artifacts.emplace_back(std::filesystem::relative(path, out).generic_string(), path);
    };

    say("stage 01_clean");
    const CleanedCohort cleaned = run_stage("01_clean", [&] {
        const auto dir = stage_dir("01_clean");
        const auto records = parse_survey_file(config.input_path, schema, config.delimiter);
        CleanedCohort c = clean_cohort(records, schema);
        if (c.records.empty()) throw InputError("no records survived cleaning");
        write_survey_file(dir / "clean.csv", c.records, schema, config.delimiter);
        track(dir / "clean.csv");
        emit(dir / "cleaning_report.txt", render_cleaning_report(c.report));
        emit(dir / "cleaning_report.csv", cleaning_report_rows(c.report));
        return c;
    });

    say("stage 02_label");
    const BaselineResult baseline = run_stage("02_label", [&] {
        const auto dir = stage_dir("02_label");
        BaselineResult b = label_baseline(cleaned.records, schema, config.alpha);
        write_labels_file(dir / "labels.csv", b.labels);
        track(dir / "labels.csv");
        emit(dir / "baseline_summary.txt", render_baseline_summary(b));
        return b;
    });
    result.warnings.insert(result.warnings.end(), baseline.warnings.begin(), baseline.warnings.end());

    say("stage 03_reduce");
    const DataMatrix reduced = run_stage("03_reduce", [&] {
        const auto dir = stage_dir("03_reduce");
        const ReductionResult r = reduce(cleaned.records, schema, config.reduction);
        emit(dir / "reduction_report.txt", render_reduction_report(r));
        emit(dir / "factor_model.json", factor_model_to_json(r.model).dump(1) + "\n");
        DataMatrix data = make_data_matrix(cleaned.records, r.model.retained_questions, &schema);
        write_data_matrix_file(dir / "reduced.csv", data);
        track(dir / "reduced.csv");
        result.warnings.insert(result.warnings.end(), r.warnings.begin(), r.warnings.end());
        return data;
    });

    say("stage 04_cluster");
    const std::vector<ClusterModel> models = run_stage("04_cluster", [&] {
        const auto dir = stage_dir("04_cluster");
        std::vector<Job> jobs;
        for (Method method : config.cluster.methods) {
            if (is_hierarchical(method)) {
                jobs.push_back({method, 0, config.cluster.ks});
            } else {
                for (std::size_t k : config.cluster.ks) {
                    for (std::uint64_t seed : config.cluster.seeds) jobs.push_back({method, seed, {k}});
                }
            }
        }
        std::vector<std::future<std::vector<ClusterModel>>> running;
        for (const Job& job : jobs) {
            running.push_back(std::async(std::launch::async, [&, job] {
                std::vector<ClusterModel> fitted;
                ClusterRequest request;
                request.method = job.method;
                request.seed = job.seed;
                request.standardize = config.cluster.standardize;
                request.metric = config.cluster.metric;
                request.kmodes_init = config.cluster.kmodes_init;
                request.max_iter = config.cluster.max_iter;
                if (is_hierarchical(job.method)) {
                    const Dendrogram tree =
                        hclust(reduced, linkage_of(job.method), config.cluster.metric, config.cluster.standardize);
                    for (std::size_t k : job.ks) {
                        if (k > reduced.rows()) {
                            throw InputError("k = " + std::to_string(k) + " exceeds the " +
                                             std::to_string(reduced.rows()) + " clean respondents");
                        }
                        request.k = k;
                        fitted.push_back(model_from_dendrogram(reduced, tree, request));
                    }
                } else {
                    request.k = job.ks.front();
                    fitted.push_back(fit(reduced, request));
                }
                return fitted;
            }));
        }
        std::vector<ClusterModel> all;
        for (auto& f : running) {
            for (auto& m : f.get()) all.push_back(std::move(m));
        }
        std::stable_sort(all.begin(), all.end(), [](const ClusterModel& a, const ClusterModel& b) {
            return std::tie(a.method, a.k_requested, a.seed) < std::tie(b.method, b.k_requested, b.seed);
        });
        for (const auto& m : all) {
            const auto path = dir / (model_stem(m.method, m.k_requested, m.seed) + ".json");
            write_cluster_model(path, m);
            track(path);
        }
        return all;
    });
    for (const auto& m : models) {
        for (const auto& w : m.warnings) {
            result.warnings.push_back(model_stem(m.method, m.k_requested, m.seed) + ": " + w);
        }
    }

    say("stage 05_evaluate");
    const std::vector<EvaluationSummary> summaries = run_stage("05_evaluate", [&] {
        const auto dir = stage_dir("05_evaluate");
        const DataMatrix profile_data = make_data_matrix(cleaned.records, schema.question_ids(), &schema);
        std::vector<EvaluationSummary> out_summaries;
        for (const auto& m : models) {
            const auto report = evaluate(profile_data, m, baseline.labels, schema, config.need, config.degeneracy);
            const auto run_dir = dir / model_stem(m.method, m.k_requested, m.seed);
            write_evaluation_report(run_dir, report);
            track(run_dir / "report.txt");
            track(run_dir / "report.json");
            out_summaries.push_back(report.summary);
        }
        return out_summaries;
    });

    say("stage 06_compare");
    run_stage("06_compare", [&] {
        const auto dir = stage_dir("06_compare");
        const Comparison comparison = compare_methods(summaries);
        emit(dir / "comparison.csv", comparison_csv(comparison));
        emit(dir / "comparison.svg", render_comparison_svg(comparison));
        std::ostringstream tables;
        for (std::size_t k : config.cluster.ks) {
            for (std::uint64_t seed : config.cluster.seeds) {
                std::vector<EvaluationSummary> group;
                for (const auto& s : comparison.runs) {
                    if (s.k_requested == k && (is_hierarchical(s.method) || s.seed == seed)) group.push_back(s);
                }
                if (!group.empty()) tables << render_method_table(group) << '\n';
            }
        }
        emit(dir / "method_tables.txt", tables.str());
        return 0;
    });

    // Manifest: digests of inputs and every analytical artifact, no wall-clock data.
    nlohmann::json files = nlohmann::json::array();
    std::string hashed;
    std::sort(artifacts.begin(), artifacts.end());
    for (const auto& [rel, path] : artifacts) {
        const std::string digest = sha256_file(path);
        files.push_back({{"path", rel}, {"sha256", digest}});
        hashed += rel + '\t' + digest + '\n';
    }
    result.content_hash = sha256_hex(hashed);
    nlohmann::json seeds = config.cluster.seeds;
    result.manifest = {{"format", "surveyclust-manifest/1"},
                       {"tool", "surveyclust"},
                       {"version", SURVEYCLUST_VERSION},
                       {"config", pipeline_config_to_json(config)},
                       {"seeds", seeds},
                       {"inputs",
                        {{"schema", {{"file", config.schema_path.filename().string()},
                                     {"sha256", sha256_file(config.schema_path)}}},
                         {"input", {{"file", config.input_path.filename().string()},
                                    {"sha256", sha256_file(config.input_path)}}}}},
                       {"counts",
                        {{"total_in", cleaned.report.total_in},
                         {"total_out", cleaned.report.total_out},
                         {"flagged", std::count_if(baseline.labels.begin(), baseline.labels.end(),
                                                   [](const BaselineLabel& l) { return l.flag != 0; })},
                         {"retained_questions", reduced.cols()},
                         {"models", models.size()}}},
                       {"artifacts", files},
                       {"warnings", result.warnings},
                       {"content_hash", result.content_hash}};
    write_text(out / "manifest.json", result.manifest.dump(1) + "\n");

    const auto finished = std::chrono::system_clock::now();
    const nlohmann::json run_info = {
        {"started_unix_ms", std::chrono::duration_cast<std::chrono::milliseconds>(started.time_since_epoch()).count()},
        {"finished_unix_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(finished.time_since_epoch()).count()},
        {"output_dir", std::filesystem::absolute(out).string()},
        {"schema_path", std::filesystem::absolute(config.schema_path).string()},
        {"input_path", std::filesystem::absolute(config.input_path).string()}};
    write_text(out / "run_info.json", run_info.dump(1) + "\n");
    say("content hash " + result.content_hash);
    return result;
}

}  // namespace surveyclust
