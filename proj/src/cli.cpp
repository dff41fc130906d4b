#include "surveyclust/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "surveyclust/baseline.hpp"
#include "surveyclust/clustering.hpp"
#include "surveyclust/evaluation.hpp"
#include "surveyclust/ingest.hpp"
#include "surveyclust/pipeline.hpp"
#include "surveyclust/reduction.hpp"
#include "surveyclust/synthgen.hpp"

namespace surveyclust {

namespace {

constexpr const char* kEnvOutputDir = "SURVEYCLUST_OUTPUT_DIR";
constexpr const char* kEnvLogLevel = "SURVEYCLUST_LOG_LEVEL";

std::shared_ptr<spdlog::logger> make_logger(const std::string& level) {
    auto logger = std::make_shared<spdlog::logger>("surveyclust", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
    logger->set_pattern("[%l] %v");
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && level != "off") {
        throw ConfigError("unknown log level '" + level + "' (expected trace, debug, info, warn, error or off)");
    }
    logger->set_level(parsed);
    return logger;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw IoError("cannot write " + path.string());
}

char delimiter_of(const std::string& text) {
    if (text == "\\t" || text == "tab") return '\t';
    if (text.size() != 1) throw ConfigError("--delimiter must be a single character");
    return text[0];
}

std::pair<std::size_t, std::size_t> parse_k_range(const std::string& text) {
    const auto dash = text.find('-');
    try {
        if (dash != std::string::npos) {
            const std::size_t lo = std::stoul(text.substr(0, dash));
            const std::size_t hi = std::stoul(text.substr(dash + 1));
            if (lo >= 1 && lo <= hi) return {lo, hi};
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("--k-range expects 'lo-hi' with 1 <= lo <= hi, got '" + text + "'");
}

void log_warnings(spdlog::logger& log, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) log.warn("{}", w);
}

struct Options {
    std::string log_level = "info";

    std::string schema, input, out, report, report_csv, delimiter = ",";
    double alpha = 0.05;
    std::string summary;

    std::string config, out_model, out_report, out_data;
    std::vector<std::string> manual_drop;
    double correlation_threshold = 0.2, drop_threshold = 0.5, loading_threshold = 0.30;
    std::string basis = "correlation";

    std::string method = "kmeans", metric = "euclidean", kmodes_init = "random", k_range;
    std::size_t k = 4, max_iter = 0;
    std::uint64_t seed = 1;
    bool standardize = false;

    std::string labels, model, need_cluster = "scored";
    double degenerate_high = 0.80, degenerate_low = 0.01;

    std::string reports, plot, tables;

    std::string spec, truth;
    std::size_t n = 0;

    std::string output_dir;
    std::vector<std::string> methods;
    std::vector<std::size_t> ks;
    std::vector<std::uint64_t> seeds;
};

}  // namespace

int run_cli(int argc, char** argv) {
    Options o;
    CLI::App app{"Survey cleaning, baseline labelling, factor reduction, clustering and recall evaluation", "surveyclust"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "surveyclust 0.1.0");
    app.add_option("--log-level", o.log_level, "trace, debug, info, warn, error or off")
        ->envname(kEnvLogLevel)
        ->capture_default_str();

    auto* validate = app.add_subcommand("validate", "Check a schema file and, optionally, every record of a survey file");
    validate->add_option("--schema", o.schema, "Schema file")->required();
    validate->add_option("--input", o.input, "Survey file to validate");
    validate->add_option("--delimiter", o.delimiter, "Field delimiter")->capture_default_str();

    auto* clean = app.add_subcommand("clean", "Remove out-of-range, inconsistent and incomplete records");
    clean->add_option("--schema", o.schema, "Schema file")->required();
    clean->add_option("--input", o.input, "Raw survey file")->required();
    clean->add_option("--out", o.out, "Clean survey file")->required();
    clean->add_option("--report", o.report, "Cleaning report (text)")->required();
    clean->add_option("--report-csv", o.report_csv, "Cleaning report rows (default: <report>.csv)");
    clean->add_option("--delimiter", o.delimiter, "Field delimiter")->capture_default_str();

    auto* label = app.add_subcommand("label", "Derive the baseline need labels");
    label->add_option("--schema", o.schema, "Schema file")->required();
    label->add_option("--input", o.input, "Clean survey file")->required();
    label->add_option("--alpha", o.alpha, "Lower-tail fraction per quantile question")->capture_default_str();
    label->add_option("--out", o.out, "Labels file")->required();
    label->add_option("--summary", o.summary, "Per-question summary (text)");
    label->add_option("--delimiter", o.delimiter, "Field delimiter")->capture_default_str();

    auto* reduce_cmd = app.add_subcommand("reduce", "Correlation screen, PCA, Varimax and loading filter");
    reduce_cmd->add_option("--input", o.input, "Clean survey file")->required();
    reduce_cmd->add_option("--schema", o.schema, "Schema file")->required();
    reduce_cmd->add_option("--config", o.config, "Reduction settings (YAML)");
    reduce_cmd->add_option("--out-model", o.out_model, "Factor model (JSON)")->required();
    reduce_cmd->add_option("--out-report", o.out_report, "Reduction report (text)")->required();
    reduce_cmd->add_option("--out-data", o.out_data, "Retained-question data file for clustering");
    reduce_cmd->add_option("--correlation-threshold", o.correlation_threshold, "List pairs with |r| above this")
        ->capture_default_str();
    reduce_cmd->add_option("--drop-threshold", o.drop_threshold, "Prune one member of pairs with |r| at least this")
        ->capture_default_str();
    reduce_cmd->add_option("--manual-drop", o.manual_drop, "Questions to drop instead of the automatic rule");
    reduce_cmd->add_option("--basis", o.basis, "PCA basis: correlation or covariance")->capture_default_str();
    reduce_cmd->add_option("--loading-threshold", o.loading_threshold, "Keep questions with |loading| at least this")
        ->capture_default_str();
    reduce_cmd->add_option("--delimiter", o.delimiter, "Field delimiter")->capture_default_str();

    auto* cluster = app.add_subcommand("cluster", "Fit one clustering model or a sweep over k");
    cluster->add_option("--input", o.input, "Reduced data file")->required();
    cluster->add_option("--method", o.method, "kmeans, kmodes, hclust-complete, hclust-single or hclust-average")
        ->capture_default_str();
    cluster->add_option("--k", o.k, "Number of clusters")->capture_default_str();
    cluster->add_option("--k-range", o.k_range, "Sweep lo-hi; --out becomes a directory");
    cluster->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    cluster->add_flag("--standardize", o.standardize, "Z-score columns before clustering");
    cluster->add_option("--metric", o.metric, "Hierarchical metric: euclidean or simple-matching")
        ->capture_default_str();
    cluster->add_option("--kmodes-init", o.kmodes_init, "k-modes initialisation: random or huang")
        ->capture_default_str();
    cluster->add_option("--max-iter", o.max_iter, "Iteration cap (0: 300 for kmeans, 100 for kmodes)")
        ->capture_default_str();
    cluster->add_option("--out", o.out, "Model file (directory with --k-range)")->required();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Profile clusters and measure baseline recall");
    evaluate_cmd->add_option("--labels", o.labels, "Labels file")->required();
    evaluate_cmd->add_option("--model", o.model, "Model file")->required();
    evaluate_cmd->add_option("--schema", o.schema, "Schema file")->required();
    evaluate_cmd->add_option("--input", o.input, "Data file used for the cluster profiles")->required();
    evaluate_cmd->add_option("--need-cluster", o.need_cluster, "'scored' or a cluster number")->capture_default_str();
    evaluate_cmd->add_option("--degenerate-high", o.degenerate_high, "Degenerate above this share")
        ->capture_default_str();
    evaluate_cmd->add_option("--degenerate-low", o.degenerate_low, "Degenerate below this need share")
        ->capture_default_str();
    evaluate_cmd->add_option("--out", o.out, "Report directory")->required();

    auto* compare = app.add_subcommand("compare", "Tabulate recall across evaluated runs");
    compare->add_option("--reports", o.reports, "Directory searched for report.json files")->required();
    compare->add_option("--out", o.out, "Comparison series (CSV)")->required();
    compare->add_option("--plot", o.plot, "Line chart (SVG)");
    compare->add_option("--tables", o.tables, "Per-k method tables (text)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
    synth->add_option("--spec", o.spec, "Generator spec (YAML)")->required();
    synth->add_option("--out", o.out, "Survey file")->required();
    synth->add_option("--truth", o.truth, "Planted-member flags")->required();
    synth->add_option("--seed", o.seed, "Override the spec seed");
    synth->add_option("--n", o.n, "Override the spec cohort size");

    auto* pipeline = app.add_subcommand("pipeline", "Run clean, label, reduce, cluster, evaluate and compare");
    pipeline->add_option("--config", o.config, "Pipeline config (YAML)")->required();
    pipeline->add_option("--output-dir", o.output_dir, "Output directory")->envname(kEnvOutputDir);
    pipeline->add_option("--methods", o.methods, "Override the method list")->delimiter(',');
    pipeline->add_option("--k", o.ks, "Override the k list")->delimiter(',');
    pipeline->add_option("--seeds", o.seeds, "Override the seed list")->delimiter(',');
    pipeline->add_option("--alpha", o.alpha, "Override alpha");
    pipeline->add_option("--need-cluster", o.need_cluster, "Override the need-cluster policy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    std::shared_ptr<spdlog::logger> log;
    try {
        log = make_logger(o.log_level);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (validate->parsed()) {
            const SurveySchema schema = load_schema(o.schema);
            std::cout << "schema " << schema.name() << ": " << schema.questions().size() << " questions, "
                      << schema.rules().size() << " rules, baseline set of " << schema.baseline_set().size() << '\n';
            if (!o.input.empty()) {
                const auto records = parse_survey_file(o.input, schema, delimiter_of(o.delimiter));
                std::map<VerdictKind, std::size_t> counts;
                for (const auto& r : records) {
                    const ValidationVerdict v = validate_record(r, schema);
                    ++counts[v.kind()];
                    if (v.clean()) continue;
                    std::cout << r.respondent_id << ": " << to_string(v.kind());
                    for (const auto& id : v.out_of_range) std::cout << " out_of_range=" << id;
                    for (const auto& id : v.inconsistent) std::cout << " inconsistent=" << id;
                    for (const auto& id : v.incomplete) std::cout << " incomplete=" << id;
                    std::cout << '\n';
                }
                std::cout << records.size() << " records: " << counts[VerdictKind::Clean] << " clean, "
                          << counts[VerdictKind::OutOfRange] << " out_of_range, " << counts[VerdictKind::Inconsistent]
                          << " inconsistent, " << counts[VerdictKind::Incomplete] << " incomplete\n";
            }
        } else if (clean->parsed()) {
            const char d = delimiter_of(o.delimiter);
            const SurveySchema schema = load_schema(o.schema);
            const CleanedCohort cohort = clean_cohort(parse_survey_file(o.input, schema, d), schema);
            write_survey_file(o.out, cohort.records, schema, d);
            write_file(o.report, render_cleaning_report(cohort.report));
            write_file(o.report_csv.empty() ? o.report + ".csv" : o.report_csv, cleaning_report_rows(cohort.report));
            log->info("{} records in, {} removed, {} out", cohort.report.total_in, cohort.report.removed_total(),
                      cohort.report.total_out);
        } else if (label->parsed()) {
            const SurveySchema schema = load_schema(o.schema);
            const auto records = parse_survey_file(o.input, schema, delimiter_of(o.delimiter));
            const BaselineResult result = label_baseline(records, schema, o.alpha);
            write_labels_file(o.out, result.labels);
            if (!o.summary.empty()) write_file(o.summary, render_baseline_summary(result));
            log_warnings(*log, result.warnings);
            log->info("{} of {} respondents flagged",
                      std::count_if(result.labels.begin(), result.labels.end(), [](const auto& l) { return l.flag; }),
                      result.labels.size());
        } else if (reduce_cmd->parsed()) {
            const char d = delimiter_of(o.delimiter);
            const SurveySchema schema = load_schema(o.schema);
            ReductionConfig config = o.config.empty() ? ReductionConfig{} : load_reduction_config(o.config);
            if (reduce_cmd->count("--correlation-threshold")) config.correlation_threshold = o.correlation_threshold;
            if (reduce_cmd->count("--drop-threshold")) config.prune.drop_threshold = o.drop_threshold;
            if (reduce_cmd->count("--manual-drop")) config.prune.manual_drop = o.manual_drop;
            if (reduce_cmd->count("--basis")) config.basis = parse_pca_basis(o.basis);
            if (reduce_cmd->count("--loading-threshold")) config.loading_threshold = o.loading_threshold;
            const auto records = parse_survey_file(o.input, schema, d);
            const ReductionResult result = reduce(records, schema, config);
            write_file(o.out_model, factor_model_to_json(result.model).dump(1) + "\n");
            write_file(o.out_report, render_reduction_report(result));
            if (!o.out_data.empty()) {
                write_data_matrix_file(o.out_data, make_data_matrix(records, result.model.retained_questions, &schema));
            }
            log_warnings(*log, result.warnings);
            log->info("{} of {} questions retained over {} factors", result.model.retained_questions.size(),
                      result.model.questions.size(), result.model.n_retained);
        } else if (cluster->parsed()) {
            const DataMatrix data = read_data_matrix_file(o.input);
            ClusterRequest request;
            request.method = parse_method(o.method);
            request.seed = o.seed;
            request.standardize = o.standardize;
            request.metric = parse_metric(o.metric);
            request.kmodes_init = parse_kmodes_init(o.kmodes_init);
            request.max_iter = o.max_iter;
            auto report = [&](const ClusterModel& m, const std::filesystem::path& path) {
                write_cluster_model(path, m);
                log_warnings(*log, m.warnings);
                std::ostringstream sizes;
                for (std::size_t s : m.cluster_sizes()) sizes << ' ' << s;
                log->info("{} k={}: sizes{} -> {}", to_string(m.method), m.k, sizes.str(), path.string());
            };
            if (o.k_range.empty()) {
                request.k = o.k;
                report(fit(data, request), o.out);
            } else {
                const auto [lo, hi] = parse_k_range(o.k_range);
                std::filesystem::create_directories(o.out);
                std::optional<Dendrogram> tree;
                if (is_hierarchical(request.method)) {
                    if (hi > data.rows()) throw InputError("k-range exceeds the number of respondents");
                    tree = hclust(data, linkage_of(request.method), request.metric, request.standardize);
                }
                for (std::size_t k = lo; k <= hi; ++k) {
                    request.k = k;
                    const ClusterModel m = tree ? model_from_dendrogram(data, *tree, request) : fit(data, request);
                    report(m, std::filesystem::path(o.out) / (model_stem(m.method, k, m.seed) + ".json"));
                }
            }
        } else if (evaluate_cmd->parsed()) {
            const SurveySchema schema = load_schema(o.schema);
            const DataMatrix data = read_data_matrix_file(o.input);
            const ClusterModel model = read_cluster_model(o.model);
            const auto labels = read_labels_file(o.labels);
            DegeneracyThresholds thresholds{o.degenerate_high, o.degenerate_low};
            const EvaluationReport report =
                evaluate(data, model, labels, schema, parse_need_policy(o.need_cluster), thresholds);
            write_evaluation_report(o.out, report);
            log_warnings(*log, report.warnings);
            log->info("need cluster {}: total recall {}", report.need.cluster,
                      format_count_percent(report.recall.total));
        } else if (compare->parsed()) {
            const auto summaries = read_summaries(o.reports);
            if (summaries.empty()) throw InputError("no report.json files under " + o.reports);
            const Comparison comparison = compare_methods(summaries);
            write_file(o.out, comparison_csv(comparison));
            if (!o.plot.empty()) write_file(o.plot, render_comparison_svg(comparison));
            if (!o.tables.empty()) {
                std::map<std::pair<std::size_t, std::uint64_t>, std::vector<EvaluationSummary>> groups;
                for (const auto& s : comparison.runs) groups[{s.k_requested, s.seed}].push_back(s);
                std::ostringstream text;
                for (const auto& [key, group] : groups) text << render_method_table(group) << '\n';
                write_file(o.tables, text.str());
            }
            log->info("{} runs compared", comparison.runs.size());
        } else if (synth->parsed()) {
            GeneratorSpec spec = load_generator_spec(o.spec);
            if (synth->count("--seed")) spec.seed = o.seed;
            if (synth->count("--n")) spec.n = o.n;
            const GeneratedCohort cohort = generate(spec);
            write_survey_file(o.out, cohort.records, spec.schema);
            write_truth_file(o.truth, cohort);
            log->info("{} respondents, {} planted, {} corrupted", cohort.records.size(), cohort.planted.size(),
                      cohort.corrupted);
        } else if (pipeline->parsed()) {
            PipelineConfig config = load_pipeline_config(o.config);
            if (!o.output_dir.empty()) config.output_dir = o.output_dir;
            if (!o.methods.empty()) {
                config.cluster.methods.clear();
                for (const auto& m : o.methods) config.cluster.methods.push_back(parse_method(m));
            }
            if (!o.ks.empty()) config.cluster.ks = o.ks;
            if (!o.seeds.empty()) config.cluster.seeds = o.seeds;
            if (pipeline->count("--alpha")) config.alpha = o.alpha;
            if (pipeline->count("--need-cluster")) config.need = parse_need_policy(o.need_cluster);
            const PipelineResult result = run_pipeline(config, [&](const std::string& m) { log->info("{}", m); });
            log_warnings(*log, result.warnings);
            std::cout << result.output_dir.string() << '\n' << result.content_hash << '\n';
        }
    } catch (const ConfigError& e) {
        log->error("{}", e.what());
        return kExitConfig;
    } catch (const StageError& e) {
        log->error("{}", e.what());
        return kExitStage;
    } catch (const IoError& e) {
        log->error("{}", e.what());
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        log->error("{}", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace surveyclust
