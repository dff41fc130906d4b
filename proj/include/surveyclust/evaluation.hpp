#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surveyclust/baseline.hpp"
#include "surveyclust/clustering.hpp"
#include "surveyclust/schema.hpp"

namespace surveyclust {

enum class SummaryKind { Mean, Mode };

struct ClusterProfile {
    Method method = Method::KMeans;
    std::size_t k = 0;
    std::vector<std::string> question_ids;
    std::vector<std::size_t> sizes;
    SummaryKind summary = SummaryKind::Mean;
    std::vector<std::vector<double>> summaries;  // [cluster][question]; raw codes
};

// Per-cluster means of the raw codes for centroid and hierarchical methods, coordinate-wise
// modes for k-modes. Throws InputError if a data row has no assignment in the model.
ClusterProfile profile_clusters(const DataMatrix& data, const ClusterModel& model);

struct NeedPolicy {
    std::optional<std::size_t> manual_cluster;  // 1-based; overrides scoring
};

struct NeedChoice {
    std::size_t cluster = 1;
    bool manual = false;
    bool tie = false;
    std::vector<double> scores;
    std::vector<std::string> scored_questions;
    std::string rationale;
};

// Scored policy: z-score each scored question's summary across clusters, orient so that
// worse is higher, sum, take the argmax. Scored questions are the profile questions in
// the schema's baseline set (all profile questions when none are). Ties go to the
// smaller cluster, then the lower index.
NeedChoice pick_need_cluster(const ClusterProfile& profile, const SurveySchema& schema, const NeedPolicy& policy = {});

struct ContingencyTable {
    std::vector<std::string> reasons;               // rows
    std::size_t k = 0;                              // columns 1..k
    std::vector<std::vector<std::size_t>> counts;   // [reason][cluster]
    std::vector<std::size_t> row_sums;
    std::vector<std::size_t> col_sums;
    std::size_t total = 0;                          // reason incidences
    std::vector<std::size_t> flagged_students;      // distinct flagged respondents per cluster
    std::size_t flagged_total = 0;
};

// One count per (reason, respondent). Rows follow `reason_order`, then any further reasons
// in order of first appearance. Throws InputError when label and model ids differ.
ContingencyTable contingency(const std::vector<BaselineLabel>& labels, const ClusterModel& model,
                             const std::vector<std::string>& reason_order = {});

struct RecallCell {
    std::size_t count = 0;
    std::size_t total = 0;
    std::optional<double> recall;  // undefined when total is 0

    bool operator==(const RecallCell&) const = default;
};

struct RecallReport {
    std::size_t need_cluster = 1;
    std::vector<std::string> reasons;
    std::vector<RecallCell> per_reason;
    RecallCell total;     // reason incidences
    RecallCell distinct;  // flagged respondents
};

RecallReport recall_report(const ContingencyTable& table, std::size_t need_cluster);

// "61 (50.8%)"; "0 (n/a)" when undefined.
std::string format_count_percent(const RecallCell& cell);

struct DegeneracyThresholds {
    double high = 0.80;
    double low = 0.01;
};

struct EvaluationSummary {
    Method method = Method::KMeans;
    std::size_t k_requested = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::vector<std::size_t> sizes;
    std::size_t need_cluster = 1;
    bool need_manual = false;
    std::size_t need_size = 0;
    double need_share = 0.0;
    double largest_share = 0.0;
    bool degenerate = false;
    std::vector<std::string> reasons;
    std::vector<RecallCell> per_reason;
    RecallCell total;
    RecallCell distinct;
};

struct EvaluationReport {
    ClusterProfile profile;
    NeedChoice need;
    ContingencyTable table;
    RecallReport recall;
    EvaluationSummary summary;
    std::vector<std::string> warnings;
};

EvaluationReport evaluate(const DataMatrix& data, const ClusterModel& model, const std::vector<BaselineLabel>& labels,
                          const SurveySchema& schema, const NeedPolicy& policy = {},
                          const DegeneracyThresholds& thresholds = {});

bool is_degenerate(double need_share, double largest_share, const DegeneracyThresholds& thresholds);

std::string method_display_name(Method method);
std::string render_profile(const ClusterProfile& profile, const NeedChoice& need);
std::string render_contingency(const ContingencyTable& table);
std::string render_recall(const RecallReport& report);
void write_evaluation_report(const std::filesystem::path& dir, const EvaluationReport& report);

nlohmann::json summary_to_json(const EvaluationSummary& summary);
EvaluationSummary summary_from_json(const nlohmann::json& json);

struct ComparisonRow {
    Method method = Method::KMeans;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::optional<double> total_recall;
    std::optional<double> distinct_recall;
    bool degenerate = false;
};

struct Comparison {
    std::vector<EvaluationSummary> runs;  // sorted by method, k, seed
    std::vector<ComparisonRow> series;
};

Comparison compare_methods(std::vector<EvaluationSummary> runs);
std::string comparison_csv(const Comparison& comparison);
// Reason rows by method columns plus "Max findable", for the runs sharing k and seed.
std::string render_method_table(const std::vector<EvaluationSummary>& runs);
// Line chart of mean total recall (%) against k, one line per method.
std::string render_comparison_svg(const Comparison& comparison);

// Every report.json below `dir`, in path order.
std::vector<EvaluationSummary> read_summaries(const std::filesystem::path& dir);

}  // namespace surveyclust
