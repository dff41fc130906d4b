#include "surveyclust/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "surveyclust/error.hpp"

namespace surveyclust {

namespace {

std::map<std::string, int> assignment_index(const ClusterModel& model) {
    if (model.assignments.size() != model.respondent_ids.size()) {
        throw InputError("cluster model has " + std::to_string(model.assignments.size()) + " assignments for " +
                         std::to_string(model.respondent_ids.size()) + " respondents");
    }
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < model.respondent_ids.size(); ++i) {
        const int c = model.assignments[i];
        if (c < 1 || static_cast<std::size_t>(c) > model.k) {
            throw InputError("cluster model assigns respondent " + model.respondent_ids[i] + " to cluster " +
                             std::to_string(c) + " outside 1.." + std::to_string(model.k));
        }
        index.emplace(model.respondent_ids[i], c);
    }
    return index;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

std::string fixed(double value, int decimals) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(decimals) << value;
    return out.str();
}

std::string trim_right(std::string s) {
    s.erase(s.find_last_not_of(' ') + 1);
    return s;
}

// Left-aligned first column, right-aligned remaining columns, two spaces of padding.
std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        std::ostringstream line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j == 0) {
                line << std::left << std::setw(static_cast<int>(width[0])) << row[0];
            } else {
                line << std::right << std::setw(static_cast<int>(width[j] + 2)) << row[j];
            }
        }
        out << trim_right(line.str()) << '\n';
    }
    return out.str();
}

RecallCell make_cell(std::size_t count, std::size_t total) {
    RecallCell cell{count, total, std::nullopt};
    if (total > 0) cell.recall = static_cast<double>(count) / static_cast<double>(total);
    return cell;
}

nlohmann::json cell_to_json(const RecallCell& cell) {
    return {{"count", cell.count},
            {"total", cell.total},
            {"recall", cell.recall ? nlohmann::json(*cell.recall) : nlohmann::json(nullptr)}};
}

RecallCell cell_from_json(const nlohmann::json& json) {
    RecallCell cell;
    cell.count = json.at("count").get<std::size_t>();
    cell.total = json.at("total").get<std::size_t>();
    if (!json.at("recall").is_null()) cell.recall = json.at("recall").get<double>();
    return cell;
}

}  // namespace

ClusterProfile profile_clusters(const DataMatrix& data, const ClusterModel& model) {
    const auto index = assignment_index(model);
    ClusterProfile profile;
    profile.method = model.method;
    profile.k = model.k;
    profile.question_ids = data.question_ids();
    profile.summary = model.method == Method::KModes ? SummaryKind::Mode : SummaryKind::Mean;
    profile.sizes.assign(model.k, 0);

    std::vector<std::vector<std::size_t>> members(model.k);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto it = index.find(data.respondent_ids()[i]);
        if (it == index.end()) {
            throw InputError("respondent " + data.respondent_ids()[i] + " has no cluster assignment");
        }
        members[static_cast<std::size_t>(it->second - 1)].push_back(i);
    }
    const std::size_t p = data.cols();
    for (std::size_t c = 0; c < model.k; ++c) {
        profile.sizes[c] = members[c].size();
        std::vector<double> summary(p, 0.0);
        if (members[c].empty()) {
            summary.assign(p, std::nan(""));
        } else if (profile.summary == SummaryKind::Mode) {
            const auto modes = column_modes(data, members[c]);
            std::transform(modes.begin(), modes.end(), summary.begin(), [](int v) { return double(v); });
        } else {
            for (std::size_t i : members[c]) {
                for (std::size_t j = 0; j < p; ++j) summary[j] += data(i, j);
            }
            for (double& v : summary) v /= static_cast<double>(members[c].size());
        }
        profile.summaries.push_back(std::move(summary));
    }
    return profile;
}

NeedChoice pick_need_cluster(const ClusterProfile& profile, const SurveySchema& schema, const NeedPolicy& policy) {
    NeedChoice choice;
    const std::size_t k = profile.k;
    if (k == 0) throw InputError("cannot pick a need cluster from an empty profile");

    std::vector<std::size_t> columns;
    for (std::size_t j = 0; j < profile.question_ids.size(); ++j) {
        const auto& baseline = schema.baseline_set();
        if (std::find(baseline.begin(), baseline.end(), profile.question_ids[j]) != baseline.end()) {
            columns.push_back(j);
        }
    }
    if (columns.empty()) {
        columns.resize(profile.question_ids.size());
        std::iota(columns.begin(), columns.end(), std::size_t{0});
    }

    choice.scores.assign(k, 0.0);
    for (std::size_t j : columns) {
        choice.scored_questions.push_back(profile.question_ids[j]);
        std::vector<double> values;
        for (std::size_t c = 0; c < k; ++c) {
            if (profile.sizes[c] > 0) values.push_back(profile.summaries[c][j]);
        }
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(values.size()));
        if (!(sd > 0.0)) continue;
        const QuestionSpec* spec = schema.find(profile.question_ids[j]);
        const double sign = spec && spec->orientation == Orientation::HigherIsWorse ? 1.0 : -1.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (profile.sizes[c] > 0) choice.scores[c] += sign * (profile.summaries[c][j] - mean) / sd;
        }
    }

    if (policy.manual_cluster) {
        const std::size_t m = *policy.manual_cluster;
        if (m < 1 || m > k) {
            throw ConfigError("need cluster " + std::to_string(m) + " is outside 1.." + std::to_string(k));
        }
        choice.cluster = m;
        choice.manual = true;
        choice.rationale = "manual: cluster " + std::to_string(m) + " chosen by override";
        return choice;
    }

    auto equal = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); };
    std::size_t best = k;
    for (std::size_t c = 0; c < k; ++c) {
        if (profile.sizes[c] == 0) continue;
        if (best == k || choice.scores[c] > choice.scores[best]) best = c;
    }
    std::vector<std::size_t> tied;
    for (std::size_t c = 0; c < k; ++c) {
        if (profile.sizes[c] > 0 && equal(choice.scores[c], choice.scores[best])) tied.push_back(c);
    }
    best = *std::min_element(tied.begin(), tied.end(), [&](std::size_t a, std::size_t b) {
        return profile.sizes[a] != profile.sizes[b] ? profile.sizes[a] < profile.sizes[b] : a < b;
    });
    choice.cluster = best + 1;
    choice.tie = tied.size() > 1;

    std::ostringstream why;
    why << "scored: cluster " << choice.cluster << " has the highest need score (" << fixed(choice.scores[best], 3)
        << ") over " << join(choice.scored_questions, ", ");
    if (choice.tie) {
        std::vector<std::string> names;
        for (std::size_t c : tied) names.push_back(std::to_string(c + 1));
        why << "; tie between clusters " << join(names, ", ") << " broken by smallest size (" << profile.sizes[best]
            << ")";
    }
    choice.rationale = why.str();
    return choice;
}

ContingencyTable contingency(const std::vector<BaselineLabel>& labels, const ClusterModel& model,
                             const std::vector<std::string>& reason_order) {
    const auto index = assignment_index(model);
    std::set<std::string> label_ids;
    for (const auto& label : labels) {
        if (!label_ids.insert(label.respondent_id).second) {
            throw InputError("duplicate respondent " + label.respondent_id + " in labels");
        }
        if (!index.count(label.respondent_id)) {
            throw InputError("labelled respondent " + label.respondent_id + " is missing from the cluster model");
        }
    }
    for (const auto& [id, cluster] : index) {
        if (!label_ids.count(id)) throw InputError("clustered respondent " + id + " has no baseline label");
    }

    ContingencyTable table;
    table.k = model.k;
    table.reasons = reason_order;
    for (const auto& label : labels) {
        for (const auto& r : label.reasons) {
            if (std::find(table.reasons.begin(), table.reasons.end(), r) == table.reasons.end()) {
                table.reasons.push_back(r);
            }
        }
    }
    table.counts.assign(table.reasons.size(), std::vector<std::size_t>(table.k, 0));
    table.flagged_students.assign(table.k, 0);
    for (const auto& label : labels) {
        const auto c = static_cast<std::size_t>(index.at(label.respondent_id) - 1);
        for (const auto& r : label.reasons) {
            const auto row = static_cast<std::size_t>(
                std::find(table.reasons.begin(), table.reasons.end(), r) - table.reasons.begin());
            ++table.counts[row][c];
        }
        if (label.flag != 0) ++table.flagged_students[c];
    }
    table.row_sums.assign(table.reasons.size(), 0);
    table.col_sums.assign(table.k, 0);
    for (std::size_t r = 0; r < table.reasons.size(); ++r) {
        for (std::size_t c = 0; c < table.k; ++c) {
            table.row_sums[r] += table.counts[r][c];
            table.col_sums[c] += table.counts[r][c];
        }
        table.total += table.row_sums[r];
    }
    table.flagged_total = std::accumulate(table.flagged_students.begin(), table.flagged_students.end(), std::size_t{0});
    return table;
}

RecallReport recall_report(const ContingencyTable& table, std::size_t need_cluster) {
    if (need_cluster < 1 || need_cluster > table.k) {
        throw InputError("need cluster " + std::to_string(need_cluster) + " is outside 1.." + std::to_string(table.k));
    }
    const std::size_t c = need_cluster - 1;
    RecallReport report;
    report.need_cluster = need_cluster;
    report.reasons = table.reasons;
    for (std::size_t r = 0; r < table.reasons.size(); ++r) {
        report.per_reason.push_back(make_cell(table.counts[r][c], table.row_sums[r]));
    }
    report.total = make_cell(table.col_sums[c], table.total);
    report.distinct = make_cell(table.flagged_students[c], table.flagged_total);
    return report;
}

std::string format_count_percent(const RecallCell& cell) {
    if (!cell.recall) return std::to_string(cell.count) + " (n/a)";
    return std::to_string(cell.count) + " (" + fixed(100.0 * *cell.recall, 1) + "%)";
}

bool is_degenerate(double need_share, double largest_share, const DegeneracyThresholds& thresholds) {
    return largest_share > thresholds.high || need_share > thresholds.high || need_share < thresholds.low;
}

EvaluationReport evaluate(const DataMatrix& data, const ClusterModel& model, const std::vector<BaselineLabel>& labels,
                          const SurveySchema& schema, const NeedPolicy& policy,
                          const DegeneracyThresholds& thresholds) {
    EvaluationReport report;
    report.profile = profile_clusters(data, model);
    report.need = pick_need_cluster(report.profile, schema, policy);
    report.table = contingency(labels, model, baseline_reasons(schema));
    report.recall = recall_report(report.table, report.need.cluster);
    report.warnings = model.warnings;

    EvaluationSummary& s = report.summary;
    s.method = model.method;
    s.k_requested = model.k_requested;
    s.k = model.k;
    s.seed = model.seed;
    s.sizes = model.cluster_sizes();
    s.n = std::accumulate(s.sizes.begin(), s.sizes.end(), std::size_t{0});
    s.need_cluster = report.need.cluster;
    s.need_manual = report.need.manual;
    s.need_size = s.sizes[s.need_cluster - 1];
    if (s.n > 0) {
        s.need_share = static_cast<double>(s.need_size) / static_cast<double>(s.n);
        s.largest_share = static_cast<double>(*std::max_element(s.sizes.begin(), s.sizes.end())) /
                          static_cast<double>(s.n);
    }
    s.degenerate = is_degenerate(s.need_share, s.largest_share, thresholds);
    s.reasons = report.recall.reasons;
    s.per_reason = report.recall.per_reason;
    s.total = report.recall.total;
    s.distinct = report.recall.distinct;
    if (s.degenerate) {
        report.warnings.push_back("degenerate clustering: largest cluster holds " + fixed(100.0 * s.largest_share, 1) +
                                  "% and the need cluster " + fixed(100.0 * s.need_share, 1) + "% of respondents");
    }
    return report;
}

std::string method_display_name(Method method) {
    switch (method) {
        case Method::KMeans: return "K-means";
        case Method::KModes: return "K-modes";
        case Method::HclustComplete: return "Complete linkage";
        case Method::HclustSingle: return "Single linkage";
        case Method::HclustAverage: return "Average linkage";
    }
    return "unknown";
}

std::string render_profile(const ClusterProfile& profile, const NeedChoice& need) {
    std::ostringstream out;
    std::vector<std::string> sizes;
    for (std::size_t s : profile.sizes) sizes.push_back(std::to_string(s));
    out << method_display_name(profile.method) << " clustering with " << profile.k << " clusters of size "
        << join(sizes, ", ") << "\n\n";

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Cluster"});
    for (const auto& q : profile.question_ids) rows[0].push_back(q);
    for (std::size_t c = 0; c < profile.k; ++c) {
        std::vector<std::string> row{std::to_string(c + 1)};
        for (double v : profile.summaries[c]) {
            if (std::isnan(v)) {
                row.push_back("-");
            } else {
                row.push_back(profile.summary == SummaryKind::Mode ? std::to_string(static_cast<int>(v)) : fixed(v, 2));
            }
        }
        rows.push_back(std::move(row));
    }
    out << render_grid(rows) << '\n';
    out << "Cluster " << need.cluster << " is most impoverished (" << need.rationale << ")\n";
    return out.str();
}

std::string render_contingency(const ContingencyTable& table) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Reason"});
    for (std::size_t c = 0; c < table.k; ++c) rows[0].push_back(std::to_string(c + 1));
    rows[0].push_back("SUM");
    for (std::size_t r = 0; r < table.reasons.size(); ++r) {
        std::vector<std::string> row{table.reasons[r]};
        for (std::size_t v : table.counts[r]) row.push_back(std::to_string(v));
        row.push_back(std::to_string(table.row_sums[r]));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> sum_row{"SUM"};
    for (std::size_t v : table.col_sums) sum_row.push_back(std::to_string(v));
    sum_row.push_back(std::to_string(table.total));
    rows.push_back(std::move(sum_row));
    std::vector<std::string> student_row{"Students"};
    for (std::size_t v : table.flagged_students) student_row.push_back(std::to_string(v));
    student_row.push_back(std::to_string(table.flagged_total));
    rows.push_back(std::move(student_row));
    return render_grid(rows);
}

std::string render_recall(const RecallReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Reason", "Cluster " + std::to_string(report.need_cluster), "Max findable"});
    for (std::size_t r = 0; r < report.reasons.size(); ++r) {
        rows.push_back({report.reasons[r], format_count_percent(report.per_reason[r]),
                        std::to_string(report.per_reason[r].total)});
    }
    rows.push_back({"Sum", format_count_percent(report.total), std::to_string(report.total.total)});
    rows.push_back({"Students", format_count_percent(report.distinct), std::to_string(report.distinct.total)});
    return render_grid(rows);
}

nlohmann::json summary_to_json(const EvaluationSummary& s) {
    nlohmann::json per_reason = nlohmann::json::array();
    for (std::size_t r = 0; r < s.reasons.size(); ++r) {
        nlohmann::json cell = cell_to_json(s.per_reason[r]);
        cell["reason"] = s.reasons[r];
        per_reason.push_back(std::move(cell));
    }
    return {{"method", to_string(s.method)},
            {"k_requested", s.k_requested},
            {"k", s.k},
            {"seed", s.seed},
            {"n", s.n},
            {"sizes", s.sizes},
            {"need_cluster", s.need_cluster},
            {"need_manual", s.need_manual},
            {"need_size", s.need_size},
            {"need_share", s.need_share},
            {"largest_share", s.largest_share},
            {"degenerate", s.degenerate},
            {"per_reason", per_reason},
            {"total", cell_to_json(s.total)},
            {"distinct", cell_to_json(s.distinct)}};
}

EvaluationSummary summary_from_json(const nlohmann::json& json) {
    try {
        EvaluationSummary s;
        s.method = parse_method(json.at("method").get<std::string>());
        s.k_requested = json.at("k_requested").get<std::size_t>();
        s.k = json.at("k").get<std::size_t>();
        s.seed = json.at("seed").get<std::uint64_t>();
        s.n = json.at("n").get<std::size_t>();
        s.sizes = json.at("sizes").get<std::vector<std::size_t>>();
        s.need_cluster = json.at("need_cluster").get<std::size_t>();
        s.need_manual = json.at("need_manual").get<bool>();
        s.need_size = json.at("need_size").get<std::size_t>();
        s.need_share = json.at("need_share").get<double>();
        s.largest_share = json.at("largest_share").get<double>();
        s.degenerate = json.at("degenerate").get<bool>();
        for (const auto& cell : json.at("per_reason")) {
            s.reasons.push_back(cell.at("reason").get<std::string>());
            s.per_reason.push_back(cell_from_json(cell));
        }
        s.total = cell_from_json(json.at("total"));
        s.distinct = cell_from_json(json.at("distinct"));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed evaluation summary: ") + e.what());
    }
}

void write_evaluation_report(const std::filesystem::path& dir, const EvaluationReport& report) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create report directory " + dir.string() + ": " + ec.message());

    std::ostringstream text;
    text << render_profile(report.profile, report.need) << '\n';
    text << "Baseline reasons by cluster\n\n" << render_contingency(report.table) << '\n';
    text << "Recall in need cluster " << report.need.cluster << "\n\n" << render_recall(report.recall);
    if (report.summary.degenerate) text << "\nDegenerate: yes\n";
    for (const auto& w : report.warnings) text << "warning: " << w << '\n';

    nlohmann::json profile = {{"summary", report.profile.summary == SummaryKind::Mode ? "mode" : "mean"},
                              {"questions", report.profile.question_ids},
                              {"sizes", report.profile.sizes}};
    nlohmann::json summaries = nlohmann::json::array();
    for (const auto& row : report.profile.summaries) {
        nlohmann::json r = nlohmann::json::array();
        for (double v : row) r.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        summaries.push_back(std::move(r));
    }
    profile["summaries"] = std::move(summaries);
    nlohmann::json json = {
        {"format", "surveyclust-evaluation/1"},
        {"summary", summary_to_json(report.summary)},
        {"profile", profile},
        {"need",
         {{"cluster", report.need.cluster},
          {"manual", report.need.manual},
          {"tie", report.need.tie},
          {"scores", report.need.scores},
          {"scored_questions", report.need.scored_questions},
          {"rationale", report.need.rationale}}},
        {"contingency",
         {{"reasons", report.table.reasons},
          {"counts", report.table.counts},
          {"flagged_students", report.table.flagged_students}}},
        {"warnings", report.warnings}};

    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        if (!out) throw IoError("cannot write " + (dir / name).string());
    };
    write("report.txt", text.str());
    write("report.json", json.dump(1) + "\n");
}

Comparison compare_methods(std::vector<EvaluationSummary> runs) {
    std::stable_sort(runs.begin(), runs.end(), [](const EvaluationSummary& a, const EvaluationSummary& b) {
        return std::tie(a.method, a.k_requested, a.seed) < std::tie(b.method, b.k_requested, b.seed);
    });
    Comparison comparison;
    for (const auto& run : runs) {
        comparison.series.push_back({run.method, run.k_requested, run.seed, run.total.recall, run.distinct.recall,
                                     run.degenerate});
    }
    comparison.runs = std::move(runs);
    return comparison;
}

std::string comparison_csv(const Comparison& comparison) {
    std::ostringstream out;
    out << "method,k,seed,clusters,n,need_cluster,need_size,need_share,largest_share,captured,incidences,"
           "total_recall,distinct_captured,distinct_flagged,distinct_recall,degenerate\n";
    auto recall = [](const std::optional<double>& v) { return v ? fixed(*v, 6) : std::string("NA"); };
    for (const auto& r : comparison.runs) {
        out << to_string(r.method) << ',' << r.k_requested << ',' << r.seed << ',' << r.k << ',' << r.n << ','
            << r.need_cluster << ',' << r.need_size << ',' << fixed(r.need_share, 6) << ','
            << fixed(r.largest_share, 6) << ',' << r.total.count << ',' << r.total.total << ','
            << recall(r.total.recall) << ',' << r.distinct.count << ',' << r.distinct.total << ','
            << recall(r.distinct.recall) << ',' << (r.degenerate ? "yes" : "no") << '\n';
    }
    return out.str();
}

std::string render_method_table(const std::vector<EvaluationSummary>& runs) {
    if (runs.empty()) throw InputError("no evaluation runs to tabulate");
    const auto& first = runs.front();
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Reason"});
    for (const auto& run : runs) {
        if (run.reasons != first.reasons || run.total.total != first.total.total) {
            throw InputError("evaluation runs disagree on the baseline reasons");
        }
        rows[0].push_back(method_display_name(run.method));
    }
    rows[0].push_back("Max findable");
    for (std::size_t r = 0; r < first.reasons.size(); ++r) {
        std::vector<std::string> row{first.reasons[r]};
        for (const auto& run : runs) row.push_back(format_count_percent(run.per_reason[r]));
        row.push_back(std::to_string(first.per_reason[r].total));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> sum_row{"Sum"};
    std::vector<std::string> student_row{"Students"};
    for (const auto& run : runs) {
        sum_row.push_back(format_count_percent(run.total));
        student_row.push_back(format_count_percent(run.distinct));
    }
    sum_row.push_back(std::to_string(first.total.total));
    student_row.push_back(std::to_string(first.distinct.total));
    rows.push_back(std::move(sum_row));
    rows.push_back(std::move(student_row));

    std::ostringstream out;
    out << "Comparison of methods for cluster size k = " << first.k_requested << " (seed " << first.seed << ")\n\n"
        << render_grid(rows);
    return out.str();
}

std::string render_comparison_svg(const Comparison& comparison) {
    constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 170, kTop = 30, kBottom = 50;
    static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::map<Method, std::map<std::size_t, std::pair<double, std::size_t>>> means;
    std::size_t k_min = 0, k_max = 0;
    bool any = false;
    for (const auto& row : comparison.series) {
        if (!any || row.k < k_min) k_min = row.k;
        if (!any || row.k > k_max) k_max = row.k;
        any = true;
        auto& cell = means[row.method][row.k];
        if (row.total_recall) {
            cell.first += 100.0 * *row.total_recall;
            ++cell.second;
        }
    }
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    auto x_of = [&](std::size_t k) {
        if (k_max == k_min) return kLeft + plot_w / 2;
        return kLeft + plot_w * static_cast<double>(k - k_min) / static_cast<double>(k_max - k_min);
    };
    auto y_of = [&](double pct) { return kTop + plot_h * (1.0 - pct / 100.0); };

    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
        << "\" stroke=\"black\"/>\n";
    for (int pct = 0; pct <= 100; pct += 20) {
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y_of(pct) + 4 << "\" text-anchor=\"end\">" << pct
            << "%</text>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << y_of(pct) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
            << y_of(pct) << "\" stroke=\"#dddddd\"/>\n";
    }
    if (any) {
        for (std::size_t k = k_min; k <= k_max; ++k) {
            out << "<text x=\"" << x_of(k) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">" << k
                << "</text>\n";
        }
    }
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">number of clusters k</text>\n";
    out << "<text x=\"15\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
        << kTop + plot_h / 2 << ")\">need-cluster recall</text>\n";

    std::size_t line = 0;
    for (const auto& [method, by_k] : means) {
        const char* color = kColors[line % std::size(kColors)];
        std::ostringstream points;
        points << std::fixed << std::setprecision(2);
        std::vector<std::pair<double, double>> marks;
        for (const auto& [k, acc] : by_k) {
            if (acc.second == 0) continue;
            const double pct = acc.first / static_cast<double>(acc.second);
            marks.emplace_back(x_of(k), y_of(pct));
            points << (marks.size() > 1 ? " " : "") << x_of(k) << ',' << y_of(pct);
        }
        if (marks.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points.str()
                << "\"/>\n";
        }
        for (const auto& [x, y] : marks) {
            out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
        }
        const double ly = kTop + 10 + 20.0 * static_cast<double>(line);
        out << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 35
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << ly + 4 << "\">" << method_display_name(method)
            << "</text>\n";
        ++line;
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<EvaluationSummary> read_summaries(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IoError("report directory " + dir.string() + " not found");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "report.json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<EvaluationSummary> summaries;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IoError("cannot read " + file.string());
        nlohmann::json json;
        try {
            json = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(file.string() + ": " + e.what());
        }
        if (!json.contains("summary")) throw ParseError(file.string() + ": missing evaluation summary");
        summaries.push_back(summary_from_json(json.at("summary")));
    }
    return summaries;
}

}  // namespace surveyclust
