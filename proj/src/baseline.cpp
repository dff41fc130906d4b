#include "surveyclust/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "surveyclust/error.hpp"
#include "surveyclust/ingest.hpp"

namespace surveyclust {

NormalityResult normality_check(const std::vector<double>& values) {
    NormalityResult result;
    const std::size_t n = values.size();
    if (n < 3) {
        result.warning = "too few values (" + std::to_string(n) + ") to judge normality";
        return result;
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 <= 0.0) {
        result.warning = "zero variance";
        return result;
    }
    result.skewness = m3 / std::pow(m2, 1.5);
    result.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    if (std::abs(result.skewness) < kMaxNormalSkew && std::abs(result.excess_kurtosis) < kMaxNormalExcessKurtosis) {
        result.verdict = Normality::Normal;
    }
    return result;
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("inverse_normal_cdf: p must lie in (0, 1)");
    // Acklam's coefficients.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the exact CDF.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

std::string to_string(TailBranch branch) { return branch == TailBranch::Normal ? "normal" : "empirical"; }

TailThreshold tail_threshold(const std::vector<std::pair<std::string, double>>& values, double alpha,
                             TailBranch branch) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw InputError("alpha must lie in (0, 0.5)");
    if (values.empty()) throw InputError("tail_threshold needs at least one value");

    TailThreshold t;
    t.branch = branch;
    t.alpha = alpha;
    t.n = values.size();
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (const auto& [id, v] : values) sum += v;
    t.mean = sum / n;
    double ss = 0.0;
    for (const auto& [id, v] : values) ss += (v - t.mean) * (v - t.mean);
    t.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    if (branch == TailBranch::Normal) {
        t.cutoff_value = t.mean + inverse_normal_cdf(alpha) * t.sd;
    } else {
        t.position = static_cast<std::size_t>(std::floor(alpha * (n + 1.0) + 1e-9));
        if (t.position >= 1) {
            std::vector<double> sorted;
            sorted.reserve(values.size());
            for (const auto& [id, v] : values) sorted.push_back(v);
            std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(t.position - 1),
                             sorted.end());
            t.cutoff_value = sorted[t.position - 1];
        }
    }
    if (t.cutoff_value) {
        for (const auto& [id, v] : values) {
            if (v <= *t.cutoff_value) t.flagged_ids.push_back(id);
        }
    }
    return t;
}

std::vector<std::string> baseline_reasons(const SurveySchema& schema) {
    std::vector<std::string> reasons;
    for (const auto& id : schema.baseline_set()) reasons.push_back(schema.at(id).reason_tag());
    return reasons;
}

BaselineResult label_baseline(const std::vector<RespondentRecord>& records, const SurveySchema& schema,
                              double alpha) {
    if (schema.baseline_set().empty()) throw ConfigError("baseline set is empty; nothing to label");
    if (!(alpha > 0.0 && alpha < 0.5)) throw InputError("alpha must lie in (0, 0.5)");

    BaselineResult result;
    const std::size_t n = records.size();
    std::vector<std::vector<std::string>> reasons(n);

    for (const auto& qid : schema.baseline_set()) {
        const QuestionSpec& q = schema.at(qid);
        QuestionOutcome outcome;
        outcome.question_id = qid;
        outcome.reason = q.reason_tag();
        outcome.indicator = q.poverty_indicator;

        std::vector<char> flagged(n, 0);
        if (q.poverty_indicator == PovertyIndicator::BinaryLack) {
            for (std::size_t i = 0; i < n; ++i) {
                auto it = records[i].answers.find(qid);
                flagged[i] = it != records[i].answers.end() && it->second == kBinaryNo;
            }
        } else {
            std::vector<std::pair<std::string, double>> values;
            std::vector<std::size_t> owner;
            values.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                auto it = records[i].answers.find(qid);
                if (it == records[i].answers.end()) continue;
                values.emplace_back(records[i].respondent_id, q.oriented(it->second));
                owner.push_back(i);
            }
            if (values.empty()) {
                result.warnings.push_back("question '" + qid + "' has no answers; nothing flagged");
            } else {
                std::vector<double> raw;
                raw.reserve(values.size());
                for (const auto& [id, v] : values) raw.push_back(v);
                NormalityResult normality = normality_check(raw);
                if (normality.warning) result.warnings.push_back("question '" + qid + "': " + *normality.warning);
                TailBranch branch = normality.verdict == Normality::Normal ? TailBranch::Normal : TailBranch::Empirical;
                if (q.normality == NormalityOverride::Normal) branch = TailBranch::Normal;
                if (q.normality == NormalityOverride::Empirical) branch = TailBranch::Empirical;

                TailThreshold threshold = tail_threshold(values, alpha, branch);
                threshold.question_id = qid;
                if (!threshold.cutoff_value) {
                    result.warnings.push_back("question '" + qid + "': " + std::to_string(values.size()) +
                                              " values are too few for the empirical tail at alpha " +
                                              std::to_string(alpha) + "; nothing flagged");
                } else {
                    for (std::size_t j = 0; j < values.size(); ++j) {
                        flagged[owner[j]] = values[j].second <= *threshold.cutoff_value;
                    }
                }
                outcome.normality = normality;
                outcome.threshold = std::move(threshold);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (flagged[i]) {
                reasons[i].push_back(outcome.reason);
                ++outcome.flagged;
            }
        }
        result.questions.push_back(std::move(outcome));
    }

    result.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        BaselineLabel label;
        label.respondent_id = records[i].respondent_id;
        label.flag = reasons[i].empty() ? 0 : 1;
        label.reasons = std::move(reasons[i]);
        result.labels.push_back(std::move(label));
    }
    return result;
}

std::string labels_to_text(const std::vector<BaselineLabel>& labels) {
    std::ostringstream out;
    out << "respondent_id,flag,reasons\n";
    for (const auto& label : labels) {
        out << label.respondent_id << ',' << label.flag << ',';
        for (std::size_t i = 0; i < label.reasons.size(); ++i) out << (i ? ";" : "") << label.reasons[i];
        out << '\n';
    }
    return out.str();
}

void write_labels_file(const std::filesystem::path& path, const std::vector<BaselineLabel>& labels) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write labels file " + path.string());
    out << labels_to_text(labels);
}

std::vector<BaselineLabel> parse_labels(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ": empty labels file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_cells(line, ',') != std::vector<std::string>{"respondent_id", "flag", "reasons"}) {
        throw ParseError(source + ": labels header must be respondent_id,flag,reasons");
    }
    std::vector<BaselineLabel> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_cells(line, ',');
        if (cells.size() < 2 || cells.size() > 3 || (cells[1] != "0" && cells[1] != "1")) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": malformed label row");
        }
        BaselineLabel label;
        label.respondent_id = cells[0];
        label.flag = cells[1] == "1" ? 1 : 0;
        if (cells.size() == 3 && !cells[2].empty()) label.reasons = split_cells(cells[2], ';');
        if ((label.flag == 1) != !label.reasons.empty()) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": flag and reasons disagree");
        }
        labels.push_back(std::move(label));
    }
    return labels;
}

std::vector<BaselineLabel> read_labels_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file " + path.string());
    return parse_labels(in, path.string());
}

std::string render_baseline_summary(const BaselineResult& result) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    const auto flagged = std::count_if(result.labels.begin(), result.labels.end(),
                                       [](const auto& l) { return l.flag == 1; });
    out << "Baseline labels: " << flagged << " of " << result.labels.size() << " respondents flagged\n\n";
    for (const auto& q : result.questions) {
        out << q.question_id << " [" << q.reason << "] " << to_string(q.indicator) << ": " << q.flagged
            << " flagged";
        if (q.threshold) {
            const auto& t = *q.threshold;
            out << "; branch " << to_string(t.branch) << ", n " << t.n;
            if (q.normality) {
                out << ", skew " << q.normality->skewness << ", excess kurtosis " << q.normality->excess_kurtosis;
            }
            if (t.branch == TailBranch::Empirical) out << ", position " << t.position;
            if (t.cutoff_value) {
                out << ", cutoff " << *t.cutoff_value;
            } else {
                out << ", no cutoff";
            }
        }
        out << '\n';
    }
    for (const auto& w : result.warnings) out << "warning: " << w << '\n';
    return out.str();
}

}  // namespace surveyclust
