#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "surveyclust/schema.hpp"

namespace surveyclust {

enum class Normality { Normal, NotNormal };
enum class TailBranch { Normal, Empirical };

struct NormalityResult {
    Normality verdict = Normality::NotNormal;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::optional<std::string> warning;
};

inline constexpr double kMaxNormalSkew = 0.5;
inline constexpr double kMaxNormalExcessKurtosis = 1.0;

// Moment gate: |skew| < 0.5 and |excess kurtosis| < 1 (population moments).
// Zero variance or fewer than 3 values is never normal.
NormalityResult normality_check(const std::vector<double>& values);

// Standard-normal quantile. Rational approximation refined by one Halley step,
// accurate to well below 1e-8 on (0, 1).
double inverse_normal_cdf(double p);

struct TailThreshold {
    std::string question_id;
    TailBranch branch = TailBranch::Empirical;
    double alpha = 0.05;
    std::size_t n = 0;
    // Normal branch: mean + z_alpha * sd. Empirical branch: the value at sorted
    // position floor(alpha * (n + 1)); unset when that position is below 1.
    std::optional<double> cutoff_value;
    std::size_t position = 0;  // empirical branch only
    double mean = 0.0;
    double sd = 0.0;
    std::vector<std::string> flagged_ids;  // input order
};

// `values` are already oriented so that lower means worse. Ties at the cutoff are all
// flagged. Throws InputError for alpha outside (0, 0.5) or empty input.
TailThreshold tail_threshold(const std::vector<std::pair<std::string, double>>& values, double alpha,
                             TailBranch branch);

struct BaselineLabel {
    std::string respondent_id;
    int flag = 0;
    std::vector<std::string> reasons;  // baseline-set order

    bool operator==(const BaselineLabel&) const = default;
};

struct QuestionOutcome {
    std::string question_id;
    std::string reason;
    PovertyIndicator indicator = PovertyIndicator::None;
    std::optional<NormalityResult> normality;  // quantile questions only
    std::optional<TailThreshold> threshold;    // quantile questions only
    std::size_t flagged = 0;
};

struct BaselineResult {
    std::vector<BaselineLabel> labels;  // record order
    std::vector<QuestionOutcome> questions;
    std::vector<std::string> warnings;
};

// Binary-lack questions flag "no" (code 2) holders directly; quantile questions flag
// their lower tail, choosing the normal or empirical branch with normality_check unless
// the schema overrides it. Throws ConfigError when the baseline set is empty.
BaselineResult label_baseline(const std::vector<RespondentRecord>& records, const SurveySchema& schema,
                              double alpha = 0.05);

std::vector<std::string> baseline_reasons(const SurveySchema& schema);

// `respondent_id,flag,reasons` with reasons joined by ';'.
std::string labels_to_text(const std::vector<BaselineLabel>& labels);
void write_labels_file(const std::filesystem::path& path, const std::vector<BaselineLabel>& labels);
std::vector<BaselineLabel> parse_labels(std::istream& in, const std::string& source = "<stream>");
std::vector<BaselineLabel> read_labels_file(const std::filesystem::path& path);

std::string render_baseline_summary(const BaselineResult& result);

std::string to_string(TailBranch branch);

}  // namespace surveyclust
