#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "surveyclust/rule_expr.hpp"

namespace surveyclust {

enum class QuestionKind { Binary, Likert };
enum class PovertyIndicator { None, QuantileLowerTail, BinaryLack };
enum class Orientation { LowerIsWorse, HigherIsWorse };
// Per-question override of the automatic normality gate used by the labeler.
enum class NormalityOverride { Auto, Normal, Empirical };

inline constexpr int kBinaryYes = 1;
inline constexpr int kBinaryNo = 2;

struct QuestionSpec {
    std::string id;
    std::string label;
    QuestionKind kind = QuestionKind::Binary;
    int hi = 2;  // lo is always 1; binary questions use 1 = yes, 2 = no
    PovertyIndicator poverty_indicator = PovertyIndicator::None;
    Orientation orientation = Orientation::LowerIsWorse;
    std::string reason;  // reason tag reported when this question flags a respondent
    NormalityOverride normality = NormalityOverride::Auto;

    static constexpr int lo() { return 1; }
    bool admits(int code) const { return code >= lo() && code <= hi; }

    // Maps a code so that lower always means worse.
    double oriented(int code) const {
        return orientation == Orientation::LowerIsWorse ? code : (lo() + hi) - code;
    }

    const std::string& reason_tag() const { return reason.empty() ? id : reason; }

    bool operator==(const QuestionSpec&) const = default;
};

class ConsistencyRule {
public:
    ConsistencyRule(std::string id, std::string expression, std::string description = {});

    const std::string& id() const { return id_; }
    const std::string& expression() const { return expression_; }
    const std::string& description() const { return description_; }
    const std::vector<std::string>& involved() const { return expr_.identifiers(); }

    // Every involved question must be present in `answers`.
    bool holds(const std::map<std::string, int>& answers) const;

    bool operator==(const ConsistencyRule& other) const {
        return id_ == other.id_ && expression_ == other.expression_ && description_ == other.description_;
    }

private:
    std::string id_;
    std::string expression_;
    std::string description_;
    RuleExpr expr_;
};

inline constexpr std::size_t kMaxRuleQuestions = 3;

class SurveySchema {
public:
    SurveySchema() = default;
    // Throws ConfigError when any schema invariant is violated.
    SurveySchema(std::string name, std::vector<QuestionSpec> questions, std::vector<ConsistencyRule> rules,
                 std::vector<std::string> baseline_set);

    const std::string& name() const { return name_; }
    const std::vector<QuestionSpec>& questions() const { return questions_; }
    const std::vector<ConsistencyRule>& rules() const { return rules_; }
    const std::vector<std::string>& baseline_set() const { return baseline_set_; }

    const QuestionSpec* find(const std::string& id) const;
    const QuestionSpec& at(const std::string& id) const;
    std::vector<std::string> question_ids() const;

    SurveySchema without_rules() const;

    bool operator==(const SurveySchema&) const = default;

private:
    std::string name_;
    std::vector<QuestionSpec> questions_;
    std::vector<ConsistencyRule> rules_;
    std::vector<std::string> baseline_set_;
    std::map<std::string, std::size_t> index_;
};

struct RespondentRecord {
    std::string respondent_id;
    std::optional<int> gender;
    std::map<std::string, int> answers;  // absent key = missing answer

    bool operator==(const RespondentRecord&) const = default;
};

enum class VerdictKind { Clean, OutOfRange, Inconsistent, Incomplete };

struct ValidationVerdict {
    std::vector<std::string> out_of_range;  // question ids, schema order
    std::vector<std::string> inconsistent;  // rule ids, schema order
    std::vector<std::string> incomplete;    // question ids, schema order

    // Reporting precedence: out_of_range > inconsistent > incomplete.
    VerdictKind kind() const;
    bool clean() const { return kind() == VerdictKind::Clean; }
    bool operator==(const ValidationVerdict&) const = default;
};

// Rules are only evaluated when every involved answer is present and in range.
ValidationVerdict validate_record(const RespondentRecord& record, const SurveySchema& schema);

std::string to_string(QuestionKind kind);
std::string to_string(PovertyIndicator indicator);
std::string to_string(Orientation orientation);
std::string to_string(NormalityOverride normality);
std::string to_string(VerdictKind kind);

SurveySchema parse_schema(const std::string& text);
SurveySchema load_schema(const std::filesystem::path& path);
std::string schema_to_text(const SurveySchema& schema);
void save_schema(const SurveySchema& schema, const std::filesystem::path& path);

}  // namespace surveyclust
