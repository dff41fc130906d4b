#include "surveyclust/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "surveyclust/error.hpp"

namespace surveyclust {

ConsistencyRule::ConsistencyRule(std::string id, std::string expression, std::string description)
    : id_(std::move(id)),
      expression_(std::move(expression)),
      description_(std::move(description)),
      expr_(RuleExpr::parse(expression_)) {
    if (expr_.identifiers().empty()) throw ConfigError("rule '" + id_ + "' references no question");
    if (expr_.identifiers().size() > kMaxRuleQuestions) {
        throw ConfigError("rule '" + id_ + "' references more than " + std::to_string(kMaxRuleQuestions) +
                          " questions");
    }
}

bool ConsistencyRule::holds(const std::map<std::string, int>& answers) const {
    return expr_.evaluate([&](std::string_view id) -> std::int64_t {
               return answers.at(std::string(id));
           }) != 0;
}

SurveySchema::SurveySchema(std::string name, std::vector<QuestionSpec> questions,
                           std::vector<ConsistencyRule> rules, std::vector<std::string> baseline_set)
    : name_(std::move(name)),
      questions_(std::move(questions)),
      rules_(std::move(rules)),
      baseline_set_(std::move(baseline_set)) {
    if (questions_.empty()) throw ConfigError("schema has no questions");
    for (std::size_t i = 0; i < questions_.size(); ++i) {
        const QuestionSpec& q = questions_[i];
        if (q.id.empty()) throw ConfigError("question " + std::to_string(i + 1) + " has an empty id");
        if (q.id == "respondent_id" || q.id == "gender") {
            throw ConfigError("question id '" + q.id + "' is reserved");
        }
        if (!index_.emplace(q.id, i).second) throw ConfigError("duplicate question id '" + q.id + "'");
        if (q.id.find_first_of(",; \t\"") != std::string::npos) {
            throw ConfigError("question id '" + q.id + "' contains a delimiter, quote or blank");
        }
        if (q.reason.find_first_of(",;\"") != std::string::npos) {
            throw ConfigError("reason tag of question '" + q.id + "' contains ',', ';' or a quote");
        }
        if (q.kind == QuestionKind::Binary && q.hi != 2) {
            throw ConfigError("binary question '" + q.id + "' must admit exactly codes {1, 2}");
        }
        if (q.kind == QuestionKind::Likert && q.hi != 4 && q.hi != 5) {
            throw ConfigError("likert question '" + q.id + "' must have 4 or 5 levels");
        }
        if (q.poverty_indicator == PovertyIndicator::BinaryLack && q.kind != QuestionKind::Binary) {
            throw ConfigError("question '" + q.id + "' is binary-lack but not binary");
        }
    }
    std::set<std::string> rule_ids;
    for (const auto& rule : rules_) {
        if (!rule_ids.insert(rule.id()).second) throw ConfigError("duplicate rule id '" + rule.id() + "'");
        for (const auto& id : rule.involved()) {
            if (!index_.contains(id)) {
                throw ConfigError("rule '" + rule.id() + "' references unknown question '" + id + "'");
            }
        }
    }
    std::set<std::string> baseline;
    for (const auto& id : baseline_set_) {
        const QuestionSpec* q = find(id);
        if (q == nullptr) throw ConfigError("baseline question '" + id + "' is not in the schema");
        if (q->poverty_indicator == PovertyIndicator::None) {
            throw ConfigError("baseline question '" + id + "' has no poverty indicator");
        }
        if (!baseline.insert(id).second) throw ConfigError("baseline question '" + id + "' listed twice");
    }
    for (const auto& q : questions_) {
        if (q.poverty_indicator != PovertyIndicator::None && !baseline.contains(q.id)) {
            throw ConfigError("question '" + q.id + "' has a poverty indicator but is not in the baseline set");
        }
    }
}

const QuestionSpec* SurveySchema::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &questions_[it->second];
}

const QuestionSpec& SurveySchema::at(const std::string& id) const {
    const QuestionSpec* q = find(id);
    if (q == nullptr) throw InputError("unknown question '" + id + "'");
    return *q;
}

std::vector<std::string> SurveySchema::question_ids() const {
    std::vector<std::string> ids;
    ids.reserve(questions_.size());
    for (const auto& q : questions_) ids.push_back(q.id);
    return ids;
}

SurveySchema SurveySchema::without_rules() const { return SurveySchema(name_, questions_, {}, baseline_set_); }

VerdictKind ValidationVerdict::kind() const {
    if (!out_of_range.empty()) return VerdictKind::OutOfRange;
    if (!inconsistent.empty()) return VerdictKind::Inconsistent;
    if (!incomplete.empty()) return VerdictKind::Incomplete;
    return VerdictKind::Clean;
}

ValidationVerdict validate_record(const RespondentRecord& record, const SurveySchema& schema) {
    ValidationVerdict verdict;
    for (const auto& q : schema.questions()) {
        auto it = record.answers.find(q.id);
        if (it == record.answers.end()) {
            verdict.incomplete.push_back(q.id);
        } else if (!q.admits(it->second)) {
            verdict.out_of_range.push_back(q.id);
        }
    }
    for (const auto& rule : schema.rules()) {
        const bool evaluable = std::all_of(rule.involved().begin(), rule.involved().end(), [&](const auto& id) {
            auto it = record.answers.find(id);
            return it != record.answers.end() && schema.at(id).admits(it->second);
        });
        if (evaluable && !rule.holds(record.answers)) verdict.inconsistent.push_back(rule.id());
    }
    return verdict;
}

std::string to_string(QuestionKind kind) { return kind == QuestionKind::Binary ? "binary" : "likert"; }

std::string to_string(PovertyIndicator indicator) {
    switch (indicator) {
        case PovertyIndicator::QuantileLowerTail: return "quantile-lower-tail";
        case PovertyIndicator::BinaryLack: return "binary-lack";
        case PovertyIndicator::None: break;
    }
    return "none";
}

std::string to_string(Orientation orientation) {
    return orientation == Orientation::LowerIsWorse ? "lower-is-worse" : "higher-is-worse";
}

std::string to_string(NormalityOverride normality) {
    switch (normality) {
        case NormalityOverride::Normal: return "normal";
        case NormalityOverride::Empirical: return "empirical";
        case NormalityOverride::Auto: break;
    }
    return "auto";
}

std::string to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::OutOfRange: return "out_of_range";
        case VerdictKind::Inconsistent: return "inconsistent";
        case VerdictKind::Incomplete: return "incomplete";
        case VerdictKind::Clean: break;
    }
    return "clean";
}

namespace {

template <typename Enum>
Enum parse_enum(const std::string& field, const std::string& text,
                std::initializer_list<std::pair<const char*, Enum>> options) {
    for (const auto& [name, value] : options) {
        if (text == name) return value;
    }
    std::string allowed;
    for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    throw ConfigError("field '" + field + "': unknown value '" + text + "' (expected one of " + allowed + ")");
}

std::string scalar_or(const YAML::Node& node, const char* key, const std::string& fallback) {
    const YAML::Node child = node[key];
    return child ? child.as<std::string>() : fallback;
}

QuestionSpec parse_question(const YAML::Node& node) {
    QuestionSpec q;
    if (!node["id"]) throw ConfigError("question entry without 'id'");
    q.id = node["id"].as<std::string>();
    q.label = scalar_or(node, "label", "");
    q.kind = parse_enum<QuestionKind>(q.id + ".kind", scalar_or(node, "kind", "binary"),
                                      {{"binary", QuestionKind::Binary}, {"likert", QuestionKind::Likert}});
    if (q.kind == QuestionKind::Likert) {
        if (!node["levels"]) throw ConfigError("likert question '" + q.id + "' needs 'levels'");
        q.hi = node["levels"].as<int>();
    } else {
        q.hi = 2;
    }
    q.poverty_indicator = parse_enum<PovertyIndicator>(
        q.id + ".poverty_indicator", scalar_or(node, "poverty_indicator", "none"),
        {{"none", PovertyIndicator::None},
         {"quantile-lower-tail", PovertyIndicator::QuantileLowerTail},
         {"binary-lack", PovertyIndicator::BinaryLack}});
    const std::string default_orientation = q.kind == QuestionKind::Binary ? "higher-is-worse" : "lower-is-worse";
    q.orientation = parse_enum<Orientation>(
        q.id + ".orientation", scalar_or(node, "orientation", default_orientation),
        {{"lower-is-worse", Orientation::LowerIsWorse}, {"higher-is-worse", Orientation::HigherIsWorse}});
    q.reason = scalar_or(node, "reason", "");
    q.normality = parse_enum<NormalityOverride>(q.id + ".normality", scalar_or(node, "normality", "auto"),
                                                {{"auto", NormalityOverride::Auto},
                                                 {"normal", NormalityOverride::Normal},
                                                 {"empirical", NormalityOverride::Empirical}});
    return q;
}

}  // namespace

SurveySchema parse_schema(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("schema is not valid YAML: ") + e.what());
    }
    try {
        if (!root.IsMap()) throw ConfigError("schema root must be a mapping");
        std::vector<QuestionSpec> questions;
        if (!root["questions"] || !root["questions"].IsSequence()) {
            throw ConfigError("schema needs a 'questions' list");
        }
        for (const auto& node : root["questions"]) questions.push_back(parse_question(node));

        std::vector<ConsistencyRule> rules;
        if (root["rules"]) {
            for (const auto& node : root["rules"]) {
                if (!node["id"] || !node["expr"]) throw ConfigError("rule entries need 'id' and 'expr'");
                rules.emplace_back(node["id"].as<std::string>(), node["expr"].as<std::string>(),
                                   scalar_or(node, "description", ""));
            }
        }
        std::vector<std::string> baseline;
        if (root["baseline_set"]) baseline = root["baseline_set"].as<std::vector<std::string>>();
        return SurveySchema(scalar_or(root, "name", ""), std::move(questions), std::move(rules),
                            std::move(baseline));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("schema: ") + e.what());
    }
}

SurveySchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_schema(buffer.str());
}

std::string schema_to_text(const SurveySchema& schema) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << schema.name();
    out << YAML::Key << "questions" << YAML::Value << YAML::BeginSeq;
    for (const auto& q : schema.questions()) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << q.id;
        out << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << q.label;
        out << YAML::Key << "kind" << YAML::Value << to_string(q.kind);
        if (q.kind == QuestionKind::Likert) out << YAML::Key << "levels" << YAML::Value << q.hi;
        out << YAML::Key << "orientation" << YAML::Value << to_string(q.orientation);
        out << YAML::Key << "poverty_indicator" << YAML::Value << to_string(q.poverty_indicator);
        if (!q.reason.empty()) out << YAML::Key << "reason" << YAML::Value << YAML::DoubleQuoted << q.reason;
        if (q.normality != NormalityOverride::Auto) {
            out << YAML::Key << "normality" << YAML::Value << to_string(q.normality);
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "rules" << YAML::Value << YAML::BeginSeq;
    for (const auto& rule : schema.rules()) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << rule.id();
        out << YAML::Key << "expr" << YAML::Value << YAML::DoubleQuoted << rule.expression();
        out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << rule.description();
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "baseline_set" << YAML::Value << YAML::Flow << schema.baseline_set();
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void save_schema(const SurveySchema& schema, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write schema file " + path.string());
    out << schema_to_text(schema);
}

}  // namespace surveyclust
