#include "surveyclust/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "surveyclust/error.hpp"
#include "surveyclust/ingest.hpp"
#include "surveyclust/random.hpp"

namespace surveyclust {

namespace {

constexpr std::size_t kMaxAttempts = 10000;
constexpr std::uint64_t kCorruptionStream = 0x5bd1e995ULL;

void check_weights(const std::string& id, const char* which, const std::vector<double>& w, int hi) {
    if (w.size() != static_cast<std::size_t>(hi)) {
        throw ConfigError("question '" + id + "': " + which + " weights need " + std::to_string(hi) + " entries, got " +
                          std::to_string(w.size()));
    }
    double total = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("question '" + id + "': " + which + " weights must be finite and non-negative");
        }
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("question '" + id + "': " + which + " weights sum to " + std::to_string(total) +
                          ", not 1");
    }
}

void check_probability(const char* field, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("field '") + field + "' must lie in [0, 1]");
}

std::vector<int> draw_answers(std::mt19937_64& rng, const GeneratorSpec& spec, bool planted) {
    std::vector<int> codes;
    for (const auto& q : spec.schema.questions()) {
        const CodeWeights& w = spec.weights.at(q.id);
        codes.push_back(1 + static_cast<int>(draw_categorical(rng, planted ? w.need : w.base)));
    }
    return codes;
}

std::map<std::string, int> to_answers(const SurveySchema& schema, const std::vector<int>& codes) {
    std::map<std::string, int> answers;
    for (std::size_t j = 0; j < codes.size(); ++j) answers.emplace(schema.questions()[j].id, codes[j]);
    return answers;
}

bool rules_hold(const SurveySchema& schema, const std::map<std::string, int>& answers) {
    for (const auto& rule : schema.rules()) {
        if (!rule.holds(answers)) return false;
    }
    return true;
}

bool corrupt(std::mt19937_64& rng, const GeneratorSpec& spec, RespondentRecord& record) {
    const SurveySchema& schema = spec.schema;
    const auto& questions = schema.questions();
    bool changed = false;
    if (uniform01(rng) < spec.noise.out_of_range) {
        const QuestionSpec& q = questions[uniform_below(rng, questions.size())];
        record.answers[q.id] = uniform01(rng) < 0.5 ? q.hi + 1 : 0;
        changed = true;
    }
    if (uniform01(rng) < spec.noise.inconsistent && !schema.rules().empty()) {
        const ConsistencyRule& rule = schema.rules()[uniform_below(rng, schema.rules().size())];
        std::map<std::string, int> trial = record.answers;
        for (int attempt = 0; attempt < 200; ++attempt) {
            for (const auto& id : rule.involved()) {
                const QuestionSpec& q = schema.at(id);
                trial[id] = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(q.hi)));
            }
            if (!rule.holds(trial)) {
                for (const auto& id : rule.involved()) record.answers[id] = trial[id];
                changed = true;
                break;
            }
        }
    }
    if (uniform01(rng) < spec.noise.missing) {
        const QuestionSpec& q = questions[uniform_below(rng, questions.size())];
        changed = record.answers.erase(q.id) > 0 || changed;
    }
    return changed;
}

std::vector<double> read_weights(const YAML::Node& node) {
    std::vector<double> w;
    for (const auto& v : node) w.push_back(v.as<double>());
    return w;
}

}  // namespace

void GeneratorSpec::validate() const {
    if (n == 0) throw ConfigError("field 'n' must be positive");
    check_probability("need_fraction", need_fraction);
    check_probability("noise.out_of_range", noise.out_of_range);
    check_probability("noise.inconsistent", noise.inconsistent);
    check_probability("noise.missing", noise.missing);
    for (const auto& q : schema.questions()) {
        const auto it = weights.find(q.id);
        if (it == weights.end()) throw ConfigError("question '" + q.id + "' has no code weights");
        check_weights(q.id, "base", it->second.base, q.hi);
        check_weights(q.id, "need", it->second.need, q.hi);
    }
    for (const auto& [id, w] : weights) {
        if (schema.find(id) == nullptr) throw ConfigError("weights given for unknown question '" + id + "'");
    }
}

GeneratorSpec parse_generator_spec(const std::string& text, const std::filesystem::path& base_dir) {
    GeneratorSpec spec;
    try {
        const YAML::Node root = YAML::Load(text);
        if (!root.IsMap()) throw ConfigError("generator spec root must be a mapping");
        if (!root["schema"]) throw ConfigError("generator spec needs field 'schema'");
        spec.schema_path = root["schema"].as<std::string>();
        if (spec.schema_path.is_relative()) spec.schema_path = base_dir / spec.schema_path;
        spec.schema = load_schema(spec.schema_path);
        if (root["n"]) spec.n = root["n"].as<std::size_t>();
        if (root["need_fraction"]) spec.need_fraction = root["need_fraction"].as<double>();
        if (root["seed"]) spec.seed = root["seed"].as<std::uint64_t>();
        if (root["gender"]) spec.gender = root["gender"].as<bool>();
        if (root["id_prefix"]) spec.id_prefix = root["id_prefix"].as<std::string>();
        if (const YAML::Node noise = root["noise"]) {
            if (noise["out_of_range"]) spec.noise.out_of_range = noise["out_of_range"].as<double>();
            if (noise["inconsistent"]) spec.noise.inconsistent = noise["inconsistent"].as<double>();
            if (noise["missing"]) spec.noise.missing = noise["missing"].as<double>();
        }
        const YAML::Node questions = root["questions"];
        for (const auto& q : spec.schema.questions()) {
            CodeWeights w;
            w.base.assign(static_cast<std::size_t>(q.hi), 1.0 / q.hi);
            if (questions && questions[q.id]) {
                const YAML::Node node = questions[q.id];
                if (node["base"]) w.base = read_weights(node["base"]);
                w.need = node["need"] ? read_weights(node["need"]) : w.base;
            } else {
                w.need = w.base;
            }
            spec.weights.emplace(q.id, std::move(w));
        }
        if (questions) {
            for (const auto& entry : questions) {
                const auto id = entry.first.as<std::string>();
                if (spec.schema.find(id) == nullptr) {
                    throw ConfigError("generator spec gives weights for unknown question '" + id + "'");
                }
            }
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("generator spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

GeneratorSpec load_generator_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read generator spec " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_generator_spec(text.str(), path.parent_path());
}

GeneratedCohort generate(const GeneratorSpec& spec) {
    spec.validate();
    GeneratedCohort cohort;
    const std::size_t width = std::to_string(spec.n).size();
    for (std::size_t i = 0; i < spec.n; ++i) {
        std::mt19937_64 rng = substream(spec.seed, i);
        const bool planted = uniform01(rng) < spec.need_fraction;
        RespondentRecord record;
        std::string number = std::to_string(i + 1);
        record.respondent_id = spec.id_prefix + std::string(width - number.size(), '0') + number;
        if (spec.gender) record.gender = 1 + static_cast<int>(uniform_below(rng, 2));
        bool ok = false;
        for (std::size_t attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
            record.answers = to_answers(spec.schema, draw_answers(rng, spec, planted));
            ok = rules_hold(spec.schema, record.answers);
        }
        if (!ok) {
            throw ConfigError("generator could not satisfy the consistency rules for respondent " +
                              record.respondent_id + " after " + std::to_string(kMaxAttempts) + " draws");
        }
        cohort.truth.push_back(planted ? 1 : 0);
        if (planted) cohort.planted.push_back(record.respondent_id);
        cohort.records.push_back(std::move(record));
    }
    if (spec.noise.any()) {
        for (std::size_t i = 0; i < cohort.records.size(); ++i) {
            std::mt19937_64 rng = substream(spec.seed ^ kCorruptionStream, i);
            if (corrupt(rng, spec, cohort.records[i])) ++cohort.corrupted;
        }
    }
    return cohort;
}

std::string truth_to_text(const GeneratedCohort& cohort) {
    std::ostringstream out;
    out << "respondent_id,planted\n";
    for (std::size_t i = 0; i < cohort.records.size(); ++i) {
        out << cohort.records[i].respondent_id << ',' << cohort.truth[i] << '\n';
    }
    return out.str();
}

void write_truth_file(const std::filesystem::path& path, const GeneratedCohort& cohort) {
    std::ofstream out(path, std::ios::binary);
    out << truth_to_text(cohort);
    if (!out) throw IoError("cannot write truth file " + path.string());
}

std::map<std::string, int> read_truth_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read truth file " + path.string());
    std::string line;
    std::getline(in, line);
    if (split_cells(line, ',') != std::vector<std::string>{"respondent_id", "planted"}) {
        throw ParseError(path.string() + ": expected header 'respondent_id,planted'");
    }
    std::map<std::string, int> truth;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_cells(line, ',');
        if (cells.size() != 2 || (cells[1] != "0" && cells[1] != "1")) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 'id,0|1'");
        }
        truth[cells[0]] = cells[1] == "1" ? 1 : 0;
    }
    return truth;
}

}  // namespace surveyclust
