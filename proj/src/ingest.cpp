#include "surveyclust/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "surveyclust/error.hpp"

namespace surveyclust {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::optional<int> parse_code(const std::string& cell) {
    int value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || cell.empty()) return std::nullopt;
    return value;
}

}  // namespace

std::vector<std::string> split_cells(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, delimiter)) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == delimiter) cells.emplace_back();
    return cells;
}

std::vector<RespondentRecord> parse_survey(std::istream& in, const SurveySchema& schema, char delimiter,
                                           const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ": empty file, expected a header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_cells(line, delimiter);
    if (header.empty() || header[0] != "respondent_id") {
        throw ParseError(source + ": first header column must be 'respondent_id'");
    }

    int gender_column = -1;
    std::vector<std::string> column_question(header.size());
    std::set<std::string> seen;
    std::vector<std::string> unexpected;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name == "gender" && gender_column < 0) {
            gender_column = static_cast<int>(c);
        } else if (schema.find(name) != nullptr && seen.insert(name).second) {
            column_question[c] = name;
        } else {
            unexpected.push_back(name);
        }
    }
    std::vector<std::string> missing;
    for (const auto& q : schema.questions()) {
        if (!seen.contains(q.id)) missing.push_back(q.id);
    }
    if (!missing.empty() || !unexpected.empty()) {
        std::string message = source + ": header does not match schema;";
        auto join = [](const std::vector<std::string>& names) {
            std::string out;
            for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
            return out;
        };
        if (!missing.empty()) message += " missing columns: " + join(missing) + ";";
        if (!unexpected.empty()) message += " unexpected or duplicate columns: " + join(unexpected) + ";";
        throw ParseError(message);
    }

    std::vector<RespondentRecord> records;
    std::set<std::string> ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_cells(line, delimiter);
        if (cells.size() > header.size()) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": row has " + std::to_string(cells.size()) +
                             " cells, header has " + std::to_string(header.size()));
        }
        RespondentRecord record;
        record.respondent_id = cells[0];
        if (record.respondent_id.empty()) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": empty respondent_id");
        }
        if (!ids.insert(record.respondent_id).second) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": duplicate respondent_id '" +
                             record.respondent_id + "'");
        }
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (static_cast<int>(c) == gender_column) {
                record.gender = parse_code(cells[c]);
            } else if (auto code = parse_code(cells[c])) {
                record.answers.emplace(column_question[c], *code);
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<RespondentRecord> parse_survey_file(const std::filesystem::path& path, const SurveySchema& schema,
                                                char delimiter) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open survey file " + path.string());
    return parse_survey(in, schema, delimiter, path.string());
}

void write_survey(std::ostream& out, const std::vector<RespondentRecord>& records, const SurveySchema& schema,
                  char delimiter) {
    const bool with_gender =
        std::any_of(records.begin(), records.end(), [](const auto& r) { return r.gender.has_value(); });
    out << "respondent_id";
    if (with_gender) out << delimiter << "gender";
    for (const auto& q : schema.questions()) out << delimiter << q.id;
    out << '\n';
    for (const auto& r : records) {
        out << r.respondent_id;
        if (with_gender) {
            out << delimiter;
            if (r.gender) out << *r.gender;
        }
        for (const auto& q : schema.questions()) {
            out << delimiter;
            if (auto it = r.answers.find(q.id); it != r.answers.end()) out << it->second;
        }
        out << '\n';
    }
}

void write_survey_file(const std::filesystem::path& path, const std::vector<RespondentRecord>& records,
                       const SurveySchema& schema, char delimiter) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write survey file " + path.string());
    write_survey(out, records, schema, delimiter);
}

CleanedCohort clean_cohort(const std::vector<RespondentRecord>& records, const SurveySchema& schema) {
    CleanedCohort result;
    result.report.total_in = records.size();
    for (const auto& record : records) {
        const ValidationVerdict verdict = validate_record(record, schema);
        switch (verdict.kind()) {
            case VerdictKind::Clean: result.records.push_back(record); break;
            case VerdictKind::OutOfRange: result.report.removed_out_of_range.push_back(record.respondent_id); break;
            case VerdictKind::Inconsistent: result.report.removed_inconsistent.push_back(record.respondent_id); break;
            case VerdictKind::Incomplete: result.report.removed_incomplete.push_back(record.respondent_id); break;
        }
    }
    result.report.total_out = result.records.size();
    return result;
}

std::string render_cleaning_report(const CleaningReport& report) {
    std::ostringstream out;
    auto section = [&](const char* title, const std::vector<std::string>& ids) {
        out << title << ": " << ids.size() << '\n';
        for (const auto& id : ids) out << "  " << id << '\n';
    };
    out << "Cleaning report\n";
    out << "records in: " << report.total_in << '\n';
    section("removed (out of range)", report.removed_out_of_range);
    section("removed (inconsistent)", report.removed_inconsistent);
    section("removed (incomplete)", report.removed_incomplete);
    out << "records removed: " << report.removed_total() << '\n';
    out << "records out: " << report.total_out << '\n';
    return out.str();
}

std::string cleaning_report_rows(const CleaningReport& report, char delimiter) {
    std::ostringstream out;
    out << "category" << delimiter << "respondent_id\n";
    for (const auto& id : report.removed_out_of_range) out << "out_of_range" << delimiter << id << '\n';
    for (const auto& id : report.removed_inconsistent) out << "inconsistent" << delimiter << id << '\n';
    for (const auto& id : report.removed_incomplete) out << "incomplete" << delimiter << id << '\n';
    out << "total_in" << delimiter << report.total_in << '\n';
    out << "total_out" << delimiter << report.total_out << '\n';
    return out.str();
}

}  // namespace surveyclust
