#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "surveyclust/schema.hpp"

namespace surveyclust {

// Survey files are delimited text: a header row `respondent_id[,gender],<question ids...>`
// followed by one respondent per row with integer-coded cells. Question columns may
// appear in any order but must match the schema's question ids exactly. Empty or
// non-integer cells become absent answers; short rows leave trailing answers absent.
std::vector<RespondentRecord> parse_survey(std::istream& in, const SurveySchema& schema, char delimiter = ',',
                                           const std::string& source = "<stream>");
std::vector<RespondentRecord> parse_survey_file(const std::filesystem::path& path, const SurveySchema& schema,
                                                char delimiter = ',');

// Writes records with columns in schema order. A gender column is emitted when any
// record carries one.
void write_survey(std::ostream& out, const std::vector<RespondentRecord>& records, const SurveySchema& schema,
                  char delimiter = ',');
void write_survey_file(const std::filesystem::path& path, const std::vector<RespondentRecord>& records,
                       const SurveySchema& schema, char delimiter = ',');

struct CleaningReport {
    std::size_t total_in = 0;
    std::vector<std::string> removed_out_of_range;
    std::vector<std::string> removed_inconsistent;
    std::vector<std::string> removed_incomplete;
    std::size_t total_out = 0;

    std::size_t removed_total() const {
        return removed_out_of_range.size() + removed_inconsistent.size() + removed_incomplete.size();
    }
    bool reconciles() const { return total_in == total_out + removed_total(); }
};

struct CleanedCohort {
    std::vector<RespondentRecord> records;
    CleaningReport report;
};

// Removes every record that does not validate as clean; each removal is filed under
// its reporting category (out_of_range > inconsistent > incomplete). Answers are never
// modified. Input order is preserved.
CleanedCohort clean_cohort(const std::vector<RespondentRecord>& records, const SurveySchema& schema);

std::string render_cleaning_report(const CleaningReport& report);
// `category,respondent_id` rows, plus a `summary` block of counts.
std::string cleaning_report_rows(const CleaningReport& report, char delimiter = ',');

// Splits one delimited line into trimmed cells.
std::vector<std::string> split_cells(const std::string& line, char delimiter);

}  // namespace surveyclust
