#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "surveyclust/clustering.hpp"
#include "surveyclust/error.hpp"
#include "surveyclust/ingest.hpp"

namespace surveyclust {

DataMatrix::DataMatrix(std::vector<std::string> respondent_ids, std::vector<std::string> question_ids,
                       std::vector<int> codes)
    : respondent_ids_(std::move(respondent_ids)), question_ids_(std::move(question_ids)), codes_(std::move(codes)) {
    if (codes_.size() != respondent_ids_.size() * question_ids_.size()) {
        throw InputError("data matrix: " + std::to_string(codes_.size()) + " codes for " +
                         std::to_string(respondent_ids_.size()) + " x " + std::to_string(question_ids_.size()));
    }
}

DataMatrix make_data_matrix(const std::vector<RespondentRecord>& records,
                            const std::vector<std::string>& question_ids, const SurveySchema* schema) {
    std::vector<std::string> ids;
    std::vector<int> codes;
    ids.reserve(records.size());
    codes.reserve(records.size() * question_ids.size());
    for (const auto& r : records) {
        ids.push_back(r.respondent_id);
        for (const auto& q : question_ids) {
            auto it = r.answers.find(q);
            if (it == r.answers.end()) {
                throw InputError("respondent '" + r.respondent_id + "' has no answer for '" + q + "'");
            }
            if (schema != nullptr && !schema->at(q).admits(it->second)) {
                throw InputError("respondent '" + r.respondent_id + "' answered '" + q + "' out of range");
            }
            codes.push_back(it->second);
        }
    }
    return DataMatrix(std::move(ids), question_ids, std::move(codes));
}

DataMatrix read_data_matrix(std::istream& in, char delimiter, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ": empty data file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_cells(line, delimiter);
    if (header.empty() || header[0] != "respondent_id") {
        throw ParseError(source + ": first header column must be 'respondent_id'");
    }
    std::vector<std::size_t> used;
    std::vector<std::string> questions;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c] == "gender") continue;
        used.push_back(c);
        questions.push_back(header[c]);
    }
    if (questions.empty()) throw ParseError(source + ": no question columns");

    std::vector<std::string> ids;
    std::vector<int> codes;
    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_cells(line, delimiter);
        const std::string where = source + ":" + std::to_string(line_no);
        if (cells.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells");
        if (!seen.insert(cells[0]).second) throw ParseError(where + ": duplicate respondent_id '" + cells[0] + "'");
        ids.push_back(cells[0]);
        for (std::size_t c : used) {
            int value = 0;
            const std::string& cell = cells[c];
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
                throw ParseError(where + ": column '" + header[c] + "' is not an integer code");
            }
            codes.push_back(value);
        }
    }
    return DataMatrix(std::move(ids), std::move(questions), std::move(codes));
}

DataMatrix read_data_matrix_file(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file " + path.string());
    return read_data_matrix(in, delimiter, path.string());
}

void write_data_matrix(std::ostream& out, const DataMatrix& data, char delimiter) {
    out << "respondent_id";
    for (const auto& q : data.question_ids()) out << delimiter << q;
    out << '\n';
    for (std::size_t i = 0; i < data.rows(); ++i) {
        out << data.respondent_ids()[i];
        for (int v : data.row(i)) out << delimiter << v;
        out << '\n';
    }
}

void write_data_matrix_file(const std::filesystem::path& path, const DataMatrix& data, char delimiter) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write data file " + path.string());
    write_data_matrix(out, data, delimiter);
}

std::vector<double> raw_values(const DataMatrix& data) {
    return std::vector<double>(data.codes().begin(), data.codes().end());
}

std::vector<double> standardized_values(const DataMatrix& data) {
    const std::size_t n = data.rows(), p = data.cols();
    std::vector<double> out = raw_values(data);
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += out[i * p + j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (out[i * p + j] - mean) * (out[i * p + j] - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) out[i * p + j] = sd > 0.0 ? (out[i * p + j] - mean) / sd : 0.0;
    }
    return out;
}

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (int a : assignments) ++sizes[static_cast<std::size_t>(a - 1)];
    return sizes;
}

}  // namespace surveyclust
