#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "surveyclust/schema.hpp"

namespace surveyclust {

// n respondents x p questions of integer codes, row-major, no absent cells.
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(std::vector<std::string> respondent_ids, std::vector<std::string> question_ids,
               std::vector<int> codes);

    std::size_t rows() const { return respondent_ids_.size(); }
    std::size_t cols() const { return question_ids_.size(); }
    std::span<const int> row(std::size_t i) const { return {codes_.data() + i * cols(), cols()}; }
    int operator()(std::size_t i, std::size_t j) const { return codes_[i * cols() + j]; }

    const std::vector<std::string>& respondent_ids() const { return respondent_ids_; }
    const std::vector<std::string>& question_ids() const { return question_ids_; }
    const std::vector<int>& codes() const { return codes_; }

    bool operator==(const DataMatrix&) const = default;

private:
    std::vector<std::string> respondent_ids_;
    std::vector<std::string> question_ids_;
    std::vector<int> codes_;
};

// Throws InputError when a record lacks one of the questions; with a schema, codes are
// range-checked too.
DataMatrix make_data_matrix(const std::vector<RespondentRecord>& records,
                            const std::vector<std::string>& question_ids, const SurveySchema* schema = nullptr);

// `respondent_id,<question ids...>` with integer cells; other identifier columns such
// as gender are ignored.
DataMatrix read_data_matrix(std::istream& in, char delimiter = ',', const std::string& source = "<stream>");
DataMatrix read_data_matrix_file(const std::filesystem::path& path, char delimiter = ',');
void write_data_matrix(std::ostream& out, const DataMatrix& data, char delimiter = ',');
void write_data_matrix_file(const std::filesystem::path& path, const DataMatrix& data, char delimiter = ',');

// Column z-scores (population sd); constant columns become 0.
std::vector<double> standardized_values(const DataMatrix& data);
std::vector<double> raw_values(const DataMatrix& data);

enum class Method { KMeans, KModes, HclustComplete, HclustSingle, HclustAverage };
enum class Linkage { Complete, Single, Average };
enum class Metric { Euclidean, SimpleMatching };

std::string to_string(Method method);
std::string to_string(Linkage linkage);
std::string to_string(Metric metric);
Method parse_method(const std::string& text);
Metric parse_metric(const std::string& text);
bool is_hierarchical(Method method);
Linkage linkage_of(Method method);

struct Merge {
    std::size_t left = 0;   // node ids: leaves 0..n-1, merge t creates node n + t
    std::size_t right = 0;  // left < right
    double height = 0.0;
    std::size_t size = 0;

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::size_t leaves = 0;
    std::vector<Merge> merges;
    Linkage linkage = Linkage::Complete;
    Metric metric = Metric::Euclidean;
};

struct ClusterModel {
    Method method = Method::KMeans;
    std::size_t k_requested = 0;
    std::size_t k = 0;  // clusters actually returned; below k_requested when k-modes collapses
    std::vector<std::string> respondent_ids;
    std::vector<std::string> question_ids;
    std::vector<int> assignments;  // 1..k, data row order
    std::vector<std::vector<double>> centers;  // k-means (in the clustered space)
    std::vector<std::vector<int>> modes;       // k-modes
    std::optional<Dendrogram> dendrogram;      // hierarchical
    std::size_t iterations = 0;
    bool converged = true;
    std::uint64_t seed = 0;
    bool standardized = false;
    Metric metric = Metric::Euclidean;
    std::optional<double> objective;      // SSE (k-means) or total mismatches (k-modes)
    std::vector<double> objective_history;  // after each assign/update round
    std::vector<std::string> warnings;

    std::vector<std::size_t> cluster_sizes() const;
};

struct KMeansOptions {
    std::size_t k = 2;
    std::uint64_t seed = 0;
    std::size_t max_iter = 300;
    bool standardize = false;
};

// Lloyd iteration from k distinct seeded rows. Nearest centre by squared Euclidean
// distance, ties to the lowest cluster index; an emptied cluster is re-seeded with the
// point farthest from its centre among clusters holding more than one point.
ClusterModel kmeans(const DataMatrix& data, const KMeansOptions& options);

double sse(std::span<const double> points, std::size_t dims, const std::vector<int>& assignments,
           const std::vector<std::vector<double>>& centers);

enum class KModesInit { Random, Huang };

struct KModesOptions {
    std::size_t k = 2;
    std::uint64_t seed = 0;
    std::size_t max_iter = 100;
    KModesInit init = KModesInit::Random;
};

std::size_t simple_matching_distance(std::span<const int> a, std::span<const int> b);

// Huang k-modes with simple-matching distance. Assignment ties go to the lowest cluster
// index and mode ties to the lowest code. Modes no record is closest to are dropped and
// the model reports fewer clusters with a warning.
ClusterModel kmodes(const DataMatrix& data, const KModesOptions& options);

// Coordinate-wise most frequent code, ties to the lowest code.
std::vector<int> column_modes(const DataMatrix& data, const std::vector<std::size_t>& rows);
std::size_t total_mismatch_cost(const DataMatrix& data, const std::vector<int>& assignments,
                                const std::vector<std::vector<int>>& modes);

// Condensed pairwise distances: entry for i < j at i*n - i*(i+1)/2 + (j - i - 1).
std::vector<double> pairwise_distances(std::span<const double> points, std::size_t n, std::size_t dims,
                                       Metric metric);

// Agglomerative clustering; each step merges the pair with the smallest linkage value,
// breaking ties by the smallest (left, right) node-id pair. Linkage values are compared
// after rounding to 30 significant bits so mathematically equal values that differ only
// by floating-point rounding tie exactly.
Dendrogram hclust(const DataMatrix& data, Linkage linkage, Metric metric = Metric::Euclidean,
                  bool standardize = false);
Dendrogram hclust_points(std::span<const double> points, std::size_t n, std::size_t dims, Linkage linkage,
                         Metric metric = Metric::Euclidean);

double linkage_tie_key(double value);

// Undoes the last k - 1 merges. Clusters are numbered 1..k by their smallest leaf.
std::vector<int> cut_tree(const Dendrogram& dendrogram, std::size_t k);

struct ClusterRequest {
    Method method = Method::KMeans;
    std::size_t k = 4;
    std::uint64_t seed = 1;
    bool standardize = false;
    Metric metric = Metric::Euclidean;  // hierarchical only
    KModesInit kmodes_init = KModesInit::Random;
    std::size_t max_iter = 0;  // 0: method default
};

ClusterModel fit(const DataMatrix& data, const ClusterRequest& request);
// Cuts an existing dendrogram into a hierarchical ClusterModel.
ClusterModel model_from_dendrogram(const DataMatrix& data, const Dendrogram& dendrogram, const ClusterRequest& request);

nlohmann::json cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& json);
void write_cluster_model(const std::filesystem::path& path, const ClusterModel& model);
ClusterModel read_cluster_model(const std::filesystem::path& path);

}  // namespace surveyclust
