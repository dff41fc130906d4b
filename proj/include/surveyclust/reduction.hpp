#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surveyclust/schema.hpp"

namespace surveyclust {

// Dense row-major square matrix; just enough structure for the reduction stage.
struct SquareMatrix {
    std::size_t size = 0;
    std::vector<double> values;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : size(n), values(n * n, fill) {}
    double& operator()(std::size_t i, std::size_t j) { return values[i * size + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

struct CorrelationMatrix {
    std::vector<std::string> questions;
    SquareMatrix r;                 // NaN where a pair had fewer than 2 usable records
    std::vector<std::size_t> pair_n;  // complete-case count per pair, row-major
    std::vector<std::string> excluded_zero_variance;
    std::vector<std::string> warnings;

    std::size_t index_of(const std::string& id) const;
};

// Pearson correlation on integer codes, complete cases per pair. Zero-variance
// questions are excluded (with a warning) before the matrix is formed.
CorrelationMatrix correlation_matrix(const std::vector<RespondentRecord>& records,
                                     const std::vector<std::string>& question_ids);

struct CorrelatedPair {
    std::string first;
    std::string second;
    double r = 0.0;
};

// Each unordered pair once with |r| strictly above threshold, sorted by |r| descending
// (ties keep matrix order).
std::vector<CorrelatedPair> high_correlation_pairs(const CorrelationMatrix& m, double threshold = 0.2);

struct PrunePolicy {
    double drop_threshold = 0.5;
    // When non-empty, exactly these questions are dropped and the automatic rule is skipped.
    std::vector<std::string> manual_drop;
};

// Default rule: for each pair with |r| >= drop_threshold (strongest first) whose members
// are both still present, drop the member with the larger mean |r| to all other questions.
std::vector<std::string> prune_collinear(const std::vector<CorrelatedPair>& pairs, const CorrelationMatrix& m,
                                         const PrunePolicy& policy);

enum class PcaBasis { Correlation, Covariance };

struct PcaResult {
    std::vector<std::string> questions;
    PcaBasis basis = PcaBasis::Correlation;
    SquareMatrix analyzed;              // the decomposed matrix
    std::vector<double> scale;          // per-question sd used to turn components into loadings
    std::vector<double> eigenvalues;    // descending
    std::vector<std::vector<double>> components;  // components[j] is the j-th unit eigenvector
};

// Full symmetric eigen-decomposition of the chosen basis matrix. Each component's
// largest-magnitude entry is made positive. Throws NumericalError when the solver fails.
PcaResult pca(const std::vector<RespondentRecord>& records, const std::vector<std::string>& question_ids,
              PcaBasis basis = PcaBasis::Correlation);
PcaResult pca_from_matrix(const SquareMatrix& matrix, const std::vector<std::string>& question_ids,
                          PcaBasis basis = PcaBasis::Correlation, std::vector<double> scale = {});

// Number of eigenvalues strictly greater than 1.
std::size_t kaiser_retain(const std::vector<double>& eigenvalues);

// questions x factors, row-major.
struct LoadingMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    LoadingMatrix() = default;
    LoadingMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}
    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    std::vector<double> communalities() const;
};

struct VarimaxResult {
    LoadingMatrix rotated;
    SquareMatrix rotation;               // rotated = loadings * rotation
    std::vector<double> criterion;       // criterion after each sweep, starting with the input
    int iterations = 0;
    bool converged = true;
};

// Varimax criterion sum_j [p * sum_i l_ij^4 - (sum_i l_ij^2)^2] / p^2, evaluated on
// row-normalized loadings when `normalize` is set.
double varimax_criterion(const LoadingMatrix& loadings, bool normalize = true);

// Kaiser's pairwise planar rotations, sweeping all factor pairs until the criterion
// gain of a sweep drops below tol. A single factor is returned unrotated.
VarimaxResult varimax(const LoadingMatrix& loadings, int max_iter = 1000, double tol = 1e-8, bool normalize = true);

struct LoadingFilterResult {
    std::vector<std::string> retained;
    std::vector<std::string> dropped;
};

// Retains a question iff |loading| >= threshold on at least one factor.
LoadingFilterResult loading_filter(const LoadingMatrix& rotated, const std::vector<std::string>& questions,
                                   double threshold = 0.30);

struct FactorModel {
    std::vector<std::string> questions;  // analyzed questions, row order of the loadings
    PcaBasis basis = PcaBasis::Correlation;
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> components;
    std::size_t kaiser_count = 0;
    std::size_t n_retained = 0;
    LoadingMatrix loadings;
    LoadingMatrix rotated;
    SquareMatrix rotation;
    bool varimax_converged = true;
    int varimax_iterations = 0;
    std::vector<double> ss_loadings;
    std::vector<double> proportion_var;
    std::vector<double> cumulative_var;
    double loading_threshold = 0.30;
    std::vector<std::string> retained_questions;
    std::vector<std::string> dropped_questions;
};

struct ReductionConfig {
    std::vector<std::string> questions;  // empty: every schema question
    double correlation_threshold = 0.2;
    PrunePolicy prune;
    PcaBasis basis = PcaBasis::Correlation;
    double loading_threshold = 0.30;
    bool varimax_normalize = true;
    int varimax_max_iter = 1000;
    double varimax_tol = 1e-8;
};

struct ReductionResult {
    CorrelationMatrix correlation;
    std::vector<CorrelatedPair> pairs;
    std::vector<std::string> pruned;
    FactorModel model;
    std::vector<std::string> warnings;
};

// Correlation screen, collinearity pruning, PCA, Kaiser retention (falling back to one
// factor), Varimax and the loading filter, in that order.
ReductionResult reduce(const std::vector<RespondentRecord>& records, const SurveySchema& schema,
                       const ReductionConfig& config);

std::string to_string(PcaBasis basis);
PcaBasis parse_pca_basis(const std::string& text);

// Question pair table: Question_i, Question_j, Correlation.
std::string render_pair_table(const std::vector<CorrelatedPair>& pairs);
// Sparse loading table: 3 decimals, blank cells where |loading| < threshold, followed by
// SS loadings / proportion / cumulative variance rows. Rows are the retained questions.
std::string render_loading_table(const FactorModel& model);
std::string render_reduction_report(const ReductionResult& result);

nlohmann::json factor_model_to_json(const FactorModel& model);

}  // namespace surveyclust
