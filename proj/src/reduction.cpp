#include "surveyclust/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "surveyclust/error.hpp"

namespace surveyclust {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Column = std::vector<std::optional<double>>;

Column extract_column(const std::vector<RespondentRecord>& records, const std::string& id) {
    Column column;
    column.reserve(records.size());
    for (const auto& r : records) {
        auto it = r.answers.find(id);
        column.push_back(it == r.answers.end() ? std::nullopt : std::optional<double>(it->second));
    }
    return column;
}

double column_variance(const Column& column) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : column) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& v : column) {
        if (v) ss += (*v - mean) * (*v - mean);
    }
    return ss / static_cast<double>(n - 1);
}

struct PairMoments {
    std::size_t n = 0;
    double cov = kNaN;
    double var_a = kNaN;
    double var_b = kNaN;
};

PairMoments pair_moments(const Column& a, const Column& b) {
    PairMoments m;
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) {
            sa += *a[i];
            sb += *b[i];
            ++m.n;
        }
    }
    if (m.n < 2) return m;
    const double n = static_cast<double>(m.n);
    const double ma = sa / n, mb = sb / n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) {
            const double da = *a[i] - ma, db = *b[i] - mb;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
    }
    m.cov = sab / (n - 1.0);
    m.var_a = saa / (n - 1.0);
    m.var_b = sbb / (n - 1.0);
    return m;
}

void canonicalize_sign(std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    if (v[best] < 0.0) {
        for (double& x : v) x = -x;
    }
}

}  // namespace

std::size_t CorrelationMatrix::index_of(const std::string& id) const {
    auto it = std::find(questions.begin(), questions.end(), id);
    if (it == questions.end()) throw InputError("question '" + id + "' is not in the correlation matrix");
    return static_cast<std::size_t>(it - questions.begin());
}

CorrelationMatrix correlation_matrix(const std::vector<RespondentRecord>& records,
                                     const std::vector<std::string>& question_ids) {
    CorrelationMatrix m;
    std::vector<Column> columns;
    for (const auto& id : question_ids) {
        Column column = extract_column(records, id);
        if (column_variance(column) <= 0.0) {
            m.excluded_zero_variance.push_back(id);
            m.warnings.push_back("question '" + id + "' has zero variance; excluded from the correlation matrix");
            continue;
        }
        m.questions.push_back(id);
        columns.push_back(std::move(column));
    }
    const std::size_t p = m.questions.size();
    m.r = SquareMatrix(p, 0.0);
    m.pair_n.assign(p * p, 0);
    for (std::size_t i = 0; i < p; ++i) {
        m.r(i, i) = 1.0;
        for (std::size_t j = i; j < p; ++j) {
            const PairMoments pm = pair_moments(columns[i], columns[j]);
            m.pair_n[i * p + j] = m.pair_n[j * p + i] = pm.n;
            if (i == j) continue;
            double r = kNaN;
            if (pm.n >= 2 && pm.var_a > 0.0 && pm.var_b > 0.0) {
                r = std::clamp(pm.cov / std::sqrt(pm.var_a * pm.var_b), -1.0, 1.0);
            } else {
                m.warnings.push_back("correlation of '" + m.questions[i] + "' and '" + m.questions[j] +
                                     "' is undefined (" + std::to_string(pm.n) + " usable records)");
            }
            m.r(i, j) = m.r(j, i) = r;
        }
    }
    return m;
}

std::vector<CorrelatedPair> high_correlation_pairs(const CorrelationMatrix& m, double threshold) {
    std::vector<CorrelatedPair> pairs;
    for (std::size_t i = 0; i < m.questions.size(); ++i) {
        for (std::size_t j = i + 1; j < m.questions.size(); ++j) {
            const double r = m.r(i, j);
            if (!std::isnan(r) && std::abs(r) > threshold) pairs.push_back({m.questions[i], m.questions[j], r});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::abs(a.r) > std::abs(b.r); });
    return pairs;
}

std::vector<std::string> prune_collinear(const std::vector<CorrelatedPair>& pairs, const CorrelationMatrix& m,
                                         const PrunePolicy& policy) {
    if (!policy.manual_drop.empty()) return policy.manual_drop;

    auto mean_abs_r = [&](const std::string& id) {
        const std::size_t i = m.index_of(id);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < m.questions.size(); ++j) {
            if (j == i || std::isnan(m.r(i, j))) continue;
            sum += std::abs(m.r(i, j));
            ++count;
        }
        return count == 0 ? 0.0 : sum / static_cast<double>(count);
    };

    std::vector<std::string> dropped;
    auto is_dropped = [&](const std::string& id) {
        return std::find(dropped.begin(), dropped.end(), id) != dropped.end();
    };
    for (const auto& pair : pairs) {
        if (std::abs(pair.r) < policy.drop_threshold) continue;
        if (is_dropped(pair.first) || is_dropped(pair.second)) continue;
        // Ties drop the second member.
        dropped.push_back(mean_abs_r(pair.first) > mean_abs_r(pair.second) ? pair.first : pair.second);
    }
    return dropped;
}

PcaResult pca_from_matrix(const SquareMatrix& matrix, const std::vector<std::string>& question_ids, PcaBasis basis,
                          std::vector<double> scale) {
    const std::size_t p = matrix.size;
    if (p < 2) throw InputError("pca needs at least 2 questions");
    if (question_ids.size() != p) throw InputError("pca: question count does not match the matrix");
    if (scale.empty()) scale.assign(p, 1.0);

    Eigen::MatrixXd m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const double v = matrix(i, j);
            if (!std::isfinite(v)) {
                throw NumericalError("pca: matrix entry (" + question_ids[i] + ", " + question_ids[j] +
                                     ") is not finite");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        std::ostringstream dump;
        dump << std::setprecision(17) << m;
        throw NumericalError("pca: eigen-solver did not converge; matrix:\n" + dump.str());
    }

    PcaResult result;
    result.questions = question_ids;
    result.basis = basis;
    result.analyzed = matrix;
    result.scale = std::move(scale);
    // Eigen returns ascending eigenvalues.
    for (Eigen::Index j = static_cast<Eigen::Index>(p) - 1; j >= 0; --j) {
        result.eigenvalues.push_back(solver.eigenvalues()(j));
        std::vector<double> v(p);
        for (std::size_t i = 0; i < p; ++i) v[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), j);
        canonicalize_sign(v);
        result.components.push_back(std::move(v));
    }
    return result;
}

PcaResult pca(const std::vector<RespondentRecord>& records, const std::vector<std::string>& question_ids,
              PcaBasis basis) {
    if (basis == PcaBasis::Correlation) {
        CorrelationMatrix corr = correlation_matrix(records, question_ids);
        return pca_from_matrix(corr.r, corr.questions, basis);
    }
    std::vector<Column> columns;
    std::vector<std::string> ids;
    for (const auto& id : question_ids) {
        Column column = extract_column(records, id);
        if (column_variance(column) <= 0.0) continue;
        ids.push_back(id);
        columns.push_back(std::move(column));
    }
    const std::size_t p = ids.size();
    SquareMatrix cov(p);
    std::vector<double> scale(p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            const PairMoments pm = pair_moments(columns[i], columns[j]);
            cov(i, j) = cov(j, i) = pm.cov;
        }
        scale[i] = std::sqrt(cov(i, i));
    }
    return pca_from_matrix(cov, ids, basis, std::move(scale));
}

std::size_t kaiser_retain(const std::vector<double>& eigenvalues) {
    return static_cast<std::size_t>(
        std::count_if(eigenvalues.begin(), eigenvalues.end(), [](double v) { return v > 1.0; }));
}

std::vector<double> LoadingMatrix::communalities() const {
    std::vector<double> h(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) h[i] += (*this)(i, j) * (*this)(i, j);
    }
    return h;
}

namespace {

LoadingMatrix row_normalized(const LoadingMatrix& loadings) {
    LoadingMatrix out = loadings;
    const auto h = loadings.communalities();
    for (std::size_t i = 0; i < out.rows; ++i) {
        if (h[i] <= 0.0) continue;
        const double s = std::sqrt(h[i]);
        for (std::size_t j = 0; j < out.cols; ++j) out(i, j) /= s;
    }
    return out;
}

double raw_varimax_criterion(const LoadingMatrix& a) {
    const double p = static_cast<double>(a.rows);
    double total = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
        double s2 = 0.0, s4 = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) {
            const double sq = a(i, j) * a(i, j);
            s2 += sq;
            s4 += sq * sq;
        }
        total += (p * s4 - s2 * s2) / (p * p);
    }
    return total;
}

}  // namespace

double varimax_criterion(const LoadingMatrix& loadings, bool normalize) {
    return raw_varimax_criterion(normalize ? row_normalized(loadings) : loadings);
}

VarimaxResult varimax(const LoadingMatrix& loadings, int max_iter, double tol, bool normalize) {
    const std::size_t m = loadings.cols;
    VarimaxResult result;
    result.rotation = SquareMatrix(m);
    for (std::size_t j = 0; j < m; ++j) result.rotation(j, j) = 1.0;
    result.rotated = loadings;
    if (m < 2 || loadings.rows == 0) {
        result.criterion.push_back(varimax_criterion(loadings, normalize));
        return result;
    }

    LoadingMatrix a = normalize ? row_normalized(loadings) : loadings;
    const double p = static_cast<double>(a.rows);
    result.criterion.push_back(raw_varimax_criterion(a));
    result.converged = false;
    for (int sweep = 0; sweep < max_iter; ++sweep) {
        for (std::size_t j = 0; j + 1 < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                double sa = 0.0, sb = 0.0, sc = 0.0, sd = 0.0;
                for (std::size_t i = 0; i < a.rows; ++i) {
                    const double x = a(i, j), y = a(i, k);
                    const double u = x * x - y * y;
                    const double v = 2.0 * x * y;
                    sa += u;
                    sb += v;
                    sc += u * u - v * v;
                    sd += 2.0 * u * v;
                }
                const double numerator = sd - 2.0 * sa * sb / p;
                const double denominator = sc - (sa * sa - sb * sb) / p;
                const double phi = std::atan2(numerator, denominator) / 4.0;
                if (phi == 0.0) continue;
                const double c = std::cos(phi), s = std::sin(phi);
                for (std::size_t i = 0; i < a.rows; ++i) {
                    const double x = a(i, j), y = a(i, k);
                    a(i, j) = x * c + y * s;
                    a(i, k) = -x * s + y * c;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double x = result.rotation(i, j), y = result.rotation(i, k);
                    result.rotation(i, j) = x * c + y * s;
                    result.rotation(i, k) = -x * s + y * c;
                }
            }
        }
        result.iterations = sweep + 1;
        const double value = raw_varimax_criterion(a);
        const double gain = value - result.criterion.back();
        result.criterion.push_back(value);
        if (gain < tol) {
            result.converged = true;
            break;
        }
    }

    // rotated = loadings * rotation
    for (std::size_t i = 0; i < loadings.rows; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t t = 0; t < m; ++t) sum += loadings(i, t) * result.rotation(t, j);
            result.rotated(i, j) = sum;
        }
    }
    return result;
}

LoadingFilterResult loading_filter(const LoadingMatrix& rotated, const std::vector<std::string>& questions,
                                   double threshold) {
    if (questions.size() != rotated.rows) throw InputError("loading_filter: question count mismatch");
    LoadingFilterResult result;
    for (std::size_t i = 0; i < rotated.rows; ++i) {
        bool keep = false;
        for (std::size_t j = 0; j < rotated.cols; ++j) keep = keep || std::abs(rotated(i, j)) >= threshold;
        (keep ? result.retained : result.dropped).push_back(questions[i]);
    }
    return result;
}

std::string to_string(PcaBasis basis) { return basis == PcaBasis::Correlation ? "correlation" : "covariance"; }

PcaBasis parse_pca_basis(const std::string& text) {
    if (text == "correlation") return PcaBasis::Correlation;
    if (text == "covariance") return PcaBasis::Covariance;
    throw ConfigError("unknown PCA basis '" + text + "' (expected correlation or covariance)");
}

ReductionResult reduce(const std::vector<RespondentRecord>& records, const SurveySchema& schema,
                       const ReductionConfig& config) {
    ReductionResult result;
    std::vector<std::string> questions = config.questions.empty() ? schema.question_ids() : config.questions;
    for (const auto& id : questions) schema.at(id);

    result.correlation = correlation_matrix(records, questions);
    result.warnings = result.correlation.warnings;
    result.pairs = high_correlation_pairs(result.correlation, config.correlation_threshold);
    result.pruned = prune_collinear(result.pairs, result.correlation, config.prune);
    for (const auto& id : result.pruned) {
        if (std::find(result.correlation.questions.begin(), result.correlation.questions.end(), id) ==
            result.correlation.questions.end()) {
            result.warnings.push_back("drop list names '" + id + "', which is not among the analyzed questions");
        }
    }

    std::vector<std::string> analyzed;
    for (const auto& id : result.correlation.questions) {
        if (std::find(result.pruned.begin(), result.pruned.end(), id) == result.pruned.end()) analyzed.push_back(id);
    }

    PcaResult components;
    if (config.basis == PcaBasis::Correlation) {
        SquareMatrix sub(analyzed.size());
        for (std::size_t i = 0; i < analyzed.size(); ++i) {
            for (std::size_t j = 0; j < analyzed.size(); ++j) {
                sub(i, j) = result.correlation.r(result.correlation.index_of(analyzed[i]),
                                                 result.correlation.index_of(analyzed[j]));
            }
        }
        components = pca_from_matrix(sub, analyzed, PcaBasis::Correlation);
    } else {
        components = pca(records, analyzed, PcaBasis::Covariance);
    }

    FactorModel& model = result.model;
    model.questions = components.questions;
    model.basis = config.basis;
    model.eigenvalues = components.eigenvalues;
    model.components = components.components;
    model.kaiser_count = kaiser_retain(model.eigenvalues);
    model.n_retained = std::min(model.kaiser_count, model.eigenvalues.size());
    if (model.n_retained == 0) {
        model.n_retained = 1;
        result.warnings.push_back("no eigenvalue exceeds 1; retaining a single factor");
    }

    const std::size_t p = model.questions.size();
    model.loadings = LoadingMatrix(p, model.n_retained);
    for (std::size_t j = 0; j < model.n_retained; ++j) {
        const double root = std::sqrt(std::max(model.eigenvalues[j], 0.0));
        for (std::size_t i = 0; i < p; ++i) {
            model.loadings(i, j) = model.components[j][i] * root / components.scale[i];
        }
    }
    VarimaxResult rotation =
        varimax(model.loadings, config.varimax_max_iter, config.varimax_tol, config.varimax_normalize);
    if (!rotation.converged) result.warnings.push_back("varimax reached max_iter without converging");
    model.rotated = std::move(rotation.rotated);
    model.rotation = std::move(rotation.rotation);
    model.varimax_converged = rotation.converged;
    model.varimax_iterations = rotation.iterations;

    double cumulative = 0.0;
    for (std::size_t j = 0; j < model.n_retained; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < p; ++i) ss += model.rotated(i, j) * model.rotated(i, j);
        model.ss_loadings.push_back(ss);
        model.proportion_var.push_back(ss / static_cast<double>(p));
        cumulative += ss / static_cast<double>(p);
        model.cumulative_var.push_back(cumulative);
    }

    model.loading_threshold = config.loading_threshold;
    LoadingFilterResult filtered = loading_filter(model.rotated, model.questions, config.loading_threshold);
    model.retained_questions = std::move(filtered.retained);
    model.dropped_questions = std::move(filtered.dropped);
    return result;
}

std::string render_pair_table(const std::vector<CorrelatedPair>& pairs) {
    std::size_t w1 = std::string("Question_i").size(), w2 = std::string("Question_j").size();
    for (const auto& pr : pairs) {
        w1 = std::max(w1, pr.first.size());
        w2 = std::max(w2, pr.second.size());
    }
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(w1 + 2)) << "Question_i" << std::setw(static_cast<int>(w2 + 2))
        << "Question_j" << std::right << std::setw(12) << "Correlation" << '\n';
    out << std::fixed << std::setprecision(6);
    for (const auto& pr : pairs) {
        out << std::left << std::setw(static_cast<int>(w1 + 2)) << pr.first << std::setw(static_cast<int>(w2 + 2))
            << pr.second << std::right << std::setw(12) << pr.r << '\n';
    }
    return out.str();
}

std::string render_loading_table(const FactorModel& model) {
    constexpr int kCell = 10;
    std::size_t label_width = std::string("Cumulative var.").size();
    for (const auto& q : model.retained_questions) label_width = std::max(label_width, q.size());
    const int lw = static_cast<int>(label_width + 2);

    std::ostringstream out;
    out << std::left << std::setw(lw) << "Loadings" << std::right;
    for (std::size_t j = 0; j < model.n_retained; ++j) out << std::setw(kCell) << ("Factor " + std::to_string(j + 1));
    out << '\n' << std::fixed << std::setprecision(3);

    auto row_index = [&](const std::string& id) {
        return static_cast<std::size_t>(std::find(model.questions.begin(), model.questions.end(), id) -
                                        model.questions.begin());
    };
    auto trim_right = [](std::string s) {
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
    };
    for (const auto& q : model.retained_questions) {
        std::ostringstream line;
        line << std::fixed << std::setprecision(3) << std::left << std::setw(lw) << q << std::right;
        const std::size_t i = row_index(q);
        for (std::size_t j = 0; j < model.n_retained; ++j) {
            const double v = model.rotated(i, j);
            if (std::abs(v) < model.loading_threshold) {
                line << std::setw(kCell) << "";
            } else {
                line << std::setw(kCell) << v;
            }
        }
        out << trim_right(line.str()) << '\n';
    }
    auto summary_row = [&](const char* title, const std::vector<double>& values) {
        out << std::left << std::setw(lw) << title << std::right;
        for (double v : values) out << std::setw(kCell) << v;
        out << '\n';
    };
    summary_row("SS loadings", model.ss_loadings);
    summary_row("Proportion var.", model.proportion_var);
    summary_row("Cumulative var.", model.cumulative_var);
    return out.str();
}

std::string render_reduction_report(const ReductionResult& result) {
    const FactorModel& m = result.model;
    std::ostringstream out;
    out << "Correlated question pairs (|r| above threshold)\n\n" << render_pair_table(result.pairs) << '\n';
    out << "Dropped for collinearity: ";
    for (std::size_t i = 0; i < result.pruned.size(); ++i) out << (i ? ", " : "") << result.pruned[i];
    out << (result.pruned.empty() ? "none" : "") << "\n\n";
    out << "PCA basis: " << to_string(m.basis) << "; " << m.questions.size() << " questions analyzed\n";
    out << "Eigenvalues:";
    out << std::fixed << std::setprecision(4);
    for (double v : m.eigenvalues) out << ' ' << v;
    out << "\nKaiser criterion: " << m.kaiser_count << " eigenvalues > 1; " << m.n_retained << " factors retained\n";
    out << "Varimax: " << m.varimax_iterations << " sweeps, " << (m.varimax_converged ? "converged" : "NOT converged")
        << "\n\n";
    out << "Rotated loadings (blank where |loading| < " << std::setprecision(2) << m.loading_threshold << ")\n\n";
    out << render_loading_table(m) << '\n';
    out << "Retained questions (" << m.retained_questions.size() << "): ";
    for (std::size_t i = 0; i < m.retained_questions.size(); ++i) out << (i ? ", " : "") << m.retained_questions[i];
    out << "\nDropped by loading filter (" << m.dropped_questions.size() << "): ";
    for (std::size_t i = 0; i < m.dropped_questions.size(); ++i) out << (i ? ", " : "") << m.dropped_questions[i];
    out << '\n';
    for (const auto& w : result.warnings) out << "warning: " << w << '\n';
    return out.str();
}

nlohmann::json factor_model_to_json(const FactorModel& model) {
    auto matrix_rows = [](const LoadingMatrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < m.rows; ++i) {
            std::vector<double> row(m.values.begin() + static_cast<std::ptrdiff_t>(i * m.cols),
                                    m.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * m.cols));
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::json rotation = nlohmann::json::array();
    for (std::size_t i = 0; i < model.rotation.size; ++i) {
        std::vector<double> row(model.rotation.values.begin() + static_cast<std::ptrdiff_t>(i * model.rotation.size),
                                model.rotation.values.begin() +
                                    static_cast<std::ptrdiff_t>((i + 1) * model.rotation.size));
        rotation.push_back(row);
    }
    return {
        {"questions", model.questions},
        {"basis", to_string(model.basis)},
        {"eigenvalues", model.eigenvalues},
        {"components", model.components},
        {"kaiser_count", model.kaiser_count},
        {"n_retained", model.n_retained},
        {"loadings", matrix_rows(model.loadings)},
        {"rotated_loadings", matrix_rows(model.rotated)},
        {"rotation", rotation},
        {"varimax_converged", model.varimax_converged},
        {"varimax_iterations", model.varimax_iterations},
        {"ss_loadings", model.ss_loadings},
        {"proportion_var", model.proportion_var},
        {"cumulative_var", model.cumulative_var},
        {"loading_threshold", model.loading_threshold},
        {"retained_questions", model.retained_questions},
        {"dropped_questions", model.dropped_questions},
    };
}

}  // namespace surveyclust
