#include <algorithm>
#include <limits>
#include <set>

#include "surveyclust/clustering.hpp"
#include "surveyclust/error.hpp"
#include "surveyclust/random.hpp"

namespace surveyclust {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dims) {
    double sum = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return sum;
}

std::vector<int> assign_nearest(const std::vector<double>& points, std::size_t n, std::size_t dims,
                                const std::vector<std::vector<double>>& centers) {
    std::vector<int> assignment(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = points.data() + i * dims;
        std::size_t best = 0;
        double best_d = squared_distance(x, centers[0].data(), dims);
        for (std::size_t c = 1; c < centers.size(); ++c) {
            const double d = squared_distance(x, centers[c].data(), dims);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assignment[i] = static_cast<int>(best) + 1;
    }
    return assignment;
}

std::vector<double> cluster_mean(const std::vector<double>& points, std::size_t dims,
                                 const std::vector<int>& assignment, int cluster) {
    std::vector<double> mean(dims, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != cluster) continue;
        for (std::size_t d = 0; d < dims; ++d) mean[d] += points[i * dims + d];
        ++count;
    }
    for (double& v : mean) v /= static_cast<double>(count);
    return mean;
}

// Recomputes centres as cluster means, repairing empty clusters in index order.
std::vector<std::vector<double>> update_centers(const std::vector<double>& points, std::size_t dims, std::size_t k,
                                                std::vector<int>& assignment, std::size_t& repairs) {
    std::vector<std::size_t> sizes(k, 0);
    for (int a : assignment) ++sizes[static_cast<std::size_t>(a - 1)];
    std::vector<std::vector<double>> centers(k);
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] > 0) centers[c] = cluster_mean(points, dims, assignment, static_cast<int>(c) + 1);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] > 0) continue;
        std::size_t farthest = assignment.size();
        double farthest_d = -1.0;
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            const std::size_t owner = static_cast<std::size_t>(assignment[i] - 1);
            if (sizes[owner] < 2) continue;
            const double d = squared_distance(points.data() + i * dims, centers[owner].data(), dims);
            if (d > farthest_d) {
                farthest_d = d;
                farthest = i;
            }
        }
        const std::size_t donor = static_cast<std::size_t>(assignment[farthest] - 1);
        assignment[farthest] = static_cast<int>(c) + 1;
        --sizes[donor];
        sizes[c] = 1;
        centers[c].assign(points.begin() + static_cast<std::ptrdiff_t>(farthest * dims),
                          points.begin() + static_cast<std::ptrdiff_t>((farthest + 1) * dims));
        centers[donor] = cluster_mean(points, dims, assignment, static_cast<int>(donor) + 1);
        ++repairs;
    }
    return centers;
}

}  // namespace

double sse(std::span<const double> points, std::size_t dims, const std::vector<int>& assignments,
           const std::vector<std::vector<double>>& centers) {
    double total = 0.0;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        total += squared_distance(points.data() + i * dims,
                                  centers[static_cast<std::size_t>(assignments[i] - 1)].data(), dims);
    }
    return total;
}

ClusterModel kmeans(const DataMatrix& data, const KMeansOptions& options) {
    const std::size_t n = data.rows(), dims = data.cols();
    const std::size_t k = options.k;
    if (k < 1 || k > n) {
        throw InputError("kmeans: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
    }
    const std::vector<double> points = options.standardize ? standardized_values(data) : raw_values(data);

    // Initial centres: k seeded rows, preferring distinct code vectors.
    std::mt19937_64 rng = substream(options.seed, 0);
    const std::vector<std::size_t> order = random_permutation(rng, n);
    std::vector<std::size_t> chosen;
    std::set<std::vector<int>> seen;
    for (std::size_t i : order) {
        if (chosen.size() == k) break;
        std::vector<int> row(data.row(i).begin(), data.row(i).end());
        if (seen.insert(row).second) chosen.push_back(i);
    }
    for (std::size_t i : order) {
        if (chosen.size() == k) break;
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
    }
    std::vector<std::vector<double>> centers;
    for (std::size_t i : chosen) {
        centers.emplace_back(points.begin() + static_cast<std::ptrdiff_t>(i * dims),
                             points.begin() + static_cast<std::ptrdiff_t>((i + 1) * dims));
    }

    ClusterModel model;
    model.method = Method::KMeans;
    model.k_requested = k;
    model.k = k;
    model.respondent_ids = data.respondent_ids();
    model.question_ids = data.question_ids();
    model.seed = options.seed;
    model.standardized = options.standardize;
    model.converged = false;

    std::vector<int> assignment = assign_nearest(points, n, dims, centers);
    model.objective_history.push_back(sse(points, dims, assignment, centers));
    std::size_t repairs = 0;
    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        centers = update_centers(points, dims, k, assignment, repairs);
        std::vector<int> next = assign_nearest(points, n, dims, centers);
        model.objective_history.push_back(sse(points, dims, next, centers));
        model.iterations = iter;
        const bool stable = next == assignment;
        assignment = std::move(next);
        if (stable) {
            model.converged = true;
            break;
        }
    }
    if (repairs > 0) {
        model.warnings.push_back("re-seeded " + std::to_string(repairs) + " empty cluster(s) with farthest points");
    }
    if (!model.converged) model.warnings.push_back("k-means reached max_iter without converging");
    // Clusters still empty at the end (fewer distinct rows than k) are dropped.
    std::vector<std::size_t> counts(k, 0);
    for (int a : assignment) ++counts[static_cast<std::size_t>(a - 1)];
    std::vector<int> renumber(k, 0);
    std::vector<std::vector<double>> kept;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        kept.push_back(centers[c]);
        renumber[c] = static_cast<int>(kept.size());
    }
    if (kept.size() < k) {
        for (int& a : assignment) a = renumber[static_cast<std::size_t>(a - 1)];
        model.warnings.push_back(std::to_string(k - kept.size()) + " cluster(s) ended empty; returning " +
                                 std::to_string(kept.size()) + " clusters");
        model.k = kept.size();
        centers = std::move(kept);
    }
    model.assignments = std::move(assignment);
    model.centers = std::move(centers);
    model.objective = sse(points, dims, model.assignments, model.centers);
    return model;
}

}  // namespace surveyclust
