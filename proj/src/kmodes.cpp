#include <algorithm>
#include <map>
#include <set>

#include "surveyclust/clustering.hpp"
#include "surveyclust/error.hpp"
#include "surveyclust/random.hpp"

namespace surveyclust {

std::size_t simple_matching_distance(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw InputError("simple_matching_distance: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
    }
    std::size_t mismatches = 0;
    for (std::size_t j = 0; j < a.size(); ++j) mismatches += a[j] != b[j];
    return mismatches;
}

std::vector<int> column_modes(const DataMatrix& data, const std::vector<std::size_t>& rows) {
    std::vector<int> mode(data.cols(), 0);
    for (std::size_t j = 0; j < data.cols(); ++j) {
        std::map<int, std::size_t> counts;
        for (std::size_t i : rows) ++counts[data(i, j)];
        std::size_t best = 0;
        for (const auto& [code, count] : counts) {  // ascending codes: ties keep the lowest
            if (count > best) {
                best = count;
                mode[j] = code;
            }
        }
    }
    return mode;
}

std::size_t total_mismatch_cost(const DataMatrix& data, const std::vector<int>& assignments,
                                const std::vector<std::vector<int>>& modes) {
    std::size_t cost = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        cost += simple_matching_distance(data.row(i), modes[static_cast<std::size_t>(assignments[i] - 1)]);
    }
    return cost;
}

namespace {

std::vector<int> assign_modes(const DataMatrix& data, const std::vector<std::vector<int>>& modes) {
    std::vector<int> assignment(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        std::size_t best = 0;
        std::size_t best_d = simple_matching_distance(data.row(i), modes[0]);
        for (std::size_t c = 1; c < modes.size(); ++c) {
            const std::size_t d = simple_matching_distance(data.row(i), modes[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assignment[i] = static_cast<int>(best) + 1;
    }
    return assignment;
}

// Drops modes that own no record and renumbers the assignment; returns how many were dropped.
std::size_t drop_empty(std::vector<int>& assignment, std::vector<std::vector<int>>& modes) {
    std::vector<std::size_t> sizes(modes.size(), 0);
    for (int a : assignment) ++sizes[static_cast<std::size_t>(a - 1)];
    std::vector<int> relabel(modes.size(), 0);
    std::vector<std::vector<int>> kept;
    for (std::size_t c = 0; c < modes.size(); ++c) {
        if (sizes[c] == 0) continue;
        kept.push_back(std::move(modes[c]));
        relabel[c] = static_cast<int>(kept.size());
    }
    const std::size_t dropped = modes.size() - kept.size();
    for (int& a : assignment) a = relabel[static_cast<std::size_t>(a - 1)];
    modes = std::move(kept);
    return dropped;
}

std::vector<std::vector<int>> random_init(const DataMatrix& data, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng = substream(seed, 0);
    const std::vector<std::size_t> order = random_permutation(rng, data.rows());
    std::vector<std::vector<int>> modes;
    std::set<std::vector<int>> seen;
    std::vector<char> used(data.rows(), 0);
    for (std::size_t i : order) {
        if (modes.size() == k) break;
        std::vector<int> row(data.row(i).begin(), data.row(i).end());
        if (seen.insert(row).second) {
            modes.push_back(std::move(row));
            used[i] = 1;
        }
    }
    // Fewer distinct records than k: duplicate modes, which the no-closest rule collapses.
    for (std::size_t i : order) {
        if (modes.size() == k) break;
        if (!used[i]) modes.emplace_back(data.row(i).begin(), data.row(i).end());
    }
    return modes;
}

// Huang's frequency-based initialisation: spread the most frequent categories over the
// k modes, then replace each with the most similar not-yet-used record.
std::vector<std::vector<int>> huang_init(const DataMatrix& data, std::size_t k) {
    std::vector<std::vector<int>> by_frequency(data.cols());
    for (std::size_t j = 0; j < data.cols(); ++j) {
        std::map<int, std::size_t> counts;
        for (std::size_t i = 0; i < data.rows(); ++i) ++counts[data(i, j)];
        std::vector<std::pair<int, std::size_t>> sorted(counts.begin(), counts.end());
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [code, count] : sorted) by_frequency[j].push_back(code);
    }
    std::vector<std::vector<int>> modes;
    std::set<std::vector<int>> taken;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<int> candidate(data.cols());
        for (std::size_t j = 0; j < data.cols(); ++j) {
            candidate[j] = by_frequency[j][(c + j) % by_frequency[j].size()];
        }
        std::size_t best = data.rows();
        std::size_t best_d = 0;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            std::vector<int> row(data.row(i).begin(), data.row(i).end());
            if (taken.contains(row)) continue;
            const std::size_t d = simple_matching_distance(row, candidate);
            if (best == data.rows() || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        if (best == data.rows()) {
            modes.push_back(candidate);  // every distinct record already used
        } else {
            std::vector<int> row(data.row(best).begin(), data.row(best).end());
            taken.insert(row);
            modes.push_back(std::move(row));
        }
    }
    return modes;
}

std::vector<std::vector<int>> update_modes(const DataMatrix& data, const std::vector<int>& assignment,
                                           std::size_t k) {
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) members[static_cast<std::size_t>(assignment[i] - 1)].push_back(i);
    std::vector<std::vector<int>> modes;
    modes.reserve(k);
    for (const auto& rows : members) modes.push_back(column_modes(data, rows));
    return modes;
}

}  // namespace

ClusterModel kmodes(const DataMatrix& data, const KModesOptions& options) {
    const std::size_t n = data.rows(), k = options.k;
    if (k < 1 || k > n) {
        throw InputError("kmodes: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
    }

    ClusterModel model;
    model.method = Method::KModes;
    model.k_requested = k;
    model.respondent_ids = data.respondent_ids();
    model.question_ids = data.question_ids();
    model.seed = options.seed;
    model.metric = Metric::SimpleMatching;
    model.converged = false;

    std::vector<std::vector<int>> modes =
        options.init == KModesInit::Huang ? huang_init(data, k) : random_init(data, k, options.seed);
    std::vector<int> assignment = assign_modes(data, modes);
    std::size_t dropped = drop_empty(assignment, modes);
    model.objective_history.push_back(static_cast<double>(total_mismatch_cost(data, assignment, modes)));

    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        modes = update_modes(data, assignment, modes.size());
        std::vector<int> next = assign_modes(data, modes);
        dropped += drop_empty(next, modes);
        model.objective_history.push_back(static_cast<double>(total_mismatch_cost(data, next, modes)));
        model.iterations = iter;
        const bool stable = next == assignment;
        assignment = std::move(next);
        if (stable) {
            model.converged = true;
            break;
        }
    }

    model.k = modes.size();
    if (dropped > 0) {
        model.warnings.push_back("no record was closest to " + std::to_string(dropped) + " mode(s); returning " +
                                 std::to_string(model.k) + " of " + std::to_string(k) + " requested clusters");
    }
    if (!model.converged) model.warnings.push_back("k-modes reached max_iter without converging");
    model.assignments = std::move(assignment);
    model.modes = std::move(modes);
    model.objective = static_cast<double>(total_mismatch_cost(data, model.assignments, model.modes));
    return model;
}

}  // namespace surveyclust
