#include <algorithm>
#include <cmath>
#include <tuple>

#include "surveyclust/clustering.hpp"
#include "surveyclust/error.hpp"

namespace surveyclust {

double linkage_tie_key(double value) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    int exponent = 0;
    const double mantissa = std::frexp(value, &exponent);
    return std::ldexp(std::round(std::ldexp(mantissa, 30)), exponent - 30);
}

std::vector<double> pairwise_distances(std::span<const double> points, std::size_t n, std::size_t dims,
                                       Metric metric) {
    std::vector<double> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = points.data() + i * dims;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* b = points.data() + j * dims;
            double d = 0.0;
            if (metric == Metric::Euclidean) {
                for (std::size_t t = 0; t < dims; ++t) d += (a[t] - b[t]) * (a[t] - b[t]);
                d = std::sqrt(d);
            } else {
                for (std::size_t t = 0; t < dims; ++t) d += a[t] != b[t] ? 1.0 : 0.0;
            }
            out.push_back(d);
        }
    }
    return out;
}

namespace {

class CondensedMatrix {
public:
    CondensedMatrix(std::vector<double> values, std::size_t n) : values_(std::move(values)), n_(n) {}
    double& at(std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        return values_[i * n_ - i * (i + 1) / 2 + (j - i - 1)];
    }

private:
    std::vector<double> values_;
    std::size_t n_;
};

// Strict total order on candidate merges.
using MergeKey = std::tuple<double, std::size_t, std::size_t>;

}  // namespace

Dendrogram hclust_points(std::span<const double> points, std::size_t n, std::size_t dims, Linkage linkage,
                         Metric metric) {
    if (n < 2) throw InputError("hclust needs at least 2 points");
    CondensedMatrix dist(pairwise_distances(points, n, dims, metric), n);

    std::vector<std::size_t> node(n), size(n, 1), nn(n, 0);
    std::vector<MergeKey> nn_key(n);
    std::vector<std::size_t> active(n);
    for (std::size_t i = 0; i < n; ++i) node[i] = active[i] = i;

    auto key = [&](std::size_t a, std::size_t b) {
        return MergeKey{linkage_tie_key(dist.at(a, b)), std::min(node[a], node[b]), std::max(node[a], node[b])};
    };
    auto rescan = [&](std::size_t a) {
        bool found = false;
        for (std::size_t b : active) {
            if (b == a) continue;
            const MergeKey candidate = key(a, b);
            if (!found || candidate < nn_key[a]) {
                nn_key[a] = candidate;
                nn[a] = b;
                found = true;
            }
        }
    };
    for (std::size_t a = 0; a < n; ++a) rescan(a);

    Dendrogram tree;
    tree.leaves = n;
    tree.linkage = linkage;
    tree.metric = metric;
    tree.merges.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t a = active.front();
        for (std::size_t s : active) {
            if (nn_key[s] < nn_key[a]) a = s;
        }
        const std::size_t b = nn[a];
        const std::size_t keep = std::min(a, b), gone = std::max(a, b);

        Merge merge;
        merge.left = std::min(node[a], node[b]);
        merge.right = std::max(node[a], node[b]);
        merge.height = dist.at(a, b);
        merge.size = size[a] + size[b];
        tree.merges.push_back(merge);

        active.erase(std::find(active.begin(), active.end(), gone));
        for (std::size_t s : active) {
            if (s == keep) continue;
            const double da = dist.at(keep, s), db = dist.at(gone, s);
            double updated = 0.0;
            switch (linkage) {
                case Linkage::Single: updated = std::min(da, db); break;
                case Linkage::Complete: updated = std::max(da, db); break;
                case Linkage::Average:
                    updated = (static_cast<double>(size[keep]) * da + static_cast<double>(size[gone]) * db) /
                              static_cast<double>(size[keep] + size[gone]);
                    break;
            }
            dist.at(keep, s) = updated;
        }
        size[keep] += size[gone];
        node[keep] = n + step;

        if (active.size() < 2) break;
        rescan(keep);
        for (std::size_t s : active) {
            if (s == keep) continue;
            if (nn[s] == keep || nn[s] == gone) {
                rescan(s);
            } else if (const MergeKey candidate = key(s, keep); candidate < nn_key[s]) {
                nn_key[s] = candidate;
                nn[s] = keep;
            }
        }
    }
    return tree;
}

Dendrogram hclust(const DataMatrix& data, Linkage linkage, Metric metric, bool standardize) {
    const std::vector<double> points = standardize ? standardized_values(data) : raw_values(data);
    return hclust_points(points, data.rows(), data.cols(), linkage, metric);
}

std::vector<int> cut_tree(const Dendrogram& dendrogram, std::size_t k) {
    const std::size_t n = dendrogram.leaves;
    if (k < 1 || k > n) throw InputError("cut_tree: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
    if (dendrogram.merges.size() + 1 != n) throw InputError("cut_tree: dendrogram must hold n - 1 merges");

    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::size_t> representative(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) representative[i] = i;
    for (std::size_t t = 0; t + k < n; ++t) {
        const Merge& m = dendrogram.merges[t];
        const std::size_t ra = find(representative[m.left]), rb = find(representative[m.right]);
        parent[std::max(ra, rb)] = std::min(ra, rb);
        representative[n + t] = std::min(ra, rb);
    }
    std::vector<int> label(n, 0), assignment(n);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (label[root] == 0) label[root] = ++next;
        assignment[i] = label[root];
    }
    return assignment;
}

}  // namespace surveyclust
