#include <doctest.h>

#include <map>

#include "matrices.hpp"
#include "surveyclust/clustering.hpp"
#include "surveyclust/error.hpp"

using namespace surveyclust;

namespace {

std::vector<int> majority(const std::vector<std::vector<int>>& rows, const std::vector<int>& labels, int cluster) {
    const std::size_t p = rows.front().size();
    std::vector<int> mode(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::map<int, int> counts;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (labels[i] == cluster) ++counts[rows[i][j]];
        int best = 0, best_count = -1;
        for (const auto& [code, c] : counts) {
            if (c > best_count) {
                best = code;
                best_count = c;
            }
        }
        mode[j] = best;
    }
    return mode;
}

}  // namespace

TEST_SUITE("kmodes") {
    TEST_CASE("simple matching distance examples") {
        const std::vector<int> a{1, 2, 3}, b{1, 2}, c{2, 2}, d{1, 1, 1, 1}, e{2, 2, 2, 2};
        CHECK(simple_matching_distance(a, a) == 0);
        CHECK(simple_matching_distance(b, c) == 1);
        CHECK(simple_matching_distance(d, e) == 4);
        CHECK_THROWS_AS(simple_matching_distance(a, b), InputError);
    }

    TEST_CASE("simple matching is a metric on random triples") {
        oracle::Rng rng(4);
        for (int t = 0; t < 10000; ++t) {
            const std::size_t p = static_cast<std::size_t>(rng.between(1, 6));
            std::vector<int> x(p), y(p), z(p);
            for (std::size_t j = 0; j < p; ++j) {
                x[j] = rng.between(1, 3);
                y[j] = rng.between(1, 3);
                z[j] = rng.between(1, 3);
            }
            const auto xy = simple_matching_distance(x, y);
            CHECK((xy == 0) == (x == y));
            CHECK(xy == simple_matching_distance(y, x));
            CHECK(simple_matching_distance(x, z) <= xy + simple_matching_distance(y, z));
        }
    }

    TEST_CASE("two identical records and one outlier") {
        const DataMatrix d = fixtures::matrix({{1, 1}, {1, 1}, {2, 2}});
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const ClusterModel m = kmodes(d, {2, seed, 100, KModesInit::Random});
            CHECK(m.k == 2);
            CHECK(*m.objective == 0.0);
            CHECK(m.assignments[0] == m.assignments[1]);
            CHECK(m.assignments[0] != m.assignments[2]);
        }
    }

    TEST_CASE("k = 1 gives the coordinate-wise majority") {
        const DataMatrix d = fixtures::matrix({{1, 2}, {1, 3}, {1, 3}});
        const ClusterModel m = kmodes(d, {1, 1, 100, KModesInit::Random});
        CHECK(m.modes[0] == std::vector<int>{1, 3});
        CHECK(*m.objective == 1.0);
        CHECK(column_modes(d, {0, 1, 2}) == std::vector<int>{1, 3});
        CHECK(column_modes(fixtures::matrix({{2}, {1}}), {0, 1}) == std::vector<int>{1});
    }

    TEST_CASE("identical records collapse with a warning") {
        const DataMatrix d = fixtures::matrix({{3, 3}, {3, 3}, {3, 3}, {3, 3}});
        const ClusterModel m = kmodes(d, {2, 5, 100, KModesInit::Random});
        CHECK(m.k_requested == 2);
        CHECK(m.k == 1);
        CHECK_FALSE(m.warnings.empty());
        for (int a : m.assignments) CHECK(a == 1);
    }

    TEST_CASE("k-modes invariants on random data") {
        oracle::Rng rng(8);
        for (int t = 0; t < 60; ++t) {
            const std::size_t n = static_cast<std::size_t>(rng.between(4, 60));
            const std::size_t p = static_cast<std::size_t>(rng.between(1, 6));
            const std::size_t k = static_cast<std::size_t>(rng.between(1, std::min<int>(5, static_cast<int>(n))));
            const auto rows = fixtures::random_rows(rng, n, p, 3);
            const DataMatrix d = fixtures::matrix(rows);
            const KModesInit init = t % 2 ? KModesInit::Huang : KModesInit::Random;
            const ClusterModel m = kmodes(d, {k, rng.next(), 100, init});
            CHECK(m.k <= k);
            CHECK(m.k >= 1);
            for (std::size_t i = 1; i < m.objective_history.size(); ++i)
                CHECK(m.objective_history[i] <= m.objective_history[i - 1]);
            const auto labels = fixtures::zero_based(m.assignments);
            CHECK(*m.objective == oracle::partition_mismatch(rows, labels, m.k));
            CHECK(*m.objective == total_mismatch_cost(d, m.assignments, m.modes));
            for (std::size_t s : m.cluster_sizes()) CHECK(s > 0);
            if (m.converged) {
                for (std::size_t c = 0; c < m.k; ++c) CHECK(m.modes[c] == majority(rows, labels, static_cast<int>(c)));
            }
        }
    }

    TEST_CASE("objective bounded below by the brute-force optimum") {
        oracle::Rng rng(29);
        for (int t = 0; t < 25; ++t) {
            const std::size_t n = static_cast<std::size_t>(rng.between(3, 8));
            const std::size_t p = static_cast<std::size_t>(rng.between(1, 4));
            const std::size_t k = static_cast<std::size_t>(rng.between(1, 3));
            const auto rows = fixtures::random_rows(rng, n, p, 3);
            const double best = oracle::brute_force_min(
                n, k, [&](const std::vector<int>& l) { return oracle::partition_mismatch(rows, l, k); });
            const ClusterModel m = kmodes(fixtures::matrix(rows), {k, rng.next(), 100, KModesInit::Random});
            CHECK(*m.objective >= best);
        }
    }

    TEST_CASE("determinism") {
        oracle::Rng rng(6);
        const DataMatrix d = fixtures::matrix(fixtures::random_rows(rng, 100, 5, 4));
        CHECK(cluster_model_to_json(kmodes(d, {4, 3, 100, KModesInit::Huang})).dump() ==
              cluster_model_to_json(kmodes(d, {4, 3, 100, KModesInit::Huang})).dump());
    }
}
