#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "golden_fixtures.hpp"
#include "oracles.hpp"
#include "surveyclust/error.hpp"
#include "surveyclust/reduction.hpp"

using namespace surveyclust;

namespace {

std::vector<RespondentRecord> columns_to_records(const std::vector<std::string>& ids,
                                                 const std::vector<std::vector<int>>& columns) {
    std::vector<RespondentRecord> out;
    for (std::size_t r = 0; r < columns[0].size(); ++r) {
        std::map<std::string, int> answers;
        for (std::size_t c = 0; c < ids.size(); ++c) answers[ids[c]] = columns[c][r];
        out.push_back(fixtures::record("r" + std::to_string(r), answers));
    }
    return out;
}

CorrelationMatrix manual_matrix(const std::vector<std::string>& ids, const std::vector<std::vector<double>>& r) {
    CorrelationMatrix m;
    m.questions = ids;
    m.r = SquareMatrix(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = 0; j < ids.size(); ++j) m.r(i, j) = r[i][j];
    m.pair_n.assign(ids.size() * ids.size(), 100);
    return m;
}

LoadingMatrix random_loadings(oracle::Rng& rng, std::size_t p, std::size_t k) {
    LoadingMatrix l(p, k);
    for (auto& v : l.values) v = 0.9 * (2 * rng.unit() - 1);
    return l;
}

SquareMatrix random_correlation(oracle::Rng& rng, std::size_t p, std::size_t n) {
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const double common = rng.bell();
        for (std::size_t c = 0; c < p; ++c) cols[c][r] = (c % 2 ? common : 0.3 * common) + rng.bell();
    }
    SquareMatrix m(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) = i == j ? 1.0 : oracle::pearson(cols[i], cols[j]);
    return m;
}

}  // namespace

TEST_SUITE("reduction") {
    TEST_CASE("pearson on integer codes") {
        const auto records = columns_to_records({"a", "b"}, {{1, 2, 3}, {2, 4, 6}});
        const CorrelationMatrix m = correlation_matrix(records, {"a", "b"});
        CHECK(m.r(0, 1) == doctest::Approx(1.0));
        const auto records2 = columns_to_records({"a", "b"}, {{1, 2, 3, 4}, {4, 3, 1, 2}});
        CHECK(correlation_matrix(records2, {"a", "b"}).r(0, 1) == doctest::Approx(-0.8));
    }

    TEST_CASE("correlation matches an independent oracle and skips incomplete pairs") {
        oracle::Rng rng(3);
        std::vector<RespondentRecord> records;
        for (int r = 0; r < 80; ++r) {
            std::map<std::string, int> answers{{"a", rng.between(1, 5)}, {"b", rng.between(1, 4)}, {"c", rng.between(1, 2)}};
            if (r % 7 == 0) answers.erase("b");
            records.push_back(fixtures::record("r" + std::to_string(r), answers));
        }
        const CorrelationMatrix m = correlation_matrix(records, {"a", "b", "c"});
        std::vector<double> a, b;
        for (const auto& rec : records) {
            if (!rec.answers.count("b")) continue;
            a.push_back(rec.answers.at("a"));
            b.push_back(rec.answers.at("b"));
        }
        CHECK(m.r(0, 1) == doctest::Approx(oracle::pearson(a, b)).epsilon(1e-12));
        CHECK(m.pair_n[0 * 3 + 1] == a.size());
        CHECK(m.r(1, 0) == m.r(0, 1));
    }

    TEST_CASE("zero-variance questions are excluded with a warning") {
        const auto records = columns_to_records({"a", "b", "z"}, {{1, 2, 3, 4}, {2, 1, 4, 3}, {2, 2, 2, 2}});
        const CorrelationMatrix m = correlation_matrix(records, {"a", "b", "z"});
        CHECK(m.questions == std::vector<std::string>{"a", "b"});
        CHECK(m.excluded_zero_variance == std::vector<std::string>{"z"});
        CHECK_FALSE(m.warnings.empty());
    }

    TEST_CASE("pairs are strictly above the threshold") {
        const CorrelationMatrix m =
            manual_matrix({"a", "b", "c"}, {{1, 0.2, -0.5}, {0.2, 1, 0.21}, {-0.5, 0.21, 1}});
        const auto pairs = high_correlation_pairs(m, 0.2);
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[0].first == "a");
        CHECK(pairs[0].second == "c");
        CHECK(pairs[0].r == -0.5);
        CHECK(pairs[1].first == "b");
    }

    TEST_CASE("pruning drops the member with the larger mean correlation") {
        const CorrelationMatrix m = manual_matrix({"A", "B", "C"}, {{1, 0.6, 0.3}, {0.6, 1, 0.1}, {0.3, 0.1, 1}});
        const auto pairs = high_correlation_pairs(m, 0.2);
        CHECK(prune_collinear(pairs, m, PrunePolicy{}) == std::vector<std::string>{"A"});
        CHECK(prune_collinear(pairs, m, PrunePolicy{0.7, {}}).empty());
        CHECK(prune_collinear(pairs, m, PrunePolicy{0.5, {"C"}}) == std::vector<std::string>{"C"});
    }

    TEST_CASE("rank-one matrix has eigenvalues 2 and 0") {
        SquareMatrix m(2, 1.0);
        const PcaResult r = pca_from_matrix(m, {"a", "b"});
        CHECK(r.eigenvalues[0] == doctest::Approx(2.0));
        CHECK(std::abs(r.eigenvalues[1]) < 1e-12);
        CHECK(std::abs(r.components[0][0]) == doctest::Approx(std::sqrt(0.5)));
    }

    TEST_CASE("eigen decomposition residual, orthonormality and trace") {
        oracle::Rng rng(11);
        for (int t = 0; t < 20; ++t) {
            const std::size_t p = static_cast<std::size_t>(rng.between(2, 12));
            const SquareMatrix m = random_correlation(rng, p, 60);
            std::vector<std::string> ids;
            for (std::size_t i = 0; i < p; ++i) ids.push_back("q" + std::to_string(i));
            const PcaResult r = pca_from_matrix(m, ids);
            double sum = 0;
            for (std::size_t j = 0; j < p; ++j) {
                sum += r.eigenvalues[j];
                if (j > 0) CHECK(r.eigenvalues[j] <= r.eigenvalues[j - 1] + 1e-12);
                const auto& v = r.components[j];
                std::size_t big = 0;
                for (std::size_t i = 0; i < p; ++i) {
                    double mv = 0;
                    for (std::size_t c = 0; c < p; ++c) mv += m(i, c) * v[c];
                    CHECK(std::abs(mv - r.eigenvalues[j] * v[i]) < 1e-9);
                    if (std::abs(v[i]) > std::abs(v[big])) big = i;
                }
                CHECK(v[big] > 0);
                for (std::size_t k = 0; k < p; ++k) {
                    double dot = 0;
                    for (std::size_t i = 0; i < p; ++i) dot += v[i] * r.components[k][i];
                    CHECK(std::abs(dot - (j == k ? 1.0 : 0.0)) < 1e-9);
                }
            }
            CHECK(sum == doctest::Approx(static_cast<double>(p)).epsilon(1e-9));
        }
    }

    TEST_CASE("Kaiser rule counts eigenvalues strictly above 1") {
        CHECK(kaiser_retain({2.1, 1.3, 0.9, 0.4}) == 2);
        CHECK(kaiser_retain({1.0}) == 0);
        CHECK(kaiser_retain({}) == 0);
    }

    TEST_CASE("varimax preserves communalities and stays orthogonal") {
        oracle::Rng rng(17);
        for (int t = 0; t < 30; ++t) {
            const std::size_t p = static_cast<std::size_t>(rng.between(3, 15));
            const std::size_t k = static_cast<std::size_t>(rng.between(1, 4));
            const LoadingMatrix l = random_loadings(rng, p, k);
            const VarimaxResult v = varimax(l);
            const auto before = l.communalities();
            const auto after = v.rotated.communalities();
            for (std::size_t i = 0; i < p; ++i) CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-9));
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = 0; b < k; ++b) {
                    double dot = 0;
                    for (std::size_t c = 0; c < k; ++c) dot += v.rotation(c, a) * v.rotation(c, b);
                    CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
                }
            }
            for (std::size_t i = 1; i < v.criterion.size(); ++i) CHECK(v.criterion[i] >= v.criterion[i - 1] - 1e-12);
            CHECK(varimax_criterion(v.rotated) >= varimax_criterion(l) - 1e-12);
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = 0; j < k; ++j) {
                    double x = 0;
                    for (std::size_t c = 0; c < k; ++c) x += l(i, c) * v.rotation(c, j);
                    CHECK(std::abs(x - v.rotated(i, j)) < 1e-9);
                }
            }
        }
    }

    TEST_CASE("loading filter boundary") {
        LoadingMatrix l(3, 2);
        l(0, 0) = 0.29;
        l(0, 1) = -0.29;
        l(1, 0) = 0.10;
        l(1, 1) = -0.30;
        l(2, 0) = 0.8;
        const auto f = loading_filter(l, {"low", "edge", "high"}, 0.30);
        CHECK(f.retained == std::vector<std::string>{"edge", "high"});
        CHECK(f.dropped == std::vector<std::string>{"low"});
    }

    TEST_CASE("reduce runs the whole chain and renders a sparse loading table") {
        oracle::Rng rng(23);
        std::vector<RespondentRecord> records;
        for (int r = 0; r < 300; ++r) {
            const int wealth = rng.between(0, 2);
            records.push_back(fixtures::typical("r" + std::to_string(r),
                                                {{"rooms", std::clamp(1 + wealth + rng.between(0, 2), 1, 5)},
                                                 {"meals", std::clamp(1 + wealth + rng.between(0, 1), 1, 4)},
                                                 {"water", rng.between(0, 4) ? 1 : 2},
                                                 {"electricity", rng.between(0, 6) ? 1 : 2},
                                                 {"households", rng.between(1, 5)},
                                                 {"sleep_company", 1}}));
        }
        ReductionConfig cfg;
        const ReductionResult r = reduce(records, fixtures::small_schema(), cfg);
        CHECK(r.correlation.excluded_zero_variance == std::vector<std::string>{"sleep_company"});
        CHECK(r.model.n_retained == std::max<std::size_t>(1, r.model.kaiser_count));
        CHECK(r.model.retained_questions.size() + r.model.dropped_questions.size() == r.model.questions.size());
        double cumulative = 0;
        for (std::size_t j = 0; j < r.model.n_retained; ++j) {
            cumulative += r.model.proportion_var[j];
            CHECK(r.model.cumulative_var[j] == doctest::Approx(cumulative));
        }
        const std::string table = render_loading_table(r.model);
        CHECK(table.find("SS loadings") != std::string::npos);
        for (std::size_t i = 0; i < r.model.rotated.rows; ++i) {
            for (std::size_t j = 0; j < r.model.rotated.cols; ++j) {
                const double v = r.model.rotated(i, j);
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.3f", v);
                if (std::abs(v) >= 0.30) CHECK(table.find(buf) != std::string::npos);
            }
        }
        const auto json = factor_model_to_json(r.model);
        CHECK(json.contains("rotated_loadings"));
    }

    TEST_CASE("sparse loading table matches the golden rendering") {
        CHECK(render_loading_table(fixtures::golden_factor_model()) ==
              fixtures::read_file(fixtures::kTestDir / "golden" / "loading_table.txt"));
    }

    TEST_CASE("independent questions have eigenvalues near 1") {
        oracle::Rng rng(47);
        const std::size_t p = 6, n = 5000;
        std::vector<std::vector<double>> cols(p, std::vector<double>(n));
        for (auto& c : cols)
            for (double& v : c) v = rng.bell();
        SquareMatrix m(p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) m(i, j) = i == j ? 1.0 : oracle::pearson(cols[i], cols[j]);
        for (double e : pca_from_matrix(m, {"a", "b", "c", "d", "e", "f"}).eigenvalues) CHECK(std::abs(e - 1.0) < 0.15);
    }

    TEST_CASE("varimax leaves simple structure and single factors alone") {
        LoadingMatrix simple(4, 2);
        simple(0, 0) = 0.8;
        simple(1, 0) = 0.7;
        simple(2, 1) = 0.6;
        simple(3, 1) = -0.9;
        const VarimaxResult v = varimax(simple);
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) {
                const double x = std::abs(v.rotation(a, b));
                CHECK((x < 1e-6 || std::abs(x - 1.0) < 1e-6));
            }
        LoadingMatrix one(3, 1);
        one(0, 0) = 0.5;
        one(1, 0) = -0.4;
        one(2, 0) = 0.9;
        const VarimaxResult single = varimax(one);
        CHECK(single.rotation(0, 0) == 1.0);
        CHECK(single.rotated.values == one.values);
    }

    TEST_CASE("strong loadings drop nothing") {
        const LoadingMatrix l(3, 2, 0.9);
        const auto f = loading_filter(l, {"a", "b", "c"});
        CHECK(f.dropped.empty());
        CHECK(f.retained.size() == 3);
    }

    TEST_CASE("no eigenvalue above 1 falls back to one factor with a warning") {
        const SurveySchema s = parse_schema(R"(name: u
questions:
  - {id: a, kind: binary}
  - {id: b, kind: binary}
rules: []
baseline_set: []
)");
        const auto records = columns_to_records({"a", "b"}, {{1, 2, 1, 2}, {1, 1, 2, 2}});
        const ReductionResult r = reduce(records, s, ReductionConfig{});
        CHECK(r.model.kaiser_count == 0);
        CHECK(r.model.n_retained == 1);
        CHECK_FALSE(r.warnings.empty());
    }

    TEST_CASE("basis parsing") {
        CHECK(parse_pca_basis("covariance") == PcaBasis::Covariance);
        CHECK(to_string(PcaBasis::Correlation) == "correlation");
        CHECK_THROWS_AS(parse_pca_basis("spearman"), ConfigError);
    }
}
