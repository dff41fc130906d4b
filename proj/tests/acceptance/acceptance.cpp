#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "golden_fixtures.hpp"
#include "matrices.hpp"
#include "oracles.hpp"
#include "surveyclust/baseline.hpp"
#include "surveyclust/clustering.hpp"
#include "surveyclust/evaluation.hpp"
#include "surveyclust/ingest.hpp"
#include "surveyclust/pipeline.hpp"
#include "surveyclust/reduction.hpp"
#include "surveyclust/synthgen.hpp"

using namespace surveyclust;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 5) failures.push_back(what);
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

oracle::Linkage to_oracle(Linkage l) {
    switch (l) {
        case Linkage::Complete: return oracle::Linkage::Complete;
        case Linkage::Single: return oracle::Linkage::Single;
        case Linkage::Average: return oracle::Linkage::Average;
    }
    return oracle::Linkage::Complete;
}

Outcome hierarchical_oracle() {
    Outcome o;
    const auto start = Clock::now();
    oracle::Rng rng(1001);
    std::size_t compared = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.between(2, 8));
        const std::size_t p = static_cast<std::size_t>(rng.between(1, 4));
        const auto rows = fixtures::random_rows(rng, n, p, rng.between(2, 5));
        for (Linkage linkage : {Linkage::Complete, Linkage::Single, Linkage::Average}) {
            const Dendrogram den = hclust(fixtures::matrix(rows), linkage);
            const auto expected = oracle::naive_hclust(fixtures::as_points(rows), to_oracle(linkage));
            bool same = den.merges.size() == expected.size();
            for (std::size_t s = 0; same && s < expected.size(); ++s) {
                const Merge& m = den.merges[s];
                same = m.left == expected[s].left && m.right == expected[s].right && m.size == expected[s].size &&
                       std::abs(m.height - expected[s].height) <= 1e-12 * std::max(1.0, expected[s].height);
            }
            o.require(same, "fixture " + std::to_string(t) + " linkage " + to_string(linkage));
            ++compared;
        }
    }
    const double secs = seconds_since(start);
    o.require(secs < 10.0, "runtime " + fmt("%.2f s", secs));
    o.detail = std::to_string(compared) + " merge sequences, " + fmt("%.2f s", secs);
    return o;
}

Outcome kmeans_contract() {
    Outcome o;
    oracle::Rng rng(2002);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.between(4, 80));
        const std::size_t p = static_cast<std::size_t>(rng.between(1, 6));
        const std::size_t k = static_cast<std::size_t>(rng.between(1, std::min<int>(7, static_cast<int>(n))));
        const auto rows = fixtures::random_rows(rng, n, p, 5);
        const DataMatrix d = fixtures::matrix(rows);
        const std::size_t max_iter = 300;
        const ClusterModel m = kmeans(d, {k, rng.next(), max_iter, false});
        const std::string tag = "fixture " + std::to_string(t);
        for (std::size_t i = 1; i < m.objective_history.size(); ++i) {
            o.require(m.objective_history[i] <= m.objective_history[i - 1] + 1e-9, tag + " SSE increased");
        }
        o.require(m.iterations <= max_iter, tag + " exceeded max_iter");
        const double recomputed =
            oracle::partition_sse(fixtures::as_points(rows), fixtures::zero_based(m.assignments), m.k);
        o.require(std::abs(*m.objective - recomputed) <= 1e-9 * std::max(1.0, recomputed), tag + " SSE mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            auto dist = [&](std::size_t c) {
                double s = 0;
                for (std::size_t j = 0; j < p; ++j) s += (rows[i][j] - m.centers[c][j]) * (rows[i][j] - m.centers[c][j]);
                return s;
            };
            const std::size_t own = static_cast<std::size_t>(m.assignments[i] - 1);
            for (std::size_t c = 0; c < m.k; ++c) {
                o.require(dist(own) <= dist(c) + 1e-9, tag + " not Voronoi");
                if (c < own) o.require(dist(own) < dist(c), tag + " tie not broken to the lowest index");
            }
        }
    }
    const ClusterModel two = kmeans(fixtures::matrix({{0}, {0}, {10}, {10}}), {2, 1, 300, false});
    o.require(*two.objective == 0.0, "{0,0,10,10} SSE " + std::to_string(*two.objective));
    o.detail = "200 fixtures; {0,0,10,10} SSE " + fmt("%g", *two.objective);
    return o;
}

Outcome kmodes_contract() {
    Outcome o;
    oracle::Rng rng(3003);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.between(4, 80));
        const std::size_t p = static_cast<std::size_t>(rng.between(1, 6));
        const std::size_t k = static_cast<std::size_t>(rng.between(1, std::min<int>(6, static_cast<int>(n))));
        const auto rows = fixtures::random_rows(rng, n, p, 3);
        const DataMatrix d = fixtures::matrix(rows);
        const ClusterModel m = kmodes(d, {k, rng.next(), 100, t % 2 ? KModesInit::Huang : KModesInit::Random});
        const std::string tag = "fixture " + std::to_string(t);
        for (std::size_t i = 1; i < m.objective_history.size(); ++i) {
            o.require(m.objective_history[i] <= m.objective_history[i - 1], tag + " cost increased");
        }
        const auto labels = fixtures::zero_based(m.assignments);
        o.require(*m.objective == oracle::partition_mismatch(rows, labels, m.k), tag + " cost mismatch");
        o.require(m.converged, tag + " did not converge");
        for (std::size_t c = 0; c < m.k; ++c) {
            for (std::size_t j = 0; j < p; ++j) {
                std::map<int, int> counts;
                for (std::size_t i = 0; i < n; ++i)
                    if (labels[i] == static_cast<int>(c)) ++counts[rows[i][j]];
                int best = 0, best_count = -1;
                for (const auto& [code, count] : counts) {
                    if (count > best_count) {
                        best = code;
                        best_count = count;
                    }
                }
                o.require(m.modes[c][j] == best, tag + " mode is not the majority");
            }
        }
    }
    const ClusterModel collapsed = kmodes(fixtures::matrix({{2, 2}, {2, 2}, {2, 2}}), {2, 1, 100, KModesInit::Random});
    o.require(collapsed.k == 1 && !collapsed.warnings.empty(), "identical records did not collapse with a warning");
    for (int t = 0; t < 10000; ++t) {
        const std::size_t p = static_cast<std::size_t>(rng.between(1, 8));
        std::vector<int> x(p), y(p), z(p);
        for (std::size_t j = 0; j < p; ++j) {
            x[j] = rng.between(1, 3);
            y[j] = rng.between(1, 3);
            z[j] = rng.between(1, 3);
        }
        const auto xy = simple_matching_distance(x, y);
        o.require((xy == 0) == (x == y), "identity of indiscernibles");
        o.require(xy == simple_matching_distance(y, x), "symmetry");
        o.require(simple_matching_distance(x, z) <= xy + simple_matching_distance(y, z), "triangle inequality");
    }
    o.detail = "200 fixtures, collapse to " + std::to_string(collapsed.k) + " cluster, 10000 metric triples";
    return o;
}

std::vector<std::pair<std::string, double>> tagged(const std::vector<double>& values) {
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.emplace_back("r" + std::to_string(i), values[i]);
    return out;
}

Outcome baseline_properties() {
    Outcome o;
    oracle::Rng rng(4004);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.between(5, 2000));
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(i) + 0.5 * rng.unit();
        for (std::size_t i = n; i > 1; --i) std::swap(values[i - 1], values[rng.next() % i]);
        const TailThreshold th = tail_threshold(tagged(values), 0.05, TailBranch::Empirical);
        const std::size_t expected = 5 * (n + 1) / 100;
        o.require(th.flagged_ids.size() == expected,
                  "n = " + std::to_string(n) + " flagged " + std::to_string(th.flagged_ids.size()));

        std::vector<double> transformed;
        for (double v : values) transformed.push_back(std::cbrt(v) * 4.0 + std::exp(v / 500.0));
        const TailThreshold tt = tail_threshold(tagged(transformed), 0.05, TailBranch::Empirical);
        o.require(std::set<std::string>(tt.flagged_ids.begin(), tt.flagged_ids.end()) ==
                      std::set<std::string>(th.flagged_ids.begin(), th.flagged_ids.end()),
                  "transform changed the flagged set");

        std::vector<double> codes;
        for (std::size_t i = 0; i < n; ++i) codes.push_back(rng.between(1, 5));
        std::vector<double> codes_t;
        for (double c : codes) codes_t.push_back(c * c * c - 2.0);
        const auto a = tail_threshold(tagged(codes), 0.05, TailBranch::Empirical).flagged_ids;
        const auto b = tail_threshold(tagged(codes_t), 0.05, TailBranch::Empirical).flagged_ids;
        o.require(a == b, "transform changed the flagged set on tied codes");
    }

    const double z = inverse_normal_cdf(0.05);
    const double z_oracle = oracle::normal_quantile(0.05);
    o.require(std::abs(z - z_oracle) <= 1e-10, "z quantile " + fmt("%.12f", z));
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> values;
        const double mu = 10.0 * rng.unit(), sigma = 0.5 + 2.0 * rng.unit();
        for (int i = 0; i < 1000; ++i) values.push_back(mu + sigma * rng.bell());
        const NormalityResult gate = normality_check(values);
        o.require(gate.verdict == Normality::Normal, "bell-shaped sample failed the normality gate");
        double mean = 0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double ss = 0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        const TailThreshold th = tail_threshold(tagged(values), 0.05, TailBranch::Normal);
        const double gap = std::abs(*th.cutoff_value - (mean - 1.6449 * sd));
        worst = std::max(worst, gap);
        o.require(gap <= 1e-3, "normal cutoff off by " + fmt("%.2e", gap));
    }
    o.detail = "300 tie-free cohorts; z = " + fmt("%.6f", z) + "; worst cutoff gap " + fmt("%.1e", worst);
    return o;
}

SquareMatrix random_correlation(oracle::Rng& rng, std::size_t p) {
    const std::size_t n = 30 + static_cast<std::size_t>(rng.between(0, 100));
    const std::size_t factors = static_cast<std::size_t>(rng.between(1, 3));
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<std::vector<double>> weights(p, std::vector<double>(factors));
    for (auto& w : weights)
        for (double& x : w) x = 2 * rng.unit() - 1;
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<double> f(factors);
        for (double& x : f) x = rng.bell();
        for (std::size_t c = 0; c < p; ++c) {
            double v = rng.bell();
            for (std::size_t q = 0; q < factors; ++q) v += weights[c][q] * f[q];
            cols[c][r] = v;
        }
    }
    SquareMatrix m(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) = i == j ? 1.0 : oracle::pearson(cols[i], cols[j]);
    return m;
}

Outcome eigen_varimax() {
    Outcome o;
    oracle::Rng rng(5005);
    double worst_residual = 0, worst_ortho = 0, worst_comm = 0, worst_rot = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t p = static_cast<std::size_t>(rng.between(2, 12));
        const SquareMatrix m = random_correlation(rng, p);
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < p; ++i) ids.push_back("q" + std::to_string(i));
        const PcaResult r = pca_from_matrix(m, ids);
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i < p; ++i) {
                double mv = 0;
                for (std::size_t c = 0; c < p; ++c) mv += m(i, c) * r.components[j][c];
                worst_residual = std::max(worst_residual, std::abs(mv - r.eigenvalues[j] * r.components[j][i]));
            }
            for (std::size_t k = 0; k < p; ++k) {
                double dot = 0;
                for (std::size_t i = 0; i < p; ++i) dot += r.components[j][i] * r.components[k][i];
                worst_ortho = std::max(worst_ortho, std::abs(dot - (j == k ? 1.0 : 0.0)));
            }
        }
        const std::size_t f = std::max<std::size_t>(2, std::min<std::size_t>(p, kaiser_retain(r.eigenvalues)));
        LoadingMatrix loadings(p, f);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < f; ++j)
                loadings(i, j) = r.components[j][i] * std::sqrt(std::max(0.0, r.eigenvalues[j]));
        const VarimaxResult v = varimax(loadings);
        const auto before = loadings.communalities();
        const auto after = v.rotated.communalities();
        for (std::size_t i = 0; i < p; ++i) worst_comm = std::max(worst_comm, std::abs(before[i] - after[i]));
        for (std::size_t a = 0; a < f; ++a) {
            for (std::size_t b = 0; b < f; ++b) {
                double dot = 0;
                for (std::size_t c = 0; c < f; ++c) dot += v.rotation(c, a) * v.rotation(c, b);
                worst_rot = std::max(worst_rot, std::abs(dot - (a == b ? 1.0 : 0.0)));
            }
        }
    }
    o.require(worst_residual <= 1e-8, "eigen residual " + fmt("%.2e", worst_residual));
    o.require(worst_ortho <= 1e-10, "orthonormality " + fmt("%.2e", worst_ortho));
    o.require(worst_comm <= 1e-6, "communalities " + fmt("%.2e", worst_comm));
    o.require(worst_rot <= 1e-8, "rotation orthogonality " + fmt("%.2e", worst_rot));
    const PcaResult rank1 = pca_from_matrix(SquareMatrix(2, 1.0), {"a", "b"});
    o.require(std::abs(rank1.eigenvalues[0] - 2.0) <= 1e-10 && std::abs(rank1.eigenvalues[1]) <= 1e-10,
              "rank-one eigenvalues " + fmt("%.12g", rank1.eigenvalues[0]) + ", " + fmt("%.3g", rank1.eigenvalues[1]));
    o.detail = "100 matrices; residual " + fmt("%.1e", worst_residual) + ", orthonormality " + fmt("%.1e", worst_ortho) +
               ", communalities " + fmt("%.1e", worst_comm) + ", rotation " + fmt("%.1e", worst_rot);
    return o;
}

struct SeedRun {
    std::map<std::pair<Method, std::size_t>, EvaluationSummary> runs;
};

SeedRun replicate_seed(const GeneratorSpec& base_spec, const ReductionConfig& reduction, std::uint64_t seed) {
    GeneratorSpec spec = base_spec;
    spec.seed = base_spec.seed + seed;
    const SurveySchema& schema = spec.schema;
    const GeneratedCohort cohort = generate(spec);
    std::map<std::string, int> truth;
    for (std::size_t i = 0; i < cohort.records.size(); ++i) truth[cohort.records[i].respondent_id] = cohort.truth[i];

    const CleanedCohort cleaned = clean_cohort(cohort.records, schema);
    const ReductionResult reduced = reduce(cleaned.records, schema, reduction);
    const DataMatrix model_data = make_data_matrix(cleaned.records, reduced.model.retained_questions, &schema);
    const DataMatrix profile_data = make_data_matrix(cleaned.records, schema.question_ids(), &schema);
    std::vector<BaselineLabel> labels;
    for (const auto& id : model_data.respondent_ids()) {
        const int planted = truth.at(id);
        labels.push_back({id, planted, planted ? std::vector<std::string>{"planted"} : std::vector<std::string>{}});
    }

    SeedRun out;
    auto record = [&](const ClusterModel& model) {
        out.runs[{model.method, model.k_requested}] = evaluate(profile_data, model, labels, schema).summary;
    };
    for (std::size_t k : {4, 5, 6}) {
        for (Method method : {Method::KMeans, Method::KModes}) {
            ClusterRequest req;
            req.method = method;
            req.k = k;
            req.seed = seed;
            record(fit(model_data, req));
        }
    }
    for (Method method : {Method::HclustComplete, Method::HclustSingle, Method::HclustAverage}) {
        const Dendrogram den = hclust(model_data, linkage_of(method));
        for (std::size_t k : {4, 5, 6}) {
            ClusterRequest req;
            req.method = method;
            req.k = k;
            record(model_from_dendrogram(model_data, den, req));
        }
    }
    return out;
}

Outcome synthetic_replication() {
    Outcome o;
    const auto start = Clock::now();
    const GeneratorSpec spec = load_generator_spec(fixtures::kRepoDir / "configs" / "synthetic-demo.synth.yaml");
    const PipelineConfig config = load_pipeline_config(fixtures::kRepoDir / "configs" / "synthetic-demo.yaml");
    o.require(spec.n == 1000 && std::abs(spec.need_fraction - 0.15) < 1e-12, "shipped spec is not n = 1000 at 0.15");

    std::map<std::size_t, int> ordering_wins, single_degenerate, average_degenerate;
    std::map<std::size_t, std::vector<double>> kmeans_recall;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const SeedRun run = replicate_seed(spec, config.reduction, seed);
        for (std::size_t k : {4, 5, 6}) {
            auto recall = [&](Method m) { return run.runs.at({m, k}).total.recall.value_or(0.0); };
            const double km = recall(Method::KMeans);
            kmeans_recall[k].push_back(km);
            if (km > recall(Method::KModes) && km > recall(Method::HclustComplete)) ++ordering_wins[k];
            if (run.runs.at({Method::HclustSingle, k}).largest_share > 0.80) ++single_degenerate[k];
            if (run.runs.at({Method::HclustAverage, k}).largest_share > 0.80) ++average_degenerate[k];
        }
    }
    std::ostringstream detail;
    for (std::size_t k : {4, 5, 6}) {
        o.require(ordering_wins[k] >= 8, "k = " + std::to_string(k) + ": k-means ahead in " +
                                             std::to_string(ordering_wins[k]) + "/10 seeds");
        o.require(single_degenerate[k] >= 8, "k = " + std::to_string(k) + ": single linkage degenerate in " +
                                                 std::to_string(single_degenerate[k]) + "/10 seeds");
        o.require(average_degenerate[k] >= 8, "k = " + std::to_string(k) + ": average linkage degenerate in " +
                                                  std::to_string(average_degenerate[k]) + "/10 seeds");
        double mean = 0;
        for (double r : kmeans_recall[k]) mean += r / 10.0;
        detail << "k=" << k << " wins " << ordering_wins[k] << "/10, degenerate single " << single_degenerate[k]
               << "/10 average " << average_degenerate[k] << "/10, k-means recall " << fmt("%.2f", mean) << "; ";
    }
    const double secs = seconds_since(start);
    o.require(secs < 60.0, "runtime " + fmt("%.1f s", secs));
    detail << fmt("%.1f s", secs);
    o.detail = detail.str();
    return o;
}

Outcome pipeline_determinism() {
    Outcome o;
    PipelineConfig config = load_pipeline_config(fixtures::kRepoDir / "configs" / "synthetic-demo.yaml");
    const auto root = fixtures::scratch_dir("acceptance-determinism");
    config.output_dir = root / "first";
    const PipelineResult a = run_pipeline(config);
    config.output_dir = root / "second";
    const PipelineResult b = run_pipeline(config);
    o.require(a.content_hash == b.content_hash, "content hashes differ");
    o.require(a.manifest.at("artifacts") == b.manifest.at("artifacts"), "artifact digests differ");
    for (const auto& artifact : a.manifest.at("artifacts")) {
        const auto rel = artifact.at("path").get<std::string>();
        o.require(fixtures::read_file(root / "first" / rel) == fixtures::read_file(root / "second" / rel),
                  rel + " differs");
    }
    o.detail = std::to_string(a.manifest.at("artifacts").size()) + " artifacts, hash " + a.content_hash.substr(0, 16);
    return o;
}

Outcome cleaning_audit() {
    Outcome o;
    GeneratorSpec spec = load_generator_spec(fixtures::kRepoDir / "configs" / "synthetic-demo.synth.yaml");
    spec.noise = NoiseSpec{0.04, 0.04, 0.04};
    const GeneratedCohort cohort = generate(spec);
    o.require(cohort.corrupted > 0, "no records were corrupted");
    const CleanedCohort first = clean_cohort(cohort.records, spec.schema);
    const CleaningReport& r = first.report;
    o.require(r.total_in == cohort.records.size(), "total_in");
    o.require(r.total_in - r.removed_total() == r.total_out, "counts do not reconcile");
    o.require(r.total_out == first.records.size(), "total_out does not match the clean records");
    o.require(r.removed_total() == cohort.corrupted, "removals differ from the corrupted count");
    std::set<std::string> removed(r.removed_out_of_range.begin(), r.removed_out_of_range.end());
    removed.insert(r.removed_inconsistent.begin(), r.removed_inconsistent.end());
    removed.insert(r.removed_incomplete.begin(), r.removed_incomplete.end());
    o.require(removed.size() == r.removed_total(), "a record was filed twice");
    for (const auto& rec : cohort.records) {
        o.require(validate_record(rec, spec.schema).clean() != removed.count(rec.respondent_id) > 0,
                  rec.respondent_id + " misfiled");
    }
    const CleanedCohort second = clean_cohort(first.records, spec.schema);
    o.require(second.report.removed_total() == 0 && second.records.size() == first.records.size(),
              "cleaning is not idempotent");
    std::ostringstream d;
    d << r.total_in << " in, " << r.removed_out_of_range.size() << " out_of_range, " << r.removed_inconsistent.size()
      << " inconsistent, " << r.removed_incomplete.size() << " incomplete, " << r.total_out << " out";
    o.detail = d.str();
    return o;
}

Outcome report_fidelity() {
    Outcome o;
    const auto golden = fixtures::kTestDir / "golden";
    o.require(render_loading_table(fixtures::golden_factor_model()) == fixtures::read_file(golden / "loading_table.txt"),
              "loading table differs from golden");
    const ContingencyTable table = contingency(fixtures::six_student_labels(), fixtures::six_student_model(),
                                               fixtures::kGoldenReasons);
    o.require(render_contingency(table) == fixtures::read_file(golden / "contingency.txt"),
              "contingency table differs from golden");
    o.require(render_method_table(fixtures::golden_method_runs()) == fixtures::read_file(golden / "method_table.txt"),
              "method table differs from golden");
    o.require(format_count_percent(fixtures::cell(61, 120)) == "61 (50.8%)", "count (percent) cell");
    o.detail = "loading, contingency and method tables match their golden files";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"hierarchical clustering matches the naive oracle", hierarchical_oracle},
        {"k-means contract", kmeans_contract},
        {"k-modes contract", kmodes_contract},
        {"baseline labelling properties", baseline_properties},
        {"eigen and varimax numerics", eigen_varimax},
        {"synthetic replication of the method ordering", synthetic_replication},
        {"pipeline determinism", pipeline_determinism},
        {"cleaning audit on a corrupted cohort", cleaning_audit},
        {"report fidelity against golden files", report_fidelity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first;
        if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
        std::cout << '\n';
        for (const auto& f : o.failures) std::cout << "      " << f << '\n';
        std::cout.flush();
        if (!o.pass) ++failed;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
