#include <doctest.h>

#include <fstream>

#include "cohort.hpp"
#include "surveyclust/error.hpp"
#include "surveyclust/pipeline.hpp"

using namespace surveyclust;

TEST_SUITE("pipeline") {
    TEST_CASE("stage directories, manifest and deterministic hash") {
        const auto dir = fixtures::pipeline_workspace("pipeline");
        const PipelineConfig config = load_pipeline_config(dir / "pipeline.yaml");
        CHECK(config.output_dir == dir / "out");
        std::vector<std::string> seen;
        const PipelineResult first = run_pipeline(config, [&](const std::string& s) { seen.push_back(s); });
        for (const char* stage : {"01_clean", "02_label", "03_reduce", "04_cluster", "05_evaluate", "06_compare"}) {
            CHECK(std::filesystem::is_directory(dir / "out" / stage));
        }
        CHECK(std::filesystem::exists(dir / "out" / "manifest.json"));
        CHECK(std::filesystem::exists(dir / "out" / "06_compare" / "comparison.csv"));
        CHECK(std::filesystem::exists(dir / "out" / "05_evaluate" / "kmeans_k4_s2" / "report.txt"));
        CHECK(std::filesystem::exists(dir / "out" / "05_evaluate" / "hclust-complete_k3" / "report.json"));
        CHECK_FALSE(seen.empty());
        CHECK(first.content_hash.size() == 64);
        CHECK(first.manifest.at("content_hash") == first.content_hash);
        CHECK(first.manifest.at("counts").at("total_out").get<std::size_t>() < 240);

        for (const auto& artifact : first.manifest.at("artifacts")) {
            const auto rel = artifact.at("path").get<std::string>();
            CHECK(rel.find("run_info") == std::string::npos);
            CHECK(std::filesystem::exists(dir / "out" / rel));
        }

        const PipelineResult second = run_pipeline(config);
        CHECK(second.content_hash == first.content_hash);

        PipelineConfig other = config;
        other.output_dir = dir / "other";
        CHECK(run_pipeline(other).content_hash == first.content_hash);
    }

    TEST_CASE("configuration errors name the field") {
        try {
            parse_pipeline_config("input: x.csv\noutput_dir: out\n", "/tmp");
            FAIL("expected a configuration error");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("schema") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_pipeline_config("schema: s.yaml\ninput: x.csv\nbogus: 1\n", "/tmp"), ConfigError);
        CHECK_THROWS_AS(parse_pipeline_config("schema: s.yaml\ninput: x.csv\ncluster: {k: [0]}\n", "/tmp"), ConfigError);
        CHECK_THROWS_AS(parse_pipeline_config("schema: s.yaml\ninput: x.csv\ncluster: {methods: [ward]}\n", "/tmp"),
                        ConfigError);
        CHECK(parse_need_policy("3").manual_cluster == std::size_t{3});
        CHECK_FALSE(parse_need_policy("scored").manual_cluster.has_value());
        CHECK(model_stem(Method::KMeans, 4, 1) == "kmeans_k4_s1");
        CHECK(model_stem(Method::HclustAverage, 5, 0) == "hclust-average_k5");
    }

    TEST_CASE("missing input is an I/O error and an impossible k is a stage error") {
        const auto dir = fixtures::pipeline_workspace("pipeline-fail", 60,
                                                      "cluster:\n  methods: [kmeans]\n  k: [500]\n  seeds: [1]\n");
        PipelineConfig config = load_pipeline_config(dir / "pipeline.yaml");
        try {
            run_pipeline(config);
            FAIL("expected a stage error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "04_cluster");
        }
        config.input_path = dir / "absent.csv";
        CHECK_THROWS_AS(run_pipeline(config), IoError);
    }
}
