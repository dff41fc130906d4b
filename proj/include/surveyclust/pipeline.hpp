#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "surveyclust/clustering.hpp"
#include "surveyclust/error.hpp"
#include "surveyclust/evaluation.hpp"
#include "surveyclust/reduction.hpp"

namespace surveyclust {

// A pipeline stage failed; `stage()` is the stage directory name such as "03_reduce".
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message)
        : Error("stage " + stage + " failed: " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStage = 3;
inline constexpr int kExitIo = 4;

struct ClusterSettings {
    std::vector<Method> methods{Method::KMeans, Method::KModes, Method::HclustComplete};
    std::vector<std::size_t> ks{4, 5, 6};
    std::vector<std::uint64_t> seeds{1};
    bool standardize = false;
    Metric metric = Metric::Euclidean;
    KModesInit kmodes_init = KModesInit::Random;
    std::size_t max_iter = 0;
};

struct PipelineConfig {
    std::filesystem::path schema_path;
    std::filesystem::path input_path;
    std::filesystem::path output_dir;
    char delimiter = ',';
    double alpha = 0.05;
    ReductionConfig reduction;
    ClusterSettings cluster;
    NeedPolicy need;
    DegeneracyThresholds degeneracy;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Reads the `reduction` block keys: questions, correlation_threshold, drop_threshold,
// manual_drop, basis, loading_threshold, varimax_normalize, varimax_max_iter, varimax_tol.
ReductionConfig parse_reduction_config(const YAML::Node& node, ReductionConfig base = {});
ReductionConfig load_reduction_config(const std::filesystem::path& path);

// Relative paths resolve against `base_dir`.
PipelineConfig parse_pipeline_config(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json pipeline_config_to_json(const PipelineConfig& config);

NeedPolicy parse_need_policy(const std::string& text);
KModesInit parse_kmodes_init(const std::string& text);
std::string to_string(KModesInit init);

struct PipelineResult {
    std::filesystem::path output_dir;
    std::string content_hash;
    nlohmann::json manifest;
    std::vector<std::string> warnings;
};

// Stage directories 01_clean .. 06_compare plus manifest.json, whose content_hash covers
// every analytical artifact. Wall-clock details go to run_info.json, outside the hash.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::function<void(const std::string&)>& progress = {});

// Stem used for a model's files, e.g. "kmeans_k4_s1" or "hclust-average_k5".
std::string model_stem(Method method, std::size_t k, std::uint64_t seed);

}  // namespace surveyclust
