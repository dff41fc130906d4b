#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "surveyclust/schema.hpp"

namespace surveyclust {

struct NoiseSpec {
    double out_of_range = 0.0;  // per-respondent probabilities
    double inconsistent = 0.0;
    double missing = 0.0;

    bool any() const { return out_of_range > 0.0 || inconsistent > 0.0 || missing > 0.0; }
};

struct CodeWeights {
    std::vector<double> base;  // weights for codes 1..hi
    std::vector<double> need;  // planted members; equals base when no shift is given
};

struct GeneratorSpec {
    SurveySchema schema;
    std::filesystem::path schema_path;
    std::size_t n = 100;
    double need_fraction = 0.0;
    std::uint64_t seed = 1;
    bool gender = true;
    std::string id_prefix = "S";
    NoiseSpec noise;
    std::map<std::string, CodeWeights> weights;  // every schema question

    // Throws ConfigError when a distribution is malformed.
    void validate() const;
};

// YAML keys: schema (path, relative to the spec file), n, need_fraction, seed, gender,
// id_prefix, noise {out_of_range, inconsistent, missing}, questions {<id>: {base, need}}.
// Questions without weights are uniform over their codes.
GeneratorSpec parse_generator_spec(const std::string& text, const std::filesystem::path& base_dir = {});
GeneratorSpec load_generator_spec(const std::filesystem::path& path);

struct GeneratedCohort {
    std::vector<RespondentRecord> records;
    std::vector<std::string> planted;  // respondent ids of planted need members
    std::vector<int> truth;            // 1 = planted, record order
    std::size_t corrupted = 0;
};

// Respondent i draws from its own substream, so output depends only on the seed. Records
// are resampled until every consistency rule holds; corruption happens afterwards on a
// separate substream and never changes the truth flags.
GeneratedCohort generate(const GeneratorSpec& spec);

// `respondent_id,planted`
std::string truth_to_text(const GeneratedCohort& cohort);
void write_truth_file(const std::filesystem::path& path, const GeneratedCohort& cohort);
std::map<std::string, int> read_truth_file(const std::filesystem::path& path);

}  // namespace surveyclust
