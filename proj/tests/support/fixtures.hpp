#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "surveyclust/schema.hpp"

namespace fixtures {

inline const std::filesystem::path kTestDir = SURVEYCLUST_TEST_DIR;
inline const std::filesystem::path kRepoDir = SURVEYCLUST_REPO_DIR;

// Six questions: two quantile, two binary-lack, two linked by a consistency rule.
inline const char* const kSmallSchema = R"(name: small
questions:
  - {id: rooms, kind: likert, levels: 5, poverty_indicator: quantile-lower-tail, reason: single-room}
  - {id: meals, kind: likert, levels: 4, poverty_indicator: quantile-lower-tail, reason: one-meal}
  - {id: water, kind: binary, poverty_indicator: binary-lack, reason: no-water}
  - {id: electricity, kind: binary, poverty_indicator: binary-lack, reason: no-electricity}
  - {id: households, kind: likert, levels: 5}
  - {id: sleep_company, kind: likert, levels: 5, orientation: higher-is-worse}
rules:
  - {id: sleep_vs_household, expr: "sleep_company <= households", description: "bedroom sharers exceed household"}
baseline_set: [rooms, meals, water, electricity]
)";

inline surveyclust::SurveySchema small_schema() { return surveyclust::parse_schema(kSmallSchema); }

inline surveyclust::RespondentRecord record(const std::string& id, std::map<std::string, int> answers) {
    return {id, std::nullopt, std::move(answers)};
}

// A clean small-schema record with the given overrides.
inline surveyclust::RespondentRecord typical(const std::string& id, std::map<std::string, int> overrides = {}) {
    std::map<std::string, int> answers{{"rooms", 3},      {"meals", 3},      {"water", 1},
                                       {"electricity", 1}, {"households", 4}, {"sleep_company", 2}};
    for (const auto& [k, v] : overrides) answers[k] = v;
    return record(id, answers);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Fresh empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("surveyclust-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
