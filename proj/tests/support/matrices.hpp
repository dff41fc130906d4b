#pragma once

#include <string>
#include <vector>

#include "oracles.hpp"
#include "surveyclust/clustering.hpp"

namespace fixtures {

inline surveyclust::DataMatrix matrix(const std::vector<std::vector<int>>& rows) {
    std::vector<std::string> ids, qs;
    std::vector<int> codes;
    for (std::size_t i = 0; i < rows.size(); ++i) ids.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < rows.front().size(); ++j) qs.push_back("q" + std::to_string(j));
    for (const auto& row : rows) codes.insert(codes.end(), row.begin(), row.end());
    return {ids, qs, codes};
}

inline std::vector<std::vector<int>> random_rows(oracle::Rng& rng, std::size_t n, std::size_t p, int levels) {
    std::vector<std::vector<int>> rows(n, std::vector<int>(p));
    for (auto& row : rows)
        for (auto& v : row) v = rng.between(1, levels);
    return rows;
}

inline std::vector<std::vector<double>> as_points(const std::vector<std::vector<int>>& rows) {
    std::vector<std::vector<double>> out;
    for (const auto& row : rows) out.emplace_back(row.begin(), row.end());
    return out;
}

// Zero-based labels from a model's 1-based assignments.
inline std::vector<int> zero_based(const std::vector<int>& assignments) {
    std::vector<int> out;
    for (int a : assignments) out.push_back(a - 1);
    return out;
}

}  // namespace fixtures
