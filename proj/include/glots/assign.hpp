#pragma once

#include <vector>

#include "glots/mat.hpp"

namespace glots {
namespace assign {

struct AssignmentResult {
    std::vector<std::pair<int, int>> pairs;  // (row, column), sorted by row
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
    double total = 0.0;  // sum of accepted pair scores, accumulated in row order
};

// Maximum-total-score one-to-one assignment on an N x K score matrix.
// Pairs whose score falls below min_score are dropped to unmatched
// afterwards. Ties break toward the lowest (row, column).
AssignmentResult solve(const Mat& scores, double min_score);

}  // namespace assign
}  // namespace glots
