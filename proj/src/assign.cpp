#include "glots/assign.hpp"

#include <algorithm>
#include <limits>

namespace glots {
namespace assign {

namespace {

// Potential-based Hungarian algorithm, minimization form, n rows <= m cols.
// Returns col_of_row (size n), a full matching of all rows.
std::vector<int> hungarian_min(const Mat& cost) {
    const int n = cost.rows, m = cost.cols;
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

}  // namespace

AssignmentResult solve(const Mat& scores, double min_score) {
    AssignmentResult res;
    const int n = scores.rows, k = scores.cols;
    if (n == 0 || k == 0) {
        for (int i = 0; i < n; ++i) res.unmatched_rows.push_back(i);
        for (int j = 0; j < k; ++j) res.unmatched_cols.push_back(j);
        return res;
    }

    std::vector<int> col_of_row(n, -1);
    if (n <= k) {
        Mat cost(n, k);
        for (size_t i = 0; i < cost.a.size(); ++i) cost.a[i] = -scores.a[i];
        col_of_row = hungarian_min(cost);
    } else {
        Mat cost(k, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) cost(j, i) = -scores(i, j);
        std::vector<int> row_of_col = hungarian_min(cost);
        for (int j = 0; j < k; ++j)
            if (row_of_col[j] >= 0) col_of_row[row_of_col[j]] = j;
    }

    std::vector<char> col_used(k, 0);
    for (int i = 0; i < n; ++i) {
        const int j = col_of_row[i];
        if (j >= 0 && scores(i, j) >= min_score) {
            res.pairs.emplace_back(i, j);
            res.total += scores(i, j);
            col_used[j] = 1;
        } else {
            res.unmatched_rows.push_back(i);
        }
    }
    for (int j = 0; j < k; ++j)
        if (!col_used[j]) res.unmatched_cols.push_back(j);
    return res;
}

}  // namespace assign
}  // namespace glots
