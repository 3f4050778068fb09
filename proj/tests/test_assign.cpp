#include <doctest.h>

#include <algorithm>
#include <vector>

#include "glots/assign.hpp"
#include "glots/rng.hpp"

using namespace glots;

namespace {

// exhaustive maximum over all maximal (min(n,k)-sized) row-to-column
// injections; rows in ascending order so the sum matches the solver's
double brute_force_best(const Mat& s) {
    const int n = s.rows, k = s.cols;
    const int want = std::min(n, k);
    double best = -1e300;
    std::vector<char> used(k, 0);
    auto rec = [&](auto&& self, int row, int taken, double acc) -> void {
        if (taken == want) {
            best = std::max(best, acc);
            return;
        }
        if (row == n) return;
        for (int j = 0; j < k; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            self(self, row + 1, taken + 1, acc + s(row, j));
            used[j] = 0;
        }
        if (n - row - 1 + taken >= want) self(self, row + 1, taken, acc);  // leave row unmatched
    };
    rec(rec, 0, 0, 0.0);
    return best;
}

}  // namespace

TEST_CASE("identity-favoring 2x2") {
    Mat s(2, 2);
    s(0, 0) = 0.9;
    s(0, 1) = 0.1;
    s(1, 0) = 0.2;
    s(1, 1) = 0.8;
    const auto res = assign::solve(s, 0.0);
    REQUIRE(res.pairs.size() == 2);
    CHECK(res.pairs[0] == std::pair<int, int>{0, 0});
    CHECK(res.pairs[1] == std::pair<int, int>{1, 1});
    CHECK(res.total == doctest::Approx(1.7));
}

TEST_CASE("min_score filters matches") {
    Mat s(1, 1);
    s(0, 0) = 0.3;
    const auto res = assign::solve(s, 0.5);
    CHECK(res.pairs.empty());
    REQUIRE(res.unmatched_rows.size() == 1);
    REQUIRE(res.unmatched_cols.size() == 1);
    CHECK(res.unmatched_rows[0] == 0);
    CHECK(res.unmatched_cols[0] == 0);
}

TEST_CASE("empty matrix returns all-unmatched") {
    const auto res = assign::solve(Mat(0, 3), 0.0);
    CHECK(res.pairs.empty());
    CHECK(res.unmatched_cols.size() == 3);
}

TEST_CASE("matches brute force on random rectangular matrices") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(7));
        const int k = 1 + static_cast<int>(rng.below(7));
        Mat s(n, k);
        for (double& x : s.a) x = rng.uniform(-1.0, 1.0);
        auto res = assign::solve(s, -1e9);
        std::sort(res.pairs.begin(), res.pairs.end());
        double total = 0.0;
        for (const auto& [r, c] : res.pairs) total += s(r, c);
        CHECK(total == brute_force_best(s));
        CHECK(static_cast<int>(res.pairs.size()) == std::min(n, k));
        // rectangular handling: no duplicates
        std::vector<char> rs(n, 0), cs(k, 0);
        for (const auto& [r, c] : res.pairs) {
            CHECK(!rs[r]);
            CHECK(!cs[c]);
            rs[r] = cs[c] = 1;
        }
        CHECK(res.unmatched_rows.size() + res.pairs.size() == static_cast<size_t>(n));
        CHECK(res.unmatched_cols.size() + res.pairs.size() == static_cast<size_t>(k));
    }
}

TEST_CASE("uniform shift leaves selected pairs unchanged") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(5));
        Mat s(n, n);
        for (double& x : s.a) x = rng.uniform(0.0, 1.0);
        const auto base = assign::solve(s, -1e9);
        Mat shifted = s;
        for (double& x : shifted.a) x += 10.0;
        const auto moved = assign::solve(shifted, -1e9);
        CHECK(base.pairs == moved.pairs);
    }
}

TEST_CASE("deterministic tie-break toward lowest (row, column)") {
    Mat s(2, 2, 0.5);  // all entries equal
    const auto res = assign::solve(s, 0.0);
    REQUIRE(res.pairs.size() == 2);
    CHECK(res.pairs[0] == std::pair<int, int>{0, 0});
    CHECK(res.pairs[1] == std::pair<int, int>{1, 1});
}
