#include <doctest.h>

#include <cmath>

#include "glots/mat.hpp"
#include "glots/rng.hpp"

using namespace glots;

namespace {

Mat random_mat(int r, int c, Rng& rng) {
    Mat m(r, c);
    for (double& x : m.a) x = rng.normal();
    return m;
}

// index-triple reference, no vectorization tricks
Mat naive_matmul(const Mat& A, const Mat& B) {
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += A(i, k) * B(k, j);
            C(i, j) = s;
        }
    return C;
}

}  // namespace

TEST_CASE("matmul agrees with the naive reference") {
    Rng rng(1);
    const Mat A = random_mat(5, 7, rng);
    const Mat B = random_mat(7, 3, rng);
    const Mat C = kernels::matmul(A, B);
    const Mat R = naive_matmul(A, B);
    REQUIRE(C.rows == 5);
    REQUIRE(C.cols == 3);
    for (size_t i = 0; i < C.a.size(); ++i) CHECK(C.a[i] == doctest::Approx(R.a[i]).epsilon(1e-12));
}

TEST_CASE("transpose variants match explicit transposes") {
    Rng rng(2);
    const Mat A = random_mat(4, 6, rng);
    const Mat B = random_mat(5, 6, rng);
    Mat Bt(6, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 6; ++j) Bt(j, i) = B(i, j);
    const Mat C = kernels::matmul_bt(A, B);
    const Mat R = naive_matmul(A, Bt);
    for (size_t i = 0; i < C.a.size(); ++i) CHECK(C.a[i] == doctest::Approx(R.a[i]).epsilon(1e-12));

    const Mat D = random_mat(6, 4, rng);
    Mat A2 = random_mat(6, 3, rng);
    Mat A2t(3, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) A2t(j, i) = A2(i, j);
    const Mat E = kernels::matmul_at(A2, D);
    const Mat R2 = naive_matmul(A2t, D);
    for (size_t i = 0; i < E.a.size(); ++i)
        CHECK(E.a[i] == doctest::Approx(R2.a[i]).epsilon(1e-12));
}

TEST_CASE("shape mismatches are rejected") {
    CHECK_THROWS_AS(kernels::matmul(Mat(2, 3), Mat(4, 2)), ShapeError);
    CHECK_THROWS_AS(kernels::matmul_bt(Mat(2, 3), Mat(4, 4)), ShapeError);
    CHECK_THROWS_AS(kernels::matmul_at(Mat(3, 2), Mat(4, 2)), ShapeError);
    Mat a(2, 2);
    CHECK_THROWS_AS(add_inplace(a, Mat(3, 2)), ShapeError);
}

TEST_CASE("parallel kernels are bit-equal to the serial reference") {
    Rng rng(3);
    const struct {
        int m, k, n;
    } shapes[] = {{1, 1, 1}, {2, 64, 2}, {17, 23, 5}, {64, 64, 64}, {3, 100, 1}};
    for (const auto& s : shapes) {
        const Mat A = random_mat(s.m, s.k, rng);
        const Mat B = random_mat(s.k, s.n, rng);
        Mat ser(s.m, s.n), par(s.m, s.n);
        kernels::matmul_serial(A, B, ser);
        kernels::matmul_parallel(A, B, par);
        CHECK(ser.a == par.a);

        const Mat Bt = random_mat(s.n, s.k, rng);
        Mat ser2(s.m, s.n), par2(s.m, s.n);
        kernels::matmul_bt_serial(A, Bt, ser2);
        kernels::matmul_bt_parallel(A, Bt, par2);
        CHECK(ser2.a == par2.a);

        const Mat A2 = random_mat(s.k, s.m, rng);
        const Mat B2 = random_mat(s.k, s.n, rng);
        Mat ser3(s.m, s.n), par3(s.m, s.n);
        kernels::matmul_at_serial(A2, B2, ser3);
        kernels::matmul_at_parallel(A2, B2, par3);
        CHECK(ser3.a == par3.a);
    }
}

TEST_CASE("the process-wide switch selects the flavor without changing results") {
    Rng rng(4);
    const Mat A = random_mat(9, 11, rng);
    const Mat B = random_mat(11, 6, rng);
    const bool before = kernels::parallel_enabled();
    kernels::set_parallel(false);
    const Mat off = kernels::matmul(A, B);
    kernels::set_parallel(true);
    const Mat on = kernels::matmul(A, B);
    kernels::set_parallel(before);
    CHECK(off.a == on.a);
}

TEST_CASE("softmax rows are stable and normalized") {
    double x[3] = {1000.0, 1001.0, 1002.0};  // would overflow without max-shift
    softmax_inplace(x, 3);
    double s = x[0] + x[1] + x[2];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[2] > x[1]);
    CHECK(x[1] > x[0]);
    CHECK(std::isfinite(x[0]));

    double u[4] = {0.5, 0.5, 0.5, 0.5};
    softmax_inplace(u, 4);
    for (double v : u) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("add_inplace adds elementwise") {
    Mat a(2, 2, 1.0), b(2, 2, 0.5);
    add_inplace(a, b);
    for (double v : a.a) CHECK(v == 1.5);
}
