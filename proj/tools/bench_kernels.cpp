// Compares the serial reference kernels against the OpenMP ones: checks
// bit-equality, then reports throughput for association-sized workloads.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "glots/mat.hpp"
#include "glots/rng.hpp"

using namespace glots;

namespace {

Mat random_mat(int r, int c, Rng& rng) {
    Mat m(r, c);
    for (double& x : m.a) x = rng.normal();
    return m;
}

double time_ms(void (*fn)(const Mat&, const Mat&, Mat&), const Mat& a, const Mat& b, int reps) {
    Mat c;
    fn(a, b, c);  // warmup
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn(a, b, c);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int size = argc > 1 ? std::atoi(argv[1]) : 256;
    int reps = argc > 2 ? std::atoi(argv[2]) : 20;
    Rng rng(7);
    const Mat a = random_mat(size, size, rng);
    const Mat b = random_mat(size, size, rng);

    Mat cs, cp;
    kernels::matmul_serial(a, b, cs);
    kernels::matmul_parallel(a, b, cp);
    const bool equal = cs.a == cp.a;
    std::printf("matmul %dx%d bit-equal: %s\n", size, size, equal ? "yes" : "NO");
    if (!equal) return 1;

    const double ts = time_ms(kernels::matmul_serial, a, b, reps);
    const double tp = time_ms(kernels::matmul_parallel, a, b, reps);
    std::printf("matmul    serial %8.3f ms  parallel %8.3f ms  speedup %.2fx\n", ts, tp, ts / tp);

    Mat ds, dp;
    kernels::matmul_bt_serial(a, b, ds);
    kernels::matmul_bt_parallel(a, b, dp);
    std::printf("matmul_bt %dx%d bit-equal: %s\n", size, size, ds.a == dp.a ? "yes" : "NO");
    if (ds.a != dp.a) return 1;
    const double us = time_ms(kernels::matmul_bt_serial, a, b, reps);
    const double up = time_ms(kernels::matmul_bt_parallel, a, b, reps);
    std::printf("matmul_bt serial %8.3f ms  parallel %8.3f ms  speedup %.2fx\n", us, up, us / up);
    return 0;
}
