#pragma once

#include <cstddef>
#include <vector>

#include "glots/errors.hpp"

namespace glots {

// Dense row-major matrix of doubles. Small and explicit on purpose: the
// attention kernels below are the only hot loops in the pipeline.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

namespace kernels {

// Every kernel comes in a serial reference flavor and an OpenMP flavor.
// The parallel flavor computes each output element with the identical
// per-element reduction order, so results are bit-equal to the serial one.

// C = A * B
void matmul_serial(const Mat& A, const Mat& B, Mat& C);
void matmul_parallel(const Mat& A, const Mat& B, Mat& C);

// C = A * B^T
void matmul_bt_serial(const Mat& A, const Mat& B, Mat& C);
void matmul_bt_parallel(const Mat& A, const Mat& B, Mat& C);

// C = A^T * B
void matmul_at_serial(const Mat& A, const Mat& B, Mat& C);
void matmul_at_parallel(const Mat& A, const Mat& B, Mat& C);

// Process-wide switch consulted by the convenience wrappers below.
void set_parallel(bool on);
bool parallel_enabled();

Mat matmul(const Mat& A, const Mat& B);
Mat matmul_bt(const Mat& A, const Mat& B);
Mat matmul_at(const Mat& A, const Mat& B);

}  // namespace kernels

// In-place: A += B
void add_inplace(Mat& A, const Mat& B);

// Row-wise softmax over a contiguous span of doubles.
void softmax_inplace(double* x, int n);

}  // namespace glots
