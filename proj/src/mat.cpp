#include "glots/mat.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace glots {
namespace kernels {

namespace {
std::atomic<bool> g_parallel{true};
}  // namespace

void set_parallel(bool on) { g_parallel.store(on); }
bool parallel_enabled() { return g_parallel.load(); }

void matmul_serial(const Mat& A, const Mat& B, Mat& C) {
    if (A.cols != B.rows) throw ShapeError("matmul: inner dimensions disagree");
    C = Mat(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (int k = 0; k < A.cols; ++k) {
            const double aik = ai[k];
            const double* bk = B.row(k);
            for (int j = 0; j < B.cols; ++j) ci[j] += aik * bk[j];
        }
    }
}

void matmul_parallel(const Mat& A, const Mat& B, Mat& C) {
    if (A.cols != B.rows) throw ShapeError("matmul: inner dimensions disagree");
    C = Mat(A.rows, B.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (int k = 0; k < A.cols; ++k) {
            const double aik = ai[k];
            const double* bk = B.row(k);
            for (int j = 0; j < B.cols; ++j) ci[j] += aik * bk[j];
        }
    }
}

void matmul_bt_serial(const Mat& A, const Mat& B, Mat& C) {
    if (A.cols != B.cols) throw ShapeError("matmul_bt: inner dimensions disagree");
    C = Mat(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (int j = 0; j < B.rows; ++j) {
            const double* bj = B.row(j);
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
}

void matmul_bt_parallel(const Mat& A, const Mat& B, Mat& C) {
    if (A.cols != B.cols) throw ShapeError("matmul_bt: inner dimensions disagree");
    C = Mat(A.rows, B.rows);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        double* ci = C.row(i);
        for (int j = 0; j < B.rows; ++j) {
            const double* bj = B.row(j);
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
}

void matmul_at_serial(const Mat& A, const Mat& B, Mat& C) {
    if (A.rows != B.rows) throw ShapeError("matmul_at: inner dimensions disagree");
    C = Mat(A.cols, B.cols);
    for (int i = 0; i < A.cols; ++i) {
        double* ci = C.row(i);
        for (int k = 0; k < A.rows; ++k) {
            const double aki = A(k, i);
            const double* bk = B.row(k);
            for (int j = 0; j < B.cols; ++j) ci[j] += aki * bk[j];
        }
    }
}

void matmul_at_parallel(const Mat& A, const Mat& B, Mat& C) {
    if (A.rows != B.rows) throw ShapeError("matmul_at: inner dimensions disagree");
    C = Mat(A.cols, B.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.cols; ++i) {
        double* ci = C.row(i);
        for (int k = 0; k < A.rows; ++k) {
            const double aki = A(k, i);
            const double* bk = B.row(k);
            for (int j = 0; j < B.cols; ++j) ci[j] += aki * bk[j];
        }
    }
}

Mat matmul(const Mat& A, const Mat& B) {
    Mat C;
    if (g_parallel.load())
        matmul_parallel(A, B, C);
    else
        matmul_serial(A, B, C);
    return C;
}

Mat matmul_bt(const Mat& A, const Mat& B) {
    Mat C;
    if (g_parallel.load())
        matmul_bt_parallel(A, B, C);
    else
        matmul_bt_serial(A, B, C);
    return C;
}

Mat matmul_at(const Mat& A, const Mat& B) {
    Mat C;
    if (g_parallel.load())
        matmul_at_parallel(A, B, C);
    else
        matmul_at_serial(A, B, C);
    return C;
}

}  // namespace kernels

void add_inplace(Mat& A, const Mat& B) {
    if (!A.same_shape(B)) throw ShapeError("add_inplace: shape mismatch");
    for (size_t i = 0; i < A.a.size(); ++i) A.a[i] += B.a[i];
}

void softmax_inplace(double* x, int n) {
    double m = x[0];
    for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = std::exp(x[i] - m);
        z += x[i];
    }
    for (int i = 0; i < n; ++i) x[i] /= z;
}

}  // namespace glots
