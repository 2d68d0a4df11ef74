#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace mmbc {

// Dense row-major matrix of doubles. Small enough that everything the
// training loops need fits in L1/L2; the kernels below are written so the
// inner loops run over contiguous memory and auto-vectorize.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    void set_zero() { std::fill(data.begin(), data.end(), 0.0); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// C = A * B^T.  A is n x k, B is m x k, C is n x m.
// B row-major with shared inner dimension k keeps both streams contiguous.
inline void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.cols);
    c.rows = a.rows;
    c.cols = b.rows;
    c.data.assign(static_cast<size_t>(c.rows) * c.cols, 0.0);
    const int n = a.rows, m = b.rows, k = a.cols;
    for (int i = 0; i < n; ++i) {
        const double* __restrict ai = a.row(i);
        double* __restrict ci = c.row(i);
        for (int j = 0; j < m; ++j) {
            const double* __restrict bj = b.row(j);
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            int p = 0;
            for (; p + 4 <= k; p += 4) {
                s0 += ai[p] * bj[p];
                s1 += ai[p + 1] * bj[p + 1];
                s2 += ai[p + 2] * bj[p + 2];
                s3 += ai[p + 3] * bj[p + 3];
            }
            for (; p < k; ++p) s0 += ai[p] * bj[p];
            ci[j] = (s0 + s1) + (s2 + s3);
        }
    }
}

// C = A * B.  A is n x k, B is k x m, C is n x m (ikj order).
inline void matmul_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows);
    c.rows = a.rows;
    c.cols = b.cols;
    c.data.assign(static_cast<size_t>(c.rows) * c.cols, 0.0);
    const int n = a.rows, k = a.cols, m = b.cols;
    for (int i = 0; i < n; ++i) {
        const double* __restrict ai = a.row(i);
        double* __restrict ci = c.row(i);
        for (int p = 0; p < k; ++p) {
            const double aip = ai[p];
            if (aip == 0.0) continue;
            const double* __restrict bp = b.row(p);
            for (int j = 0; j < m; ++j) ci[j] += aip * bp[j];
        }
    }
}

// C += A^T * B.  A is n x m, B is n x k, C is m x k.
inline void matmul_tn_accum(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.rows == b.rows);
    assert(c.rows == a.cols && c.cols == b.cols);
    const int n = a.rows, m = a.cols, k = b.cols;
    for (int i = 0; i < n; ++i) {
        const double* __restrict ai = a.row(i);
        const double* __restrict bi = b.row(i);
        for (int j = 0; j < m; ++j) {
            const double aij = ai[j];
            if (aij == 0.0) continue;
            double* __restrict cj = c.row(j);
            for (int p = 0; p < k; ++p) cj[p] += aij * bi[p];
        }
    }
}

}  // namespace mmbc
