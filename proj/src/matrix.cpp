#include "rtpool/matrix.hpp"

namespace rtpool {

namespace {

void matmul_rows(const Matrix& a, const Matrix& b, Matrix& c, int r0, int r1) {
    const int n = a.cols();
    const int m = b.cols();
    for (int i = r0; i < r1; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (int k = 0; k < n; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (int j = 0; j < m; ++j) ci[j] += aik * bk[j];
        }
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.cols() != b.rows())
        throw ShapeMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols(), 0.0);
    if (exec == Exec::Serial) {
        matmul_rows(a, b, c, 0, a.rows());
        return c;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows(); ++i) matmul_rows(a, b, c, i, i + 1);
#else
    matmul_rows(a, b, c, 0, a.rows());
#endif
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

}  // namespace rtpool
