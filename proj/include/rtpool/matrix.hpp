#pragma once

#include <cstdint>
#include <vector>

#include "rtpool/errors.hpp"
#include "rtpool/parallel.hpp"

namespace rtpool {

/// Dense row-major matrix of doubles. Sized for desk-scale problems;
/// no view/expression machinery.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    double* row(int r) { return a_.data() + static_cast<std::size_t>(r) * cols_; }
    const double* row(int r) const { return a_.data() + static_cast<std::size_t>(r) * cols_; }

    std::vector<double>& data() { return a_; }
    const std::vector<double>& data() const { return a_; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// Dense row-major matrix of non-negative counts.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols, std::int64_t fill = 0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    std::int64_t& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    std::int64_t operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::vector<std::int64_t>& data() { return a_; }
    const std::vector<std::int64_t>& data() const { return a_; }

    bool operator==(const IntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::int64_t> a_;
};

/// C = A * B. The parallel path splits output rows across threads; each
/// element is accumulated in the same index order as the serial path, so
/// the two agree bit for bit.
Matrix matmul(const Matrix& a, const Matrix& b, Exec exec = Exec::Parallel);

Matrix transpose(const Matrix& a);

}  // namespace rtpool
