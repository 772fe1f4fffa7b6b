#pragma once
/**
 * @file matrix.hpp
 * @brief Small dense integer matrices with big-integer entries.
 */

#include "subdyn/error.hpp"
#include "subdyn/numeric/mp.hpp"

#include <algorithm>
#include <vector>

namespace subdyn {

class BigMatrix {
public:
    BigMatrix() = default;
    BigMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, BigInt(0)) {}

    static BigMatrix identity(int n) {
        BigMatrix I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1;
        return I;
    }

    static BigMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
        int r = static_cast<int>(rows.size());
        int c = r ? static_cast<int>(rows[0].size()) : 0;
        BigMatrix M(r, c);
        for (int i = 0; i < r; ++i) {
            require(static_cast<int>(rows[i].size()) == c, "ragged matrix rows");
            for (int j = 0; j < c; ++j) M(i, j) = static_cast<long>(rows[i][j]);
        }
        return M;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    BigInt& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const BigInt& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    BigMatrix transpose() const {
        BigMatrix T(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
        return T;
    }

    friend BigMatrix operator*(const BigMatrix& A, const BigMatrix& B) {
        require(A.cols_ == B.rows_, "matrix shape mismatch");
        BigMatrix C(A.rows_, B.cols_);
        for (int i = 0; i < A.rows_; ++i)
            for (int k = 0; k < A.cols_; ++k) {
                const BigInt& aik = A(i, k);
                if (aik == 0) continue;
                for (int j = 0; j < B.cols_; ++j) C(i, j) += aik * B(k, j);
            }
        return C;
    }

    friend bool operator==(const BigMatrix& A, const BigMatrix& B) {
        return A.rows_ == B.rows_ && A.cols_ == B.cols_ && A.a_ == B.a_;
    }

    std::vector<BigInt> mul_vec(const std::vector<BigInt>& x) const {
        std::vector<BigInt> y(rows_, BigInt(0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    std::vector<BigInt> column(int j) const {
        std::vector<BigInt> c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    BigInt column_sum(int j) const {
        BigInt s = 0;
        for (int i = 0; i < rows_; ++i) s += (*this)(i, j);
        return s;
    }

    BigInt max_entry() const {
        BigInt m = 0;
        for (const auto& x : a_)
            if (x > m) m = x;
        return m;
    }

    bool all_positive() const {
        for (const auto& x : a_)
            if (x <= 0) return false;
        return true;
    }

    BigInt trace() const {
        BigInt t = 0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    BigMatrix pow(unsigned long e) const {
        BigMatrix R = identity(rows_);
        BigMatrix B = *this;
        while (e) {
            if (e & 1) R = R * B;
            e >>= 1;
            if (e) B = B * B;
        }
        return R;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<BigInt> a_;
};

} // namespace subdyn
