#pragma once

/*
 * Dense vectors and matrices over a Field, with the exact linear algebra
 * the code construction needs: dot products, rank, and k x k solves via
 * Gaussian elimination (first-nonzero pivoting; singularity is exact).
 */

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "gf.hpp"

namespace mbcr {

using FieldVector = std::vector<FieldElement>;

inline void require_single_field(const FieldVector& v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i].field() != v[0].field())
            throw parameter_error("vector mixes elements of different fields");
}

inline FieldElement dot(const FieldVector& u, const FieldVector& v) {
    if (u.size() != v.size())
        throw parameter_error("dot product length mismatch: " + std::to_string(u.size()) +
                              " vs " + std::to_string(v.size()));
    if (u.empty())
        throw parameter_error("dot product of empty vectors");
    FieldElement acc(0, u[0].field());
    for (size_t i = 0; i < u.size(); ++i)
        acc += u[i] * v[i];
    return acc;
}

class FieldMatrix {
public:
    FieldMatrix(int rows, int cols, const Field& field)
        : rows_(rows), cols_(cols), field_(&field), entries_(size_t(rows) * cols, 0) {
        if (rows < 0 || cols < 0)
            throw parameter_error("negative matrix dimension");
    }

    static FieldMatrix from_rows(std::initializer_list<std::initializer_list<uint32_t>> rows,
                                 const Field& field) {
        const int r = static_cast<int>(rows.size());
        const int c = r ? static_cast<int>(rows.begin()->size()) : 0;
        FieldMatrix m(r, c, field);
        int i = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c)
                throw parameter_error("ragged row list");
            int j = 0;
            for (uint32_t v : row)
                m.set(i, j++, FieldElement(v, field));
            ++i;
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Field& field() const { return *field_; }

    FieldElement at(int r, int c) const { return {entries_[index(r, c)], *field_}; }

    void set(int r, int c, FieldElement v) {
        if (v.field() != *field_)
            throw parameter_error("entry from a different field");
        entries_[index(r, c)] = v.value();
    }

    FieldVector row(int r) const {
        FieldVector out;
        out.reserve(cols_);
        for (int c = 0; c < cols_; ++c)
            out.push_back(at(r, c));
        return out;
    }

    FieldVector col(int c) const {
        FieldVector out;
        out.reserve(rows_);
        for (int r = 0; r < rows_; ++r)
            out.push_back(at(r, c));
        return out;
    }

    FieldMatrix select_columns(const std::vector<int>& cols) const {
        FieldMatrix out(rows_, static_cast<int>(cols.size()), *field_);
        for (size_t j = 0; j < cols.size(); ++j)
            for (int r = 0; r < rows_; ++r)
                out.set(r, static_cast<int>(j), at(r, cols[j]));
        return out;
    }

    friend bool operator==(const FieldMatrix& a, const FieldMatrix& b) {
        return *a.field_ == *b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
               a.entries_ == b.entries_;
    }

private:
    size_t index(int r, int c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
            throw parameter_error("matrix index (" + std::to_string(r) + "," + std::to_string(c) +
                                  ") out of range");
        return size_t(r) * cols_ + c;
    }

    int rows_, cols_;
    const Field* field_;
    std::vector<uint32_t> entries_;
};

inline FieldVector mat_vec(const FieldMatrix& A, const FieldVector& x) {
    if (static_cast<int>(x.size()) != A.cols())
        throw parameter_error("matrix-vector size mismatch");
    FieldVector out;
    out.reserve(A.rows());
    for (int r = 0; r < A.rows(); ++r)
        out.push_back(dot(A.row(r), x));
    return out;
}

inline int rank(FieldMatrix A) {
    int rk = 0;
    for (int c = 0; c < A.cols() && rk < A.rows(); ++c) {
        int pivot = -1;
        for (int r = rk; r < A.rows(); ++r)
            if (!A.at(r, c).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0)
            continue;
        if (pivot != rk)
            for (int j = 0; j < A.cols(); ++j) {
                FieldElement t = A.at(rk, j);
                A.set(rk, j, A.at(pivot, j));
                A.set(pivot, j, t);
            }
        const FieldElement piv_inv = A.at(rk, c).inverse();
        for (int r = rk + 1; r < A.rows(); ++r) {
            if (A.at(r, c).is_zero())
                continue;
            const FieldElement factor = A.at(r, c) * piv_inv;
            for (int j = c; j < A.cols(); ++j)
                A.set(r, j, A.at(r, j) + factor * A.at(rk, j));
        }
        ++rk;
    }
    return rk;
}

/// Solves A x = b for square invertible A; throws singular_matrix_error otherwise.
inline FieldVector solve(FieldMatrix A, FieldVector b) {
    if (A.rows() != A.cols())
        throw parameter_error("solve requires a square matrix");
    if (static_cast<int>(b.size()) != A.rows())
        throw parameter_error("right-hand side length mismatch");
    const int n = A.rows();
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r)
            if (!A.at(r, c).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0)
            throw singular_matrix_error("singular system (no pivot in column " +
                                        std::to_string(c) + ")");
        if (pivot != c) {
            for (int j = 0; j < n; ++j) {
                FieldElement t = A.at(c, j);
                A.set(c, j, A.at(pivot, j));
                A.set(pivot, j, t);
            }
            std::swap(b[c], b[pivot]);
        }
        const FieldElement piv_inv = A.at(c, c).inverse();
        for (int r = 0; r < n; ++r) {
            if (r == c || A.at(r, c).is_zero())
                continue;
            const FieldElement factor = A.at(r, c) * piv_inv;
            for (int j = c; j < n; ++j)
                A.set(r, j, A.at(r, j) + factor * A.at(c, j));
            b[r] += factor * b[c];
        }
    }
    FieldVector x;
    x.reserve(n);
    for (int i = 0; i < n; ++i)
        x.push_back(b[i] * A.at(i, i).inverse());
    return x;
}

} // namespace mbcr
