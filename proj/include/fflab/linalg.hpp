#pragma once

#include <cstddef>
#include <vector>

#include "finite_field.hpp"

namespace fflab {

/// Dense row-major matrix over F_q with in-place elimination helpers.
class FqMatrix {
public:
    FqMatrix() = default;
    FqMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    FieldElement& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    FieldElement operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    /// Reduced row echelon form in place; returns the pivot columns.
    std::vector<std::size_t> rref(const FieldSpec& F) {
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t piv = r;
            while (piv < rows_ && (*this)(piv, c).code == 0) ++piv;
            if (piv == rows_) continue;
            if (piv != r)
                for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(r, j), (*this)(piv, j));
            const FieldElement inv = F.inv((*this)(r, c));
            for (std::size_t j = c; j < cols_; ++j) (*this)(r, j) = F.mul((*this)(r, j), inv);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == r) continue;
                const FieldElement f = (*this)(i, c);
                if (f.code == 0) continue;
                const FieldElement nf = F.neg(f);
                for (std::size_t j = c; j < cols_; ++j)
                    (*this)(i, j) = F.add((*this)(i, j), F.mul(nf, (*this)(r, j)));
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    std::size_t rank(const FieldSpec& F) const {
        FqMatrix m = *this;
        return m.rref_rank(F);
    }

    /// Basis of the right kernel {x : A x = 0}.
    std::vector<std::vector<FieldElement>> kernel(const FieldSpec& F) const {
        FqMatrix m = *this;
        auto pivots = m.rref(F);
        std::vector<char> is_pivot(cols_, 0);
        for (auto c : pivots) is_pivot[c] = 1;
        std::vector<std::vector<FieldElement>> basis;
        for (std::size_t free = 0; free < cols_; ++free) {
            if (is_pivot[free]) continue;
            std::vector<FieldElement> v(cols_);
            v[free] = F.one();
            for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = F.neg(m(r, free));
            basis.push_back(std::move(v));
        }
        return basis;
    }

    FieldElement determinant(const FieldSpec& F) const {
        if (rows_ != cols_) throw DomainError("determinant of a non-square matrix");
        FqMatrix m = *this;
        FieldElement det = F.one();
        for (std::size_t c = 0; c < cols_; ++c) {
            std::size_t piv = c;
            while (piv < rows_ && m(piv, c).code == 0) ++piv;
            if (piv == rows_) return F.zero();
            if (piv != c) {
                for (std::size_t j = 0; j < cols_; ++j) std::swap(m(c, j), m(piv, j));
                det = F.neg(det);
            }
            det = F.mul(det, m(c, c));
            const FieldElement inv = F.inv(m(c, c));
            for (std::size_t i = c + 1; i < rows_; ++i) {
                const FieldElement f = F.mul(m(i, c), inv);
                if (f.code == 0) continue;
                const FieldElement nf = F.neg(f);
                for (std::size_t j = c; j < cols_; ++j) m(i, j) = F.add(m(i, j), F.mul(nf, m(c, j)));
            }
        }
        return det;
    }

private:
    std::size_t rref_rank(const FieldSpec& F) {
        // forward elimination only
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t piv = r;
            while (piv < rows_ && (*this)(piv, c).code == 0) ++piv;
            if (piv == rows_) continue;
            if (piv != r)
                for (std::size_t j = c; j < cols_; ++j) std::swap((*this)(r, j), (*this)(piv, j));
            const FieldElement inv = F.inv((*this)(r, c));
            for (std::size_t i = r + 1; i < rows_; ++i) {
                const FieldElement f = (*this)(i, c);
                if (f.code == 0) continue;
                const FieldElement nf = F.neg(F.mul(f, inv));
                for (std::size_t j = c; j < cols_; ++j)
                    (*this)(i, j) = F.add((*this)(i, j), F.mul(nf, (*this)(r, j)));
            }
            ++r;
        }
        return r;
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<FieldElement> a_;
};

}  // namespace fflab
