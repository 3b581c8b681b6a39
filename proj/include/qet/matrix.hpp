#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qet/cyclotomic.hpp"

namespace qet {

// Dense square matrix over Q(w).  Dimensions stay tiny (2^m for m <= 3),
// so no effort is spent on sparsity.
class CMat {
  public:
    CMat() : n_(0) {}
    explicit CMat(std::size_t n) : n_(n), e_(n * n) {}

    static CMat identity(std::size_t n) {
        CMat m(n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = QOmega(1);
        return m;
    }

    std::size_t dim() const { return n_; }

    QOmega& at(std::size_t r, std::size_t c) { return e_[r * n_ + c]; }
    const QOmega& at(std::size_t r, std::size_t c) const { return e_[r * n_ + c]; }

    CMat operator*(const CMat& o) const {
        check_dim(o);
        CMat r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) {
                if (at(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < n_; ++j) {
                    if (o.at(k, j).is_zero()) continue;
                    r.at(i, j) += at(i, k) * o.at(k, j);
                }
            }
        return r;
    }

    CMat operator+(const CMat& o) const {
        check_dim(o);
        CMat r(n_);
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] + o.e_[i];
        return r;
    }

    CMat operator-(const CMat& o) const {
        check_dim(o);
        CMat r(n_);
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] - o.e_[i];
        return r;
    }

    CMat scaled(const QOmega& s) const {
        CMat r(n_);
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] * s;
        return r;
    }

    CMat adjoint() const {
        CMat r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r.at(j, i) = at(i, j).conj();
        return r;
    }

    QOmega trace() const {
        QOmega t;
        for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
        return t;
    }

    bool operator==(const CMat& o) const { return n_ == o.n_ && e_ == o.e_; }
    bool operator!=(const CMat& o) const { return !(*this == o); }

    bool is_identity() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (at(i, j) != (i == j ? QOmega(1) : QOmega(0))) return false;
        return true;
    }

    bool is_hermitian() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j)
                if (at(i, j) != at(j, i).conj()) return false;
        return true;
    }

    // U rho U^dagger.
    CMat conjugate_by(const CMat& u) const { return u * (*this) * u.adjoint(); }

    // Determinant by Gaussian elimination with exact division.
    QOmega det() const {
        CMat a = *this;
        QOmega result(1);
        for (std::size_t col = 0; col < n_; ++col) {
            std::size_t pivot = col;
            while (pivot < n_ && a.at(pivot, col).is_zero()) ++pivot;
            if (pivot == n_) return QOmega(0);
            if (pivot != col) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(a.at(pivot, j), a.at(col, j));
                result = -result;
            }
            const QOmega p = a.at(col, col);
            result *= p;
            const QOmega pinv = p.inverse();
            for (std::size_t r = col + 1; r < n_; ++r) {
                if (a.at(r, col).is_zero()) continue;
                QOmega factor = a.at(r, col) * pinv;
                for (std::size_t j = col; j < n_; ++j)
                    a.at(r, j) -= factor * a.at(col, j);
            }
        }
        return result;
    }

    // Submatrix on the given (sorted) index subset.
    CMat principal_submatrix(const std::vector<std::size_t>& idx) const {
        CMat r(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) r.at(i, j) = at(idx[i], idx[j]);
        return r;
    }

  private:
    void check_dim(const CMat& o) const {
        if (n_ != o.n_) throw std::invalid_argument("matrix dimension mismatch");
    }
    std::size_t n_;
    std::vector<QOmega> e_;
};

}  // namespace qet
