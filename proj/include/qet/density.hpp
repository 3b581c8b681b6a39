#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qet/gates.hpp"
#include "qet/matrix.hpp"

namespace qet {

// Density operator on m qubits with entries in Q(w).  Hermiticity and unit
// trace are enforced on every construction; positive semidefiniteness is
// checked only on the validated path (all principal minors, m <= 3), since
// states produced by gate application, measurement normalization and convex
// combination are positive by construction.
class Density {
  public:
    Density() : m_(0), rho_(1) { rho_.at(0, 0) = QOmega(1); }

    static Density validated(const CMat& rho) {
        Density d = trusted(rho);
        if (d.m_ <= 3) {
            const std::size_t dim = rho.dim();
            // Iterate over all non-empty index subsets.
            for (std::size_t mask = 1; mask < (std::size_t(1) << dim); ++mask) {
                std::vector<std::size_t> idx;
                for (std::size_t b = 0; b < dim; ++b)
                    if (mask & (std::size_t(1) << b)) idx.push_back(b);
                QOmega minor = rho.principal_submatrix(idx).det();
                if (!minor.is_real() || minor.to_real().sign() < 0)
                    throw std::invalid_argument("density matrix is not positive semidefinite");
            }
        }
        return d;
    }

    static Density trusted(const CMat& rho) {
        Density d;
        std::size_t dim = rho.dim();
        int m = 0;
        while ((std::size_t(1) << m) < dim) ++m;
        if ((std::size_t(1) << m) != dim)
            throw std::invalid_argument("density matrix dimension is not a power of two");
        if (!rho.is_hermitian())
            throw std::invalid_argument("density matrix is not hermitian");
        if (rho.trace() != QOmega(1))
            throw std::invalid_argument("density matrix trace is not 1");
        d.m_ = m;
        d.rho_ = rho;
        return d;
    }

    static Density ket0(int m) {
        CMat rho(std::size_t(1) << m);
        rho.at(0, 0) = QOmega(1);
        return trusted(rho);
    }

    static Density ketplus(int m) {
        const std::size_t dim = std::size_t(1) << m;
        CMat rho(dim);
        Rational w(1, long(dim));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) rho.at(i, j) = QOmega(w);
        return trusted(rho);
    }

    static Density maximally_mixed(int m) {
        const std::size_t dim = std::size_t(1) << m;
        CMat rho(dim);
        for (std::size_t i = 0; i < dim; ++i) rho.at(i, i) = QOmega(Rational(1, long(dim)));
        return trusted(rho);
    }

    int qubits() const { return m_; }
    std::size_t dim() const { return rho_.dim(); }
    const CMat& matrix() const { return rho_; }
    const QOmega& entry(std::size_t j, std::size_t k) const { return rho_.at(j, k); }

    bool operator==(const Density& o) const { return m_ == o.m_ && rho_ == o.rho_; }
    bool operator!=(const Density& o) const { return !(*this == o); }

  private:
    int m_;
    CMat rho_;
};

// U_q rho U_q^dagger with the gate embedded at the given qubit positions.
inline Density apply_gate(Gate g, const std::vector<int>& operands, const Density& rho) {
    CMat u = embed_gate(g, operands, rho.qubits());
    return Density::trusted(rho.matrix().conjugate_by(u));
}

struct MeasurementBranch {
    QSqrtTwo probability;
    Density state;
};

// Measures qubit i in the computational basis.  Probabilities are exact and
// sum to 1; a zero-probability branch carries the maximally mixed state,
// matching the normalization map's degenerate case (the small-step rule
// drops such branches, so this surfaces only through this API).
inline std::pair<MeasurementBranch, MeasurementBranch> measure(const Density& rho, int qubit) {
    const int m = rho.qubits();
    MeasurementBranch out[2];
    for (int k = 0; k < 2; ++k) {
        CMat proj = measurement_projector(m, qubit, k);
        QOmega p = (proj * rho.matrix()).trace();
        if (!p.is_real()) throw std::logic_error("measurement probability is not real");
        QSqrtTwo prob = p.to_real();
        if (prob.sign() == 0) {
            out[k] = {QSqrtTwo(0), Density::maximally_mixed(m)};
            continue;
        }
        CMat collapsed = rho.matrix().conjugate_by(proj);
        QOmega scale = QOmega(prob).inverse();
        out[k] = {prob, Density::trusted(collapsed.scaled(scale))};
    }
    if (out[0].probability + out[1].probability != QSqrtTwo(1))
        throw std::logic_error("measurement probabilities do not sum to 1");
    return {out[0], out[1]};
}

}  // namespace qet
