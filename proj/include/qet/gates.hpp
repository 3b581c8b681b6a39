#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qet/ast.hpp"
#include "qet/matrix.hpp"

namespace qet {

// Exact Clifford+T matrices over Q(w).  S is the standard unitary
// diag(1, i); T = diag(1, w) with w = e^{i pi/4}.
inline const CMat& gate_matrix(Gate g) {
    static const auto make1 = [](QOmega a, QOmega b, QOmega c, QOmega d) {
        CMat m(2);
        m.at(0, 0) = a;
        m.at(0, 1) = b;
        m.at(1, 0) = c;
        m.at(1, 1) = d;
        return m;
    };
    static const CMat I = CMat::identity(2);
    static const CMat X = make1(QOmega(0), QOmega(1), QOmega(1), QOmega(0));
    static const CMat Y = make1(QOmega(0), -QOmega::i(), QOmega::i(), QOmega(0));
    static const CMat Z = make1(QOmega(1), QOmega(0), QOmega(0), QOmega(-1));
    static const CMat H = make1(QOmega::inv_sqrt2(), QOmega::inv_sqrt2(),
                                QOmega::inv_sqrt2(), -QOmega::inv_sqrt2());
    static const CMat S = make1(QOmega(1), QOmega(0), QOmega(0), QOmega::i());
    static const CMat T = make1(QOmega(1), QOmega(0), QOmega(0), QOmega::omega());
    static const CMat CNOT = [] {
        CMat m(4);
        m.at(0, 0) = QOmega(1);
        m.at(1, 1) = QOmega(1);
        m.at(2, 3) = QOmega(1);
        m.at(3, 2) = QOmega(1);
        return m;
    }();
    switch (g) {
        case Gate::I: return I;
        case Gate::X: return X;
        case Gate::Y: return Y;
        case Gate::Z: return Z;
        case Gate::H: return H;
        case Gate::S: return S;
        case Gate::T: return T;
        case Gate::CNOT: return CNOT;
    }
    throw std::logic_error("unknown gate");
}

// Extends a k-qubit gate to the full register of m qubits.  Qubit 0 is the
// first declared qubit and owns the most significant bit of the basis
// index, so non-adjacent and reordered operand lists permute bit positions.
inline CMat embed_gate(const CMat& g, const std::vector<int>& operands, int m) {
    const std::size_t dim = std::size_t(1) << m;
    const std::size_t k = operands.size();
    if ((std::size_t(1) << k) != g.dim())
        throw std::invalid_argument("gate arity mismatch");
    for (std::size_t i = 0; i < k; ++i) {
        if (operands[i] < 0 || operands[i] >= m)
            throw std::out_of_range("qubit index out of range");
        for (std::size_t j = i + 1; j < k; ++j)
            if (operands[i] == operands[j])
                throw std::invalid_argument("duplicate qubit operand");
    }
    auto bit_of = [m](std::size_t basis, int qubit) {
        return (basis >> (m - 1 - qubit)) & 1u;
    };
    CMat r(dim);
    for (std::size_t row = 0; row < dim; ++row) {
        for (std::size_t col = 0; col < dim; ++col) {
            // Non-operand bits must agree; operand bits select the gate entry.
            bool rest_equal = true;
            for (int q = 0; q < m && rest_equal; ++q) {
                bool is_operand = false;
                for (int op : operands) is_operand |= (op == q);
                if (!is_operand && bit_of(row, q) != bit_of(col, q)) rest_equal = false;
            }
            if (!rest_equal) continue;
            std::size_t gr = 0, gc = 0;
            for (std::size_t i = 0; i < k; ++i) {
                gr = (gr << 1) | bit_of(row, operands[i]);
                gc = (gc << 1) | bit_of(col, operands[i]);
            }
            r.at(row, col) = g.at(gr, gc);
        }
    }
    return r;
}

inline CMat embed_gate(Gate g, const std::vector<int>& operands, int m) {
    return embed_gate(gate_matrix(g), operands, m);
}

// Projector onto measurement outcome k of qubit i within an m-qubit register.
inline CMat measurement_projector(int m, int qubit, int outcome) {
    if (qubit < 0 || qubit >= m) throw std::out_of_range("qubit index out of range");
    const std::size_t dim = std::size_t(1) << m;
    CMat p(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        auto bit = (b >> (m - 1 - qubit)) & 1u;
        if (static_cast<int>(bit) == outcome) p.at(b, b) = QOmega(1);
    }
    return p;
}

}  // namespace qet
