#pragma once

#include <random>
#include <vector>

#include "qet/density.hpp"
#include "qet/semantics.hpp"

namespace qet {

struct SampledState {
    Store store;
    Density rho;
};

namespace detail {

inline QOmega random_small_qomega(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-2, 2);
    std::uniform_int_distribution<int> den(1, 2);
    Rational c[4];
    for (auto& r : c) r = make_rational(num(rng), den(rng));
    return {c[0], c[1], c[2], c[3]};
}

// rho = sum_i w_i * psi_i psi_i^dag / <psi_i|psi_i>, a convex rational
// combination of projectors with small-numerator amplitudes.
inline Density random_density(std::mt19937_64& rng, int qubits) {
    const std::size_t dim = std::size_t(1) << qubits;
    std::uniform_int_distribution<int> terms_dist(1, 3);
    std::uniform_int_distribution<int> weight_dist(1, 4);
    const int terms = terms_dist(rng);
    std::vector<std::vector<QOmega>> vectors;
    std::vector<Rational> weights;
    Rational total(0);
    for (int t = 0; t < terms; ++t) {
        std::vector<QOmega> psi(dim);
        bool nonzero = false;
        do {
            nonzero = false;
            for (auto& a : psi) {
                a = random_small_qomega(rng);
                nonzero |= !a.is_zero();
            }
        } while (!nonzero);
        vectors.push_back(std::move(psi));
        Rational w(weight_dist(rng));
        weights.push_back(w);
        total += w;
    }
    CMat rho(dim);
    for (int t = 0; t < terms; ++t) {
        QSqrtTwo norm(0);
        for (const auto& a : vectors[t]) norm += (a * a.conj()).to_real();
        QOmega scale = QOmega(QSqrtTwo(weights[t] / total)) * QOmega(norm).inverse();
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t k = 0; k < dim; ++k)
                rho.at(j, k) += vectors[t][j] * vectors[t][k].conj() * scale;
    }
    return Density::trusted(rho);
}

}  // namespace detail

// The fixed one-qubit corner case [[1/3, sqrt2/3], [sqrt2/3, 2/3]].
inline Density corner_case_density() {
    CMat m(2);
    QOmega off = Rational(1, 3) * QOmega::sqrt2();
    m.at(0, 0) = QOmega(Rational(1, 3));
    m.at(0, 1) = off;
    m.at(1, 0) = off;
    m.at(1, 1) = QOmega(Rational(2, 3));
    return Density::trusted(m);
}

// Deterministic-by-seed admissible states: bools in {0,1}, nats in 0..9,
// quantum states as convex rational combinations of projectors.  For
// one-qubit programs the first sample is the fixed corner case above.
inline std::vector<SampledState> sample_states(const Program& p, int count,
                                               std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample count must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> bool_dist(0, 1);
    std::uniform_int_distribution<int> nat_dist(0, 9);
    std::vector<SampledState> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Store s = Store::zeros(p);
        for (std::size_t v = 0; v < p.bool_vars.size(); ++v)
            s.values[v] = bool_dist(rng);
        for (std::size_t v = 0; v < p.nat_vars.size(); ++v)
            s.values[p.bool_vars.size() + v] = nat_dist(rng);
        Density rho = (i == 0 && p.qubit_count() == 1)
                          ? corner_case_density()
                          : detail::random_density(rng, p.qubit_count());
        out.push_back({std::move(s), std::move(rho)});
    }
    return out;
}

}  // namespace qet
