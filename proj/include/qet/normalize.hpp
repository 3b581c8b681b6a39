#pragma once

#include <string>
#include <vector>

#include "qet/eterm.hpp"

namespace qet {

// Canonical-sum summand: coeff * X_label[classical chain; quantum map].
// The classical chain is kept sequential (state-application order) and is
// only composed into a parallel update at polynomial-encoding time.
struct Summand {
    ProbProduct coeff;
    int label = -1;
    std::vector<ClassicalUpdate> classical;
    QuantumMap quantum;

    QSqrtTwo eval(const Interpretation& interp, const Store& store, const Density& rho,
                  const Program& p) const {
        QSqrtTwo c = qet::eval(coeff, rho);
        if (c.sign() == 0) return QSqrtTwo(0);
        Store s = store;
        Density r = quantum.apply(rho);
        for (const auto& u : classical) {
            int id = p.combined_id(u.is_bool, u.var);
            if (u.is_bool)
                s.values.at(id) = eval_bool(u.bool_value.get(), s, p) ? 1 : 0;
            else
                s.values.at(id) = eval_nat(u.nat_value.get(), s, p);
        }
        return c * interp.lookup(label)(s, r);
    }

    std::string str() const {
        std::string upd;
        for (const auto& u : classical) {
            if (!upd.empty()) upd += "; ";
            upd += u.str();
        }
        if (!quantum.trivial()) {
            if (!upd.empty()) upd += "; ";
            upd += quantum.str();
        }
        std::string base = label < 0 ? "X" : "X_" + std::to_string(label);
        return qet::str(coeff) + "*" + base + "[" + (upd.empty() ? "id" : upd) + "]";
    }
};

using CanonicalSum = std::vector<Summand>;

inline QSqrtTwo eval(const CanonicalSum& sum, const Interpretation& interp, const Store& store,
                     const Density& rho, const Program& p) {
    QSqrtTwo acc(0);
    for (const auto& s : sum) acc += s.eval(interp, store, rho, p);
    return acc;
}

namespace detail {

// Applies a state update from outside: the update acts on the state before
// everything already recorded in the summand.
inline void apply_update(Summand& s, const StateUpdate& u) {
    if (u.quantum && !u.quantum->trivial()) {
        for (auto& atom : s.coeff) atom = atom.after(*u.quantum);
        s.quantum = u.quantum->then(s.quantum);
    }
    s.classical.insert(s.classical.begin(), u.classical.begin(), u.classical.end());
}

inline void normalize_into(const ETerm& t, std::size_t dim, CanonicalSum& out);

inline void scaled_children(const ETerm& t, const ProbProduct& extra, std::size_t dim,
                            CanonicalSum& out) {
    CanonicalSum inner;
    normalize_into(t, dim, inner);
    for (auto& s : inner) {
        s.coeff.insert(s.coeff.end(), extra.begin(), extra.end());
        out.push_back(std::move(s));
    }
}

inline void normalize_into(const ETerm& t, std::size_t dim, CanonicalSum& out) {
    switch (t->kind) {
        case ETermNode::Kind::Var: {
            Summand s;
            s.label = t->label;
            s.quantum = QuantumMap::identity(dim);
            out.push_back(std::move(s));
            return;
        }
        case ETermNode::Kind::Subst: {
            CanonicalSum inner;
            normalize_into(t->child, dim, inner);
            for (auto& s : inner) {
                apply_update(s, t->update);
                out.push_back(std::move(s));
            }
            return;
        }
        case ETermNode::Kind::Bary: {
            // F +_p G -> p*F + (1-p)*G; complementing the measurement atom
            // realizes 1-p exactly.
            scaled_children(t->child, {t->prob}, dim, out);
            scaled_children(t->other, {t->prob.complement()}, dim, out);
            return;
        }
        case ETermNode::Kind::Scale:
            scaled_children(t->child, t->factor, dim, out);
            return;
        case ETermNode::Kind::Sum:
            normalize_into(t->child, dim, out);
            normalize_into(t->other, dim, out);
            return;
    }
    throw std::logic_error("bad expectation term");
}

}  // namespace detail

// Rewrites a term to a sum of coefficient-scaled variables under a single
// combined update, pushing substitutions through barycentric sums and
// composing quantum maps (innermost first, children left to right).
inline CanonicalSum normalize(const ETerm& t, int qubit_count) {
    CanonicalSum out;
    detail::normalize_into(t, std::size_t(1) << qubit_count, out);
    return out;
}

// One trace factor lambda rho. tr(M rho M^dag).
struct TraceTerm {
    CMat m;
    std::string label;

    QSqrtTwo eval(const Density& rho) const {
        return rho.matrix().conjugate_by(m).trace().to_real();
    }
};

using TraceProduct = std::vector<TraceTerm>;  // empty = constant 1

inline QSqrtTwo eval(const TraceProduct& tp, const Density& rho) {
    QSqrtTwo v(1);
    for (const auto& t : tp) v *= t.eval(rho);
    return v;
}

// Coefficients of a canonical sum rewritten over a common denominator:
// summand i carries numerator product `numerators[i]`, and the shared
// denominator multiplies the right-hand side of the constraint.  All
// factors are plain traces, non-zero under the constraint's guard.
struct CommonDenominator {
    std::vector<TraceProduct> numerators;
    TraceProduct denominator;
};

inline CommonDenominator common_denominator(const CanonicalSum& sum) {
    // Per-summand numerator and denominator trace lists.
    std::vector<TraceProduct> nums(sum.size()), dens(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
        for (const auto& atom : sum[i].coeff) {
            nums[i].push_back({atom.numerator_matrix(), atom.str() + ".num"});
            if (atom.pre.renorm)
                dens[i].push_back({atom.pre.m, "tr[" + atom.pre.str() + "]"});
        }
    }
    CommonDenominator out;
    out.numerators.resize(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
        out.numerators[i] = nums[i];
        for (std::size_t j = 0; j < sum.size(); ++j) {
            if (j == i) continue;
            out.numerators[i].insert(out.numerators[i].end(), dens[j].begin(), dens[j].end());
        }
        out.denominator.insert(out.denominator.end(), dens[i].begin(), dens[i].end());
    }
    return out;
}

}  // namespace qet
