#pragma once

#include <map>
#include <string>
#include <vector>

#include "qet/normalize.hpp"
#include "qet/poly.hpp"
#include "qet/qinfer.hpp"

namespace qet {

// Formula over polynomial sign atoms; used for constraint guards and the
// admissibility predicate.
struct PolyFormula {
    enum class Kind { Atom, And, Or };
    enum class Rel { Eq0, Ne0, Ge0, Gt0 };

    Kind kind = Kind::And;
    Rel rel = Rel::Eq0;
    Poly poly;
    std::vector<PolyFormula> children;  // And / Or

    static PolyFormula atom(Poly p, Rel r) {
        PolyFormula f;
        f.kind = Kind::Atom;
        f.poly = std::move(p);
        f.rel = r;
        return f;
    }
    static PolyFormula conj(std::vector<PolyFormula> ch) {
        PolyFormula f;
        f.kind = Kind::And;
        f.children = std::move(ch);
        return f;
    }
    static PolyFormula disj(std::vector<PolyFormula> ch) {
        PolyFormula f;
        f.kind = Kind::Or;
        f.children = std::move(ch);
        return f;
    }
    static PolyFormula truth() { return conj({}); }
    static PolyFormula falsity() { return disj({}); }

    bool eval(const std::vector<QSqrtTwo>& values) const {
        switch (kind) {
            case Kind::Atom: {
                int s = poly.eval(values).sign();
                switch (rel) {
                    case Rel::Eq0: return s == 0;
                    case Rel::Ne0: return s != 0;
                    case Rel::Ge0: return s >= 0;
                    case Rel::Gt0: return s > 0;
                }
                return false;
            }
            case Kind::And:
                for (const auto& c : children)
                    if (!c.eval(values)) return false;
                return true;
            case Kind::Or:
                for (const auto& c : children)
                    if (c.eval(values)) return true;
                return false;
        }
        return false;
    }
};

namespace detail {

// ---- polynomial encodings of program expressions ------------------------

inline Poly encode_nat(const NatExpr* e, const std::vector<Poly>& env, const StateSig& sig);

inline Poly encode_nat(const NatExpr* e, const std::vector<Poly>& env, const StateSig& sig) {
    switch (e->kind) {
        case NatExpr::Kind::Var:
            return env.at(sig.y_index(e->name));
        case NatExpr::Kind::Lit:
            return Poly::constant(sig.var_count(), QSqrtTwo(Rational(e->lit)));
        case NatExpr::Kind::Add:
            return encode_nat(e->lhs.get(), env, sig) + encode_nat(e->rhs.get(), env, sig);
        case NatExpr::Kind::Mul:
            return encode_nat(e->lhs.get(), env, sig) * encode_nat(e->rhs.get(), env, sig);
        case NatExpr::Kind::Sub:
            throw EncodeError(
                "natural subtraction has no polynomial encoding; rewrite the program "
                "without monus on the encoded path");
    }
    throw std::logic_error("bad nat expression");
}

// Boolean expressions as 0/1-valued polynomials (comparisons excluded).
inline Poly encode_bool_poly(const BoolExpr* e, const std::vector<Poly>& env,
                             const StateSig& sig) {
    const int n = sig.var_count();
    switch (e->kind) {
        case BoolExpr::Kind::Var:
            return env.at(sig.y_index(e->name));
        case BoolExpr::Kind::True:
            return Poly::constant(n, QSqrtTwo(1));
        case BoolExpr::Kind::False:
            return Poly(n);
        case BoolExpr::Kind::Not:
            return Poly::constant(n, QSqrtTwo(1)) - encode_bool_poly(e->bl.get(), env, sig);
        case BoolExpr::Kind::And:
            return encode_bool_poly(e->bl.get(), env, sig) *
                   encode_bool_poly(e->br.get(), env, sig);
        case BoolExpr::Kind::Or: {
            Poly a = encode_bool_poly(e->bl.get(), env, sig);
            Poly b = encode_bool_poly(e->br.get(), env, sig);
            return a + b - a * b;
        }
        case BoolExpr::Kind::Eq:
        case BoolExpr::Kind::Lt:
            throw EncodeError("comparisons cannot be assigned to booleans on the encoded path");
    }
    throw std::logic_error("bad bool expression");
}

// Guard conditions become formulas (comparisons allowed here).
inline PolyFormula encode_bool_formula(const BoolExpr* e, const StateSig& sig, bool negated) {
    std::vector<Poly> identity;
    for (int i = 0; i < sig.var_count(); ++i)
        identity.push_back(Poly::var(sig.var_count(), i));
    switch (e->kind) {
        case BoolExpr::Kind::Var: {
            Poly y = Poly::var(sig.var_count(), sig.y_index(e->name));
            Poly one = Poly::constant(sig.var_count(), QSqrtTwo(1));
            return PolyFormula::atom(negated ? y : y - one, PolyFormula::Rel::Eq0);
        }
        case BoolExpr::Kind::True:
            return negated ? PolyFormula::falsity() : PolyFormula::truth();
        case BoolExpr::Kind::False:
            return negated ? PolyFormula::truth() : PolyFormula::falsity();
        case BoolExpr::Kind::Eq: {
            Poly d = encode_nat(e->nl.get(), identity, sig) -
                     encode_nat(e->nr.get(), identity, sig);
            return PolyFormula::atom(std::move(d),
                                     negated ? PolyFormula::Rel::Ne0 : PolyFormula::Rel::Eq0);
        }
        case BoolExpr::Kind::Lt: {
            Poly d = encode_nat(e->nr.get(), identity, sig) -
                     encode_nat(e->nl.get(), identity, sig);
            // l < r encodes as r - l > 0; the negation as l - r >= 0... i.e. -(d) >= 0.
            return negated ? PolyFormula::atom(-d, PolyFormula::Rel::Ge0)
                           : PolyFormula::atom(std::move(d), PolyFormula::Rel::Gt0);
        }
        case BoolExpr::Kind::Not:
            return encode_bool_formula(e->bl.get(), sig, !negated);
        case BoolExpr::Kind::And: {
            std::vector<PolyFormula> ch{encode_bool_formula(e->bl.get(), sig, negated),
                                        encode_bool_formula(e->br.get(), sig, negated)};
            return negated ? PolyFormula::disj(std::move(ch))
                           : PolyFormula::conj(std::move(ch));
        }
        case BoolExpr::Kind::Or: {
            std::vector<PolyFormula> ch{encode_bool_formula(e->bl.get(), sig, negated),
                                        encode_bool_formula(e->br.get(), sig, negated)};
            return negated ? PolyFormula::conj(std::move(ch))
                           : PolyFormula::disj(std::move(ch));
        }
    }
    throw std::logic_error("bad bool expression");
}

// Real and imaginary parts of (M rho M^dag)_{jk} as linear polynomials in
// the A/B variables: the complex coefficient of rho_{ab} is M_{ja} *
// conj(M_{kb}).
struct EntryPolys {
    std::vector<Poly> re, im;  // row-major, dim*dim entries
};

inline EntryPolys conjugation_entries(const CMat& m, const StateSig& sig) {
    const std::size_t d = sig.dim();
    EntryPolys out;
    out.re.assign(d * d, Poly(sig.var_count()));
    out.im.assign(d * d, Poly(sig.var_count()));
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            Poly re(sig.var_count()), im(sig.var_count());
            for (std::size_t a = 0; a < d; ++a) {
                if (m.at(j, a).is_zero()) continue;
                for (std::size_t b = 0; b < d; ++b) {
                    QOmega coef = m.at(j, a) * m.at(k, b).conj();
                    if (coef.is_zero()) continue;
                    QSqrtTwo cr = coef.real_part(), ci = coef.imag_part();
                    Poly A = Poly::var(sig.var_count(),
                                       sig.a_index(static_cast<int>(a) + 1,
                                                   static_cast<int>(b) + 1));
                    Poly B = Poly::var(sig.var_count(),
                                       sig.b_index(static_cast<int>(a) + 1,
                                                   static_cast<int>(b) + 1));
                    // (cr + i ci)(A + i B) = (cr A - ci B) + i (ci A + cr B)
                    re += A.scaled(cr) - B.scaled(ci);
                    im += A.scaled(ci) + B.scaled(cr);
                }
            }
            out.re[j * d + k] = std::move(re);
            out.im[j * d + k] = std::move(im);
        }
    return out;
}

inline Poly trace_poly(const CMat& m, const StateSig& sig) {
    EntryPolys e = conjugation_entries(m, sig);
    Poly t(sig.var_count());
    for (std::size_t j = 0; j < sig.dim(); ++j) t += e.re[j * sig.dim() + j];
    return t;
}

inline Poly trace_product_poly(const TraceProduct& tp, const StateSig& sig) {
    Poly p = Poly::constant(sig.var_count(), QSqrtTwo(1));
    for (const auto& t : tp) p *= trace_poly(t.m, sig);
    return p;
}

}  // namespace detail

// Templates assigned to the expectation variables; -1 keys the post
// variable X.
using TemplateMap = std::map<int, Poly>;

// Quantifier-free polynomial implication: guard => lhs <= rhs, over the
// state variables of `sig`.
struct EncodedConstraint {
    PolyFormula guard;
    Poly lhs, rhs;

    // Exact truth value at an encoded state; vacuously true when the guard
    // fails.
    bool holds(const std::vector<QSqrtTwo>& values) const {
        if (!guard.eval(values)) return true;
        return lhs.eval(values) <= rhs.eval(values);
    }
    bool guard_holds(const std::vector<QSqrtTwo>& values) const { return guard.eval(values); }
};

// Mode-independent compilation of one side-condition.  Each summand is
// reduced to the data needed to substitute an arbitrary template: variable
// images over the initial state, the numerator coefficient polynomial, and
// the normalization trace to clear.
struct ConstraintCore {
    struct Summand {
        int label;
        std::vector<Poly> env;  // state-variable images after the update chain
        Poly qi;                // common-denominator numerator coefficient
        Poly t;                 // normalization trace (1 when absent)
        bool has_t;
    };
    PolyFormula guard;
    std::vector<Summand> summands;
    Poly q;  // right-hand side coefficient (common denominator)
    int rhs_label;
};

// Substitutes a template through the images, multiplying every monomial by
// T^{clear_deg - (its A/B degree)} so the result is denominator-free.
// clear_deg must dominate the template's A/B degree.
inline Poly substitute_template(const Poly& tpl, const ConstraintCore::Summand& s,
                                const StateSig& sig, int clear_deg) {
    const int nv = sig.var_count();
    Poly acc(nv);
    for (const auto& [mono, coeff] : tpl.terms()) {
        Poly term = Poly::constant(nv, coeff);
        int ab_deg = 0;
        for (int i = 0; i < nv; ++i) {
            if (mono.exp[i] == 0) continue;
            if (i >= sig.classical_count()) ab_deg += mono.exp[i];
            term *= s.env[i].pow(mono.exp[i]);
        }
        if (s.has_t && clear_deg > ab_deg) term *= s.t.pow(clear_deg - ab_deg);
        acc += term;
    }
    return acc;
}

inline ConstraintCore encode_core(const Constraint& c, const StateSig& sig) {
    const int nv = sig.var_count();
    CanonicalSum sum = normalize(c.lhs, sig.qubits);
    CommonDenominator cd = common_denominator(sum);

    ConstraintCore core;
    core.rhs_label = c.rhs_label;
    core.q = detail::trace_product_poly(cd.denominator, sig);
    for (std::size_t i = 0; i < sum.size(); ++i) {
        const Summand& s = sum[i];
        ConstraintCore::Summand enc;
        enc.label = s.label;
        // Classical substitution: walk the chain, keeping per-variable
        // images over the initial-state variables.
        for (int v = 0; v < nv; ++v) enc.env.push_back(Poly::var(nv, v));
        for (const auto& u : s.classical) {
            int idx = sig.y_index(u.name);
            enc.env[idx] = u.is_bool
                               ? detail::encode_bool_poly(u.bool_value.get(), enc.env, sig)
                               : detail::encode_nat(u.nat_value.get(), enc.env, sig);
        }
        // Quantum substitution: matrix entries become fractions over the
        // shared trace denominator T = tr(M rho M^dag).
        detail::EntryPolys entries = detail::conjugation_entries(s.quantum.m, sig);
        const std::size_t d = sig.dim();
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) {
                enc.env[sig.a_index(int(j) + 1, int(k) + 1)] = entries.re[j * d + k];
                enc.env[sig.b_index(int(j) + 1, int(k) + 1)] = entries.im[j * d + k];
            }
        enc.qi = detail::trace_product_poly(cd.numerators[i], sig);
        enc.has_t = s.quantum.renorm;
        enc.t = enc.has_t ? detail::trace_poly(s.quantum.m, sig)
                          : Poly::constant(nv, QSqrtTwo(1));
        core.summands.push_back(std::move(enc));
    }

    switch (c.guard.kind) {
        case Guard::Kind::BoolCond:
            core.guard = detail::encode_bool_formula(c.guard.cond.get(), sig, c.guard.negated);
            break;
        case Guard::Kind::ProbZero:
        case Guard::Kind::ProbNonZero: {
            std::vector<PolyFormula> atoms;
            for (const auto& a : c.guard.atoms) {
                Poly t = detail::trace_poly(
                    measurement_projector(sig.qubits, a.qubit, a.outcome), sig);
                // Probabilities of projector measurements are non-negative on
                // admissible states, so != 0 strengthens to > 0.
                atoms.push_back(PolyFormula::atom(std::move(t),
                                                  c.guard.kind == Guard::Kind::ProbZero
                                                      ? PolyFormula::Rel::Eq0
                                                      : PolyFormula::Rel::Gt0));
            }
            core.guard = PolyFormula::conj(std::move(atoms));
            break;
        }
    }
    return core;
}

// Compiles one side-condition into a polynomial implication: normalizes the
// left-hand term to a canonical sum, brings coefficients to a common
// denominator, substitutes the templates, and clears every normalization
// denominator (all non-zero under the guard).
inline EncodedConstraint encode_constraint(const Constraint& c, const Program& p,
                                           const StateSig& sig, const TemplateMap& templates) {
    (void)p;
    const int nv = sig.var_count();
    ConstraintCore core = encode_core(c, sig);

    auto template_for = [&](int label) -> const Poly& {
        auto it = templates.find(label);
        if (it == templates.end())
            throw EncodeError("no template for X" +
                              (label < 0 ? std::string() : "_" + std::to_string(label)));
        return it->second;
    };

    std::vector<int> degs(core.summands.size(), 0);
    for (std::size_t i = 0; i < core.summands.size(); ++i)
        if (core.summands[i].has_t)
            degs[i] = template_for(core.summands[i].label)
                          .degree_over(sig.classical_count(), nv);

    Poly lhs(nv);
    for (std::size_t i = 0; i < core.summands.size(); ++i) {
        Poly term = core.summands[i].qi *
                    substitute_template(template_for(core.summands[i].label),
                                        core.summands[i], sig, degs[i]);
        for (std::size_t j = 0; j < core.summands.size(); ++j) {
            if (j == i || !core.summands[j].has_t) continue;
            term *= core.summands[j].t.pow(degs[j]);
        }
        lhs += term;
    }
    Poly rhs = core.q * template_for(c.rhs_label);
    for (std::size_t j = 0; j < core.summands.size(); ++j)
        if (core.summands[j].has_t) rhs *= core.summands[j].t.pow(degs[j]);

    return {std::move(core.guard), std::move(lhs), std::move(rhs)};
}

// ---------------------------------------------------------------------------
// Admissibility: polynomial constraints carving out genuine (store, density
// matrix) encodings among the free state variables.

struct Admissibility {
    std::vector<PolyFormula> atoms;
    bool psd_complete = true;  // false when the register is too large for minors

    bool eval(const std::vector<QSqrtTwo>& values) const {
        for (const auto& a : atoms)
            if (!a.eval(values)) return false;
        return true;
    }
};

inline Admissibility admissibility(const StateSig& sig) {
    Admissibility out;
    const int nv = sig.var_count();
    const int d = static_cast<int>(sig.dim());
    using Rel = PolyFormula::Rel;

    // Classical typing: bools are 0/1 roots of Y(Y-1); nats are non-negative
    // reals (integrality is deliberately not asserted).
    for (int i = 0; i < sig.classical_count(); ++i) {
        Poly y = Poly::var(nv, i);
        if (sig.classical_is_bool[i]) {
            out.atoms.push_back(
                PolyFormula::atom(y * y - y, Rel::Eq0));
        } else {
            out.atoms.push_back(PolyFormula::atom(y, Rel::Ge0));
        }
    }

    // Unit trace.
    Poly tr_re(nv), tr_im(nv);
    for (int j = 1; j <= d; ++j) {
        tr_re += Poly::var(nv, sig.a_index(j, j));
        tr_im += Poly::var(nv, sig.b_index(j, j));
    }
    out.atoms.push_back(
        PolyFormula::atom(tr_re - Poly::constant(nv, QSqrtTwo(1)), Rel::Eq0));
    out.atoms.push_back(PolyFormula::atom(tr_im, Rel::Eq0));

    // Self-adjointness.
    for (int j = 1; j <= d; ++j) {
        out.atoms.push_back(PolyFormula::atom(Poly::var(nv, sig.b_index(j, j)), Rel::Eq0));
        for (int k = j + 1; k <= d; ++k) {
            out.atoms.push_back(PolyFormula::atom(
                Poly::var(nv, sig.a_index(j, k)) - Poly::var(nv, sig.a_index(k, j)), Rel::Eq0));
            out.atoms.push_back(PolyFormula::atom(
                Poly::var(nv, sig.b_index(j, k)) + Poly::var(nv, sig.b_index(k, j)), Rel::Eq0));
        }
    }

    // Positive semidefiniteness.  Up to two qubits: every principal minor of
    // the hermitian matrix is non-negative; the minors are real polynomials.
    // Beyond that the minor count explodes, so only diagonal non-negativity
    // is emitted and the weakening is flagged.
    if (sig.qubits <= 2) {
        struct CPoly {
            Poly re, im;
        };
        std::vector<std::vector<CPoly>> entry(d, std::vector<CPoly>(d));
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                entry[j][k] = {Poly::var(nv, sig.a_index(j + 1, k + 1)),
                               Poly::var(nv, sig.b_index(j + 1, k + 1))};

        // Laplace expansion along the first row.
        std::function<CPoly(const std::vector<int>&, const std::vector<int>&)> det =
            [&](const std::vector<int>& rs, const std::vector<int>& cs) -> CPoly {
            if (rs.size() == 1) return entry[rs[0]][cs[0]];
            CPoly acc{Poly(nv), Poly(nv)};
            int sign = 1;
            std::vector<int> rest_rows(rs.begin() + 1, rs.end());
            for (std::size_t c = 0; c < cs.size(); ++c) {
                std::vector<int> rest_cols;
                for (std::size_t i = 0; i < cs.size(); ++i)
                    if (i != c) rest_cols.push_back(cs[i]);
                CPoly sub = det(rest_rows, rest_cols);
                const CPoly& e = entry[rs[0]][cs[c]];
                Poly re = e.re * sub.re - e.im * sub.im;
                Poly im = e.re * sub.im + e.im * sub.re;
                if (sign > 0) {
                    acc.re += re;
                    acc.im += im;
                } else {
                    acc.re -= re;
                    acc.im -= im;
                }
                sign = -sign;
            }
            return acc;
        };

        for (int mask = 1; mask < (1 << d); ++mask) {
            std::vector<int> idx;
            for (int b = 0; b < d; ++b)
                if (mask & (1 << b)) idx.push_back(b);
            CPoly m = det(idx, idx);
            out.atoms.push_back(PolyFormula::atom(std::move(m.re), Rel::Ge0));
            // The imaginary part vanishes identically under hermiticity; it
            // is asserted zero to keep the encoding self-contained.
            if (!m.im.is_zero())
                out.atoms.push_back(PolyFormula::atom(std::move(m.im), Rel::Eq0));
        }
    } else {
        out.psd_complete = false;
        for (int j = 1; j <= d; ++j)
            out.atoms.push_back(PolyFormula::atom(Poly::var(nv, sig.a_index(j, j)), Rel::Ge0));
    }
    return out;
}

}  // namespace qet
