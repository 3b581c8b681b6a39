#pragma once

#include <string>
#include <vector>

#include "qet/encode.hpp"
#include "qet/inference.hpp"

namespace qet {

namespace detail {

inline std::string smt_rational(const Rational& q) {
    bool neg = q < 0;
    Rational a = neg ? Rational(-q) : q;
    std::string body = a.get_den() == 1
                           ? a.get_num().get_str()
                           : "(/ " + a.get_num().get_str() + " " + a.get_den().get_str() + ")";
    return neg ? "(- " + body + ")" : body;
}

inline std::string smt_coeff(const QSqrtTwo& c) {
    if (c.sqrt2_part() == 0) return smt_rational(c.rational_part());
    std::string root = c.sqrt2_part() == 1
                           ? "sqrt2"
                           : "(* " + smt_rational(c.sqrt2_part()) + " sqrt2)";
    if (c.rational_part() == 0) return root;
    return "(+ " + smt_rational(c.rational_part()) + " " + root + ")";
}

inline std::string smt_poly(const Poly& p, const StateSig& sig) {
    if (p.is_zero()) return "0";
    std::vector<std::string> terms;
    for (const auto& [mono, coeff] : p.terms()) {
        std::vector<std::string> factors;
        std::string cs = smt_coeff(coeff);
        if (cs != "1" || mono.degree() == 0) factors.push_back(cs);
        for (int i = 0; i < p.nvars(); ++i)
            for (int e = 0; e < mono.exp[i]; ++e) factors.push_back(sig.var_name(i));
        if (factors.size() == 1) {
            terms.push_back(factors[0]);
        } else {
            std::string t = "(*";
            for (const auto& f : factors) t += " " + f;
            terms.push_back(t + ")");
        }
    }
    if (terms.size() == 1) return terms[0];
    std::string out = "(+";
    for (const auto& t : terms) out += " " + t;
    return out + ")";
}

inline std::string smt_formula(const PolyFormula& f, const StateSig& sig) {
    switch (f.kind) {
        case PolyFormula::Kind::Atom: {
            std::string p = smt_poly(f.poly, sig);
            switch (f.rel) {
                case PolyFormula::Rel::Eq0: return "(= " + p + " 0)";
                case PolyFormula::Rel::Ne0: return "(not (= " + p + " 0))";
                case PolyFormula::Rel::Ge0: return "(>= " + p + " 0)";
                case PolyFormula::Rel::Gt0: return "(> " + p + " 0)";
            }
            return "false";
        }
        case PolyFormula::Kind::And: {
            if (f.children.empty()) return "true";
            if (f.children.size() == 1) return smt_formula(f.children[0], sig);
            std::string out = "(and";
            for (const auto& c : f.children) out += " " + smt_formula(c, sig);
            return out + ")";
        }
        case PolyFormula::Kind::Or: {
            if (f.children.empty()) return "false";
            if (f.children.size() == 1) return smt_formula(f.children[0], sig);
            std::string out = "(or";
            for (const auto& c : f.children) out += " " + smt_formula(c, sig);
            return out + ")";
        }
    }
    return "false";
}

inline std::string evar_name(int label) {
    return label < 0 ? std::string("X") : "X_" + std::to_string(label);
}

inline void emit_preamble(std::string& out, const StateSig& sig, const char* mode,
                          bool psd_complete) {
    out += "; quantum expectation toolkit - " + std::string(mode) + " export\n";
    out += "; state variables: " + std::to_string(sig.classical_count()) +
           " classical, " + std::to_string(sig.matrix_count()) +
           " density-matrix components (" + std::to_string(sig.qubits) + " qubit(s))\n";
    out += "; nat variables are relaxed to non-negative reals; bool variables are\n";
    out += "; 0/1 roots of Y*(Y-1).\n";
    if (!psd_complete)
        out += "; CAUTION: register too large for principal-minor positivity; only\n"
               "; diagonal non-negativity is asserted, admissible region is a superset.\n";
}

inline void declare_state_vars(std::string& out, const StateSig& sig) {
    for (int i = 0; i < sig.var_count(); ++i)
        out += "(declare-const " + sig.var_name(i) + " Real)\n";
    out += "(declare-const sqrt2 Real)\n";
    out += "(assert (= (* sqrt2 sqrt2) 2))\n";
    out += "(assert (> sqrt2 0))\n";
}

}  // namespace detail

// Refutation-style check of a fixed assignment: asserts admissibility and
// the negation of (all encoded side-conditions and template non-negativity).
// `unsat` from a solver certifies the assignment over the encoded region;
// `sat` exhibits a refuting admissible state.  Byte-deterministic.
inline std::string export_smt_check(const Program& p, const Assignment& alpha,
                                    const InferResult& inferred) {
    StateSig sig = StateSig::of(p);
    alpha.require_complete(inferred.constraints);
    Admissibility adm = admissibility(sig);

    std::string out;
    detail::emit_preamble(out, sig, "solution check", adm.psd_complete);
    out += "(set-logic QF_NRA)\n";
    detail::declare_state_vars(out, sig);
    out += "; admissible states only\n";
    for (const auto& a : adm.atoms) out += "(assert " + detail::smt_formula(a, sig) + ")\n";

    std::vector<std::string> goals;
    for (const auto& c : inferred.constraints) {
        EncodedConstraint ec = encode_constraint(c, p, sig, alpha.templates);
        std::string guard = detail::smt_formula(ec.guard, sig);
        std::string ineq = "(<= " + detail::smt_poly(ec.lhs, sig) + " " +
                           detail::smt_poly(ec.rhs, sig) + ")";
        goals.push_back(guard == "true" ? ineq : "(=> " + guard + " " + ineq + ")");
    }
    for (const auto& [label, tpl] : alpha.templates)
        goals.push_back("(>= " + detail::smt_poly(tpl, sig) + " 0)");

    out += "; negated side-conditions and template non-negativity: unsat\n";
    out += "; certifies the assignment on the admissible region\n";
    out += "(assert (not (and";
    for (const auto& g : goals) out += "\n  " + g;
    out += ")))\n(check-sat)\n";
    return out;
}

// Synthesis export: unknown coefficients c_<EVar>_<monomial index> for every
// monomial of total degree <= d, a universal block over the state variables,
// admissibility premise, all encoded side-conditions, template
// non-negativity, and the pinning of X's coefficients to the given post
// expectation.  Byte-deterministic.
inline std::string export_smt_synthesis(const Program& p, const Poly& post,
                                        const InferResult& inferred, int degree) {
    if (degree < 0) throw EncodeError("template degree must be non-negative");
    StateSig sig = StateSig::of(p);
    if (post.degree() > degree)
        throw EncodeError("post-expectation degree exceeds the template degree");
    Admissibility adm = admissibility(sig);
    const std::vector<Monomial> monos = monomials_up_to(sig, degree);
    const int nv = sig.var_count();

    // Every expectation variable: X plus one per constrained label.
    std::vector<int> evars{-1};
    for (const auto& c : inferred.constraints)
        if (std::find(evars.begin(), evars.end(), c.rhs_label) == evars.end())
            evars.push_back(c.rhs_label);
    std::sort(evars.begin(), evars.end());

    auto coeff_name = [](int label, std::size_t idx) {
        return "c_" + detail::evar_name(label) + "_m" + std::to_string(idx);
    };
    auto mono_text = [&](const Monomial& m) {
        if (m.degree() == 0) return std::string("1");
        std::string t;
        for (int i = 0; i < nv; ++i) {
            if (m.exp[i] == 0) continue;
            if (!t.empty()) t += "*";
            t += sig.var_name(i);
            if (m.exp[i] > 1) t += "^" + std::to_string(m.exp[i]);
        }
        return t;
    };
    // Symbolic template application: sum of c * (substituted monomial).
    auto symbolic_template = [&](int label, const ConstraintCore::Summand* s,
                                 const Poly& prefix, int clear_deg) {
        std::vector<std::string> terms;
        for (std::size_t t = 0; t < monos.size(); ++t) {
            // Build the monomial as a polynomial, then substitute.
            const Monomial& m = monos[t];
            Poly raw = Poly::constant(nv, QSqrtTwo(1));
            for (int i = 0; i < nv; ++i)
                if (m.exp[i]) raw *= Poly::var(nv, i).pow(m.exp[i]);
            Poly mono_poly = s ? substitute_template(raw, *s, sig, clear_deg) : raw;
            Poly full = prefix * mono_poly;
            if (full.is_zero()) continue;
            terms.push_back("(* " + coeff_name(label, t) + " " +
                            detail::smt_poly(full, sig) + ")");
        }
        if (terms.empty()) return std::string("0");
        if (terms.size() == 1) return terms[0];
        std::string out = "(+";
        for (const auto& t : terms) out += " " + t;
        return out + ")";
    };

    std::string out;
    detail::emit_preamble(out, sig, "synthesis", adm.psd_complete);
    out += "(set-logic NRA)\n";
    out += "(declare-const sqrt2 Real)\n";
    out += "(assert (= (* sqrt2 sqrt2) 2))\n";
    out += "(assert (> sqrt2 0))\n";
    out += "; template coefficients, degree <= " + std::to_string(degree) + "\n";
    for (std::size_t t = 0; t < monos.size(); ++t)
        out += "; monomial " + std::to_string(t) + " = " + mono_text(monos[t]) + "\n";
    for (int label : evars)
        for (std::size_t t = 0; t < monos.size(); ++t)
            out += "(declare-const " + coeff_name(label, t) + " Real)\n";

    // Pin X's template to the requested post-expectation.
    out += "; post-expectation pinning\n";
    for (std::size_t t = 0; t < monos.size(); ++t) {
        auto it = post.terms().find(monos[t]);
        QSqrtTwo c = it == post.terms().end() ? QSqrtTwo(0) : it->second;
        out += "(assert (= " + coeff_name(-1, t) + " " + detail::smt_coeff(c) + "))\n";
    }

    // Universal block.
    std::string quant = "(forall (";
    for (int i = 0; i < nv; ++i) quant += "(" + sig.var_name(i) + " Real)";
    quant += ")\n  (=> ";
    std::string premise = "(and";
    for (const auto& a : adm.atoms) premise += " " + detail::smt_formula(a, sig);
    premise += ")";

    std::vector<std::string> goals;
    for (const auto& c : inferred.constraints) {
        ConstraintCore core = encode_core(c, sig);
        std::vector<std::string> lhs_terms;
        for (const auto& s : core.summands) {
            // Uniform clearing power `degree` works for every monomial.
            Poly prefix = s.qi;
            for (const auto& other : core.summands) {
                if (&other == &s || !other.has_t) continue;
                prefix *= other.t.pow(degree);
            }
            lhs_terms.push_back(symbolic_template(s.label, &s, prefix, degree));
        }
        Poly rhs_prefix = core.q;
        for (const auto& s : core.summands)
            if (s.has_t) rhs_prefix *= s.t.pow(degree);
        std::string rhs = symbolic_template(core.rhs_label, nullptr, rhs_prefix, 0);
        std::string lhs;
        if (lhs_terms.empty())
            lhs = "0";
        else if (lhs_terms.size() == 1)
            lhs = lhs_terms[0];
        else {
            lhs = "(+";
            for (const auto& t : lhs_terms) lhs += " " + t;
            lhs += ")";
        }
        std::string guard = detail::smt_formula(core.guard, sig);
        std::string ineq = "(<= " + lhs + " " + rhs + ")";
        goals.push_back(guard == "true" ? ineq : "(=> " + guard + " " + ineq + ")");
    }
    // Non-negativity of every template on the admissible region.
    Poly unit_prefix = Poly::constant(nv, QSqrtTwo(1));
    for (int label : evars)
        goals.push_back("(>= " + symbolic_template(label, nullptr, unit_prefix, 0) + " 0)");

    std::string conclusion = "(and";
    for (const auto& g : goals) conclusion += "\n    " + g;
    conclusion += ")";

    out += "; side-conditions on every admissible state\n";
    out += "(assert " + quant + premise + "\n   " + conclusion + ")))\n";
    out += "(check-sat)\n(get-model)\n";
    return out;
}

}  // namespace qet
