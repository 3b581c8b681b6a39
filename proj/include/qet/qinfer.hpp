#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qet/eterm.hpp"

namespace qet {

// Side-condition guard: a boolean condition over the store, or a conjunction
// of measurement-probability atoms (all = 0, or all != 0) over the quantum
// state at the constrained program point.
struct Guard {
    enum class Kind { BoolCond, ProbZero, ProbNonZero };
    Kind kind = Kind::BoolCond;
    std::shared_ptr<const BoolExpr> cond;  // BoolCond
    bool negated = false;
    struct ProbRef {
        int outcome;
        int qubit;
        std::string qubit_name;
    };
    std::vector<ProbRef> atoms;  // ProbZero / ProbNonZero

    static Guard boolean(std::shared_ptr<const BoolExpr> b, bool neg) {
        Guard g;
        g.kind = Kind::BoolCond;
        g.cond = std::move(b);
        g.negated = neg;
        return g;
    }

    static Guard prob(Kind k, std::vector<ProbRef> atoms) {
        Guard g;
        g.kind = k;
        g.atoms = std::move(atoms);
        return g;
    }

    bool holds(const Store& store, const Density& rho, const Program& p) const {
        switch (kind) {
            case Kind::BoolCond:
                return eval_bool(cond.get(), store, p) != negated;
            case Kind::ProbZero:
            case Kind::ProbNonZero:
                for (const auto& a : atoms) {
                    CMat proj = measurement_projector(rho.qubits(), a.qubit, a.outcome);
                    QSqrtTwo pr = (proj * rho.matrix()).trace().to_real();
                    bool zero = pr.sign() == 0;
                    if (kind == Kind::ProbZero && !zero) return false;
                    if (kind == Kind::ProbNonZero && zero) return false;
                }
                return true;
        }
        return false;
    }

    std::string str() const {
        switch (kind) {
            case Kind::BoolCond:
                return (negated ? "!(" + print_bool_expr(cond.get()) + ")"
                                : print_bool_expr(cond.get()));
            case Kind::ProbZero:
            case Kind::ProbNonZero: {
                std::string rel = kind == Kind::ProbZero ? " = 0" : " != 0";
                std::string s;
                for (std::size_t i = 0; i < atoms.size(); ++i) {
                    if (i) s += " & ";
                    s += "p(" + std::to_string(atoms[i].outcome) + "," + atoms[i].qubit_name +
                         ")" + rel;
                }
                return s;
            }
        }
        return "?";
    }
};

// Gamma |- lhs <= X_label.
struct Constraint {
    Guard guard;
    ETerm lhs;
    int rhs_label;

    std::string str() const {
        return guard.str() + " |- " + qet::str(lhs) + " <= X_" + std::to_string(rhs_label);
    }
};

struct InferResult {
    ETerm term;
    std::vector<Constraint> constraints;
};

namespace detail {

class ConstraintGen {
  public:
    explicit ConstraintGen(const Program& p) : p_(p), dim_(std::size_t(1) << p.qubit_count()) {}

    ETerm transform(const Stmt* s, ETerm post) {
        switch (s->kind) {
            case Stmt::Kind::Skip:
                return post;
            case Stmt::Kind::AssignNat: {
                ClassicalUpdate u;
                u.is_bool = false;
                u.var = s->var;
                u.name = s->var_name;
                u.nat_value = std::shared_ptr<const NatExpr>(clone(s->nat_rhs));
                StateUpdate upd;
                upd.classical.push_back(std::move(u));
                return make_subst(std::move(post), std::move(upd));
            }
            case Stmt::Kind::AssignBool: {
                ClassicalUpdate u;
                u.is_bool = true;
                u.var = s->var;
                u.name = s->var_name;
                u.bool_value = std::shared_ptr<const BoolExpr>(clone(s->bool_rhs));
                StateUpdate upd;
                upd.classical.push_back(std::move(u));
                return make_subst(std::move(post), std::move(upd));
            }
            case Stmt::Kind::Seq:
                return transform(s->s1.get(), transform(s->s2.get(), std::move(post)));
            case Stmt::Kind::If: {
                ETerm var = make_var(s->label);
                ETerm then_term = transform(s->s1.get(), post);
                ETerm else_term = transform(s->s2.get(), post);
                auto guard = std::shared_ptr<const BoolExpr>(clone(s->guard));
                constraints_.push_back({Guard::boolean(guard, false), then_term, s->label});
                constraints_.push_back({Guard::boolean(guard, true), else_term, s->label});
                return var;
            }
            case Stmt::Kind::While: {
                ETerm var = make_var(s->label);
                ETerm body = transform(s->s1.get(), var);
                auto guard = std::shared_ptr<const BoolExpr>(clone(s->guard));
                constraints_.push_back({Guard::boolean(guard, false), body, s->label});
                constraints_.push_back({Guard::boolean(guard, true), std::move(post), s->label});
                return var;
            }
            case Stmt::Kind::GateApp: {
                StateUpdate upd;
                upd.quantum = QuantumMap::unitary(embed_gate(s->gate, s->qubits, p_.qubit_count()),
                                                  gate_text(s));
                return make_subst(std::move(post), std::move(upd));
            }
            case Stmt::Kind::Measure: {
                const int q = s->qubits[0];
                const std::string& qn = s->qubit_names[0];
                ETerm branch[2];
                for (int k = 0; k < 2; ++k) {
                    ClassicalUpdate u;
                    u.is_bool = true;
                    u.var = s->var;
                    u.name = s->var_name;
                    auto lit = std::make_unique<BoolExpr>();
                    lit->kind = k ? BoolExpr::Kind::True : BoolExpr::Kind::False;
                    u.bool_value = std::shared_ptr<const BoolExpr>(std::move(lit));
                    StateUpdate upd;
                    upd.classical.push_back(std::move(u));
                    upd.quantum = QuantumMap::measurement(p_.qubit_count(), q, k, qn);
                    branch[k] = make_subst(post, std::move(upd));
                }
                // In the order of the transformer table: the two degenerate
                // cases, then the barycentric combination.
                constraints_.push_back(
                    {Guard::prob(Guard::Kind::ProbZero, {{0, q, qn}}), branch[1], s->label});
                constraints_.push_back(
                    {Guard::prob(Guard::Kind::ProbZero, {{1, q, qn}}), branch[0], s->label});
                ProbAtom p0 = ProbAtom::measurement(p_.qubit_count(), q, 0, qn);
                constraints_.push_back({Guard::prob(Guard::Kind::ProbNonZero,
                                                    {{0, q, qn}, {1, q, qn}}),
                                        make_bary(branch[0], p0, branch[1]), s->label});
                return make_var(s->label);
            }
            default:
                throw std::logic_error("constraint generation requires a desugared program");
        }
    }

    std::vector<Constraint> take_constraints() {
        // Stable order: by constrained label, then emission order.
        std::stable_sort(constraints_.begin(), constraints_.end(),
                         [](const Constraint& a, const Constraint& b) {
                             return a.rhs_label < b.rhs_label;
                         });
        return std::move(constraints_);
    }

  private:
    static std::string gate_text(const Stmt* s) {
        std::string t = gate_name(s->gate);
        t += "(";
        for (std::size_t i = 0; i < s->qubit_names.size(); ++i) {
            if (i) t += ",";
            t += s->qubit_names[i];
        }
        t += ")";
        return t;
    }

    const Program& p_;
    std::size_t dim_;
    std::vector<Constraint> constraints_;
};

}  // namespace detail

// Symbolic expectation transformer: runs the structural recursion over the
// program against the post variable X, introducing a fresh variable per
// labeled construct and collecting the guarded side-conditions that make
// those variables genuine upper bounds.
inline InferResult infer_constraints(const Program& p) {
    detail::ConstraintGen gen(p);
    ETerm result = gen.transform(p.body.get(), make_var(-1));
    return {result, gen.take_constraints()};
}

// Deterministic text dump used by the golden tests and the CLI.
inline std::string dump_constraints(const InferResult& r) {
    std::string out = "result " + str(r.term) + "\n";
    for (std::size_t i = 0; i < r.constraints.size(); ++i)
        out += "G" + std::to_string(i) + " " + r.constraints[i].str() + "\n";
    return out;
}

enum class Verdict { Holds, Violated, GuardFalse };

// Exact one-state check of a side-condition under an interpretation.
inline Verdict check_constraint(const Constraint& c, const Interpretation& interp,
                                const Store& store, const Density& rho, const Program& p) {
    if (!c.guard.holds(store, rho, p)) return Verdict::GuardFalse;
    QSqrtTwo lhs = eval_eterm(c.lhs, interp, store, rho, p);
    QSqrtTwo rhs = interp.lookup(c.rhs_label)(store, rho);
    return lhs <= rhs ? Verdict::Holds : Verdict::Violated;
}

}  // namespace qet
