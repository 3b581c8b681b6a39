#pragma once

#include <stdexcept>

#include "qet/semantics.hpp"

namespace qet {

// Structural expectation transformer for loop-free statements, evaluated at
// a concrete state.  Serves as the exact oracle that the n-step
// approximation must match once n reaches the statement count.
inline QSqrtTwo wpt_eval(const Stmt* s, const Program& p, const Expectation& f,
                         const Store& store, const Density& rho) {
    switch (s->kind) {
        case Stmt::Kind::Skip:
            return f(store, rho);
        case Stmt::Kind::AssignNat: {
            Store next = store;
            next.values.at(p.combined_id(false, s->var)) = eval_nat(s->nat_rhs.get(), store, p);
            return f(next, rho);
        }
        case Stmt::Kind::AssignBool: {
            Store next = store;
            next.values.at(p.combined_id(true, s->var)) =
                eval_bool(s->bool_rhs.get(), store, p) ? 1 : 0;
            return f(next, rho);
        }
        case Stmt::Kind::Seq: {
            Expectation cont = [&](const Store& st, const Density& r) {
                return wpt_eval(s->s2.get(), p, f, st, r);
            };
            return wpt_eval(s->s1.get(), p, cont, store, rho);
        }
        case Stmt::Kind::If:
            return eval_bool(s->guard.get(), store, p)
                       ? wpt_eval(s->s1.get(), p, f, store, rho)
                       : wpt_eval(s->s2.get(), p, f, store, rho);
        case Stmt::Kind::GateApp:
            return f(store, apply_gate(s->gate, s->qubits, rho));
        case Stmt::Kind::Measure: {
            auto [b0, b1] = measure(rho, s->qubits[0]);
            QSqrtTwo acc(0);
            const int target = p.combined_id(true, s->var);
            for (int k = 0; k < 2; ++k) {
                const MeasurementBranch& br = (k == 0) ? b0 : b1;
                if (br.probability.sign() == 0) continue;
                Store next = store;
                next.values.at(target) = k;
                acc += br.probability * f(next, br.state);
            }
            return acc;
        }
        case Stmt::Kind::While:
            throw std::invalid_argument("structural evaluation requires a loop-free statement");
        default:
            throw std::logic_error("structural evaluation requires a desugared statement");
    }
}

inline int statement_count(const Stmt* s) {
    if (!s) return 0;
    if (s->kind == Stmt::Kind::Seq) return statement_count(s->s1.get()) + statement_count(s->s2.get());
    int inner = statement_count(s->s1.get()) + statement_count(s->s2.get());
    return 1 + inner;
}

inline bool loop_free(const Stmt* s) {
    if (!s) return true;
    if (s->kind == Stmt::Kind::While) return false;
    return loop_free(s->s1.get()) && loop_free(s->s2.get());
}

}  // namespace qet
