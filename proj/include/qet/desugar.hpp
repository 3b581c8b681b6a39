#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qet/ast.hpp"

namespace qet {

namespace detail {

inline StmtPtr mk_stmt(Stmt::Kind k) {
    auto s = std::make_unique<Stmt>();
    s->kind = k;
    return s;
}

inline StmtPtr mk_seq(StmtPtr a, StmtPtr b) {
    auto s = mk_stmt(Stmt::Kind::Seq);
    s->s1 = std::move(a);
    s->s2 = std::move(b);
    return s;
}

inline StmtPtr seq_of(std::vector<StmtPtr> stmts) {
    StmtPtr out = std::move(stmts.back());
    for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it)
        out = mk_seq(std::move(*it), std::move(out));
    return out;
}

inline BoolExprPtr mk_bool_var(int idx, const std::string& name) {
    auto e = std::make_unique<BoolExpr>();
    e->kind = BoolExpr::Kind::Var;
    e->var = idx;
    e->name = name;
    return e;
}

inline BoolExprPtr mk_bool_lit(bool v) {
    auto e = std::make_unique<BoolExpr>();
    e->kind = v ? BoolExpr::Kind::True : BoolExpr::Kind::False;
    return e;
}

inline NatExprPtr mk_nat_var(int idx, const std::string& name) {
    auto e = std::make_unique<NatExpr>();
    e->kind = NatExpr::Kind::Var;
    e->var = idx;
    e->name = name;
    return e;
}

inline NatExprPtr mk_nat_lit(long v) {
    auto e = std::make_unique<NatExpr>();
    e->kind = NatExpr::Kind::Lit;
    e->lit = v;
    return e;
}

inline NatExprPtr mk_nat_bin(NatExpr::Kind k, NatExprPtr a, NatExprPtr b) {
    auto e = std::make_unique<NatExpr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

class Desugarer {
  public:
    explicit Desugarer(Program& p) : p_(p) {}

    StmtPtr expand(StmtPtr s) {
        switch (s->kind) {
            case Stmt::Kind::Seq:
                s->s1 = expand(std::move(s->s1));
                s->s2 = expand(std::move(s->s2));
                return s;
            case Stmt::Kind::If:
                s->s1 = expand(std::move(s->s1));
                s->s2 = expand(std::move(s->s2));
                return s;
            case Stmt::Kind::While:
                s->s1 = expand(std::move(s->s1));
                return s;
            case Stmt::Kind::InitZero:
                return init_zero(s->qubits[0], s->qubit_names[0]);
            case Stmt::Kind::InitPlus:
                return init_plus(s->qubits[0], s->qubit_names[0]);
            case Stmt::Kind::SampleCoin:
                return sample_coin(s->var, s->var_name);
            case Stmt::Kind::SampleGeo:
                return sample_geo(s->var, s->var_name);
            default:
                return s;
        }
    }

  private:
    std::pair<int, std::string> fresh_bool() {
        std::string name = fresh_name();
        p_.bool_vars.push_back(name);
        return {static_cast<int>(p_.bool_vars.size()) - 1, name};
    }

    std::pair<int, std::string> fresh_qubit() {
        std::string name = fresh_name();
        p_.qubit_vars.push_back(name);
        return {static_cast<int>(p_.qubit_vars.size()) - 1, name};
    }

    std::string fresh_name() { return "__fresh" + std::to_string(counter_++); }

    StmtPtr mk_gate(Gate g, int q, const std::string& qname) {
        auto s = mk_stmt(Stmt::Kind::GateApp);
        s->gate = g;
        s->qubits = {q};
        s->qubit_names = {qname};
        return s;
    }

    StmtPtr mk_measure(int target, const std::string& tname, int q, const std::string& qname) {
        auto s = mk_stmt(Stmt::Kind::Measure);
        s->var = target;
        s->var_name = tname;
        s->qubits = {q};
        s->qubit_names = {qname};
        return s;
    }

    // q := |0>  ~>  x' := meas q; if x' then q *= X else skip
    StmtPtr init_zero(int q, const std::string& qname) {
        auto [xv, xname] = fresh_bool();
        auto cond = mk_stmt(Stmt::Kind::If);
        cond->guard = mk_bool_var(xv, xname);
        cond->s1 = mk_gate(Gate::X, q, qname);
        cond->s2 = mk_stmt(Stmt::Kind::Skip);
        return mk_seq(mk_measure(xv, xname, q, qname), std::move(cond));
    }

    // q := |+>  ~>  q := |0>; q *= H
    StmtPtr init_plus(int q, const std::string& qname) {
        return mk_seq(init_zero(q, qname), mk_gate(Gate::H, q, qname));
    }

    // x := cointoss()  ~>  q' := |+>; x := meas q'   (dedicated fresh qubit)
    StmtPtr sample_coin(int target, const std::string& tname) {
        auto [qv, qname] = fresh_qubit();
        return mk_seq(init_plus(qv, qname), mk_measure(target, tname, qv, qname));
    }

    // x := geo()  ~>  x' := tt; x := 0;
    //                 while x' do { x' := cointoss(); x := x + 1 };
    //                 x := x - 1
    // The trailing monus replaces the paper's initialization at -1, which
    // has no representation over the naturals; the terminal distribution
    // (1/2^{n+1} at n) is unchanged.
    StmtPtr sample_geo(int target, const std::string& tname) {
        auto [flagv, flagname] = fresh_bool();

        auto set_flag = mk_stmt(Stmt::Kind::AssignBool);
        set_flag->var = flagv;
        set_flag->var_name = flagname;
        set_flag->bool_rhs = mk_bool_lit(true);

        auto zero = mk_stmt(Stmt::Kind::AssignNat);
        zero->var = target;
        zero->var_name = tname;
        zero->nat_rhs = mk_nat_lit(0);

        auto toss = mk_stmt(Stmt::Kind::SampleCoin);
        toss->var = flagv;
        toss->var_name = flagname;

        auto incr = mk_stmt(Stmt::Kind::AssignNat);
        incr->var = target;
        incr->var_name = tname;
        incr->nat_rhs =
            mk_nat_bin(NatExpr::Kind::Add, mk_nat_var(target, tname), mk_nat_lit(1));

        auto loop = mk_stmt(Stmt::Kind::While);
        loop->guard = mk_bool_var(flagv, flagname);
        loop->s1 = mk_seq(expand(std::move(toss)), std::move(incr));

        auto decr = mk_stmt(Stmt::Kind::AssignNat);
        decr->var = target;
        decr->var_name = tname;
        decr->nat_rhs =
            mk_nat_bin(NatExpr::Kind::Sub, mk_nat_var(target, tname), mk_nat_lit(1));

        std::vector<StmtPtr> parts;
        parts.push_back(std::move(set_flag));
        parts.push_back(std::move(zero));
        parts.push_back(std::move(loop));
        parts.push_back(std::move(decr));
        return seq_of(std::move(parts));
    }

    Program& p_;
    int counter_ = 0;
};

// Re-associates sequence chains to the right, the shape the parser builds,
// so expanded programs compare and print canonically.
inline StmtPtr flatten_seqs(StmtPtr s) {
    if (!s) return s;
    if (s->s1) s->s1 = flatten_seqs(std::move(s->s1));
    if (s->s2) s->s2 = flatten_seqs(std::move(s->s2));
    if (s->kind != Stmt::Kind::Seq) return s;
    std::vector<StmtPtr> leaves;
    std::vector<StmtPtr> stack;
    stack.push_back(std::move(s));
    while (!stack.empty()) {
        StmtPtr cur = std::move(stack.back());
        stack.pop_back();
        if (cur->kind == Stmt::Kind::Seq) {
            stack.push_back(std::move(cur->s2));
            stack.push_back(std::move(cur->s1));
        } else {
            leaves.push_back(std::move(cur));
        }
    }
    return seq_of(std::move(leaves));
}

}  // namespace detail

// Expands the sugared statement forms into the core language, appending the
// required fresh variables and qubits deterministically, then renumbers
// labels in preorder.
inline Program desugar(const Program& src) {
    Program out;
    out.bool_vars = src.bool_vars;
    out.nat_vars = src.nat_vars;
    out.qubit_vars = src.qubit_vars;
    out.body = clone(src.body);
    detail::Desugarer d(out);
    out.body = detail::flatten_seqs(d.expand(std::move(out.body)));
    assign_labels(out);
    return out;
}

// True when the statement tree still contains sugared forms.
inline bool has_sugar(const Stmt* s) {
    if (!s) return false;
    switch (s->kind) {
        case Stmt::Kind::InitZero:
        case Stmt::Kind::InitPlus:
        case Stmt::Kind::SampleCoin:
        case Stmt::Kind::SampleGeo:
            return true;
        default:
            return has_sugar(s->s1.get()) || has_sugar(s->s2.get());
    }
}

}  // namespace qet
