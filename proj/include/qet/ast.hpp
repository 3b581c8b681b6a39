#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qet/rational.hpp"

namespace qet {

enum class Gate { I, X, Y, Z, H, S, T, CNOT };

inline int gate_arity(Gate g) { return g == Gate::CNOT ? 2 : 1; }

inline const char* gate_name(Gate g) {
    switch (g) {
        case Gate::I: return "I";
        case Gate::X: return "X";
        case Gate::Y: return "Y";
        case Gate::Z: return "Z";
        case Gate::H: return "H";
        case Gate::S: return "S";
        case Gate::T: return "T";
        case Gate::CNOT: return "CNOT";
    }
    return "?";
}

struct NatExpr;
struct BoolExpr;
using NatExprPtr = std::unique_ptr<NatExpr>;
using BoolExprPtr = std::unique_ptr<BoolExpr>;

// Arithmetic over naturals; subtraction is monus (truncated at zero).
// Variable indices are per-type (position within Program::nat_vars or
// Program::bool_vars), so appending fresh declarations never shifts them.
struct NatExpr {
    enum class Kind { Var, Lit, Add, Sub, Mul };
    Kind kind;
    int var = -1;        // index into Program::nat_vars
    std::string name;    // variable spelling, kept for printing
    Int lit = 0;
    NatExprPtr lhs, rhs;
    int line = 0, col = 0;
};

struct BoolExpr {
    enum class Kind { Var, True, False, Eq, Lt, Not, And, Or };
    Kind kind;
    int var = -1;
    std::string name;
    NatExprPtr nl, nr;   // Eq / Lt
    BoolExprPtr bl, br;  // Not / And / Or
    int line = 0, col = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    enum class Kind {
        Skip,
        AssignNat,
        AssignBool,
        Seq,
        If,
        While,
        GateApp,
        Measure,
        // Sugared forms, eliminated by desugar():
        InitZero,    // q := |0>
        InitPlus,    // q := |+>
        SampleCoin,  // x := cointoss()
        SampleGeo,   // x := geo()
    };

    Kind kind;
    int label = -1;    // unique per If/While/Measure, dense 0..k-1 in preorder
    int node_id = -1;  // stable preorder id over the whole program

    // AssignNat / AssignBool / Measure / SampleCoin / SampleGeo target
    int var = -1;
    std::string var_name;
    NatExprPtr nat_rhs;
    BoolExprPtr bool_rhs;

    StmtPtr s1, s2;     // Seq; If(then/else); While(body in s1)
    BoolExprPtr guard;  // If / While

    Gate gate = Gate::I;
    std::vector<int> qubits;  // GateApp operands / Measure + init target qubit
    std::vector<std::string> qubit_names;

    int line = 0, col = 0;
};

// A program fixes the variable and qubit orderings: the combined classical
// order numbers the bools first, then the nats; qubit ids follow
// declaration order and determine the tensor-factor position.
struct Program {
    std::vector<std::string> bool_vars;
    std::vector<std::string> nat_vars;
    std::vector<std::string> qubit_vars;
    StmtPtr body;
    int label_count = 0;
    int node_count = 0;

    int classical_count() const {
        return static_cast<int>(bool_vars.size() + nat_vars.size());
    }
    int qubit_count() const { return static_cast<int>(qubit_vars.size()); }
    int combined_id(bool is_bool, int idx) const {
        return is_bool ? idx : static_cast<int>(bool_vars.size()) + idx;
    }
    bool is_bool_id(int id) const { return id >= 0 && id < static_cast<int>(bool_vars.size()); }
    const std::string& classical_name(int id) const {
        return is_bool_id(id) ? bool_vars[id] : nat_vars[id - bool_vars.size()];
    }
};

// ---------------------------------------------------------------------------
// Deep copies (desugaring rewrites subtrees).

inline NatExprPtr clone(const NatExprPtr& e) {
    if (!e) return nullptr;
    auto r = std::make_unique<NatExpr>();
    r->kind = e->kind;
    r->var = e->var;
    r->name = e->name;
    r->lit = e->lit;
    r->lhs = clone(e->lhs);
    r->rhs = clone(e->rhs);
    r->line = e->line;
    r->col = e->col;
    return r;
}

inline BoolExprPtr clone(const BoolExprPtr& e) {
    if (!e) return nullptr;
    auto r = std::make_unique<BoolExpr>();
    r->kind = e->kind;
    r->var = e->var;
    r->name = e->name;
    r->nl = clone(e->nl);
    r->nr = clone(e->nr);
    r->bl = clone(e->bl);
    r->br = clone(e->br);
    r->line = e->line;
    r->col = e->col;
    return r;
}

inline StmtPtr clone(const StmtPtr& s) {
    if (!s) return nullptr;
    auto r = std::make_unique<Stmt>();
    r->kind = s->kind;
    r->label = s->label;
    r->node_id = s->node_id;
    r->var = s->var;
    r->var_name = s->var_name;
    r->nat_rhs = clone(s->nat_rhs);
    r->bool_rhs = clone(s->bool_rhs);
    r->s1 = clone(s->s1);
    r->s2 = clone(s->s2);
    r->guard = clone(s->guard);
    r->gate = s->gate;
    r->qubits = s->qubits;
    r->qubit_names = s->qubit_names;
    r->line = s->line;
    r->col = s->col;
    return r;
}

// ---------------------------------------------------------------------------
// Structural equality, ignoring source positions and node ids.

inline bool equal(const NatExprPtr& a, const NatExprPtr& b) {
    if (!a || !b) return !a && !b;
    return a->kind == b->kind && a->var == b->var && a->lit == b->lit &&
           equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

inline bool equal(const BoolExprPtr& a, const BoolExprPtr& b) {
    if (!a || !b) return !a && !b;
    return a->kind == b->kind && a->var == b->var && equal(a->nl, b->nl) &&
           equal(a->nr, b->nr) && equal(a->bl, b->bl) && equal(a->br, b->br);
}

inline bool equal(const StmtPtr& a, const StmtPtr& b) {
    if (!a || !b) return !a && !b;
    return a->kind == b->kind && a->label == b->label && a->var == b->var &&
           equal(a->nat_rhs, b->nat_rhs) && equal(a->bool_rhs, b->bool_rhs) &&
           equal(a->s1, b->s1) && equal(a->s2, b->s2) && equal(a->guard, b->guard) &&
           a->gate == b->gate && a->qubits == b->qubits;
}

inline bool equal(const Program& a, const Program& b) {
    return a.bool_vars == b.bool_vars && a.nat_vars == b.nat_vars &&
           a.qubit_vars == b.qubit_vars && equal(a.body, b.body);
}

// ---------------------------------------------------------------------------
// Label and node-id assignment: left-to-right preorder, labels dense.

namespace detail {
inline void number_stmt(Stmt* s, int& next_label, int& next_id) {
    if (!s) return;
    s->node_id = next_id++;
    switch (s->kind) {
        case Stmt::Kind::If:
        case Stmt::Kind::While:
        case Stmt::Kind::Measure:
            s->label = next_label++;
            break;
        default:
            s->label = -1;
            break;
    }
    number_stmt(s->s1.get(), next_label, next_id);
    number_stmt(s->s2.get(), next_label, next_id);
}
}  // namespace detail

inline void assign_labels(Program& p) {
    int next_label = 0, next_id = 0;
    detail::number_stmt(p.body.get(), next_label, next_id);
    p.label_count = next_label;
    p.node_count = next_id;
}

// ---------------------------------------------------------------------------
// Canonical pretty-printer.  parse(print(p)) reproduces p.

namespace detail {

inline int nat_prec(NatExpr::Kind k) {
    switch (k) {
        case NatExpr::Kind::Mul: return 2;
        case NatExpr::Kind::Add:
        case NatExpr::Kind::Sub: return 1;
        default: return 3;
    }
}

inline void print_nat(std::string& out, const NatExpr* e, int parent_prec) {
    int prec = nat_prec(e->kind);
    bool paren = prec < parent_prec;
    if (paren) out += "(";
    switch (e->kind) {
        case NatExpr::Kind::Var: out += e->name; break;
        case NatExpr::Kind::Lit: out += e->lit.get_str(); break;
        case NatExpr::Kind::Add:
            print_nat(out, e->lhs.get(), prec);
            out += " + ";
            print_nat(out, e->rhs.get(), prec + 1);
            break;
        case NatExpr::Kind::Sub:
            print_nat(out, e->lhs.get(), prec);
            out += " - ";
            print_nat(out, e->rhs.get(), prec + 1);
            break;
        case NatExpr::Kind::Mul:
            print_nat(out, e->lhs.get(), prec);
            out += " * ";
            print_nat(out, e->rhs.get(), prec + 1);
            break;
    }
    if (paren) out += ")";
}

inline int bool_prec(BoolExpr::Kind k) {
    switch (k) {
        case BoolExpr::Kind::Or: return 1;
        case BoolExpr::Kind::And: return 2;
        case BoolExpr::Kind::Eq:
        case BoolExpr::Kind::Lt: return 3;
        case BoolExpr::Kind::Not: return 4;
        default: return 5;
    }
}

inline void print_bool(std::string& out, const BoolExpr* e, int parent_prec) {
    int prec = bool_prec(e->kind);
    bool paren = prec < parent_prec;
    if (paren) out += "(";
    switch (e->kind) {
        case BoolExpr::Kind::Var: out += e->name; break;
        case BoolExpr::Kind::True: out += "tt"; break;
        case BoolExpr::Kind::False: out += "ff"; break;
        case BoolExpr::Kind::Eq:
            print_nat(out, e->nl.get(), 0);
            out += " = ";
            print_nat(out, e->nr.get(), 0);
            break;
        case BoolExpr::Kind::Lt:
            print_nat(out, e->nl.get(), 0);
            out += " < ";
            print_nat(out, e->nr.get(), 0);
            break;
        case BoolExpr::Kind::Not:
            out += "!";
            print_bool(out, e->bl.get(), prec + 1);
            break;
        case BoolExpr::Kind::And:
            print_bool(out, e->bl.get(), prec);
            out += " && ";
            print_bool(out, e->br.get(), prec + 1);
            break;
        case BoolExpr::Kind::Or:
            print_bool(out, e->bl.get(), prec);
            out += " || ";
            print_bool(out, e->br.get(), prec + 1);
            break;
    }
    if (paren) out += ")";
}

inline void indent(std::string& out, int depth) { out.append(depth * 2, ' '); }

inline void print_stmt(std::string& out, const Stmt* s, int depth) {
    switch (s->kind) {
        case Stmt::Kind::Skip:
            indent(out, depth);
            out += "skip";
            break;
        case Stmt::Kind::AssignNat:
            indent(out, depth);
            out += s->var_name + " := ";
            print_nat(out, s->nat_rhs.get(), 0);
            break;
        case Stmt::Kind::AssignBool:
            indent(out, depth);
            out += s->var_name + " := ";
            print_bool(out, s->bool_rhs.get(), 0);
            break;
        case Stmt::Kind::Seq:
            print_stmt(out, s->s1.get(), depth);
            out += ";\n";
            print_stmt(out, s->s2.get(), depth);
            break;
        case Stmt::Kind::If:
            indent(out, depth);
            out += "if ";
            print_bool(out, s->guard.get(), 0);
            out += " then {\n";
            print_stmt(out, s->s1.get(), depth + 1);
            out += "\n";
            indent(out, depth);
            out += "} else {\n";
            print_stmt(out, s->s2.get(), depth + 1);
            out += "\n";
            indent(out, depth);
            out += "}";
            break;
        case Stmt::Kind::While:
            indent(out, depth);
            out += "while ";
            print_bool(out, s->guard.get(), 0);
            out += " do {\n";
            print_stmt(out, s->s1.get(), depth + 1);
            out += "\n";
            indent(out, depth);
            out += "}";
            break;
        case Stmt::Kind::GateApp: {
            indent(out, depth);
            for (std::size_t i = 0; i < s->qubit_names.size(); ++i) {
                if (i) out += ", ";
                out += s->qubit_names[i];
            }
            out += " *= ";
            out += gate_name(s->gate);
            break;
        }
        case Stmt::Kind::Measure:
            indent(out, depth);
            out += s->var_name + " := meas " + s->qubit_names[0];
            break;
        case Stmt::Kind::InitZero:
            indent(out, depth);
            out += s->qubit_names[0] + " := |0>";
            break;
        case Stmt::Kind::InitPlus:
            indent(out, depth);
            out += s->qubit_names[0] + " := |+>";
            break;
        case Stmt::Kind::SampleCoin:
            indent(out, depth);
            out += s->var_name + " := cointoss()";
            break;
        case Stmt::Kind::SampleGeo:
            indent(out, depth);
            out += s->var_name + " := geo()";
            break;
    }
}

}  // namespace detail

inline std::string print_nat_expr(const NatExpr* e) {
    std::string out;
    detail::print_nat(out, e, 0);
    return out;
}

inline std::string print_bool_expr(const BoolExpr* e) {
    std::string out;
    detail::print_bool(out, e, 0);
    return out;
}

inline std::string pretty_print(const Program& p) {
    std::string out;
    auto decl = [&out](const char* kw, const std::vector<std::string>& names) {
        if (names.empty()) return;
        out += kw;
        out += " ";
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) out += ", ";
            out += names[i];
        }
        out += ";\n";
    };
    decl("bool", p.bool_vars);
    decl("nat", p.nat_vars);
    decl("qubit", p.qubit_vars);
    out += "\n";
    detail::print_stmt(out, p.body.get(), 0);
    out += "\n";
    return out;
}

}  // namespace qet
