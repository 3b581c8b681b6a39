#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qet/gates.hpp"
#include "qet/semantics.hpp"

namespace qet {

// Raised when evaluation divides by a vanishing normalization trace; this
// signals a guard violation upstream.
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rho -> M rho M^dag / (renorm ? tr(M rho M^dag) : 1).  M is a product of
// embedded gates and measurement projectors; renorm is set once a projector
// enters the product, in which case the trace denominator is non-trivial.
struct QuantumMap {
    CMat m;
    bool renorm = false;
    std::vector<std::string> trail;  // printable atoms, state-application order

    static QuantumMap identity(std::size_t dim) { return {CMat::identity(dim), false, {}}; }

    static QuantumMap unitary(CMat u, std::string name) {
        return {std::move(u), false, {std::move(name)}};
    }

    static QuantumMap measurement(int m_qubits, int qubit, int outcome, std::string qubit_name) {
        return {measurement_projector(m_qubits, qubit, outcome), true,
                {"m(" + std::to_string(outcome) + "," + std::move(qubit_name) + ")"}};
    }

    bool trivial() const { return !renorm && m.is_identity(); }

    // Composition: *this applied to the state first, `later` afterwards.
    QuantumMap then(const QuantumMap& later) const {
        QuantumMap r;
        r.m = later.m * m;
        r.renorm = renorm || later.renorm;
        r.trail = trail;
        r.trail.insert(r.trail.end(), later.trail.begin(), later.trail.end());
        return r;
    }

    Density apply(const Density& rho) const {
        CMat out = rho.matrix().conjugate_by(m);
        if (renorm) {
            QOmega tr = out.trace();
            if (!tr.is_real()) throw std::logic_error("non-real trace");
            if (tr.to_real().sign() == 0)
                throw EvalError("zero normalization trace in quantum map");
            out = out.scaled(tr.inverse());
        }
        return Density::trusted(out);
    }

    std::string str() const {
        if (trail.empty()) return "id";
        std::string s;
        for (std::size_t i = 0; i < trail.size(); ++i) {
            if (i) s += "; ";
            s += trail[i];
        }
        return s;
    }
};

// Measurement probability p_{outcome,qubit} observed after applying `pre`:
// lambda rho. tr((P M) rho (P M)^dag) / tr(M rho M^dag) with P the outcome
// projector and M = pre.m.  Complementation flips the outcome, which is
// sound because both outcomes share the same denominator.
struct ProbAtom {
    int qubit = 0;
    int outcome = 0;
    std::string qubit_name;
    QuantumMap pre;

    static ProbAtom measurement(int m_qubits, int qubit, int outcome, std::string name) {
        ProbAtom a;
        a.qubit = qubit;
        a.outcome = outcome;
        a.qubit_name = std::move(name);
        a.pre = QuantumMap::identity(std::size_t(1) << m_qubits);
        return a;
    }

    ProbAtom complement() const {
        ProbAtom a = *this;
        a.outcome = 1 - a.outcome;
        return a;
    }

    // p after a state transformation applied before this probability.
    ProbAtom after(const QuantumMap& earlier) const {
        ProbAtom a = *this;
        a.pre = earlier.then(pre);
        return a;
    }

    int register_qubits() const {
        int m = 0;
        while ((std::size_t(1) << m) < pre.m.dim()) ++m;
        return m;
    }

    CMat numerator_matrix() const {
        return measurement_projector(register_qubits(), qubit, outcome) * pre.m;
    }

    QSqrtTwo eval(const Density& rho) const {
        QOmega num = rho.matrix().conjugate_by(numerator_matrix()).trace();
        if (!num.is_real()) throw std::logic_error("non-real probability");
        QSqrtTwo value = num.to_real();
        if (!pre.renorm) return value;
        QOmega den = rho.matrix().conjugate_by(pre.m).trace();
        QSqrtTwo d = den.to_real();
        if (d.sign() == 0) throw EvalError("zero denominator in probability term");
        return value / d;
    }

    std::string str() const {
        std::string s = "p(" + std::to_string(outcome) + "," + qubit_name + ")";
        if (!pre.trail.empty()) s += "o[" + pre.str() + "]";
        return s;
    }
};

// Product of probability atoms; an empty product is the constant 1.
// An atom that evaluates to exactly zero annihilates the product even when
// a sibling's denominator vanishes, mirroring how barycentric evaluation
// skips zero-weighted branches.
using ProbProduct = std::vector<ProbAtom>;

inline QSqrtTwo eval(const ProbProduct& p, const Density& rho) {
    QSqrtTwo v(1);
    bool pending_error = false;
    for (const auto& atom : p) {
        try {
            QSqrtTwo a = atom.eval(rho);
            if (a.sign() == 0) return QSqrtTwo(0);
            v *= a;
        } catch (const EvalError&) {
            pending_error = true;
        }
    }
    if (pending_error) throw EvalError("zero denominator in probability term");
    return v;
}

inline std::string str(const ProbProduct& p) {
    if (p.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += "*";
        s += p[i].str();
    }
    return s;
}

// One classical assignment inside a state update.
struct ClassicalUpdate {
    bool is_bool = false;
    int var = -1;  // per-type index
    std::string name;
    std::shared_ptr<const NatExpr> nat_value;
    std::shared_ptr<const BoolExpr> bool_value;

    std::string str() const {
        return name + " := " +
               (is_bool ? print_bool_expr(bool_value.get()) : print_nat_expr(nat_value.get()));
    }
};

// Simultaneous classical-and-quantum state update; the classical list is
// applied in order, the quantum map acts on the independent quantum half.
struct StateUpdate {
    std::vector<ClassicalUpdate> classical;
    std::optional<QuantumMap> quantum;

    void apply(Store& store, Density& rho, const Program& p) const {
        for (const auto& u : classical) {
            int id = p.combined_id(u.is_bool, u.var);
            if (u.is_bool)
                store.values.at(id) = eval_bool(u.bool_value.get(), store, p) ? 1 : 0;
            else
                store.values.at(id) = eval_nat(u.nat_value.get(), store, p);
        }
        if (quantum) rho = quantum->apply(rho);
    }

    std::string str() const {
        std::string s;
        for (const auto& u : classical) {
            if (!s.empty()) s += "; ";
            s += u.str();
        }
        if (quantum && !quantum->trivial()) {
            if (!s.empty()) s += "; ";
            s += quantum->str();
        }
        return s.empty() ? "id" : s;
    }
};

// Symbolic expectation terms.  Var(-1) is the distinguished post-expectation
// variable X; Var(l >= 0) refers to the construct labeled l.
struct ETermNode;
using ETerm = std::shared_ptr<const ETermNode>;

struct ETermNode {
    enum class Kind { Var, Subst, Bary, Scale, Sum };
    Kind kind;
    int label = -1;      // Var
    ETerm child;         // Subst / Bary lhs / Scale / Sum lhs
    ETerm other;         // Bary rhs / Sum rhs
    StateUpdate update;  // Subst
    ProbAtom prob;       // Bary
    ProbProduct factor;  // Scale
};

inline ETerm make_var(int label) {
    auto n = std::make_shared<ETermNode>();
    n->kind = ETermNode::Kind::Var;
    n->label = label;
    return n;
}

inline ETerm make_subst(ETerm child, StateUpdate u) {
    auto n = std::make_shared<ETermNode>();
    n->kind = ETermNode::Kind::Subst;
    n->child = std::move(child);
    n->update = std::move(u);
    return n;
}

inline ETerm make_bary(ETerm lhs, ProbAtom p, ETerm rhs) {
    auto n = std::make_shared<ETermNode>();
    n->kind = ETermNode::Kind::Bary;
    n->child = std::move(lhs);
    n->prob = std::move(p);
    n->other = std::move(rhs);
    return n;
}

inline ETerm make_scale(ProbProduct f, ETerm child) {
    auto n = std::make_shared<ETermNode>();
    n->kind = ETermNode::Kind::Scale;
    n->factor = std::move(f);
    n->child = std::move(child);
    return n;
}

inline ETerm make_sum(ETerm lhs, ETerm rhs) {
    auto n = std::make_shared<ETermNode>();
    n->kind = ETermNode::Kind::Sum;
    n->child = std::move(lhs);
    n->other = std::move(rhs);
    return n;
}

// Interpretation of expectation variables: the post variable X plus one
// expectation per label.
struct Interpretation {
    Expectation post;
    std::map<int, Expectation> labels;

    const Expectation& lookup(int label) const {
        if (label < 0) {
            if (!post) throw std::invalid_argument("no interpretation for X");
            return post;
        }
        auto it = labels.find(label);
        if (it == labels.end())
            throw std::invalid_argument("assignment is missing X_" + std::to_string(label));
        return it->second;
    }
};

// Exact interpretation of a term under an assignment at a concrete state.
// Zero-weighted barycentric branches are skipped, mirroring the convention
// that a zero-probability measurement contributes nothing.
inline QSqrtTwo eval_eterm(const ETerm& t, const Interpretation& interp, const Store& store,
                           const Density& rho, const Program& p) {
    switch (t->kind) {
        case ETermNode::Kind::Var:
            return interp.lookup(t->label)(store, rho);
        case ETermNode::Kind::Subst: {
            Store s = store;
            Density r = rho;
            t->update.apply(s, r, p);
            return eval_eterm(t->child, interp, s, r, p);
        }
        case ETermNode::Kind::Bary: {
            QSqrtTwo pr = t->prob.eval(rho);
            QSqrtTwo acc(0);
            if (pr.sign() != 0) acc += pr * eval_eterm(t->child, interp, store, rho, p);
            QSqrtTwo q = QSqrtTwo(1) - pr;
            if (q.sign() != 0) acc += q * eval_eterm(t->other, interp, store, rho, p);
            return acc;
        }
        case ETermNode::Kind::Scale: {
            QSqrtTwo f = eval(t->factor, rho);
            if (f.sign() == 0) return QSqrtTwo(0);
            return f * eval_eterm(t->child, interp, store, rho, p);
        }
        case ETermNode::Kind::Sum:
            return eval_eterm(t->child, interp, store, rho, p) +
                   eval_eterm(t->other, interp, store, rho, p);
    }
    throw std::logic_error("bad expectation term");
}

// Rendering: substitution chains print inside-out, so the leftmost update in
// a bracket is the innermost one, matching the usual grouping convention.
inline std::string str(const ETerm& t) {
    switch (t->kind) {
        case ETermNode::Kind::Var:
            return t->label < 0 ? "X" : "X_" + std::to_string(t->label);
        case ETermNode::Kind::Subst: {
            std::vector<const ETermNode*> chain;
            const ETermNode* cur = t.get();
            while (cur->kind == ETermNode::Kind::Subst) {
                chain.push_back(cur);
                cur = cur->child.get();
            }
            std::string base = cur->kind == ETermNode::Kind::Var
                                   ? (cur->label < 0 ? "X" : "X_" + std::to_string(cur->label))
                                   : "(" + str(chain.back()->child) + ")";
            std::string upd;
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                if (!upd.empty()) upd += "; ";
                upd += (*it)->update.str();
            }
            return base + "[" + upd + "]";
        }
        case ETermNode::Kind::Bary:
            return "(" + str(t->child) + " +_{" + t->prob.str() + "} " + str(t->other) + ")";
        case ETermNode::Kind::Scale:
            return str(t->factor) + "*(" + str(t->child) + ")";
        case ETermNode::Kind::Sum:
            return "(" + str(t->child) + " + " + str(t->other) + ")";
    }
    return "?";
}

}  // namespace qet
