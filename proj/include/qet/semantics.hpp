#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qet/ast.hpp"
#include "qet/density.hpp"

namespace qet {

// Classical store over the program's combined variable order (bools first,
// then nats); bools are stored as 0/1.
struct Store {
    std::vector<Int> values;

    bool operator==(const Store& o) const { return values == o.values; }

    static Store zeros(const Program& p) {
        Store s;
        s.values.assign(p.classical_count(), Int(0));
        return s;
    }
};

inline Int eval_nat(const NatExpr* e, const Store& s, const Program& p);

inline Int eval_nat(const NatExpr* e, const Store& s, const Program& p) {
    switch (e->kind) {
        case NatExpr::Kind::Var:
            return s.values.at(p.combined_id(false, e->var));
        case NatExpr::Kind::Lit:
            return e->lit;
        case NatExpr::Kind::Add:
            return eval_nat(e->lhs.get(), s, p) + eval_nat(e->rhs.get(), s, p);
        case NatExpr::Kind::Sub: {
            // Natural subtraction truncates at zero.
            Int l = eval_nat(e->lhs.get(), s, p);
            Int r = eval_nat(e->rhs.get(), s, p);
            return l > r ? Int(l - r) : Int(0);
        }
        case NatExpr::Kind::Mul:
            return eval_nat(e->lhs.get(), s, p) * eval_nat(e->rhs.get(), s, p);
    }
    throw std::logic_error("bad nat expression");
}

inline bool eval_bool(const BoolExpr* e, const Store& s, const Program& p) {
    switch (e->kind) {
        case BoolExpr::Kind::Var:
            return s.values.at(p.combined_id(true, e->var)) != 0;
        case BoolExpr::Kind::True: return true;
        case BoolExpr::Kind::False: return false;
        case BoolExpr::Kind::Eq:
            return eval_nat(e->nl.get(), s, p) == eval_nat(e->nr.get(), s, p);
        case BoolExpr::Kind::Lt:
            return eval_nat(e->nl.get(), s, p) < eval_nat(e->nr.get(), s, p);
        case BoolExpr::Kind::Not: return !eval_bool(e->bl.get(), s, p);
        case BoolExpr::Kind::And:
            return eval_bool(e->bl.get(), s, p) && eval_bool(e->br.get(), s, p);
        case BoolExpr::Kind::Or:
            return eval_bool(e->bl.get(), s, p) || eval_bool(e->br.get(), s, p);
    }
    throw std::logic_error("bad bool expression");
}

// A configuration: the remaining continuation (back = next statement; empty
// means terminal), the classical store and the quantum state.  Sequencing
// nodes are flattened away when pushed, which realizes the convention that
// a finished first component simply exposes the remainder.
struct Config {
    std::vector<const Stmt*> cont;
    Store store;
    Density rho;

    bool terminal() const { return cont.empty(); }
};

inline void push_cont(std::vector<const Stmt*>& cont, const Stmt* s) {
    if (s->kind == Stmt::Kind::Seq) {
        push_cont(cont, s->s2.get());
        push_cont(cont, s->s1.get());
    } else {
        cont.push_back(s);
    }
}

inline Config initial_config(const Program& p, Store store, Density rho) {
    if (rho.qubits() != p.qubit_count())
        throw std::invalid_argument("quantum state has " + std::to_string(rho.qubits()) +
                                    " qubit(s), program declares " +
                                    std::to_string(p.qubit_count()));
    if (static_cast<int>(store.values.size()) != p.classical_count())
        throw std::invalid_argument("store does not match the declared classical variables");
    Config c{{}, std::move(store), std::move(rho)};
    if (p.body) push_cont(c.cont, p.body.get());
    return c;
}

// Deterministic ordering on configurations (used for canonical merging).
inline int compare(const Config& a, const Config& b) {
    if (a.cont.size() != b.cont.size()) return a.cont.size() < b.cont.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.cont.size(); ++i) {
        if (a.cont[i]->node_id != b.cont[i]->node_id)
            return a.cont[i]->node_id < b.cont[i]->node_id ? -1 : 1;
    }
    for (std::size_t i = 0; i < a.store.values.size(); ++i) {
        int c = cmp(a.store.values[i], b.store.values[i]);
        if (c != 0) return c;
    }
    for (std::size_t j = 0; j < a.rho.dim(); ++j)
        for (std::size_t k = 0; k < a.rho.dim(); ++k)
            for (int t = 0; t < 4; ++t) {
                int c = cmp(a.rho.entry(j, k).coeff(t), b.rho.entry(j, k).coeff(t));
                if (c != 0) return c;
            }
    return 0;
}

struct WeightedConfig {
    QSqrtTwo weight;
    Config config;
};

using ConfigDist = std::vector<WeightedConfig>;

// One small-step reduction of a non-terminal configuration.  Returns a
// finitely supported distribution with weights summing to 1 exactly; a
// measurement whose branch has probability zero collapses to the point
// distribution on the other branch.
inline ConfigDist step(const Config& c, const Program& p) {
    if (c.terminal()) throw std::logic_error("step on a terminal configuration");
    const Stmt* s = c.cont.back();
    Config base = c;
    base.cont.pop_back();
    switch (s->kind) {
        case Stmt::Kind::Skip:
            return {{QSqrtTwo(1), std::move(base)}};
        case Stmt::Kind::AssignNat:
            base.store.values.at(p.combined_id(false, s->var)) =
                eval_nat(s->nat_rhs.get(), c.store, p);
            return {{QSqrtTwo(1), std::move(base)}};
        case Stmt::Kind::AssignBool:
            base.store.values.at(p.combined_id(true, s->var)) =
                eval_bool(s->bool_rhs.get(), c.store, p) ? 1 : 0;
            return {{QSqrtTwo(1), std::move(base)}};
        case Stmt::Kind::If:
            push_cont(base.cont, eval_bool(s->guard.get(), c.store, p) ? s->s1.get()
                                                                       : s->s2.get());
            return {{QSqrtTwo(1), std::move(base)}};
        case Stmt::Kind::While:
            if (eval_bool(s->guard.get(), c.store, p)) {
                base.cont.push_back(s);
                push_cont(base.cont, s->s1.get());
            }
            return {{QSqrtTwo(1), std::move(base)}};
        case Stmt::Kind::GateApp:
            base.rho = apply_gate(s->gate, s->qubits, c.rho);
            return {{QSqrtTwo(1), std::move(base)}};
        case Stmt::Kind::Measure: {
            auto [b0, b1] = measure(c.rho, s->qubits[0]);
            ConfigDist out;
            const int target = p.combined_id(true, s->var);
            for (int k = 0; k < 2; ++k) {
                const MeasurementBranch& br = (k == 0) ? b0 : b1;
                if (br.probability.sign() == 0) continue;
                Config next = base;
                next.store.values.at(target) = k;
                next.rho = br.state;
                out.push_back({br.probability, std::move(next)});
            }
            return out;
        }
        default:
            throw std::logic_error("cannot step sugared statement; desugar first");
    }
}

// Canonical form: sorted, syntactically equal configurations merged.
inline void merge_dist(ConfigDist& d) {
    std::sort(d.begin(), d.end(), [](const WeightedConfig& a, const WeightedConfig& b) {
        return compare(a.config, b.config) < 0;
    });
    ConfigDist merged;
    for (auto& wc : d) {
        if (!merged.empty() && compare(merged.back().config, wc.config) == 0)
            merged.back().weight += wc.weight;
        else
            merged.push_back(std::move(wc));
    }
    d = std::move(merged);
}

// Lifted reduction: every non-terminal configuration is replaced by its
// one-step reduct scaled by its weight; terminal configurations pass
// through.  The returned weight is the total mass that actually stepped.
inline std::pair<QSqrtTwo, ConfigDist> step_dist(const ConfigDist& d, const Program& p) {
    QSqrtTwo moved(0);
    ConfigDist out;
    for (const auto& wc : d) {
        if (wc.config.terminal()) {
            out.push_back(wc);
            continue;
        }
        moved += wc.weight;
        for (auto& next : step(wc.config, p))
            out.push_back({wc.weight * next.weight, std::move(next.config)});
    }
    merge_dist(out);
    return {moved, out};
}

inline QSqrtTwo total_mass(const ConfigDist& d) {
    QSqrtTwo t(0);
    for (const auto& wc : d) t += wc.weight;
    return t;
}

inline QSqrtTwo terminal_mass(const ConfigDist& d) {
    QSqrtTwo t(0);
    for (const auto& wc : d)
        if (wc.config.terminal()) t += wc.weight;
    return t;
}

struct StepRecord {
    QSqrtTwo weight;         // c_i of the i-th lifted step
    QSqrtTwo terminal_mass;  // |nf^{i+1}|
    QSqrtTwo edl_prefix;     // sum of weights so far
};

struct StepTrace {
    std::vector<StepRecord> steps;
    ConfigDist dist;                    // final distribution delta_n
    std::vector<ConfigDist> snapshots;  // delta_0 .. delta_n when captured

    QSqrtTwo terminal_mass_bound() const {
        return steps.empty() ? QSqrtTwo(0) : steps.back().terminal_mass;
    }
    QSqrtTwo edl_prefix() const {
        return steps.empty() ? QSqrtTwo(0) : steps.back().edl_prefix;
    }
};

// Iterates the lifted reduction n times from the point distribution on c.
// All quantities are exact; total mass is asserted to stay 1 and produced
// states re-checked hermitian/trace-1 on construction.
inline StepTrace run_n(const Config& c, const Program& p, int n, bool capture_snapshots = false) {
    StepTrace trace;
    trace.dist = {{QSqrtTwo(1), c}};
    if (capture_snapshots) trace.snapshots.push_back(trace.dist);
    QSqrtTwo edl(0);
    for (int i = 0; i < n; ++i) {
        auto [moved, next] = step_dist(trace.dist, p);
        trace.dist = std::move(next);
        if (total_mass(trace.dist) != QSqrtTwo(1))
            throw std::logic_error("lifted step lost probability mass");
        edl += moved;
        trace.steps.push_back({moved, terminal_mass(trace.dist), edl});
        if (capture_snapshots) trace.snapshots.push_back(trace.dist);
    }
    return trace;
}

// Expectations evaluate exactly on (store, density) states.
using Expectation = std::function<QSqrtTwo(const Store&, const Density&)>;

inline QSqrtTwo expectation_over_terminals(const ConfigDist& d, const Expectation& f) {
    QSqrtTwo acc(0);
    for (const auto& wc : d)
        if (wc.config.terminal()) acc += wc.weight * f(wc.config.store, wc.config.rho);
    return acc;
}

// n-step weakest pre-expectation: E over nf^n of f, reported for every
// prefix 0..n (monotone in n for non-negative f).
inline std::vector<QSqrtTwo> wp_approx_series(const Program& p, const Config& c,
                                              const Expectation& f, int n) {
    std::vector<QSqrtTwo> series;
    ConfigDist dist = {{QSqrtTwo(1), c}};
    series.push_back(expectation_over_terminals(dist, f));
    for (int i = 0; i < n; ++i) {
        dist = step_dist(dist, p).second;
        series.push_back(expectation_over_terminals(dist, f));
    }
    return series;
}

inline QSqrtTwo wp_approx(const Program& p, const Config& c, const Expectation& f, int n) {
    ConfigDist dist = {{QSqrtTwo(1), c}};
    for (int i = 0; i < n; ++i) dist = step_dist(dist, p).second;
    return expectation_over_terminals(dist, f);
}

struct TerminationProbe {
    QSqrtTwo termination_lower_bound;  // |nf^n|, monotone in n
    QSqrtTwo edl_prefix;               // sum of the first n step weights
};

// Monotone bounds only; no claim is made beyond n steps.
inline TerminationProbe termination_probe(const Program& p, const Config& c, int n) {
    StepTrace t = run_n(c, p, n);
    return {t.terminal_mass_bound(), t.edl_prefix()};
}

}  // namespace qet
