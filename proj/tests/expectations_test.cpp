#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "qet/desugar.hpp"
#include "qet/normalize.hpp"
#include "qet/parser.hpp"
#include "qet/qinfer.hpp"
#include "qet/wpt.hpp"

using namespace qet;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Program load(const std::string& path) { return desugar(parse_program(slurp(path))); }

QSqrtTwo q(long num, long den = 1) { return QSqrtTwo(make_rational(num, den)); }

Density density2(QOmega a, QOmega b, QOmega c, QOmega d) {
    CMat m(2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return Density::validated(m);
}

Density rho_phi() {
    QOmega off = Rational(1, 3) * QOmega::sqrt2();
    return density2(QOmega(Rational(1, 3)), off, off, QOmega(Rational(2, 3)));
}

Density ket1() {
    return density2(QOmega(0), QOmega(0), QOmega(0), QOmega(1));
}

// The interpretation from the worked coin-toss example:
//   X_0 (loop)    -> i + x * (2 - (beta + gamma))
//   X_1 (measure) -> i + 2 - 2 * rho_11
//   X             -> i
Interpretation cointoss_solution(const Program& p, const Rational& slope = Rational(2)) {
    Interpretation interp;
    interp.post = [](const Store& s, const Density&) { return QSqrtTwo(Rational(s.values[1])); };
    Rational sl = slope;
    interp.labels[0] = [sl](const Store& s, const Density& rho) {
        QSqrtTwo off_diag = (rho.entry(0, 1) + rho.entry(1, 0)).to_real();
        QSqrtTwo bound = QSqrtTwo(sl) - off_diag;
        return QSqrtTwo(Rational(s.values[1])) + QSqrtTwo(Rational(s.values[0])) * bound;
    };
    interp.labels[1] = [](const Store& s, const Density& rho) {
        return QSqrtTwo(Rational(s.values[1])) + q(2) - q(2) * rho.entry(0, 0).to_real();
    };
    return interp;
}

std::vector<Density> state_pool() {
    return {Density::ket0(1), ket1(), Density::ketplus(1), rho_phi(), Density::maximally_mixed(1)};
}

std::vector<Store> store_pool(const Program& p) {
    std::vector<Store> out;
    for (long x : {0L, 1L})
        for (long i : {0L, 1L, 5L}) {
            Store s = Store::zeros(p);
            s.values[0] = x;
            s.values[1] = i;
            out.push_back(s);
        }
    return out;
}

// Random term generator over the coin-toss signature (one qubit).
struct TermGen {
    std::mt19937_64 rng{424242};
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    StateUpdate random_update() {
        StateUpdate u;
        switch (pick(4)) {
            case 0: {  // i := i + 1
                ClassicalUpdate c;
                c.is_bool = false;
                c.var = 0;
                c.name = "i";
                auto add = std::make_unique<NatExpr>();
                add->kind = NatExpr::Kind::Add;
                add->lhs = std::make_unique<NatExpr>();
                add->lhs->kind = NatExpr::Kind::Var;
                add->lhs->var = 0;
                add->lhs->name = "i";
                add->rhs = std::make_unique<NatExpr>();
                add->rhs->kind = NatExpr::Kind::Lit;
                add->rhs->lit = 1;
                c.nat_value = std::shared_ptr<const NatExpr>(std::move(add));
                u.classical.push_back(std::move(c));
                return u;
            }
            case 1: {  // x := tt / ff
                ClassicalUpdate c;
                c.is_bool = true;
                c.var = 0;
                c.name = "x";
                auto lit = std::make_unique<BoolExpr>();
                lit->kind = pick(2) ? BoolExpr::Kind::True : BoolExpr::Kind::False;
                c.bool_value = std::shared_ptr<const BoolExpr>(std::move(lit));
                u.classical.push_back(std::move(c));
                return u;
            }
            case 2: {  // unitary
                Gate g = pick(2) ? Gate::H : Gate::T;
                u.quantum = QuantumMap::unitary(embed_gate(g, {0}, 1), std::string(gate_name(g)) + "(q)");
                return u;
            }
            default:  // measurement normalization
                u.quantum = QuantumMap::measurement(1, 0, pick(2), "q");
                return u;
        }
    }

    ETerm term(int depth) {
        if (depth == 0 || pick(3) == 0) return make_var(pick(3) - 1);  // X, X_0, X_1
        switch (pick(4)) {
            case 0:
                return make_subst(term(depth - 1), random_update());
            case 1:
                return make_bary(term(depth - 1), ProbAtom::measurement(1, 0, pick(2), "q"),
                                 term(depth - 1));
            case 2: {
                ProbProduct f;
                f.push_back(ProbAtom::measurement(1, 0, pick(2), "q"));
                return make_scale(std::move(f), term(depth - 1));
            }
            default:
                return make_sum(term(depth - 1), term(depth - 1));
        }
    }
};

// Alternative normalization strategy for the confluence check: eliminate
// barycentric sums first (top-down), only then push substitutions.
ETerm bary_free(const ETerm& t) {
    switch (t->kind) {
        case ETermNode::Kind::Var:
            return t;
        case ETermNode::Kind::Subst:
            return make_subst(bary_free(t->child), t->update);
        case ETermNode::Kind::Bary: {
            ProbProduct left{t->prob}, right{t->prob.complement()};
            return make_sum(make_scale(std::move(left), bary_free(t->child)),
                            make_scale(std::move(right), bary_free(t->other)));
        }
        case ETermNode::Kind::Scale:
            return make_scale(t->factor, bary_free(t->child));
        case ETermNode::Kind::Sum:
            return make_sum(bary_free(t->child), bary_free(t->other));
    }
    throw std::logic_error("bad term");
}

std::string canonical_str(const CanonicalSum& sum) {
    std::string s;
    for (const auto& x : sum) s += x.str() + "\n";
    return s;
}

void count_constructs(const Stmt* s, int& ifs, int& whiles, int& meas) {
    if (!s) return;
    if (s->kind == Stmt::Kind::If) ++ifs;
    if (s->kind == Stmt::Kind::While) ++whiles;
    if (s->kind == Stmt::Kind::Measure) ++meas;
    count_constructs(s->s1.get(), ifs, whiles, meas);
    count_constructs(s->s2.get(), ifs, whiles, meas);
}

}  // namespace

TEST_CASE("constraint generation for the coin-toss program") {
    Program coin = load("examples/cointoss.qps");
    InferResult r = infer_constraints(coin);

    CHECK(str(r.term) == "X_0[i := 0; x := tt]");
    REQUIRE(r.constraints.size() == 5);

    CHECK(r.constraints[0].str() == "x |- X_1[H(q); i := i + 1] <= X_0");
    CHECK(r.constraints[1].str() == "!(x) |- X <= X_0");
    CHECK(r.constraints[2].str() == "p(0,q) = 0 |- X_0[x := tt; m(1,q)] <= X_1");
    CHECK(r.constraints[3].str() == "p(1,q) = 0 |- X_0[x := ff; m(0,q)] <= X_1");
    CHECK(r.constraints[4].str() ==
          "p(0,q) != 0 & p(1,q) != 0 |- (X_0[x := ff; m(0,q)] +_{p(0,q)} X_0[x := tt; m(1,q)]) "
          "<= X_1");
}

TEST_CASE("constraint generation for the repeat-until-success program") {
    Program rus = load("examples/rus.qps");
    InferResult r = infer_constraints(rus);

    CHECK(str(r.term) == "X_0[x := tt; i := 0]");
    REQUIRE(r.constraints.size() == 5);
    // The loop body folds into one substitution chain against the
    // measurement variable; both counter increments appear in it.
    const std::string c0 = r.constraints[0].str();
    CHECK(c0.find("x |- X_1[") == 0);
    CHECK(c0.find("<= X_0") != std::string::npos);
    CHECK(c0.find("i := i + 1") != std::string::npos);
    CHECK(c0.find("i := i + 1") != c0.rfind("i := i + 1"));
    CHECK(r.constraints[1].str() == "!(x) |- X <= X_0");
    // The trailing ancilla flip rides along in the measurement branches.
    CHECK(r.constraints[2].str() ==
          "p(0,q2) = 0 |- X_0[X(q2); x := tt; m(1,q2)] <= X_1");
    CHECK(r.constraints[3].str() ==
          "p(1,q2) = 0 |- X_0[X(q2); x := ff; m(0,q2)] <= X_1");
    CHECK(r.constraints[4].guard.str() == "p(0,q2) != 0 & p(1,q2) != 0");
}

TEST_CASE("skip generates nothing") {
    Program p = parse_program("skip");
    InferResult r = infer_constraints(p);
    CHECK(str(r.term) == "X");
    CHECK(r.constraints.empty());
}

TEST_CASE("constraint census") {
    SECTION("2 per conditional or loop, 3 per measurement") {
        for (const char* path : {"examples/cointoss.qps", "examples/rus.qps",
                                 "examples/bell.qps", "examples/geo.qps"}) {
            Program p = load(path);
            int ifs = 0, whiles = 0, meas = 0;
            count_constructs(p.body.get(), ifs, whiles, meas);
            InferResult r = infer_constraints(p);
            CHECK(static_cast<int>(r.constraints.size()) == 2 * (ifs + whiles) + 3 * meas);
        }
    }
    SECTION("straight-line programs produce a bare substitution chain") {
        Program p = parse_program("nat i; qubit q;\ni := i + 1; q *= H; i := 2 * i");
        InferResult r = infer_constraints(p);
        CHECK(r.constraints.empty());
        const ETermNode* n = r.term.get();
        while (n->kind == ETermNode::Kind::Subst) n = n->child.get();
        CHECK(n->kind == ETermNode::Kind::Var);
        CHECK(n->label == -1);
    }
}

TEST_CASE("evaluating terms under the example interpretation") {
    Program coin = load("examples/cointoss.qps");
    Interpretation interp = cointoss_solution(coin);

    SECTION("the loop variable at x=1, i=0 on |+><+| evaluates to 1") {
        Store s = Store::zeros(coin);
        s.values[0] = 1;
        QSqrtTwo v = eval_eterm(make_var(0), interp, s, Density::ketplus(1), coin);
        CHECK(v == q(1));
    }

    SECTION("the transformer result evaluates to 2 - (beta + gamma)") {
        InferResult r = infer_constraints(coin);
        Store s = Store::zeros(coin);
        s.values[0] = 1;
        s.values[1] = 7;
        CHECK(eval_eterm(r.term, interp, s, rho_phi(), coin) ==
              q(2) - QSqrtTwo(Rational(0), Rational(2, 3)));
        CHECK(eval_eterm(r.term, interp, s, Density::ket0(1), coin) == q(2));
    }

    SECTION("the post variable goes through the interpretation") {
        Store s = Store::zeros(coin);
        s.values[1] = 9;
        CHECK(eval_eterm(make_var(-1), interp, s, Density::ket0(1), coin) == q(9));
    }

    SECTION("a missing variable is reported") {
        Interpretation partial;
        partial.post = interp.post;
        CHECK_THROWS_WITH(eval_eterm(make_var(0), partial, Store::zeros(coin),
                                     Density::ket0(1), coin),
                          Catch::Matchers::ContainsSubstring("missing X_0"));
    }

    SECTION("zero normalization trace raises an evaluation error") {
        StateUpdate u;
        u.quantum = QuantumMap::measurement(1, 0, 1, "q");
        ETerm t = make_subst(make_var(-1), u);
        CHECK_THROWS_AS(eval_eterm(t, interp, Store::zeros(coin), Density::ket0(1), coin),
                        EvalError);
    }

    SECTION("the measurement barycentric term combines both branches") {
        // At rho = H|0><0|H the two outcomes are equally likely, and the
        // term evaluates to (1/2) g0 + (1/2) g1 with g_k the continuation
        // value on the collapsed state.
        InferResult r = infer_constraints(coin);
        const ETerm& bary = r.constraints[4].lhs;
        Store s = Store::zeros(coin);
        s.values[1] = 3;
        Density rho = apply_gate(Gate::H, {0}, Density::ket0(1));
        auto [b0, b1] = measure(rho, 0);
        REQUIRE(b0.probability == q(1, 2));
        Store s0 = s, s1 = s;
        s0.values[0] = 0;
        s1.values[0] = 1;
        QSqrtTwo g0 = interp.lookup(0)(s0, b0.state);
        QSqrtTwo g1 = interp.lookup(0)(s1, b1.state);
        CHECK(eval_eterm(bary, interp, s, rho, coin) ==
              q(1, 2) * g0 + q(1, 2) * g1);
        CHECK(g0 == q(3));      // x = 0: bound is just i
        CHECK(g1 == q(3 + 2));  // x = 1 on |1><1|: i + 2
    }
}

TEST_CASE("checking the example side-conditions") {
    Program coin = load("examples/cointoss.qps");
    InferResult r = infer_constraints(coin);
    Interpretation good = cointoss_solution(coin);

    SECTION("the documented solution holds on a grid of states") {
        for (const auto& rho : state_pool())
            for (const auto& s : store_pool(coin))
                for (const auto& c : r.constraints) {
                    Verdict v = check_constraint(c, good, s, rho, coin);
                    REQUIRE(v != Verdict::Violated);
                }
    }

    SECTION("the barycentric condition holds with equality slack on rho_phi") {
        Store s = Store::zeros(coin);
        s.values[0] = 1;
        s.values[1] = 4;
        CHECK(check_constraint(r.constraints[4], good, s, rho_phi(), coin) == Verdict::Holds);
    }

    SECTION("a false guard short-circuits") {
        Store s = Store::zeros(coin);
        s.values[0] = 1;  // x = 1 falsifies the !x guard
        CHECK(check_constraint(r.constraints[1], good, s, rho_phi(), coin) ==
              Verdict::GuardFalse);
    }

    SECTION("perturbing the loop bound is detected, off by exactly 1") {
        Interpretation bad = cointoss_solution(coin, Rational(1));
        Store s = Store::zeros(coin);
        s.values[0] = 1;
        CHECK(check_constraint(r.constraints[0], bad, s, Density::ket0(1), coin) ==
              Verdict::Violated);
        QSqrtTwo lhs = eval_eterm(r.constraints[0].lhs, bad, s, Density::ket0(1), coin);
        QSqrtTwo rhs = bad.lookup(0)(s, Density::ket0(1));
        CHECK(lhs - rhs == q(1));
    }
}

TEST_CASE("normalization") {
    Program coin = load("examples/cointoss.qps");

    SECTION("a bare variable becomes the unit summand") {
        CanonicalSum sum = normalize(make_var(-1), 1);
        REQUIRE(sum.size() == 1);
        CHECK(sum[0].coeff.empty());
        CHECK(sum[0].label == -1);
        CHECK(sum[0].classical.empty());
        CHECK(sum[0].quantum.trivial());
    }

    SECTION("substitution distributes over a barycentric sum") {
        StateUpdate incr;
        {
            ClassicalUpdate c;
            c.is_bool = false;
            c.var = 0;
            c.name = "i";
            auto add = std::make_unique<NatExpr>();
            add->kind = NatExpr::Kind::Add;
            add->lhs = std::make_unique<NatExpr>();
            add->lhs->kind = NatExpr::Kind::Var;
            add->lhs->var = 0;
            add->lhs->name = "i";
            add->rhs = std::make_unique<NatExpr>();
            add->rhs->kind = NatExpr::Kind::Lit;
            add->rhs->lit = 1;
            c.nat_value = std::shared_ptr<const NatExpr>(std::move(add));
            incr.classical.push_back(std::move(c));
        }
        ETerm t = make_subst(
            make_bary(make_var(-1), ProbAtom::measurement(1, 0, 0, "q"), make_var(0)), incr);
        CanonicalSum sum = normalize(t, 1);
        REQUIRE(sum.size() == 2);
        CHECK(sum[0].label == -1);
        CHECK(sum[0].coeff.size() == 1);
        CHECK(sum[0].coeff[0].outcome == 0);
        CHECK(sum[0].classical.size() == 1);
        CHECK(sum[1].label == 0);
        CHECK(sum[1].coeff[0].outcome == 1);  // 1 - p is the complementary outcome
    }

    SECTION("nested quantum updates compose into one map") {
        StateUpdate inner, outer;
        inner.quantum = QuantumMap::unitary(embed_gate(Gate::H, {0}, 1), "H(q)");
        outer.quantum = QuantumMap::unitary(embed_gate(Gate::T, {0}, 1), "T(q)");
        // (X[H])[T]: T acts on the state first.
        ETerm t = make_subst(make_subst(make_var(-1), inner), outer);
        CanonicalSum sum = normalize(t, 1);
        REQUIRE(sum.size() == 1);
        CMat expected = embed_gate(Gate::H, {0}, 1) * embed_gate(Gate::T, {0}, 1);
        CHECK(sum[0].quantum.m == expected);
        CHECK_FALSE(sum[0].quantum.renorm);
    }

    SECTION("semantic preservation and confluence on random terms") {
        Program& p = coin;
        Interpretation interp = cointoss_solution(p);
        TermGen gen;
        std::vector<Density> states = state_pool();
        std::vector<Store> stores = store_pool(p);
        int compared = 0;
        for (int t = 0; t < 1200; ++t) {
            ETerm term = gen.term(3);
            CanonicalSum sum = normalize(term, 1);
            CanonicalSum alt = normalize(bary_free(term), 1);
            REQUIRE(canonical_str(sum) == canonical_str(normalize(term, 1)));  // deterministic
            for (std::size_t k = 0; k < 20; ++k) {
                const Density& rho = states[k % states.size()];
                const Store& s = stores[(t + k) % stores.size()];
                QSqrtTwo direct, canon, confl;
                bool threw_direct = false, threw_canon = false, threw_confl = false;
                try {
                    direct = eval_eterm(term, interp, s, rho, p);
                } catch (const EvalError&) {
                    threw_direct = true;
                }
                try {
                    canon = eval(sum, interp, s, rho, p);
                } catch (const EvalError&) {
                    threw_canon = true;
                }
                try {
                    confl = eval(alt, interp, s, rho, p);
                } catch (const EvalError&) {
                    threw_confl = true;
                }
                REQUIRE(threw_direct == threw_canon);
                REQUIRE(threw_canon == threw_confl);
                if (!threw_direct) {
                    REQUIRE(direct == canon);
                    REQUIRE(canon == confl);
                    ++compared;
                }
            }
        }
        CHECK(compared >= 20000);
    }
}

TEST_CASE("common denominators") {
    Program coin = load("examples/cointoss.qps");
    Interpretation interp = cointoss_solution(coin);

    SECTION("a coefficient-free sum has the trivial denominator") {
        CanonicalSum sum = normalize(make_var(-1), 1);
        CommonDenominator cd = common_denominator(sum);
        CHECK(cd.denominator.empty());
        REQUIRE(cd.numerators.size() == 1);
        CHECK(cd.numerators[0].empty());
    }

    SECTION("a normalized probability splits into numerator and denominator traces") {
        ProbAtom p0 = ProbAtom::measurement(1, 0, 0, "q");
        StateUpdate meas;
        meas.quantum = QuantumMap::measurement(1, 0, 1, "q");
        // p(0,q) observed after an m(1,.) normalization: denominator needed.
        ETerm t = make_subst(make_scale({p0}, make_var(-1)), meas);
        CanonicalSum sum = normalize(t, 1);
        REQUIRE(sum.size() == 1);
        CommonDenominator cd = common_denominator(sum);
        REQUIRE(cd.numerators[0].size() == 1);
        REQUIRE(cd.denominator.size() == 1);
        // Semantics: coefficient = num / den wherever den is non-zero.
        Density rho = rho_phi();
        QSqrtTwo num = cd.numerators[0][0].eval(rho);
        QSqrtTwo den = cd.denominator[0].eval(rho);
        REQUIRE(den.sign() > 0);
        CHECK(eval(sum[0].coeff, rho) == num / den);
    }

    SECTION("rewriting preserves the inequality on guard-satisfying states") {
        TermGen gen;
        std::vector<Density> states = state_pool();
        for (int t = 0; t < 300; ++t) {
            ETerm term = gen.term(3);
            CanonicalSum sum = normalize(term, 1);
            CommonDenominator cd = common_denominator(sum);
            for (const auto& rho : states) {
                // Values of the summands without their coefficients.
                Store s = Store::zeros(coin);
                QSqrtTwo lhs_plain(0), lhs_cleared(0);
                bool ok = true;
                try {
                    for (std::size_t i = 0; i < sum.size(); ++i) {
                        Summand bare = sum[i];
                        bare.coeff.clear();
                        QSqrtTwo v = bare.eval(interp, s, rho, coin);
                        lhs_plain += eval(sum[i].coeff, rho) * v;
                        lhs_cleared += eval(cd.numerators[i], rho) * v;
                    }
                } catch (const EvalError&) {
                    ok = false;  // guard would be false here
                }
                if (!ok) continue;
                QSqrtTwo den = eval(cd.denominator, rho);
                if (den.sign() == 0) continue;
                REQUIRE(lhs_cleared == den * lhs_plain);
            }
        }
    }
}

TEST_CASE("structural evaluation matches the n-step semantics on loop-free programs") {
    // Deterministic pool of statements over two qubits.
    const std::vector<std::string> pool = {
        "i := i + 1",
        "x := tt",
        "q0 *= H",
        "q1 *= T",
        "q0, q1 *= CNOT",
        "x := meas q0",
        "x := meas q1",
        "if x then { i := i + 2 } else { q0 *= X }",
        "i := 2 * i",
        "q0 *= S",
        "i := i - 3",
        "if i < 2 then { i := i + 1 } else { x := ff }",
    };
    auto make_program = [&](const std::vector<int>& picks) {
        std::string src = "bool x; nat i; qubit q0, q1;\n";
        for (std::size_t k = 0; k < picks.size(); ++k) {
            if (k) src += ";\n";
            src += pool[picks[k]];
        }
        return parse_program(src);
    };

    const int n = static_cast<int>(pool.size());
    std::vector<std::vector<int>> programs;
    for (int a = 0; a < n; ++a) programs.push_back({a});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; b += 3) programs.push_back({a, b, (a + b) % n});
    for (int a = 0; a < n; a += 2) programs.push_back({a, (a + 5) % n, 7, 5});
    REQUIRE(programs.size() >= 50);

    std::vector<Expectation> posts;
    posts.push_back([](const Store& s, const Density&) {
        return QSqrtTwo(Rational(s.values[1]));
    });
    posts.push_back([](const Store&, const Density&) { return QSqrtTwo(1); });
    posts.push_back([](const Store& s, const Density& rho) {
        return QSqrtTwo(Rational(s.values[0])) + rho.entry(0, 0).to_real();
    });

    for (const auto& picks : programs) {
        Program p = make_program(picks);
        REQUIRE(loop_free(p.body.get()));
        int n = statement_count(p.body.get());
        for (const auto& f : posts) {
            for (const auto& rho :
                 {Density::ket0(2), Density::ketplus(2), Density::maximally_mixed(2)}) {
                Store s = Store::zeros(p);
                s.values[1] = 3;
                Config c = initial_config(p, s, rho);
                QSqrtTwo exact = wpt_eval(p.body.get(), p, f, s, rho);
                QSqrtTwo approx = wp_approx(p, c, f, n);
                REQUIRE(exact == approx);
                // Stability beyond the statement count.
                REQUIRE(wp_approx(p, c, f, n + 3) == approx);
            }
        }
    }
}

TEST_CASE("valid assignments bound the pre-expectation on loop-free programs") {
    // For a loop-free program with measurements: whenever an interpretation
    // satisfies every generated side-condition on a state grid, the
    // transformer result must dominate the exact pre-expectation there.
    auto run_one = [](const std::string& src, const Rational& level) {
        Program p = parse_program(src);
        InferResult r = infer_constraints(p);
        Expectation post = [](const Store& s, const Density&) {
            return QSqrtTwo(Rational(s.values[1]));
        };
        Interpretation interp;
        interp.post = post;
        for (const auto& c : r.constraints)
            interp.labels[c.rhs_label] = [level](const Store& s, const Density&) {
                return QSqrtTwo(level) + QSqrtTwo(Rational(s.values[1]));
            };

        std::vector<Store> stores;
        for (long x : {0L, 1L})
            for (long i : {0L, 2L}) {
                Store s = Store::zeros(p);
                s.values[0] = x;
                s.values[1] = i;
                stores.push_back(s);
            }
        std::vector<Density> states = {Density::ket0(1), ket1(), Density::ketplus(1), rho_phi()};

        bool all_hold = true;
        for (const auto& s : stores)
            for (const auto& rho : states)
                for (const auto& c : r.constraints)
                    all_hold &= check_constraint(c, interp, s, rho, p) != Verdict::Violated;

        if (!all_hold) return false;
        for (const auto& s : stores)
            for (const auto& rho : states) {
                QSqrtTwo bound = eval_eterm(r.term, interp, s, rho, p);
                QSqrtTwo exact = wpt_eval(p.body.get(), p, post, s, rho);
                REQUIRE(bound >= exact);
            }
        return true;
    };

    const std::string src =
        "bool x; nat i; qubit q;\nq *= H; x := meas q; if x then { i := i + 1 } else { skip }";
    bool strong = run_one(src, Rational(10));   // slack bound: conditions hold
    bool weak = run_one(src, Rational(-100));   // too small: conditions fail somewhere
    CHECK(strong);
    CHECK_FALSE(weak);
}
