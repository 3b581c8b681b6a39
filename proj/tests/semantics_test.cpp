#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "qet/desugar.hpp"
#include "qet/parser.hpp"
#include "qet/semantics.hpp"

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

Density density2(const QOmega& a, const QOmega& b, const QOmega& c, const QOmega& d) {
    CMat m(2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return Density::validated(m);
}

// The one-qubit example state [[1/3, sqrt2/3], [sqrt2/3, 2/3]].
Density rho_phi() {
    QOmega off = Rational(1, 3) * QOmega::sqrt2();
    return density2(QOmega(Rational(1, 3)), off, off, QOmega(Rational(2, 3)));
}

Expectation var_value(const Program& p, const std::string& name) {
    for (std::size_t i = 0; i < p.nat_vars.size(); ++i)
        if (p.nat_vars[i] == name) {
            int id = p.combined_id(false, static_cast<int>(i));
            return [id](const Store& s, const Density&) {
                return QSqrtTwo(Rational(s.values[id]));
            };
        }
    FAIL("no nat variable " + name);
    return {};
}

Expectation constant(long v) {
    return [v](const Store&, const Density&) { return QSqrtTwo(v); };
}

QSqrtTwo q(long num, long den = 1) { return QSqrtTwo(make_rational(num, den)); }

// Independent hand-rolled model of the coin-toss reduction from |0><0|,
// transcribing the small-step rules for this specific program: states are
// (remaining statements of the round, x, collapsed qubit)... the qubit is
// |0> or |1> exactly, and measuring after H yields either outcome with
// probability 1/2 regardless.  Tracks terminal mass per lifted step.
std::vector<Rational> cointoss_terminal_mass_by_hand(int steps) {
    // Phase encoding within one loop round: 0 = at while, 1 = after Wh1,
    // 2 = after i+1, 3 = after H.  Phase 4 = terminal.
    struct Node {
        int phase;
        int x;
    };
    std::map<std::pair<int, int>, Rational> dist{{{0, 1}, Rational(1)}};
    Rational terminal(0);
    std::vector<Rational> out;
    // out[n] = |nf^n|; the two initialization steps (x := tt; i := 0) run
    // first, so nothing is terminal before step 3.
    out.push_back(Rational(0));
    out.push_back(Rational(0));
    out.push_back(Rational(0));
    for (int n = 3; n < steps; ++n) {
        std::map<std::pair<int, int>, Rational> next;
        for (auto& [key, mass] : dist) {
            auto [phase, x] = key;
            if (phase == 0 && x == 0) {
                terminal += mass;  // (Wh0)
            } else if (phase == 0) {
                next[{1, x}] += mass;  // (Wh1)
            } else if (phase == 1) {
                next[{2, x}] += mass;  // i := i + 1
            } else if (phase == 2) {
                next[{3, x}] += mass;  // H
            } else {
                next[{0, 0}] += mass / 2;  // measurement
                next[{0, 1}] += mass / 2;
            }
        }
        dist = std::move(next);
        out.push_back(terminal);
    }
    return out;
}

}  // namespace

TEST_CASE("gate application on density matrices") {
    SECTION("H sends |0><0| to the uniform projector") {
        Density r = apply_gate(Gate::H, {0}, Density::ket0(1));
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                CHECK(r.entry(j, k) == QOmega(Rational(1, 2)));
    }
    SECTION("X conjugation swaps rows and columns") {
        Density r = apply_gate(Gate::X, {0}, rho_phi());
        CHECK(r.entry(0, 0) == rho_phi().entry(1, 1));
        CHECK(r.entry(0, 1) == rho_phi().entry(1, 0));
        CHECK(r.entry(1, 0) == rho_phi().entry(0, 1));
        CHECK(r.entry(1, 1) == rho_phi().entry(0, 0));
    }
    SECTION("identity leaves the state alone") {
        CHECK(apply_gate(Gate::I, {0}, rho_phi()) == rho_phi());
    }
    SECTION("bad indices are rejected") {
        CHECK_THROWS_AS(apply_gate(Gate::H, {1}, Density::ket0(1)), std::out_of_range);
    }
}

TEST_CASE("measurement") {
    SECTION("measuring |+><+|") {
        auto [b0, b1] = measure(Density::ketplus(1), 0);
        CHECK(b0.probability == q(1, 2));
        CHECK(b1.probability == q(1, 2));
        CHECK(b0.state == Density::ket0(1));
        CHECK(b1.state.entry(1, 1) == QOmega(1));
        CHECK(b1.state.entry(0, 0) == QOmega(0));
    }
    SECTION("measuring an eigenstate: degenerate branch is maximally mixed") {
        auto [b0, b1] = measure(Density::ket0(1), 0);
        CHECK(b0.probability == q(1));
        CHECK(b0.state == Density::ket0(1));
        CHECK(b1.probability == q(0));
        CHECK(b1.state == Density::maximally_mixed(1));
    }
    SECTION("p0 after H is (1 + beta + gamma)/2") {
        Density r = apply_gate(Gate::H, {0}, rho_phi());
        auto [b0, b1] = measure(r, 0);
        // beta + gamma = 2*sqrt2/3 here.
        QSqrtTwo expected = (q(1) + QSqrtTwo(Rational(0), Rational(2, 3))) * q(1, 2);
        CHECK(b0.probability == expected);
        CHECK(b0.probability + b1.probability == q(1));
    }
}

TEST_CASE("density matrix validation") {
    CHECK_NOTHROW(rho_phi());
    SECTION("trace must be one") {
        CMat m(2);
        m.at(0, 0) = QOmega(1);
        m.at(1, 1) = QOmega(1);
        CHECK_THROWS_AS(Density::validated(m), std::invalid_argument);
    }
    SECTION("hermiticity is required") {
        CMat m(2);
        m.at(0, 0) = QOmega(1);
        m.at(0, 1) = QOmega(Rational(1, 2));
        CHECK_THROWS_AS(Density::validated(m), std::invalid_argument);
    }
    SECTION("indefinite matrices are rejected via principal minors") {
        CMat m(2);
        m.at(0, 0) = QOmega(1);
        m.at(0, 1) = QOmega(1);
        m.at(1, 0) = QOmega(1);
        m.at(1, 1) = QOmega(0);
        CHECK_THROWS_AS(Density::validated(m), std::invalid_argument);
    }
}

TEST_CASE("single steps follow the reduction rules") {
    Program coin = load("examples/cointoss.qps");

    SECTION("a false guard terminates the loop in one step") {
        // Configuration at the bare while with x = 0.
        const Stmt* loop = coin.body->s2->s2.get();
        Config c{{}, Store::zeros(coin), Density::ket0(1)};
        c.cont.push_back(loop);
        ConfigDist d = step(c, coin);
        REQUIRE(d.size() == 1);
        CHECK(d[0].weight == q(1));
        CHECK(d[0].config.terminal());
        CHECK(d[0].config.store.values == c.store.values);
        CHECK(d[0].config.rho == c.rho);
    }

    SECTION("skip reduces to the terminal configuration") {
        Program p = parse_program("skip");
        Config c = initial_config(p, Store::zeros(p), Density::ket0(0));
        ConfigDist d = step(c, p);
        REQUIRE(d.size() == 1);
        CHECK(d[0].config.terminal());
        CHECK(d[0].weight == q(1));
    }

    SECTION("stepping a terminal configuration is an error") {
        Program p = parse_program("skip");
        Config c{{}, Store::zeros(p), Density::ket0(0)};
        CHECK_THROWS_AS(step(c, p), std::logic_error);
    }

    SECTION("the four-step loop round from the paper's trace") {
        // From (while x do stm, [x:=1, i:=0], rho): Wh1, then Exp, Op, Meas,
        // each fused with the sequencing rule.
        const Stmt* loop = coin.body->s2->s2.get();
        Config c{{}, Store::zeros(coin), rho_phi()};
        c.cont.push_back(loop);
        c.store.values[0] = 1;  // x
        ConfigDist d{{q(1), c}};
        QSqrtTwo w;
        for (int i = 0; i < 4; ++i) {
            auto [moved, next] = step_dist(d, coin);
            w = moved;
            d = next;
            CHECK(w == q(1));  // every configuration is live during the round
        }
        REQUIRE(d.size() == 2);
        // Sorted order puts the x=0 branch first (store comparison).
        const QSqrtTwo p0 = q(1, 2) + QSqrtTwo(Rational(0), Rational(1, 3));
        const QSqrtTwo p1 = q(1, 2) - QSqrtTwo(Rational(0), Rational(1, 3));
        CHECK(d[0].config.store.values[0] == 0);
        CHECK(d[0].config.store.values[1] == 1);
        CHECK(d[0].weight == p0);
        CHECK(d[0].config.rho == Density::ket0(1));
        CHECK(d[1].config.store.values[0] == 1);
        CHECK(d[1].config.store.values[1] == 1);
        CHECK(d[1].weight == p1);
        CHECK(d[1].config.rho.entry(1, 1) == QOmega(1));
        // Both continuations sit at the loop head again.
        CHECK(d[0].config.cont.size() == 1);
        CHECK(d[0].config.cont[0]->label == 0);
    }
}

TEST_CASE("lifted steps") {
    Program coin = load("examples/cointoss.qps");

    SECTION("an all-terminal distribution does not move") {
        Config c{{}, Store::zeros(coin), Density::ket0(1)};
        ConfigDist d{{q(1), c}};
        auto [moved, next] = step_dist(d, coin);
        CHECK(moved == q(0));
        CHECK(next.size() == 1);
        CHECK(next[0].config.terminal());
    }

    SECTION("a point distribution steps with weight 1") {
        Config c = initial_config(coin, Store::zeros(coin), Density::ket0(1));
        auto [moved, next] = step_dist({{q(1), c}}, coin);
        CHECK(moved == q(1));
        CHECK(next.size() == 1);
    }

    SECTION("weight pattern of the paper's trace, third block") {
        Config c = initial_config(coin, Store::zeros(coin), rho_phi());
        StepTrace t = run_n(c, coin, 10);
        const QSqrtTwo p0 = q(1, 2) + QSqrtTwo(Rational(0), Rational(1, 3));
        const QSqrtTwo p1 = q(1) - p0;
        // Steps 1..6 move full mass; step 7 covers the loop exit and the
        // re-entry; steps 8..10 move only the live branch.
        for (int i = 0; i < 7; ++i) CHECK(t.steps[i].weight == q(1));
        for (int i = 7; i < 10; ++i) CHECK(t.steps[i].weight == p1);
        // Block totals match the trace: 2, then 4, then p0 + 4 p1.
        QSqrtTwo third_block = t.steps[6].weight + t.steps[7].weight + t.steps[8].weight +
                               t.steps[9].weight;
        CHECK(third_block == p0 + q(4) * p1);

        REQUIRE(t.dist.size() == 3);
        CHECK(t.dist[0].config.terminal());
        CHECK(t.dist[0].weight == p0);
        CHECK(t.dist[0].config.store.values[1] == 1);
        CHECK(t.dist[1].weight == p1 * q(1, 2));
        CHECK(t.dist[1].config.store.values[1] == 2);
        CHECK(t.dist[2].weight == p1 * q(1, 2));
    }

    SECTION("determinism: equal inputs give equal outputs") {
        Config c = initial_config(coin, Store::zeros(coin), rho_phi());
        StepTrace a = run_n(c, coin, 25);
        StepTrace b = run_n(c, coin, 25);
        REQUIRE(a.dist.size() == b.dist.size());
        for (std::size_t i = 0; i < a.dist.size(); ++i) {
            CHECK(a.dist[i].weight == b.dist[i].weight);
            CHECK(compare(a.dist[i].config, b.dist[i].config) == 0);
        }
        for (std::size_t i = 0; i < a.steps.size(); ++i)
            CHECK(a.steps[i].weight == b.steps[i].weight);
    }

    SECTION("total mass stays exactly 1 and terminal mass is monotone") {
        Config c = initial_config(coin, Store::zeros(coin), rho_phi());
        ConfigDist d{{q(1), c}};
        QSqrtTwo last_terminal(0);
        for (int i = 0; i < 40; ++i) {
            d = step_dist(d, coin).second;
            CHECK(total_mass(d) == q(1));
            QSqrtTwo tm = terminal_mass(d);
            CHECK(tm >= last_terminal);
            last_terminal = tm;
        }
    }
}

TEST_CASE("syntactically identical configurations merge") {
    Program p = desugar(parse_program(
        "bool x; qubit q;\nq *= H; x := meas q; if x then { q *= X } else { skip }; x := ff"));
    Config c = initial_config(p, Store::zeros(p), Density::ket0(1));
    StepTrace t = run_n(c, p, 8);
    REQUIRE(t.dist.size() == 1);
    CHECK(t.dist[0].weight == q(1));
    CHECK(t.dist[0].config.terminal());
    CHECK(t.dist[0].config.rho == Density::ket0(1));
}

TEST_CASE("coin-toss run from |0><0|") {
    Program coin = load("examples/cointoss.qps");
    Config c = initial_config(coin, Store::zeros(coin), Density::ket0(1));

    SECTION("run_0 is the initial point distribution") {
        StepTrace t = run_n(c, coin, 0);
        CHECK(t.steps.empty());
        CHECK(t.edl_prefix() == q(0));
        REQUIRE(t.dist.size() == 1);
        CHECK(t.dist[0].weight == q(1));
    }

    SECTION("terminal mass matches the hand-rolled enumeration and the geometric law") {
        StepTrace t = run_n(c, coin, 47);
        auto by_hand = cointoss_terminal_mass_by_hand(48);
        for (int n = 1; n <= 47; ++n)
            REQUIRE(t.steps[n - 1].terminal_mass == QSqrtTwo(by_hand[n]));
        // First-hit indices 7 + 4k carry mass 1 - 1/2^{k+1}, holding
        // through the rest of the block (indices up to 10 + 4k).
        for (int n = 0; n <= 6; ++n)
            CHECK((n == 0 ? q(0) : t.steps[n - 1].terminal_mass) == q(0));
        for (int k = 0; k <= 9; ++k) {
            QSqrtTwo expected = q(1) - q(1, 1L << (k + 1));
            for (int n = 7 + 4 * k; n <= std::min(10 + 4 * k, 47); ++n)
                REQUIRE(t.steps[n - 1].terminal_mass == expected);
        }
    }

    SECTION("edl prefixes increase monotonically toward 11") {
        StepTrace t = run_n(c, coin, 200);
        QSqrtTwo prev(0);
        for (const auto& rec : t.steps) {
            CHECK(rec.edl_prefix >= prev);
            prev = rec.edl_prefix;
        }
        CHECK(t.edl_prefix() <= q(11));
        CHECK(t.edl_prefix() >= q(11) - QSqrtTwo(make_rational(1, 1000000)));
    }
}

TEST_CASE("n-step weakest pre-expectations") {
    Program coin = load("examples/cointoss.qps");

    SECTION("expected loop count from the example state approaches 2 - 2*sqrt2/3") {
        Config c = initial_config(coin, Store::zeros(coin), rho_phi());
        auto series = wp_approx_series(coin, c, var_value(coin, "i"), 200);
        const QSqrtTwo limit(Rational(2), Rational(-2, 3));
        QSqrtTwo prev(0);
        for (const auto& v : series) {
            CHECK(v >= prev);  // monotone for non-negative post-expectations
            CHECK(v <= limit);
            prev = v;
        }
        CHECK(series.back() >= limit - QSqrtTwo(make_rational(1, 1000000)));
    }

    SECTION("the constant post-expectation 1 probes termination") {
        Config c = initial_config(coin, Store::zeros(coin), Density::ket0(1));
        QSqrtTwo v = wp_approx(coin, c, constant(1), 120);
        CHECK(v <= q(1));
        CHECK(v >= q(1) - QSqrtTwo(make_rational(1, 1000000)));
    }

    SECTION("the zero post-expectation is zero at every n") {
        Config c = initial_config(coin, Store::zeros(coin), rho_phi());
        auto series = wp_approx_series(coin, c, constant(0), 30);
        for (const auto& v : series) CHECK(v == q(0));
    }

    SECTION("expectation is linear over the terminal distribution") {
        Config c = initial_config(coin, Store::zeros(coin), rho_phi());
        Expectation f = var_value(coin, "i");
        Expectation g = constant(1);
        Expectation sum = [&](const Store& s, const Density& d) { return f(s, d) + g(s, d); };
        for (int n : {5, 11, 30}) {
            CHECK(wp_approx(coin, c, sum, n) ==
                  wp_approx(coin, c, f, n) + wp_approx(coin, c, g, n));
        }
    }
}

TEST_CASE("termination probes") {
    SECTION("repeat-until-success reaches 3/4 after one round") {
        Program rus = load("examples/rus.qps");
        Config c = initial_config(rus, Store::zeros(rus), Density::ket0(2));
        TerminationProbe probe = termination_probe(rus, c, 30);
        CHECK(probe.termination_lower_bound >= q(3, 4));
        // One full round: 2 setup steps + 12 statements + the loop exit.
        TerminationProbe exact = termination_probe(rus, c, 15);
        CHECK(exact.termination_lower_bound == q(3, 4));
    }

    SECTION("skip terminates in one step of weight one") {
        Program p = parse_program("skip");
        Config c = initial_config(p, Store::zeros(p), Density::ket0(0));
        TerminationProbe probe = termination_probe(p, c, 1);
        CHECK(probe.termination_lower_bound == q(1));
        CHECK(probe.edl_prefix == q(1));
    }

    SECTION("a diverging loop never accumulates terminal mass") {
        Program p = load("examples/diverge.qps");
        Config c = initial_config(p, Store::zeros(p), Density::ket0(0));
        for (int n : {1, 10, 50}) {
            TerminationProbe probe = termination_probe(p, c, n);
            CHECK(probe.termination_lower_bound == q(0));
            CHECK(probe.edl_prefix == q(n));
        }
    }
}

TEST_CASE("geometric sampling distribution") {
    Program p = load("examples/geo.qps");
    Config c = initial_config(p, Store::zeros(p), Density::ket0(1));
    StepTrace t = run_n(c, p, 80);
    // Terminal mass on n = k must be exactly 1/2^{k+1}.
    std::map<long, QSqrtTwo> mass;
    int n_id = p.combined_id(false, 0);
    for (const auto& wc : t.dist) {
        if (!wc.config.terminal()) continue;
        long v = wc.config.store.values[n_id].get_si();
        auto [it, inserted] = mass.emplace(v, wc.weight);
        if (!inserted) it->second += wc.weight;
    }
    for (long k = 0; k <= 4; ++k) {
        REQUIRE(mass.count(k) == 1);
        CHECK(mass[k] == q(1, 1L << (k + 1)));
    }
}

TEST_CASE("initial configuration validation") {
    Program coin = load("examples/cointoss.qps");
    CHECK_THROWS_AS(initial_config(coin, Store::zeros(coin), Density::ket0(2)),
                    std::invalid_argument);
    Store bad;
    bad.values = {Int(0)};
    CHECK_THROWS_AS(initial_config(coin, bad, Density::ket0(1)), std::invalid_argument);
}
