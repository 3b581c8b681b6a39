#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qet/ast.hpp"
#include "qet/cyclotomic.hpp"
#include "qet/density.hpp"
#include "qet/semantics.hpp"

namespace qet {

struct EncodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Variable universe for polynomial expectations over a program's states:
// Y variables for the classical store (bools first, then nats, declaration
// order), then A_{j,k} and B_{j,k} (1-based, row-major) for the real and
// imaginary parts of the density-matrix entries.
struct StateSig {
    std::vector<std::string> classical_names;
    std::vector<bool> classical_is_bool;
    int qubits = 0;

    static StateSig of(const Program& p) {
        StateSig s;
        for (const auto& n : p.bool_vars) {
            s.classical_names.push_back(n);
            s.classical_is_bool.push_back(true);
        }
        for (const auto& n : p.nat_vars) {
            s.classical_names.push_back(n);
            s.classical_is_bool.push_back(false);
        }
        s.qubits = p.qubit_count();
        return s;
    }

    std::size_t dim() const { return std::size_t(1) << qubits; }
    int classical_count() const { return static_cast<int>(classical_names.size()); }
    int matrix_count() const { return static_cast<int>(2 * dim() * dim()); }
    int var_count() const { return classical_count() + matrix_count(); }

    int y_index(const std::string& name) const {
        for (int i = 0; i < classical_count(); ++i)
            if (classical_names[i] == name) return i;
        throw EncodeError("unknown classical variable '" + name + "'");
    }
    // 1-based row/column indices, matching the printed names A_j_k / B_j_k.
    int a_index(int j, int k) const {
        check_jk(j, k);
        return classical_count() + static_cast<int>((j - 1) * dim() + (k - 1));
    }
    int b_index(int j, int k) const {
        check_jk(j, k);
        return classical_count() + static_cast<int>(dim() * dim() + (j - 1) * dim() + (k - 1));
    }

    std::string var_name(int idx) const {
        if (idx < classical_count()) return "Y_" + classical_names[idx];
        int rest = idx - classical_count();
        int d = static_cast<int>(dim());
        const char* base = rest < d * d ? "A" : "B";
        rest %= d * d;
        return std::string(base) + "_" + std::to_string(rest / d + 1) + "_" +
               std::to_string(rest % d + 1);
    }

    // Values of all variables at a concrete state.
    std::vector<QSqrtTwo> encode_state(const Store& store, const Density& rho) const {
        if (static_cast<int>(store.values.size()) != classical_count() ||
            rho.dim() != dim())
            throw EncodeError("state does not match the signature");
        std::vector<QSqrtTwo> v;
        v.reserve(var_count());
        for (const Int& x : store.values) v.emplace_back(Rational(x));
        for (std::size_t j = 0; j < dim(); ++j)
            for (std::size_t k = 0; k < dim(); ++k) v.push_back(rho.entry(j, k).real_part());
        for (std::size_t j = 0; j < dim(); ++j)
            for (std::size_t k = 0; k < dim(); ++k) v.push_back(rho.entry(j, k).imag_part());
        return v;
    }

  private:
    void check_jk(int j, int k) const {
        if (j < 1 || k < 1 || j > static_cast<int>(dim()) || k > static_cast<int>(dim()))
            throw EncodeError("matrix index out of range");
    }
};

struct Monomial {
    std::vector<std::uint16_t> exp;

    int degree() const { return std::accumulate(exp.begin(), exp.end(), 0); }

    // Graded lexicographic order: lower degree first; ties broken by the
    // first differing variable, higher power first.
    bool operator<(const Monomial& o) const {
        int da = degree(), db = o.degree();
        if (da != db) return da < db;
        for (std::size_t i = 0; i < exp.size(); ++i)
            if (exp[i] != o.exp[i]) return exp[i] > o.exp[i];
        return false;
    }
    bool operator==(const Monomial& o) const { return exp == o.exp; }
};

// Sparse multivariate polynomial with coefficients in Q(sqrt2).
class Poly {
  public:
    Poly() : nvars_(0) {}
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly constant(int nvars, QSqrtTwo c) {
        Poly p(nvars);
        if (c.sign() != 0) p.terms_[Monomial{std::vector<std::uint16_t>(nvars, 0)}] = c;
        return p;
    }

    static Poly var(int nvars, int idx, int power = 1) {
        Poly p(nvars);
        Monomial m{std::vector<std::uint16_t>(nvars, 0)};
        m.exp.at(idx) = static_cast<std::uint16_t>(power);
        p.terms_[m] = QSqrtTwo(1);
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<Monomial, QSqrtTwo>& terms() const { return terms_; }

    int degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }

    // Highest total degree contributed by the given variable range.
    int degree_over(int lo, int hi) const {
        int d = 0;
        for (const auto& [m, c] : terms_) {
            int s = 0;
            for (int i = lo; i < hi; ++i) s += m.exp[i];
            d = std::max(d, s);
        }
        return d;
    }

    Poly operator+(const Poly& o) const {
        check(o);
        Poly r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }
    Poly operator-(const Poly& o) const {
        check(o);
        Poly r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
        return r;
    }
    Poly operator-() const {
        Poly r(nvars_);
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    Poly operator*(const Poly& o) const {
        check(o);
        Poly r(nvars_);
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_) {
                Monomial m = ma;
                for (std::size_t i = 0; i < m.exp.size(); ++i)
                    m.exp[i] = static_cast<std::uint16_t>(m.exp[i] + mb.exp[i]);
                r.add_term(m, ca * cb);
            }
        return r;
    }
    Poly scaled(const QSqrtTwo& c) const {
        Poly r(nvars_);
        if (c.sign() == 0) return r;
        for (const auto& [m, coeff] : terms_) r.terms_[m] = coeff * c;
        return r;
    }
    Poly pow(int e) const {
        Poly r = constant(nvars_, QSqrtTwo(1));
        for (int i = 0; i < e; ++i) r = r * (*this);
        return r;
    }

    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    QSqrtTwo eval(const std::vector<QSqrtTwo>& values) const {
        if (static_cast<int>(values.size()) != nvars_)
            throw EncodeError("evaluation vector has the wrong arity");
        QSqrtTwo acc(0);
        for (const auto& [m, c] : terms_) {
            QSqrtTwo t = c;
            for (int i = 0; i < nvars_; ++i)
                for (int e = 0; e < m.exp[i]; ++e) t *= values[i];
            acc += t;
        }
        return acc;
    }

    // Substitutes images[i] for variable i everywhere (parallel).
    Poly compose(const std::vector<Poly>& images) const {
        if (static_cast<int>(images.size()) != nvars_)
            throw EncodeError("composition vector has the wrong arity");
        int target_vars = images.empty() ? nvars_ : images[0].nvars();
        Poly acc(target_vars);
        for (const auto& [m, c] : terms_) {
            Poly t = constant(target_vars, c);
            for (int i = 0; i < nvars_; ++i)
                if (m.exp[i] > 0) t *= images[i].pow(m.exp[i]);
            acc += t;
        }
        return acc;
    }

    // Deterministic rendering, graded-lex order, highest terms last removed:
    // constants print bare, sqrt2 parts via the sqrt2 symbol.
    std::string str(const StateSig& sig) const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : terms_) {
            std::string coeff = c.str();
            bool needs_parens = coeff.find(' ') != std::string::npos;
            std::string mono;
            for (int i = 0; i < nvars_; ++i) {
                if (m.exp[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += sig.var_name(i);
                if (m.exp[i] > 1) mono += "^" + std::to_string(m.exp[i]);
            }
            std::string term;
            if (mono.empty())
                term = needs_parens ? "(" + coeff + ")" : coeff;
            else if (c == QSqrtTwo(1))
                term = mono;
            else if (c == QSqrtTwo(-1))
                term = "-" + mono;
            else
                term = (needs_parens ? "(" + coeff + ")" : coeff) + "*" + mono;
            if (out.empty())
                out = term;
            else if (!term.empty() && term[0] == '-')
                out += " - " + term.substr(1);
            else
                out += " + " + term;
        }
        return out;
    }

  private:
    void check(const Poly& o) const {
        if (nvars_ != o.nvars_) throw EncodeError("polynomial arity mismatch");
    }
    void add_term(const Monomial& m, const QSqrtTwo& c) {
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (c.sign() != 0) terms_[m] = c;
            return;
        }
        it->second += c;
        if (it->second.sign() == 0) terms_.erase(it);
    }

    int nvars_;
    std::map<Monomial, QSqrtTwo> terms_;
};

// All monomials of total degree <= d over sig's variables, graded-lex order.
inline std::vector<Monomial> monomials_up_to(const StateSig& sig, int d) {
    std::vector<Monomial> out;
    Monomial cur{std::vector<std::uint16_t>(sig.var_count(), 0)};
    // Enumerate recursively; order fixed afterwards by sorting.
    std::vector<std::pair<int, int>> stack;
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == sig.var_count()) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            cur.exp[var] = static_cast<std::uint16_t>(e);
            rec(var + 1, remaining - e);
        }
        cur.exp[var] = 0;
    };
    rec(0, d);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Parser for the template mini-language shared by post-expectations and
// assignment files: rational literals, sqrt2, classical variables (bare or
// Y_-prefixed), A_j_k / A[j][k], B_j_k / B[j][k], + - *, integer powers.

namespace detail {

class PolyParser {
  public:
    PolyParser(const std::string& src, const StateSig& sig) : src_(src), sig_(sig) {}

    Poly parse() {
        Poly p = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) throw EncodeError("trailing input in polynomial: '" + src_ + "'");
        return p;
    }

  private:
    Poly parse_sum() {
        Poly acc = parse_product();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                acc += parse_product();
            } else if (peek() == '-') {
                ++pos_;
                acc -= parse_product();
            } else {
                return acc;
            }
        }
    }

    Poly parse_product() {
        Poly acc = parse_power();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                acc *= parse_power();
            } else {
                return acc;
            }
        }
    }

    Poly parse_power() {
        Poly base = parse_atom();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            std::size_t s = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            if (s == pos_) throw EncodeError("missing exponent in '" + src_ + "'");
            return base.pow(std::stoi(src_.substr(s, pos_ - s)));
        }
        return base;
    }

    Poly parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw EncodeError("unexpected end of polynomial");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = parse_sum();
            skip_ws();
            expect(')');
            return p;
        }
        if (c == '-') {
            ++pos_;
            return -parse_power();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t s = pos_;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '/'))
                ++pos_;
            return Poly::constant(sig_.var_count(),
                                  QSqrtTwo(parse_rational(src_.substr(s, pos_ - s))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t s = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            std::string word = src_.substr(s, pos_ - s);
            if (word == "sqrt2")
                return Poly::constant(sig_.var_count(), QSqrtTwo::sqrt2());
            if ((word == "A" || word == "B") && peek() == '[') return bracket_entry(word == "A");
            if (word.size() > 2 && (word[0] == 'A' || word[0] == 'B') && word[1] == '_')
                return underscore_entry(word);
            std::string name = word.rfind("Y_", 0) == 0 ? word.substr(2) : word;
            return Poly::var(sig_.var_count(), sig_.y_index(name));
        }
        throw EncodeError(std::string("unexpected character '") + c + "' in polynomial");
    }

    Poly bracket_entry(bool real) {
        expect('[');
        int j = parse_int();
        expect(']');
        expect('[');
        int k = parse_int();
        expect(']');
        return Poly::var(sig_.var_count(), real ? sig_.a_index(j, k) : sig_.b_index(j, k));
    }

    Poly underscore_entry(const std::string& word) {
        auto second = word.find('_', 2);
        if (second == std::string::npos)
            throw EncodeError("malformed matrix variable '" + word + "'");
        int j = std::stoi(word.substr(2, second - 2));
        int k = std::stoi(word.substr(second + 1));
        return Poly::var(sig_.var_count(),
                         word[0] == 'A' ? sig_.a_index(j, k) : sig_.b_index(j, k));
    }

    int parse_int() {
        skip_ws();
        std::size_t s = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (s == pos_) throw EncodeError("expected an index in '" + src_ + "'");
        return std::stoi(src_.substr(s, pos_ - s));
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != c)
            throw EncodeError(std::string("expected '") + c + "' in polynomial '" + src_ + "'");
        ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    const std::string& src_;
    const StateSig& sig_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Poly parse_poly(const std::string& text, const StateSig& sig) {
    return detail::PolyParser(text, sig).parse();
}

}  // namespace qet
