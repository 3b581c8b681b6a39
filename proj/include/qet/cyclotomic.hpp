#pragma once

#include <array>
#include <cctype>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qet/rational.hpp"

namespace qet {

class QOmega;

// Element of Q(sqrt2), stored as a + b*sqrt2.  Carries probabilities,
// traces and expectation values; ordering is decidable exactly.
class QSqrtTwo {
  public:
    QSqrtTwo() : a_(0), b_(0) {}
    QSqrtTwo(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}
    explicit QSqrtTwo(const Rational& a) : a_(a), b_(0) {}
    QSqrtTwo(long n) : a_(n), b_(0) {}  // NOLINT: implicit on purpose

    static QSqrtTwo sqrt2() { return QSqrtTwo(Rational(0), Rational(1)); }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt2_part() const { return b_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_rational() const { return b_ == 0; }

    QSqrtTwo operator+(const QSqrtTwo& o) const { return {a_ + o.a_, b_ + o.b_}; }
    QSqrtTwo operator-(const QSqrtTwo& o) const { return {a_ - o.a_, b_ - o.b_}; }
    QSqrtTwo operator-() const { return {-a_, -b_}; }
    QSqrtTwo operator*(const QSqrtTwo& o) const {
        return {a_ * o.a_ + 2 * b_ * o.b_, a_ * o.b_ + b_ * o.a_};
    }
    QSqrtTwo& operator+=(const QSqrtTwo& o) { return *this = *this + o; }
    QSqrtTwo& operator-=(const QSqrtTwo& o) { return *this = *this - o; }
    QSqrtTwo& operator*=(const QSqrtTwo& o) { return *this = *this * o; }

    QSqrtTwo inverse() const {
        // (a + b*sqrt2)^-1 = (a - b*sqrt2) / (a^2 - 2 b^2)
        Rational norm = a_ * a_ - 2 * b_ * b_;
        if (norm == 0) throw std::domain_error("division by zero in Q(sqrt2)");
        return {a_ / norm, -b_ / norm};
    }
    QSqrtTwo operator/(const QSqrtTwo& o) const { return *this * o.inverse(); }

    bool operator==(const QSqrtTwo& o) const { return a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const QSqrtTwo& o) const { return !(*this == o); }

    // Exact sign of a + b*sqrt2.
    int sign() const {
        int sa = sgn(a_), sb = sgn(b_);
        if (sa >= 0 && sb >= 0) return (sa == 0 && sb == 0) ? 0 : 1;
        if (sa <= 0 && sb <= 0) return -1;
        // Mixed signs: compare a^2 against 2 b^2; the dominant term wins.
        int heavier = cmp(a_ * a_, 2 * b_ * b_);
        if (heavier == 0) return 0;  // unreachable for nonzero values, sqrt2 is irrational
        return heavier > 0 ? sa : sb;
    }

    bool operator<(const QSqrtTwo& o) const { return (*this - o).sign() < 0; }
    bool operator<=(const QSqrtTwo& o) const { return (*this - o).sign() <= 0; }
    bool operator>(const QSqrtTwo& o) const { return (*this - o).sign() > 0; }
    bool operator>=(const QSqrtTwo& o) const { return (*this - o).sign() >= 0; }

    double to_double() const { return a_.get_d() + b_.get_d() * 1.41421356237309504880168872420969808; }

    std::string str() const;

  private:
    static int sgn(const Rational& q) { return sgn_int(cmp(q, 0)); }
    static int sgn_int(int c) { return c > 0 ? 1 : (c < 0 ? -1 : 0); }
    Rational a_, b_;
};

inline QSqrtTwo abs(const QSqrtTwo& x) { return x.sign() < 0 ? -x : x; }

// Element of the cyclotomic field Q(w), w = e^{i pi/4}, so w^4 = -1.
// The basis 1, w, w^2, w^3 is a Q-basis, making equality componentwise.
// Every Clifford+T amplitude lives here: i = w^2, sqrt2 = w - w^3.
class QOmega {
  public:
    QOmega() { c_.fill(Rational(0)); }
    QOmega(long n) { c_.fill(Rational(0)); c_[0] = n; }  // NOLINT
    explicit QOmega(const Rational& q) { c_.fill(Rational(0)); c_[0] = q; }
    QOmega(Rational c0, Rational c1, Rational c2, Rational c3)
        : c_{std::move(c0), std::move(c1), std::move(c2), std::move(c3)} {}
    explicit QOmega(const QSqrtTwo& r)
        : c_{r.rational_part() + 0, r.sqrt2_part() + 0, Rational(0), -r.sqrt2_part()} {}

    static QOmega omega() { return {Rational(0), Rational(1), Rational(0), Rational(0)}; }
    static QOmega i() { return {Rational(0), Rational(0), Rational(1), Rational(0)}; }
    static QOmega sqrt2() { return {Rational(0), Rational(1), Rational(0), Rational(-1)}; }
    static QOmega inv_sqrt2() {
        return {Rational(0), Rational(1, 2), Rational(0), Rational(-1, 2)};
    }
    static QOmega omega_pow(int k) {
        k = ((k % 8) + 8) % 8;
        QOmega r;
        r.c_[k % 4] = (k < 4) ? 1 : -1;
        return r;
    }

    const Rational& coeff(int k) const { return c_.at(k); }

    bool is_zero() const {
        return c_[0] == 0 && c_[1] == 0 && c_[2] == 0 && c_[3] == 0;
    }
    bool is_rational() const { return c_[1] == 0 && c_[2] == 0 && c_[3] == 0; }
    bool is_real() const { return c_[2] == 0 && c_[1] == -c_[3]; }

    QOmega operator+(const QOmega& o) const {
        return {c_[0] + o.c_[0], c_[1] + o.c_[1], c_[2] + o.c_[2], c_[3] + o.c_[3]};
    }
    QOmega operator-(const QOmega& o) const {
        return {c_[0] - o.c_[0], c_[1] - o.c_[1], c_[2] - o.c_[2], c_[3] - o.c_[3]};
    }
    QOmega operator-() const { return {-c_[0], -c_[1], -c_[2], -c_[3]}; }

    QOmega operator*(const QOmega& o) const {
        // Convolution reduced by w^4 = -1.
        std::array<Rational, 4> r;
        r.fill(Rational(0));
        for (int a = 0; a < 4; ++a) {
            if (c_[a] == 0) continue;
            for (int b = 0; b < 4; ++b) {
                if (o.c_[b] == 0) continue;
                int k = a + b;
                if (k < 4)
                    r[k] += c_[a] * o.c_[b];
                else
                    r[k - 4] -= c_[a] * o.c_[b];
            }
        }
        return {r[0], r[1], r[2], r[3]};
    }

    QOmega& operator+=(const QOmega& o) { return *this = *this + o; }
    QOmega& operator-=(const QOmega& o) { return *this = *this - o; }
    QOmega& operator*=(const QOmega& o) { return *this = *this * o; }

    bool operator==(const QOmega& o) const { return c_ == o.c_; }
    bool operator!=(const QOmega& o) const { return !(*this == o); }

    // Complex conjugation; conj(w) = w^7 = -w^3.
    QOmega conj() const { return {c_[0], -c_[3], -c_[2], -c_[1]}; }

    // Galois map w -> w^k for odd k; used by inverse().
    QOmega galois(int k) const {
        QOmega r;
        for (int j = 0; j < 4; ++j) r += QOmega(c_[j]) * omega_pow(j * k);
        return r;
    }

    // Inversion through the rational norm: multiply by the conjugates
    // under w -> w^3, w^5, w^7, which reduces the denominator to Q.
    QOmega inverse() const {
        if (is_zero()) throw std::domain_error("division by zero in Q(w)");
        QOmega partial = galois(3) * galois(5) * galois(7);
        QOmega norm = *this * partial;
        if (!norm.is_rational() || norm.c_[0] == 0)
            throw std::logic_error("norm computation failed in Q(w)");
        Rational inv_n = 1 / norm.c_[0];
        return {partial.c_[0] * inv_n, partial.c_[1] * inv_n, partial.c_[2] * inv_n,
                partial.c_[3] * inv_n};
    }
    QOmega operator/(const QOmega& o) const { return *this * o.inverse(); }

    // Decomposition x = re(x) + i*im(x), both parts in Q(sqrt2);
    // uses w - w^3 = sqrt2 and w + w^3 = i*sqrt2.
    QSqrtTwo real_part() const { return {c_[0], (c_[1] - c_[3]) / 2}; }
    QSqrtTwo imag_part() const { return {c_[2], (c_[1] + c_[3]) / 2}; }

    // Exact value as Q(sqrt2); throws when the element is not real.
    QSqrtTwo to_real() const {
        if (!is_real()) throw std::domain_error("value is not real");
        return real_part();
    }

    std::complex<double> to_complex() const {
        return {real_part().to_double(), imag_part().to_double()};
    }

    std::string str() const;

  private:
    std::array<Rational, 4> c_;
};

inline QOmega operator*(const Rational& q, const QOmega& x) { return QOmega(q) * x; }
inline QOmega operator*(const QSqrtTwo& q, const QOmega& x) { return QOmega(q) * x; }

// ---------------------------------------------------------------------------
// Textual forms.  QOmega prints as a sum over 1, w, w^2, w^3 with rational
// coefficients p/q; QSqrtTwo as `a + b*sqrt2`.  Both forms parse back.

namespace detail {

inline void append_term(std::string& out, const Rational& coeff, const std::string& symbol) {
    if (coeff == 0) return;
    Rational c = coeff;
    if (out.empty()) {
        if (c < 0) {
            out += "-";
            c = -c;
        }
    } else {
        out += (c < 0) ? " - " : " + ";
        if (c < 0) c = -c;
    }
    if (symbol.empty()) {
        out += c.get_str();
    } else if (c == 1) {
        out += symbol;
    } else {
        out += c.get_str() + "*" + symbol;
    }
}

struct TermScanner {
    std::string text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    // Reads one signed term: optional coefficient, optional *symbol^power.
    // Returns (coefficient, basis index) where the index is resolved by the caller.
    bool next(Rational& coeff, std::string& symbol, int& power) {
        skip_ws();
        if (pos >= text.size()) return false;
        int sign = 1;
        if (text[pos] == '+' || text[pos] == '-') {
            if (text[pos] == '-') sign = -1;
            ++pos;
            skip_ws();
        }
        coeff = 1;
        symbol.clear();
        power = 1;
        bool saw_number = false;
        if (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])))) {
            size_t start = pos;
            while (pos < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
                ++pos;
            coeff = parse_rational(text.substr(start, pos - start));
            saw_number = true;
            skip_ws();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                skip_ws();
            }
        }
        if (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) {
            size_t start = pos;
            while (pos < text.size() &&
                   std::isalnum(static_cast<unsigned char>(text[pos])))
                ++pos;
            symbol = text.substr(start, pos - start);
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                size_t ps = pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
                if (ps == pos) throw std::invalid_argument("missing exponent in '" + text + "'");
                power = std::stoi(text.substr(ps, pos - ps));
            }
        } else if (!saw_number) {
            throw std::invalid_argument("malformed term in '" + text + "'");
        }
        coeff *= sign;
        return true;
    }
};

}  // namespace detail

inline std::string QOmega::str() const {
    std::string out;
    detail::append_term(out, c_[0], "");
    detail::append_term(out, c_[1], "w");
    detail::append_term(out, c_[2], "w^2");
    detail::append_term(out, c_[3], "w^3");
    return out.empty() ? "0" : out;
}

inline std::string QSqrtTwo::str() const {
    std::string out;
    detail::append_term(out, a_, "");
    detail::append_term(out, b_, "sqrt2");
    return out.empty() ? "0" : out;
}

inline QOmega parse_qomega(const std::string& text) {
    detail::TermScanner scan{text};
    Rational c[4] = {Rational(0), Rational(0), Rational(0), Rational(0)};
    Rational coeff;
    std::string symbol;
    int power;
    bool any = false;
    while (scan.next(coeff, symbol, power)) {
        any = true;
        if (symbol.empty()) {
            c[0] += coeff;
        } else if (symbol == "w") {
            if (power < 0 || power > 3)
                throw std::invalid_argument("w power out of range in '" + text + "'");
            c[power] += coeff;
        } else if (symbol == "sqrt2" && power == 1) {
            c[1] += coeff;
            c[3] -= coeff;
        } else if (symbol == "i" && power == 1) {
            c[2] += coeff;
        } else {
            throw std::invalid_argument("unknown symbol '" + symbol + "' in '" + text + "'");
        }
    }
    if (!any) throw std::invalid_argument("empty field element");
    return {c[0], c[1], c[2], c[3]};
}

inline QSqrtTwo parse_qsqrt2(const std::string& text) {
    QOmega x = parse_qomega(text);
    if (!x.is_real()) throw std::invalid_argument("not a real value: '" + text + "'");
    return x.real_part();
}

inline std::ostream& operator<<(std::ostream& os, const QOmega& x) { return os << x.str(); }
inline std::ostream& operator<<(std::ostream& os, const QSqrtTwo& x) { return os << x.str(); }

}  // namespace qet
