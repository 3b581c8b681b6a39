#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qet/ast.hpp"

namespace qet {

// Parse-time failure with a source position.  `kind` is one of
// "lexical error", "parse error", "type error", "arity error".
struct SourceError : std::runtime_error {
    SourceError(std::string k, int line, int col, const std::string& msg)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + k +
                             ": " + msg),
          kind(std::move(k)),
          line(line),
          col(col) {}
    std::string kind;
    int line, col;
};

namespace detail {

enum class Tok {
    End, Ident, Number,
    KwBool, KwNat, KwQubit, KwSkip, KwIf, KwThen, KwElse, KwWhile, KwDo, KwMeas,
    KwTrue, KwFalse, KwCointoss, KwGeo,
    Assign, GateAssign, Semi, Comma, LBrace, RBrace, LParen, RParen,
    Plus, Minus, Star, Eq, Lt, Not, AndAnd, OrOr,
    Ket0, KetPlus,
};

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        skip_trivia();
        tok_.line = line_;
        tok_.col = col_;
        tok_.text.clear();
        if (pos_ >= src_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                    src_[pos_] == '\''))
                word += take();
            tok_.text = word;
            tok_.kind = keyword(word);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                num += take();
            tok_.text = num;
            tok_.kind = Tok::Number;
            return;
        }
        switch (c) {
            case ':':
                take();
                expect_char('=', "expected ':='");
                tok_.kind = Tok::Assign;
                return;
            case '*':
                take();
                if (pos_ < src_.size() && src_[pos_] == '=') {
                    take();
                    tok_.kind = Tok::GateAssign;
                } else {
                    tok_.kind = Tok::Star;
                }
                return;
            case ';': take(); tok_.kind = Tok::Semi; return;
            case ',': take(); tok_.kind = Tok::Comma; return;
            case '{': take(); tok_.kind = Tok::LBrace; return;
            case '}': take(); tok_.kind = Tok::RBrace; return;
            case '(': take(); tok_.kind = Tok::LParen; return;
            case ')': take(); tok_.kind = Tok::RParen; return;
            case '+': take(); tok_.kind = Tok::Plus; return;
            case '-': take(); tok_.kind = Tok::Minus; return;
            case '=': take(); tok_.kind = Tok::Eq; return;
            case '<': take(); tok_.kind = Tok::Lt; return;
            case '!': take(); tok_.kind = Tok::Not; return;
            case '&':
                take();
                expect_char('&', "expected '&&'");
                tok_.kind = Tok::AndAnd;
                return;
            case '|':
                take();
                if (pos_ < src_.size() && src_[pos_] == '|') {
                    take();
                    tok_.kind = Tok::OrOr;
                    return;
                }
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    char mid = src_[pos_];
                    if (mid == '0') {
                        take(); take();
                        tok_.kind = Tok::Ket0;
                        return;
                    }
                    if (mid == '+') {
                        take(); take();
                        tok_.kind = Tok::KetPlus;
                        return;
                    }
                }
                fail("expected '||', '|0>' or '|+>'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    static Tok keyword(const std::string& w) {
        static const std::map<std::string, Tok> kw = {
            {"bool", Tok::KwBool},   {"nat", Tok::KwNat},     {"qubit", Tok::KwQubit},
            {"skip", Tok::KwSkip},   {"if", Tok::KwIf},       {"then", Tok::KwThen},
            {"else", Tok::KwElse},   {"while", Tok::KwWhile}, {"do", Tok::KwDo},
            {"meas", Tok::KwMeas},   {"tt", Tok::KwTrue},     {"ff", Tok::KwFalse},
            {"cointoss", Tok::KwCointoss},                    {"geo", Tok::KwGeo},
        };
        auto it = kw.find(w);
        return it == kw.end() ? Tok::Ident : it->second;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
                while (pos_ < src_.size() && src_[pos_] != '\n') take();
            } else {
                break;
            }
        }
    }

    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void expect_char(char c, const std::string& msg) {
        if (pos_ >= src_.size() || src_[pos_] != c) fail(msg);
        take();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SourceError("lexical error", line_, col_, msg);
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_{Tok::End, "", 1, 1};
};

// Untyped expression tree; a typing pass turns it into NatExpr / BoolExpr.
struct UExpr {
    enum class Kind { Var, Lit, True, False, Add, Sub, Mul, Eq, Lt, Not, And, Or };
    Kind kind;
    std::string name;
    Int lit = 0;
    std::unique_ptr<UExpr> a, b;
    int line = 0, col = 0;
};
using UExprPtr = std::unique_ptr<UExpr>;

class Parser {
  public:
    explicit Parser(const std::string& src) : lex_(src) {}

    Program parse_program() {
        Program p;
        parse_decls(p);
        p.body = parse_stmt_seq(p);
        if (lex_.peek().kind != Tok::End)
            fail_here("parse error", "trailing input after program body");
        assign_labels(p);
        return p;
    }

  private:
    enum class VarKind { Bool, Nat, Qubit };

    void parse_decls(Program& p) {
        for (;;) {
            Tok k = lex_.peek().kind;
            VarKind vk;
            if (k == Tok::KwBool)
                vk = VarKind::Bool;
            else if (k == Tok::KwNat)
                vk = VarKind::Nat;
            else if (k == Tok::KwQubit)
                vk = VarKind::Qubit;
            else
                break;
            lex_.next();
            for (;;) {
                Token name = expect(Tok::Ident, "variable name");
                declare(p, name, vk);
                if (lex_.peek().kind != Tok::Comma) break;
                lex_.next();
            }
            expect(Tok::Semi, "';' after declaration");
        }
    }

    void declare(Program& p, const Token& name, VarKind vk) {
        if (kinds_.count(name.text))
            throw SourceError("type error", name.line, name.col,
                              "duplicate declaration of '" + name.text + "'");
        kinds_[name.text] = vk;
        switch (vk) {
            case VarKind::Bool: p.bool_vars.push_back(name.text); break;
            case VarKind::Nat: p.nat_vars.push_back(name.text); break;
            case VarKind::Qubit: p.qubit_vars.push_back(name.text); break;
        }
    }

    // Statement sequences are right-nested.
    StmtPtr parse_stmt_seq(Program& p) {
        StmtPtr first = parse_stmt(p);
        if (lex_.peek().kind == Tok::Semi) {
            lex_.next();
            if (starts_stmt(lex_.peek().kind)) {
                auto seq = std::make_unique<Stmt>();
                seq->kind = Stmt::Kind::Seq;
                seq->line = first->line;
                seq->col = first->col;
                seq->s1 = std::move(first);
                seq->s2 = parse_stmt_seq(p);
                return seq;
            }
        }
        return first;
    }

    static bool starts_stmt(Tok k) {
        return k == Tok::KwSkip || k == Tok::Ident || k == Tok::KwIf || k == Tok::KwWhile;
    }

    StmtPtr parse_block(Program& p) {
        expect(Tok::LBrace, "'{'");
        StmtPtr body = parse_stmt_seq(p);
        expect(Tok::RBrace, "'}'");
        return body;
    }

    StmtPtr parse_stmt(Program& p) {
        const Token t = lex_.peek();
        auto s = std::make_unique<Stmt>();
        s->line = t.line;
        s->col = t.col;
        switch (t.kind) {
            case Tok::KwSkip:
                lex_.next();
                s->kind = Stmt::Kind::Skip;
                return s;
            case Tok::KwIf: {
                lex_.next();
                s->kind = Stmt::Kind::If;
                s->guard = parse_bool(p);
                expect(Tok::KwThen, "'then'");
                s->s1 = parse_block(p);
                expect(Tok::KwElse, "'else'");
                s->s2 = parse_block(p);
                return s;
            }
            case Tok::KwWhile: {
                lex_.next();
                s->kind = Stmt::Kind::While;
                s->guard = parse_bool(p);
                expect(Tok::KwDo, "'do'");
                s->s1 = parse_block(p);
                return s;
            }
            case Tok::Ident:
                return parse_ident_stmt(p);
            default:
                fail_here("parse error", "expected a statement");
        }
    }

    StmtPtr parse_ident_stmt(Program& p) {
        Token first = lex_.next();
        auto s = std::make_unique<Stmt>();
        s->line = first.line;
        s->col = first.col;

        if (lex_.peek().kind == Tok::Comma || lex_.peek().kind == Tok::GateAssign) {
            // Gate application: q1, ..., qk *= G
            std::vector<Token> operands{first};
            while (lex_.peek().kind == Tok::Comma) {
                lex_.next();
                operands.push_back(expect(Tok::Ident, "qubit name"));
            }
            expect(Tok::GateAssign, "'*='");
            Token gname = expect(Tok::Ident, "gate name");
            s->kind = Stmt::Kind::GateApp;
            s->gate = lookup_gate(gname);
            for (const Token& op : operands) {
                s->qubits.push_back(qubit_index(p, op));
                s->qubit_names.push_back(op.text);
            }
            if (static_cast<int>(s->qubits.size()) != gate_arity(s->gate))
                throw SourceError("arity error", gname.line, gname.col,
                                  std::string(gate_name(s->gate)) + " expects " +
                                      std::to_string(gate_arity(s->gate)) + " qubit(s), got " +
                                      std::to_string(s->qubits.size()));
            for (std::size_t i = 0; i < s->qubits.size(); ++i)
                for (std::size_t j = i + 1; j < s->qubits.size(); ++j)
                    if (s->qubits[i] == s->qubits[j])
                        throw SourceError("type error", first.line, first.col,
                                          "duplicate qubit operand '" + s->qubit_names[i] + "'");
            return s;
        }

        expect(Tok::Assign, "':='");
        VarKind vk = var_kind(first);
        switch (vk) {
            case VarKind::Qubit: {
                Token rhs = lex_.next();
                if (rhs.kind == Tok::Ket0)
                    s->kind = Stmt::Kind::InitZero;
                else if (rhs.kind == Tok::KetPlus)
                    s->kind = Stmt::Kind::InitPlus;
                else
                    throw SourceError("type error", rhs.line, rhs.col,
                                      "qubit '" + first.text + "' can only be set to |0> or |+>");
                s->qubits.push_back(qubit_index(p, first));
                s->qubit_names.push_back(first.text);
                return s;
            }
            case VarKind::Bool: {
                if (lex_.peek().kind == Tok::KwMeas) {
                    lex_.next();
                    Token q = expect(Tok::Ident, "qubit name");
                    s->kind = Stmt::Kind::Measure;
                    s->var = classical_id(p, first, VarKind::Bool);
                    s->var_name = first.text;
                    s->qubits.push_back(qubit_index(p, q));
                    s->qubit_names.push_back(q.text);
                    return s;
                }
                if (lex_.peek().kind == Tok::KwCointoss) {
                    lex_.next();
                    expect(Tok::LParen, "'('");
                    expect(Tok::RParen, "')'");
                    s->kind = Stmt::Kind::SampleCoin;
                    s->var = classical_id(p, first, VarKind::Bool);
                    s->var_name = first.text;
                    return s;
                }
                s->kind = Stmt::Kind::AssignBool;
                s->var = classical_id(p, first, VarKind::Bool);
                s->var_name = first.text;
                s->bool_rhs = parse_bool(p);
                return s;
            }
            case VarKind::Nat: {
                if (lex_.peek().kind == Tok::KwGeo) {
                    lex_.next();
                    expect(Tok::LParen, "'('");
                    expect(Tok::RParen, "')'");
                    s->kind = Stmt::Kind::SampleGeo;
                    s->var = classical_id(p, first, VarKind::Nat);
                    s->var_name = first.text;
                    return s;
                }
                s->kind = Stmt::Kind::AssignNat;
                s->var = classical_id(p, first, VarKind::Nat);
                s->var_name = first.text;
                s->nat_rhs = parse_nat(p);
                return s;
            }
        }
        throw std::logic_error("unreachable");
    }

    // ---- expressions -----------------------------------------------------

    BoolExprPtr parse_bool(Program& p) { return to_bool(p, parse_or()); }
    NatExprPtr parse_nat(Program& p) { return to_nat(p, parse_add()); }

    UExprPtr parse_or() {
        UExprPtr e = parse_and();
        while (lex_.peek().kind == Tok::OrOr) {
            Token op = lex_.next();
            e = binary(UExpr::Kind::Or, std::move(e), parse_and(), op);
        }
        return e;
    }

    UExprPtr parse_and() {
        UExprPtr e = parse_cmp();
        while (lex_.peek().kind == Tok::AndAnd) {
            Token op = lex_.next();
            e = binary(UExpr::Kind::And, std::move(e), parse_cmp(), op);
        }
        return e;
    }

    UExprPtr parse_cmp() {
        UExprPtr e = parse_add();
        Tok k = lex_.peek().kind;
        if (k == Tok::Eq || k == Tok::Lt) {
            Token op = lex_.next();
            e = binary(k == Tok::Eq ? UExpr::Kind::Eq : UExpr::Kind::Lt, std::move(e),
                       parse_add(), op);
        }
        return e;
    }

    UExprPtr parse_add() {
        UExprPtr e = parse_mul();
        for (;;) {
            Tok k = lex_.peek().kind;
            if (k != Tok::Plus && k != Tok::Minus) break;
            Token op = lex_.next();
            e = binary(k == Tok::Plus ? UExpr::Kind::Add : UExpr::Kind::Sub, std::move(e),
                       parse_mul(), op);
        }
        return e;
    }

    UExprPtr parse_mul() {
        UExprPtr e = parse_unary();
        while (lex_.peek().kind == Tok::Star) {
            Token op = lex_.next();
            e = binary(UExpr::Kind::Mul, std::move(e), parse_unary(), op);
        }
        return e;
    }

    UExprPtr parse_unary() {
        if (lex_.peek().kind == Tok::Not) {
            Token op = lex_.next();
            auto e = std::make_unique<UExpr>();
            e->kind = UExpr::Kind::Not;
            e->a = parse_unary();
            e->line = op.line;
            e->col = op.col;
            return e;
        }
        return parse_atom();
    }

    UExprPtr parse_atom() {
        Token t = lex_.next();
        auto e = std::make_unique<UExpr>();
        e->line = t.line;
        e->col = t.col;
        switch (t.kind) {
            case Tok::Ident:
                e->kind = UExpr::Kind::Var;
                e->name = t.text;
                return e;
            case Tok::Number:
                e->kind = UExpr::Kind::Lit;
                e->lit = Int(t.text);
                return e;
            case Tok::KwTrue:
                e->kind = UExpr::Kind::True;
                return e;
            case Tok::KwFalse:
                e->kind = UExpr::Kind::False;
                return e;
            case Tok::LParen: {
                UExprPtr inner = parse_or();
                expect(Tok::RParen, "')'");
                return inner;
            }
            default:
                throw SourceError("parse error", t.line, t.col, "expected an expression");
        }
    }

    static UExprPtr binary(UExpr::Kind k, UExprPtr a, UExprPtr b, const Token& op) {
        auto e = std::make_unique<UExpr>();
        e->kind = k;
        e->a = std::move(a);
        e->b = std::move(b);
        e->line = op.line;
        e->col = op.col;
        return e;
    }

    // ---- typing ----------------------------------------------------------

    NatExprPtr to_nat(Program& p, UExprPtr e) {
        auto r = std::make_unique<NatExpr>();
        r->line = e->line;
        r->col = e->col;
        switch (e->kind) {
            case UExpr::Kind::Var: {
                VarKind vk = var_kind_at(e->name, e->line, e->col);
                if (vk != VarKind::Nat)
                    throw SourceError("type error", e->line, e->col,
                                      "'" + e->name + "' is not of type nat");
                r->kind = NatExpr::Kind::Var;
                r->var = nat_index(p, e->name);
                r->name = e->name;
                return r;
            }
            case UExpr::Kind::Lit:
                r->kind = NatExpr::Kind::Lit;
                r->lit = e->lit;
                return r;
            case UExpr::Kind::Add:
            case UExpr::Kind::Sub:
            case UExpr::Kind::Mul:
                r->kind = e->kind == UExpr::Kind::Add   ? NatExpr::Kind::Add
                          : e->kind == UExpr::Kind::Sub ? NatExpr::Kind::Sub
                                                        : NatExpr::Kind::Mul;
                r->lhs = to_nat(p, std::move(e->a));
                r->rhs = to_nat(p, std::move(e->b));
                return r;
            default:
                throw SourceError("type error", e->line, e->col,
                                  "expected a nat expression");
        }
    }

    BoolExprPtr to_bool(Program& p, UExprPtr e) {
        auto r = std::make_unique<BoolExpr>();
        r->line = e->line;
        r->col = e->col;
        switch (e->kind) {
            case UExpr::Kind::Var: {
                VarKind vk = var_kind_at(e->name, e->line, e->col);
                if (vk != VarKind::Bool)
                    throw SourceError("type error", e->line, e->col,
                                      "'" + e->name + "' is not of type bool");
                r->kind = BoolExpr::Kind::Var;
                r->var = bool_index(p, e->name);
                r->name = e->name;
                return r;
            }
            case UExpr::Kind::True: r->kind = BoolExpr::Kind::True; return r;
            case UExpr::Kind::False: r->kind = BoolExpr::Kind::False; return r;
            case UExpr::Kind::Eq:
            case UExpr::Kind::Lt:
                r->kind = e->kind == UExpr::Kind::Eq ? BoolExpr::Kind::Eq : BoolExpr::Kind::Lt;
                r->nl = to_nat(p, std::move(e->a));
                r->nr = to_nat(p, std::move(e->b));
                return r;
            case UExpr::Kind::Not:
                r->kind = BoolExpr::Kind::Not;
                r->bl = to_bool(p, std::move(e->a));
                return r;
            case UExpr::Kind::And:
            case UExpr::Kind::Or:
                r->kind = e->kind == UExpr::Kind::And ? BoolExpr::Kind::And : BoolExpr::Kind::Or;
                r->bl = to_bool(p, std::move(e->a));
                r->br = to_bool(p, std::move(e->b));
                return r;
            default:
                throw SourceError("type error", e->line, e->col,
                                  "expected a bool expression");
        }
    }

    // ---- name lookup -----------------------------------------------------

    VarKind var_kind(const Token& t) { return var_kind_at(t.text, t.line, t.col); }

    VarKind var_kind_at(const std::string& name, int line, int col) {
        auto it = kinds_.find(name);
        if (it == kinds_.end())
            throw SourceError("type error", line, col, "undeclared variable '" + name + "'");
        return it->second;
    }

    int classical_id(Program& p, const Token& t, VarKind expect_kind) {
        if (var_kind(t) != expect_kind)
            throw SourceError("type error", t.line, t.col,
                              "'" + t.text + "' has the wrong type here");
        return expect_kind == VarKind::Bool ? bool_index(p, t.text) : nat_index(p, t.text);
    }

    static int bool_index(const Program& p, const std::string& name) {
        for (std::size_t i = 0; i < p.bool_vars.size(); ++i)
            if (p.bool_vars[i] == name) return static_cast<int>(i);
        throw std::logic_error("bool variable not found: " + name);
    }

    static int nat_index(const Program& p, const std::string& name) {
        for (std::size_t i = 0; i < p.nat_vars.size(); ++i)
            if (p.nat_vars[i] == name) return static_cast<int>(i);
        throw std::logic_error("nat variable not found: " + name);
    }

    int qubit_index(Program& p, const Token& t) {
        if (var_kind(t) != VarKind::Qubit)
            throw SourceError("type error", t.line, t.col, "'" + t.text + "' is not a qubit");
        for (std::size_t i = 0; i < p.qubit_vars.size(); ++i)
            if (p.qubit_vars[i] == t.text) return static_cast<int>(i);
        throw std::logic_error("qubit not found: " + t.text);
    }

    Gate lookup_gate(const Token& t) {
        static const std::map<std::string, Gate> gates = {
            {"I", Gate::I}, {"X", Gate::X}, {"Y", Gate::Y}, {"Z", Gate::Z},
            {"H", Gate::H}, {"S", Gate::S}, {"T", Gate::T}, {"CNOT", Gate::CNOT},
        };
        auto it = gates.find(t.text);
        if (it == gates.end())
            throw SourceError("parse error", t.line, t.col, "unknown gate '" + t.text + "'");
        return it->second;
    }

    Token expect(Tok k, const std::string& what) {
        if (lex_.peek().kind != k) fail_here("parse error", "expected " + what);
        return lex_.next();
    }

    [[noreturn]] void fail_here(const std::string& kind, const std::string& msg) {
        const Token& t = lex_.peek();
        throw SourceError(kind, t.line, t.col, msg);
    }

    Lexer lex_;
    std::map<std::string, VarKind> kinds_;
};

}  // namespace detail

// Parses a full program and assigns labels in left-to-right preorder.
inline Program parse_program(const std::string& source) {
    return detail::Parser(source).parse_program();
}

}  // namespace qet
