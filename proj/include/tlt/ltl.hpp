#pragma once

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace tlt {

enum class Kind { True, False, Atom, Not, And, Or, Next, Until, WeakUntil, Eventually, Always };

enum class Quantifier { ForAll, Exists };

/// Immutable LTL formula with structural equality.
class Formula {
    struct Node {
        Kind kind;
        std::string name;
        std::shared_ptr<const Node> l, r;
    };

public:
    Formula() : Formula(Kind::True, {}, nullptr, nullptr) {}

    static Formula truth() { return Formula(Kind::True, {}, nullptr, nullptr); }
    static Formula falsity() { return Formula(Kind::False, {}, nullptr, nullptr); }
    static Formula atom(std::string name) { return Formula(Kind::Atom, std::move(name), nullptr, nullptr); }
    static Formula lnot(const Formula& f) { return Formula(Kind::Not, {}, f.n_, nullptr); }
    static Formula land(const Formula& a, const Formula& b) { return Formula(Kind::And, {}, a.n_, b.n_); }
    static Formula lor(const Formula& a, const Formula& b) { return Formula(Kind::Or, {}, a.n_, b.n_); }
    static Formula next(const Formula& f) { return Formula(Kind::Next, {}, f.n_, nullptr); }
    static Formula until(const Formula& a, const Formula& b) { return Formula(Kind::Until, {}, a.n_, b.n_); }
    static Formula weak_until(const Formula& a, const Formula& b) { return Formula(Kind::WeakUntil, {}, a.n_, b.n_); }
    static Formula eventually(const Formula& f) { return Formula(Kind::Eventually, {}, f.n_, nullptr); }
    static Formula always(const Formula& f) { return Formula(Kind::Always, {}, f.n_, nullptr); }

    Kind kind() const { return n_->kind; }
    const std::string& name() const { return n_->name; }
    Formula left() const { return Formula(n_->l); }
    Formula right() const { return Formula(n_->r); }
    /// Operand of a unary node.
    Formula sub() const { return Formula(n_->l); }

    bool is_unary() const {
        auto k = kind();
        return k == Kind::Not || k == Kind::Next || k == Kind::Eventually || k == Kind::Always;
    }
    bool is_binary() const {
        auto k = kind();
        return k == Kind::And || k == Kind::Or || k == Kind::Until || k == Kind::WeakUntil;
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.n_ == b.n_) return true;
        if (a.kind() != b.kind()) return false;
        if (a.kind() == Kind::Atom) return a.name() == b.name();
        if (a.is_unary()) return a.sub() == b.sub();
        if (a.is_binary()) return a.left() == b.left() && a.right() == b.right();
        return true;
    }

private:
    explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    Formula(Kind k, std::string name, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r)
        : n_(std::make_shared<const Node>(Node{k, std::move(name), std::move(l), std::move(r)})) {}

    std::shared_ptr<const Node> n_;
};

namespace detail {
inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
}  // namespace detail

/// Canonical concrete syntax; binary operators are always parenthesized.
inline std::string to_string(const Formula& f) {
    switch (f.kind()) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::Atom: return f.name();
        case Kind::Not: return "!" + to_string(f.sub());
        case Kind::Next: return "X " + to_string(f.sub());
        case Kind::Eventually: return "F " + to_string(f.sub());
        case Kind::Always: return "G " + to_string(f.sub());
        case Kind::And: return "(" + to_string(f.left()) + " & " + to_string(f.right()) + ")";
        case Kind::Or: return "(" + to_string(f.left()) + " | " + to_string(f.right()) + ")";
        case Kind::Until: return "(" + to_string(f.left()) + " U " + to_string(f.right()) + ")";
        case Kind::WeakUntil: return "(" + to_string(f.left()) + " W " + to_string(f.right()) + ")";
    }
    return {};
}

/// Recursive-descent parser for the ASCII grammar
///   formula := wu ; wu := or (("U"|"W") wu)? ; or := and ("|" and)* ;
///   and := unary ("&" unary)* ; unary := ("!"|"X"|"F"|"G") unary | atom | "true" | "false" | "(" formula ")"
class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Formula parse() {
        advance();
        Formula f = wu();
        if (tok_.kind != Tok::End) fail({"end of input", "U", "W", "&", "|", ")"});
        return f;
    }

private:
    enum class Tok { End, Ident, True, False, Not, Next, Ev, Al, U, W, And, Or, LParen, RParen };
    struct Token {
        Tok kind;
        std::size_t offset;
        std::string text;
    };

    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= s_.size()) {
            tok_ = {Tok::End, start, "end of input"};
            return;
        }
        char c = s_[pos_];
        if (detail::ident_start(c)) {
            while (pos_ < s_.size() && detail::ident_char(s_[pos_])) ++pos_;
            std::string w(s_.substr(start, pos_ - start));
            Tok k = Tok::Ident;
            if (w == "true") k = Tok::True;
            else if (w == "false") k = Tok::False;
            else if (w == "X") k = Tok::Next;
            else if (w == "F") k = Tok::Ev;
            else if (w == "G") k = Tok::Al;
            else if (w == "U") k = Tok::U;
            else if (w == "W") k = Tok::W;
            tok_ = {k, start, w};
            return;
        }
        ++pos_;
        switch (c) {
            case '!': tok_ = {Tok::Not, start, "!"}; return;
            case '&': tok_ = {Tok::And, start, "&"}; return;
            case '|': tok_ = {Tok::Or, start, "|"}; return;
            case '(': tok_ = {Tok::LParen, start, "("}; return;
            case ')': tok_ = {Tok::RParen, start, ")"}; return;
            default: break;
        }
        throw SyntaxError(start, {"atom", "true", "false", "!", "X", "F", "G", "("}, "'" + std::string(1, c) + "'");
    }

    [[noreturn]] void fail(std::vector<std::string> expected) {
        std::string found = tok_.kind == Tok::End ? "end of input" : "'" + tok_.text + "'";
        throw SyntaxError(tok_.offset, std::move(expected), found);
    }

    Formula wu() {
        Formula l = disj();
        if (tok_.kind == Tok::U || tok_.kind == Tok::W) {
            bool strong = tok_.kind == Tok::U;
            advance();
            Formula r = wu();
            return strong ? Formula::until(l, r) : Formula::weak_until(l, r);
        }
        return l;
    }

    // Chains of & and | nest to the right: a & b & c is And(a, And(b, c)).
    Formula disj() {
        std::vector<Formula> items{conj()};
        while (tok_.kind == Tok::Or) {
            advance();
            items.push_back(conj());
        }
        return fold(items, false);
    }
    Formula conj() {
        std::vector<Formula> items{unary()};
        while (tok_.kind == Tok::And) {
            advance();
            items.push_back(unary());
        }
        return fold(items, true);
    }
    static Formula fold(const std::vector<Formula>& items, bool is_and) {
        Formula acc = items.back();
        for (std::size_t i = items.size() - 1; i-- > 0;)
            acc = is_and ? Formula::land(items[i], acc) : Formula::lor(items[i], acc);
        return acc;
    }

    Formula unary() {
        switch (tok_.kind) {
            case Tok::Not: advance(); return Formula::lnot(unary());
            case Tok::Next: advance(); return Formula::next(unary());
            case Tok::Ev: advance(); return Formula::eventually(unary());
            case Tok::Al: advance(); return Formula::always(unary());
            case Tok::True: advance(); return Formula::truth();
            case Tok::False: advance(); return Formula::falsity();
            case Tok::Ident: {
                auto name = tok_.text;
                advance();
                return Formula::atom(name);
            }
            case Tok::LParen: {
                advance();
                Formula f = wu();
                if (tok_.kind != Tok::RParen) fail({")", "U", "W", "&", "|"});
                advance();
                return f;
            }
            default: fail({"atom", "true", "false", "!", "X", "F", "G", "("});
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    Token tok_{Tok::End, 0, {}};
};

inline Formula parse_ltl(std::string_view text) { return Parser(text).parse(); }

/// Not(f) with one level of double-negation elimination.
inline Formula negate(const Formula& f) {
    if (f.kind() == Kind::Not) return f.sub();
    return Formula::lnot(f);
}

namespace detail {

inline Formula pnf(const Formula& f, bool neg) {
    using F = Formula;
    switch (f.kind()) {
        case Kind::True: return neg ? F::falsity() : F::truth();
        case Kind::False: return neg ? F::truth() : F::falsity();
        case Kind::Atom: return neg ? F::lnot(f) : f;
        case Kind::Not: return pnf(f.sub(), !neg);
        case Kind::And:
            return neg ? F::lor(pnf(f.left(), true), pnf(f.right(), true))
                       : F::land(pnf(f.left(), false), pnf(f.right(), false));
        case Kind::Or:
            return neg ? F::land(pnf(f.left(), true), pnf(f.right(), true))
                       : F::lor(pnf(f.left(), false), pnf(f.right(), false));
        case Kind::Next: return F::next(pnf(f.sub(), neg));
        case Kind::Eventually:
            // !F p == G !p
            return neg ? F::weak_until(pnf(f.sub(), true), F::falsity()) : F::until(F::truth(), pnf(f.sub(), false));
        case Kind::Always:
            // !G p == F !p
            return neg ? F::until(F::truth(), pnf(f.sub(), true)) : F::weak_until(pnf(f.sub(), false), F::falsity());
        case Kind::Until:
        case Kind::WeakUntil: {
            bool strong = f.kind() == Kind::Until;
            if (!neg) {
                auto a = pnf(f.left(), false), b = pnf(f.right(), false);
                return strong ? F::until(a, b) : F::weak_until(a, b);
            }
            auto l = F::land(pnf(f.left(), false), pnf(f.right(), true));
            auto r = F::land(pnf(f.left(), true), pnf(f.right(), true));
            return strong ? F::weak_until(l, r) : F::until(l, r);
        }
    }
    return f;
}

}  // namespace detail

/// Equivalent formula in weak-until positive normal form.
inline Formula to_wu_pnf(const Formula& f) { return detail::pnf(f, false); }

inline bool is_wu_pnf(const Formula& f) {
    switch (f.kind()) {
        case Kind::True:
        case Kind::False:
        case Kind::Atom: return true;
        case Kind::Not: return f.sub().kind() == Kind::Atom;
        case Kind::Next: return is_wu_pnf(f.sub());
        case Kind::And:
        case Kind::Or:
        case Kind::Until:
        case Kind::WeakUntil: return is_wu_pnf(f.left()) && is_wu_pnf(f.right());
        case Kind::Eventually:
        case Kind::Always: return false;
    }
    return false;
}

inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
    if (f.kind() == Kind::Atom) out.insert(f.name());
    else if (f.is_unary()) collect_atoms(f.sub(), out);
    else if (f.is_binary()) {
        collect_atoms(f.left(), out);
        collect_atoms(f.right(), out);
    }
}

inline std::set<std::string> atoms_of(const Formula& f) {
    std::set<std::string> out;
    collect_atoms(f, out);
    return out;
}

}  // namespace tlt
