#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "mpnnc/errors.hpp"
#include "mpnnc/expr.hpp"

namespace mpnnc {

namespace detail {

// expr   := term { "+" term }
// term   := number "*" factor | factor
// factor := number | "P" digits | ident "(" expr ")" | "<>" factor | "(" expr ")"
class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    Expr expr() {
        Expr e = term();
        while (accept('+')) e = Expr::add(std::move(e), term());
        return e;
    }

    Expr term() {
        skip_ws();
        if (at_number()) {
            const double a = number();
            if (accept('*')) return Expr::scale(a, factor());
            return literal(a);
        }
        return factor();
    }

    Expr factor() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (at_number()) return literal(number());
        if (text_.substr(pos_, 2) == "<>") {
            pos_ += 2;
            return Expr::diamond(factor());
        }
        if (accept('(')) {
            Expr e = expr();
            expect(')');
            return e;
        }
        const char c = text_[pos_];
        if (c == 'P') {
            const std::size_t start = pos_++;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail_at("projection needs an index", start);
            std::size_t index = 0;
            auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), index);
            if (ec != std::errc{}) fail_at("projection index out of range", start);
            pos_ = static_cast<std::size_t>(end - text_.data());
            if (index == 0) fail_at("projection index must be positive (P0)", start);
            return Expr::proj(index);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            const auto fn = named_fn_from_string(name);
            if (!fn) fail_at("unknown function '" + std::string(name) + "'", start);
            expect('(');
            Expr arg = expr();
            expect(')');
            return Expr::apply(*fn, std::move(arg));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    // The literal 1 denotes the constant expression itself; any other
    // literal a is a * 1.
    static Expr literal(double a) { return a == 1.0 ? Expr::one() : Expr::constant(a); }

    bool at_number() const {
        if (pos_ >= text_.size()) return false;
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return true;
        if ((c == '-' || c == '+') && pos_ + 1 < text_.size()) {
            const char d = text_[pos_ + 1];
            return std::isdigit(static_cast<unsigned char>(d)) || d == '.';
        }
        return false;
    }

    double number() {
        const std::size_t start = pos_;
        if (text_[pos_] == '+' || text_[pos_] == '-') ++pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                digits();
            else
                pos_ = save;
        }
        std::string_view token = text_.substr(start, pos_ - start);
        if (!token.empty() && token.front() == '+') token.remove_prefix(1);
        double value = 0.0;
        auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || end != token.data() + token.size())
            fail_at("malformed number '" + std::string(text_.substr(start, pos_ - start)) + "'", start);
        return value;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one MPLang expression. Throws ParseError with the byte offset.
inline Expr parse(std::string_view text) { return detail::ExprParser(text).parse_all(); }

/// Parses a tuple: components separated by ';' or newlines, blank parts and
/// '#' comment lines ignored.
inline std::vector<Expr> parse_components(std::string_view text) {
    std::vector<Expr> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find_first_of(";\n", start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view part = text.substr(start, end - start);
        const auto first = part.find_first_not_of(" \t\r");
        if (first != std::string_view::npos && part[first] != '#') {
            try {
                out.push_back(parse(part));
            } catch (const ParseError& e) {
                throw ParseError(e.message(), start + e.position());
            }
        }
        start = end + 1;
    }
    if (out.empty()) throw ParseError("no expression found", 0);
    return out;
}

}  // namespace mpnnc
