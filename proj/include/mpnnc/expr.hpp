#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mpnnc/activation.hpp"
#include "mpnnc/detail.hpp"
#include "mpnnc/errors.hpp"

namespace mpnnc {

class ExprNode;

/// Immutable MPLang expression. Copies share structure; equality is structural.
class Expr {
public:
    static Expr one();
    static Expr proj(std::size_t index);
    static Expr scale(double factor, Expr operand);
    static Expr add(Expr lhs, Expr rhs);
    static Expr apply(Activation fn, Expr operand);
    static Expr diamond(Expr operand);
    /// The numeric literal a, i.e. a * 1.
    static Expr constant(double a) { return scale(a, one()); }

    const ExprNode& node() const { return *node_; }
    /// Identity of the shared node, for memoizing over subterms.
    const void* key() const { return node_.get(); }

    template <class T>
    const T* as() const;

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
};

namespace ast {
struct One {};
struct Proj {
    std::size_t index;
};
struct Scale {
    double factor;
    Expr operand;
};
struct Add {
    Expr lhs;
    Expr rhs;
};
struct Apply {
    Activation fn;
    Expr operand;
};
struct Diamond {
    Expr operand;
};
}  // namespace ast

class ExprNode {
public:
    using Variant = std::variant<ast::One, ast::Proj, ast::Scale, ast::Add, ast::Apply, ast::Diamond>;
    explicit ExprNode(Variant v) : value(std::move(v)) {}
    Variant value;
};

inline Expr Expr::one() { return Expr(std::make_shared<const ExprNode>(ast::One{})); }

inline Expr Expr::proj(std::size_t index) {
    if (index == 0) throw std::invalid_argument("projection indices start at 1");
    return Expr(std::make_shared<const ExprNode>(ast::Proj{index}));
}

inline Expr Expr::scale(double factor, Expr operand) {
    return Expr(std::make_shared<const ExprNode>(ast::Scale{factor, std::move(operand)}));
}

inline Expr Expr::add(Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const ExprNode>(ast::Add{std::move(lhs), std::move(rhs)}));
}

inline Expr Expr::apply(Activation fn, Expr operand) {
    return Expr(std::make_shared<const ExprNode>(ast::Apply{std::move(fn), std::move(operand)}));
}

inline Expr Expr::diamond(Expr operand) {
    return Expr(std::make_shared<const ExprNode>(ast::Diamond{std::move(operand)}));
}

template <class T>
const T* Expr::as() const {
    return std::get_if<T>(&node_->value);
}

inline Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
inline Expr operator*(double a, Expr e) { return Expr::scale(a, std::move(e)); }

inline bool operator==(const Expr& a, const Expr& b) {
    if (a.key() == b.key()) return true;
    return std::visit(
        detail::overloaded{
            [](const ast::One&, const ast::One&) { return true; },
            [](const ast::Proj& x, const ast::Proj& y) { return x.index == y.index; },
            [](const ast::Scale& x, const ast::Scale& y) { return x.factor == y.factor && x.operand == y.operand; },
            [](const ast::Add& x, const ast::Add& y) { return x.lhs == y.lhs && x.rhs == y.rhs; },
            [](const ast::Apply& x, const ast::Apply& y) { return x.fn == y.fn && x.operand == y.operand; },
            [](const ast::Diamond& x, const ast::Diamond& y) { return x.operand == y.operand; },
            [](const auto&, const auto&) { return false; },
        },
        a.node().value, b.node().value);
}

/// Output-arity-r list of expressions over a common input arity d.
struct ExprTuple {
    std::vector<Expr> components;
    std::size_t input_arity = 0;
};

// ---------------------------------------------------------------------------
// Syntactic queries

/// Largest projection index used (0 when there are none).
inline std::size_t max_projection(const Expr& e) {
    return std::visit(detail::overloaded{
                          [](const ast::One&) -> std::size_t { return 0; },
                          [](const ast::Proj& p) { return p.index; },
                          [](const ast::Scale& s) { return max_projection(s.operand); },
                          [](const ast::Add& a) { return std::max(max_projection(a.lhs), max_projection(a.rhs)); },
                          [](const ast::Apply& a) { return max_projection(a.operand); },
                          [](const ast::Diamond& d) { return max_projection(d.operand); },
                      },
                      e.node().value);
}

/// True iff every projection P_i in e has 1 <= i <= d.
inline bool arity_check(const Expr& e, std::size_t d) { return max_projection(e) <= d; }

inline ExprTuple make_tuple(std::vector<Expr> components, std::size_t d) {
    if (components.empty()) throw ArityError("expression tuple needs at least one component");
    for (const Expr& e : components)
        if (!arity_check(e, d))
            throw ArityError("expression uses P" + std::to_string(max_projection(e)) + " but input arity is " +
                             std::to_string(d));
    return ExprTuple{std::move(components), d};
}

struct ExprClass {
    bool relu_only = true;
    bool addition_free = true;
    bool summation_free = true;
    std::vector<Activation> functions_used;

    bool uses(const Activation& f) const {
        return std::find(functions_used.begin(), functions_used.end(), f) != functions_used.end();
    }
};

inline ExprClass classify(const Expr& e) {
    ExprClass out;
    auto walk = [&out](const auto& self, const Expr& x) -> void {
        std::visit(detail::overloaded{
                       [](const ast::One&) {},
                       [](const ast::Proj&) {},
                       [&](const ast::Scale& s) { self(self, s.operand); },
                       [&](const ast::Add& a) {
                           out.addition_free = false;
                           self(self, a.lhs);
                           self(self, a.rhs);
                       },
                       [&](const ast::Apply& a) {
                           if (!a.fn.is(NamedFn::relu)) out.relu_only = false;
                           if (!out.uses(a.fn)) out.functions_used.push_back(a.fn);
                           self(self, a.operand);
                       },
                       [&](const ast::Diamond& d) {
                           out.summation_free = false;
                           self(self, d.operand);
                       },
                   },
                   x.node().value);
    };
    walk(walk, e);
    return out;
}

/// Number of nodes in the expression tree (shared subterms counted per use).
inline std::size_t tree_size(const Expr& e) {
    return std::visit(detail::overloaded{
                          [](const ast::One&) -> std::size_t { return 1; },
                          [](const ast::Proj&) -> std::size_t { return 1; },
                          [](const ast::Scale& s) { return 1 + tree_size(s.operand); },
                          [](const ast::Add& a) { return 1 + tree_size(a.lhs) + tree_size(a.rhs); },
                          [](const ast::Apply& a) { return 1 + tree_size(a.operand); },
                          [](const ast::Diamond& d) { return 1 + tree_size(d.operand); },
                      },
                      e.node().value);
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline bool prints_as_factor(const Expr& e) {
    if (e.as<ast::One>() || e.as<ast::Proj>() || e.as<ast::Apply>() || e.as<ast::Diamond>()) return true;
    const auto* s = e.as<ast::Scale>();
    return s != nullptr && s->operand.as<ast::One>() != nullptr && s->factor != 1.0;
}

inline std::string print_expr(const Expr& e);

inline std::string print_factor(const Expr& e) {
    return prints_as_factor(e) ? print_expr(e) : "(" + print_expr(e) + ")";
}

inline std::string print_expr(const Expr& e) {
    return std::visit(
        overloaded{
            [](const ast::One&) { return std::string("1"); },
            [](const ast::Proj& p) { return "P" + std::to_string(p.index); },
            [](const ast::Scale& s) {
                if (s.operand.as<ast::One>() && s.factor != 1.0) return format_real(s.factor);
                return format_real(s.factor) + "*" + print_factor(s.operand);
            },
            [](const ast::Add& a) {
                std::string rhs = a.rhs.as<ast::Add>() ? "(" + print_expr(a.rhs) + ")" : print_expr(a.rhs);
                return print_expr(a.lhs) + " + " + rhs;
            },
            [](const ast::Apply& a) {
                const auto* named = std::get_if<NamedFn>(&a.fn.repr());
                if (named == nullptr)
                    throw std::invalid_argument("activation " + describe(a.fn) + " has no MPLang surface syntax");
                return std::string(to_string(*named)) + "(" + print_expr(a.operand) + ")";
            },
            [](const ast::Diamond& d) { return "<>" + print_factor(d.operand); },
        },
        e.node().value);
}

}  // namespace detail

/// Concrete syntax accepted by parse(); parse(to_string(e)) == e.
inline std::string to_string(const Expr& e) { return detail::print_expr(e); }

}  // namespace mpnnc
