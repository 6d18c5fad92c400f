#include "smc/formula.hpp"

#include <algorithm>

namespace smc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

FormulaPtr make(auto node)
{
    return std::make_shared<const Formula>(Formula{std::move(node)});
}

}  // namespace

bool equal(const FormulaPtr& a, const FormulaPtr& b)
{
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool operator==(const PathFormula& a, const PathFormula& b)
{
    return a.kind == b.kind && a.negated == b.negated && a.bound == b.bound &&
           equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
}

bool operator==(const Formula& a, const Formula& b)
{
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        overloaded{
            [](const TrueNode&) { return true; },
            [](const FalseNode&) { return true; },
            [&](const AtomNode& x) { return x.name == std::get<AtomNode>(b.node).name; },
            [&](const NotNode& x) { return equal(x.operand, std::get<NotNode>(b.node).operand); },
            [&](const AndNode& x) {
                const auto& y = std::get<AndNode>(b.node);
                return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
            },
            [&](const OrNode& x) {
                const auto& y = std::get<OrNode>(b.node);
                return equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
            },
            [&](const ProbNode& x) {
                const auto& y = std::get<ProbNode>(b.node);
                return x.theta == y.theta && x.node_id == y.node_id && x.path == y.path;
            },
        },
        a.node);
}

namespace fml {

FormulaPtr truth() { return make(TrueNode{}); }
FormulaPtr falsity() { return make(FalseNode{}); }
FormulaPtr atom(std::string name) { return make(AtomNode{std::move(name)}); }
FormulaPtr negation(FormulaPtr f) { return make(NotNode{std::move(f)}); }
FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return make(AndNode{std::move(a), std::move(b)}); }
FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return make(OrNode{std::move(a), std::move(b)}); }

FormulaPtr prob(double theta, PathFormula path, int node_id)
{
    return make(ProbNode{theta, std::move(path), node_id});
}

PathFormula next(FormulaPtr f)
{
    return PathFormula{PathFormula::Kind::Next, nullptr, std::move(f), Steps{1}, false};
}

PathFormula until(FormulaPtr f, FormulaPtr g, Bound bound)
{
    return PathFormula{PathFormula::Kind::Until, std::move(f), std::move(g), bound, false};
}

PathFormula eventually(FormulaPtr g, Bound bound)
{
    return until(truth(), std::move(g), bound);
}

PathFormula globally(FormulaPtr f, Bound bound)
{
    auto p = eventually(negation(std::move(f)), bound);
    p.negated = true;
    return p;
}

}  // namespace fml

bool contains_prob(const PathFormula& p)
{
    return (p.lhs && contains_prob(*p.lhs)) || (p.rhs && contains_prob(*p.rhs));
}

bool contains_prob(const Formula& f)
{
    return std::visit(overloaded{
                          [](const NotNode& n) { return contains_prob(*n.operand); },
                          [](const AndNode& n) { return contains_prob(*n.lhs) || contains_prob(*n.rhs); },
                          [](const OrNode& n) { return contains_prob(*n.lhs) || contains_prob(*n.rhs); },
                          [](const ProbNode&) { return true; },
                          [](const auto&) { return false; },
                      },
                      f.node);
}

int prob_depth(const Formula& f)
{
    return std::visit(overloaded{
                          [](const NotNode& n) { return prob_depth(*n.operand); },
                          [](const AndNode& n) { return std::max(prob_depth(*n.lhs), prob_depth(*n.rhs)); },
                          [](const OrNode& n) { return std::max(prob_depth(*n.lhs), prob_depth(*n.rhs)); },
                          [](const ProbNode& n) {
                              int inner = 0;
                              if (n.path.lhs) inner = std::max(inner, prob_depth(*n.path.lhs));
                              if (n.path.rhs) inner = std::max(inner, prob_depth(*n.path.rhs));
                              return 1 + inner;
                          },
                          [](const auto&) { return 0; },
                      },
                      f.node);
}

}  // namespace smc
