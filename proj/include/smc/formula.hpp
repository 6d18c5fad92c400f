#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

namespace smc {

struct Steps {
    std::uint64_t k = 0;
    friend bool operator==(const Steps&, const Steps&) = default;
};

/// Time horizon, CTMC only.
struct Time {
    double t = 0.0;
    friend bool operator==(const Time&, const Time&) = default;
};

using Bound = std::variant<Steps, Time>;

struct Formula;

/// Formula nodes are immutable and shared; equality is structural.
using FormulaPtr = std::shared_ptr<const Formula>;

struct PathFormula {
    enum class Kind { Next, Until };

    Kind kind = Kind::Next;
    FormulaPtr lhs;  // Until only
    FormulaPtr rhs;  // Next operand, or Until right operand
    Bound bound = Steps{0};
    /// Set only by G<=k desugaring: !(true U<=k !phi).
    bool negated = false;
};

struct TrueNode {};
struct FalseNode {};
struct AtomNode {
    std::string name;
};
struct NotNode {
    FormulaPtr operand;
};
struct AndNode {
    FormulaPtr lhs, rhs;
};
struct OrNode {
    FormulaPtr lhs, rhs;
};
struct ProbNode {
    double theta = 0.0;
    PathFormula path;
    int node_id = 0;
};

struct Formula {
    std::variant<TrueNode, FalseNode, AtomNode, NotNode, AndNode, OrNode, ProbNode> node;
};

bool operator==(const Formula& a, const Formula& b);
bool operator==(const PathFormula& a, const PathFormula& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

namespace fml {

FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr atom(std::string name);
FormulaPtr negation(FormulaPtr f);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr prob(double theta, PathFormula path, int node_id);

PathFormula next(FormulaPtr f);
PathFormula until(FormulaPtr f, FormulaPtr g, Bound bound);
/// F<=b g == true U<=b g
PathFormula eventually(FormulaPtr g, Bound bound);
/// G<=b f == !(F<=b !f)
PathFormula globally(FormulaPtr f, Bound bound);

}  // namespace fml

bool contains_prob(const Formula& f);
bool contains_prob(const PathFormula& p);

/// Number of Prob operators on the longest root-to-leaf chain.
int prob_depth(const Formula& f);

}  // namespace smc
