#pragma once

#include <memory>
#include <string>

#include "anivar/dilation.hpp"

namespace anivar {

// Arithmetic over point coordinates. Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
// Names: x y z (axes 0..2), x0 x1 ..., pi, e. Functions: sin cos tan exp log sqrt abs
// floor sign step (step(t) = t >= 0 ? 1 : 0); min max take two or more arguments.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text);
    double operator()(const Vector& x) const;
    const std::string& source() const { return source_; }
    // Largest axis index referenced, -1 when constant.
    int max_axis() const { return max_axis_; }

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
    int max_axis_ = -1;
};

}  // namespace anivar
