#include "anivar/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "anivar/error.hpp"

namespace anivar {

struct Expression::Node {
    enum Kind { Number, Axis, Add, Sub, Mul, Div, Pow, Neg, Call } kind = Number;
    double value = 0;
    int axis = 0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(const Vector& x) const
    {
        switch (kind) {
        case Number: return value;
        case Axis:
            if (axis >= x.size())
                fail(ErrorCode::InvalidArgument, "expression uses axis beyond point dimension");
            return x[axis];
        case Add: return args[0]->eval(x) + args[1]->eval(x);
        case Sub: return args[0]->eval(x) - args[1]->eval(x);
        case Mul: return args[0]->eval(x) * args[1]->eval(x);
        case Div: return args[0]->eval(x) / args[1]->eval(x);
        case Pow: return std::pow(args[0]->eval(x), args[1]->eval(x));
        case Neg: return -args[0]->eval(x);
        case Call: break;
        }
        double a = args[0]->eval(x);
        if (fn == "sin") return std::sin(a);
        if (fn == "cos") return std::cos(a);
        if (fn == "tan") return std::tan(a);
        if (fn == "exp") return std::exp(a);
        if (fn == "log") return std::log(a);
        if (fn == "sqrt") return std::sqrt(a);
        if (fn == "abs") return std::abs(a);
        if (fn == "floor") return std::floor(a);
        if (fn == "sign") return a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
        if (fn == "step") return a >= 0 ? 1.0 : 0.0;
        if (fn == "min" || fn == "max") {
            for (std::size_t i = 1; i < args.size(); ++i) {
                double b = args[i]->eval(x);
                a = fn == "min" ? std::min(a, b) : std::max(a, b);
            }
            return a;
        }
        return NAN;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_all()
    {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size())
            error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

    int max_axis = -1;

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& what)
    {
        fail(ErrorCode::ConfigError, "expression '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make(Node::Kind k, std::vector<NodePtr> args)
    {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->args = std::move(args);
        return n;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        while (true) {
            if (eat('+'))
                lhs = make(Node::Add, {lhs, term()});
            else if (eat('-'))
                lhs = make(Node::Sub, {lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        while (true) {
            if (eat('*'))
                lhs = make(Node::Mul, {lhs, unary()});
            else if (eat('/'))
                lhs = make(Node::Div, {lhs, unary()});
            else
                return lhs;
        }
    }

    NodePtr unary()
    {
        if (eat('-'))
            return make(Node::Neg, {unary()});
        if (eat('+'))
            return unary();
        return power();
    }

    NodePtr power()
    {
        NodePtr base = atom();
        if (eat('^'))
            return make(Node::Pow, {base, unary()});
        return base;
    }

    NodePtr atom()
    {
        skip();
        if (pos_ >= s_.size())
            error("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr n = expr();
            if (!eat(')'))
                error("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin)
                error("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (eat('(')) {
                static const char* unary_fns[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "floor", "sign", "step"};
                bool known_unary = false;
                for (const char* f : unary_fns)
                    known_unary = known_unary || name == f;
                bool variadic = name == "min" || name == "max";
                if (!known_unary && !variadic)
                    error("unknown function '" + name + "'");
                std::vector<NodePtr> args{expr()};
                if (variadic) {
                    if (!eat(','))
                        error("expected ',' in " + name);
                    do
                        args.push_back(expr());
                    while (eat(','));
                }
                if (!eat(')'))
                    error("expected ')' after arguments");
                auto n = std::make_shared<Node>();
                n->kind = Node::Call;
                n->fn = name;
                n->args = std::move(args);
                return n;
            }
            auto n = std::make_shared<Node>();
            if (name == "pi") {
                n->value = std::numbers::pi;
                return n;
            }
            if (name == "e") {
                n->value = std::numbers::e;
                return n;
            }
            int axis = -1;
            if (name == "x")
                axis = 0;
            else if (name == "y")
                axis = 1;
            else if (name == "z")
                axis = 2;
            else if (name.size() > 1 && name[0] == 'x' &&
                     name.find_first_not_of("0123456789", 1) == std::string::npos)
                axis = std::stoi(name.substr(1));
            if (axis < 0)
                error("unknown name '" + name + "'");
            n->kind = Node::Axis;
            n->axis = axis;
            max_axis = std::max(max_axis, axis);
            return n;
        }
        error("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace

Expression Expression::parse(const std::string& text)
{
    Parser p(text);
    Expression e;
    e.root_ = p.parse_all();
    e.source_ = text;
    e.max_axis_ = p.max_axis;
    return e;
}

double Expression::operator()(const Vector& x) const
{
    return root_->eval(x);
}

}  // namespace anivar
