#include "affine/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace affine {

Expr Expr::coord(int index_1_based) {
    if (index_1_based < 1) throw std::invalid_argument("coordinate index must be >= 1");
    auto n = std::make_shared<ExprNode>();
    n->op = Op::coord;
    n->index = index_1_based;
    return Expr(n);
}

Expr make_unary(Op op, const Expr& a) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = a.n_;
    return Expr(n);
}

Expr make_binary(Op op, const Expr& a, const Expr& b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = a.n_;
    n->b = b.n_;
    return Expr(n);
}

Expr pow(const Expr& a, double c) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::power;
    n->value = c;
    n->a = a.n_;
    return Expr(n);
}

namespace {

struct Token {
    enum Kind { lparen, rparen, symbol, number, end } kind;
    std::string text;
    double value = 0.0;
    size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ >= s_.size()) return {Token::end, "", 0.0, i_};
        size_t start = i_;
        char c = s_[i_];
        if (c == '(') { ++i_; return {Token::lparen, "(", 0.0, start}; }
        if (c == ')') { ++i_; return {Token::rparen, ")", 0.0, start}; }
        size_t j = i_;
        while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) && s_[j] != '(' && s_[j] != ')') ++j;
        std::string word = s_.substr(i_, j - i_);
        i_ = j;
        char* endp = nullptr;
        double v = std::strtod(word.c_str(), &endp);
        if (endp && *endp == '\0' && endp != word.c_str()) return {Token::number, word, v, start};
        return {Token::symbol, word, 0.0, start};
    }

private:
    const std::string& s_;
    size_t i_ = 0;
};

[[noreturn]] void fail(const std::string& msg, size_t pos) {
    std::ostringstream os;
    os << "expression parse error at offset " << pos << ": " << msg;
    throw std::runtime_error(os.str());
}

Expr parse_atom(const Token& t) {
    if (t.kind == Token::number) return Expr::constant(t.value);
    if (t.kind == Token::symbol) {
        if (t.text.size() >= 2 && t.text[0] == 'x') {
            char* endp = nullptr;
            long idx = std::strtol(t.text.c_str() + 1, &endp, 10);
            if (endp && *endp == '\0' && idx >= 1) return Expr::coord(static_cast<int>(idx));
        }
        if (t.text == "pi") return Expr::constant(3.14159265358979323846);
        fail("unknown symbol '" + t.text + "'", t.pos);
    }
    fail("expected atom", t.pos);
}

Expr parse_form(Lexer& lex, const Token& first);

Expr parse_next(Lexer& lex) {
    Token t = lex.next();
    if (t.kind == Token::lparen) return parse_form(lex, t);
    if (t.kind == Token::end) fail("unexpected end of input", t.pos);
    if (t.kind == Token::rparen) fail("unexpected ')'", t.pos);
    return parse_atom(t);
}

Expr parse_form(Lexer& lex, const Token& open) {
    Token head = lex.next();
    if (head.kind != Token::symbol) fail("expected operator after '('", head.pos);
    std::vector<Expr> args;
    std::vector<Token> arg_tokens;
    for (;;) {
        Token t = lex.next();
        if (t.kind == Token::rparen) break;
        if (t.kind == Token::end) fail("missing ')'", open.pos);
        if (t.kind == Token::lparen) {
            args.push_back(parse_form(lex, t));
            arg_tokens.push_back(t);
        } else {
            args.push_back(parse_atom(t));
            arg_tokens.push_back(t);
        }
    }
    const std::string& op = head.text;
    auto need = [&](size_t n) {
        if (args.size() != n)
            fail("operator '" + op + "' expects " + std::to_string(n) + " arguments, got " +
                     std::to_string(args.size()),
                 head.pos);
    };
    if (op == "+" || op == "*") {
        if (args.empty()) fail("operator '" + op + "' needs at least one argument", head.pos);
        Expr acc = args[0];
        for (size_t i = 1; i < args.size(); ++i)
            acc = (op == "+") ? acc + args[i] : acc * args[i];
        return acc;
    }
    if (op == "-") {
        if (args.size() == 1) return -args[0];
        need(2);
        return args[0] - args[1];
    }
    if (op == "/") { need(2); return args[0] / args[1]; }
    if (op == "neg") { need(1); return -args[0]; }
    if (op == "sin") { need(1); return sin(args[0]); }
    if (op == "cos") { need(1); return cos(args[0]); }
    if (op == "exp") { need(1); return exp(args[0]); }
    if (op == "pow" || op == "^") {
        need(2);
        if (!args[1].is_constant()) fail("'pow' exponent must be a constant", arg_tokens[1].pos);
        return pow(args[0], args[1].constant_value());
    }
    fail("unknown operator '" + op + "'", head.pos);
}

}  // namespace

Expr parse_expr(const std::string& text) {
    Lexer lex(text);
    Expr e = parse_next(lex);
    Token t = lex.next();
    if (t.kind != Token::end) fail("trailing tokens after expression", t.pos);
    return e;
}

std::string Expr::str() const {
    const ExprNode& n = *n_;
    std::ostringstream os;
    os.precision(17);
    switch (n.op) {
        case Op::constant: os << n.value; break;
        case Op::coord: os << "x" << n.index; break;
        case Op::add: os << "(+ " << Expr(n.a).str() << " " << Expr(n.b).str() << ")"; break;
        case Op::sub: os << "(- " << Expr(n.a).str() << " " << Expr(n.b).str() << ")"; break;
        case Op::neg: os << "(neg " << Expr(n.a).str() << ")"; break;
        case Op::mul: os << "(* " << Expr(n.a).str() << " " << Expr(n.b).str() << ")"; break;
        case Op::div: os << "(/ " << Expr(n.a).str() << " " << Expr(n.b).str() << ")"; break;
        case Op::sine: os << "(sin " << Expr(n.a).str() << ")"; break;
        case Op::cosine: os << "(cos " << Expr(n.a).str() << ")"; break;
        case Op::expn: os << "(exp " << Expr(n.a).str() << ")"; break;
        case Op::power: os << "(pow " << Expr(n.a).str() << " " << n.value << ")"; break;
    }
    return os.str();
}

}  // namespace affine
