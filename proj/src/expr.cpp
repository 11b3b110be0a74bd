#include "lcd/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace lcd::expr {

SyntaxError::SyntaxError(const std::string& msg, int line_, int column_,
                         std::vector<std::string> expected_)
    : Error("syntax error at line " + std::to_string(line_) + ", column " +
            std::to_string(column_) + ": " + msg),
      line(line_),
      column(column_),
      expected(std::move(expected_)) {}

namespace {

struct FunctionInfo {
  const char* name;
  int arity;
};
constexpr FunctionInfo kFunctions[] = {
    {"sin", 1}, {"cos", 1}, {"sinh", 1}, {"cosh", 1}, {"exp", 1},   {"log", 1},
    {"sqrt", 1}, {"abs", 1}, {"atan2", 2}, {"pow", 2},
};

Expression make(Kind k, double value, std::string name, std::vector<Expression> args) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->value = value;
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : src_(s) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) {
      t.type = Tok::End;
      return t;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      t.type = Tok::Ident;
      t.text = src_.substr(b, pos_ - b);
      return t;
    }
    advance();
    t.text = std::string(1, c);
    switch (c) {
      case '+': t.type = Tok::Plus; break;
      case '-': t.type = Tok::Minus; break;
      case '*': t.type = Tok::Star; break;
      case '/': t.type = Tok::Slash; break;
      case '^': t.type = Tok::Caret; break;
      case '(': t.type = Tok::LParen; break;
      case ')': t.type = Tok::RParen; break;
      case ',': t.type = Tok::Comma; break;
      default:
        throw SyntaxError("unexpected character '" + t.text + "'", t.line, t.column, {});
    }
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }
  Token lex_number(Token t) {
    std::size_t b = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    t.text = src_.substr(b, pos_ - b);
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      throw SyntaxError("malformed number '" + t.text + "'", t.line, t.column, {"number"});
    t.type = Tok::Number;
    return t;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// Recursive descent:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := primary ('^' unary)?
class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { cur_ = lex_.next(); }

  Expression parse_all() {
    Expression e = expr();
    if (cur_.type != Tok::End)
      fail("unexpected token '" + cur_.text + "'", {"operator", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
    throw SyntaxError(msg, cur_.line, cur_.column, std::move(expected));
  }
  void eat() { cur_ = lex_.next(); }

  Expression expr() {
    Expression e = term();
    while (cur_.type == Tok::Plus || cur_.type == Tok::Minus) {
      Kind k = cur_.type == Tok::Plus ? Kind::Add : Kind::Sub;
      eat();
      e = binary(k, e, term());
    }
    return e;
  }
  Expression term() {
    Expression e = unary();
    while (cur_.type == Tok::Star || cur_.type == Tok::Slash) {
      Kind k = cur_.type == Tok::Star ? Kind::Mul : Kind::Div;
      eat();
      e = binary(k, e, unary());
    }
    return e;
  }
  Expression unary() {
    if (cur_.type == Tok::Minus) {
      eat();
      return unary_neg(unary());
    }
    return power();
  }
  Expression power() {
    Expression base = primary();
    if (cur_.type == Tok::Caret) {
      eat();
      return binary(Kind::Pow, base, unary());
    }
    return base;
  }
  Expression primary() {
    switch (cur_.type) {
      case Tok::Number: {
        double v = cur_.number;
        eat();
        return number(v);
      }
      case Tok::Ident: {
        Token id = cur_;
        eat();
        if (cur_.type == Tok::LParen) {
          if (!is_function(id.text))
            throw SyntaxError("unknown function '" + id.text + "'", id.line, id.column,
                              {"function name"});
          eat();
          std::vector<Expression> args;
          args.push_back(expr());
          while (cur_.type == Tok::Comma) {
            eat();
            args.push_back(expr());
          }
          if (cur_.type != Tok::RParen) fail("expected ')'", {")", ","});
          eat();
          if (static_cast<int>(args.size()) != function_arity(id.text))
            throw SyntaxError("function '" + id.text + "' expects " +
                                  std::to_string(function_arity(id.text)) + " argument(s)",
                              id.line, id.column, {});
          return call(id.text, std::move(args));
        }
        if (is_function(id.text))
          throw SyntaxError("function '" + id.text + "' used without arguments", id.line,
                            id.column, {"("});
        return variable(id.text);
      }
      case Tok::LParen: {
        eat();
        Expression e = expr();
        if (cur_.type != Tok::RParen) fail("expected ')'", {")"});
        eat();
        return e;
      }
      default:
        fail("expected expression", {"number", "identifier", "(", "-"});
    }
  }

  Lexer lex_;
  Token cur_;
};

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

void render_to(const Node& n, std::string& out);

void render_child(const Node& c, bool parens, std::string& out) {
  if (parens) out += '(';
  render_to(c, out);
  if (parens) out += ')';
}

void render_to(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number: {
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
      (void)ec;
      out.append(buf, p);
      return;
    }
    case Kind::Variable: out += n.name; return;
    case Kind::Neg:
      out += '-';
      render_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case Kind::Pow:
      render_child(*n.args[0], precedence(*n.args[0]) < 5, out);
      out += '^';
      render_child(*n.args[1], precedence(*n.args[1]) < 3, out);
      return;
    case Kind::Call:
      out += n.name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        render_to(*n.args[i], out);
      }
      out += ')';
      return;
    default: {
      const int p = precedence(n);
      render_child(*n.args[0], precedence(*n.args[0]) < p, out);
      out += n.kind == Kind::Add ? '+' : n.kind == Kind::Sub ? '-' : n.kind == Kind::Mul ? '*' : '/';
      render_child(*n.args[1], precedence(*n.args[1]) <= p, out);
    }
  }
}

void collect(const Node& n, std::set<std::string>& out) {
  if (n.kind == Kind::Variable) out.insert(n.name);
  for (auto& a : n.args) collect(*a, out);
}

double checked(double r, const char* what) {
  if (!std::isfinite(r)) throw DomainError(std::string("non-finite result in ") + what);
  return r;
}

}  // namespace

Expression number(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw Error("expression literals must be finite and >= 0");
  return make(Kind::Number, v, {}, {});
}
Expression variable(std::string name) { return make(Kind::Variable, 0.0, std::move(name), {}); }
Expression unary_neg(Expression a) { return make(Kind::Neg, 0.0, {}, {std::move(a)}); }
Expression binary(Kind k, Expression a, Expression b) {
  return make(k, 0.0, {}, {std::move(a), std::move(b)});
}
Expression call(std::string fn, std::vector<Expression> args) {
  return make(Kind::Call, 0.0, std::move(fn), std::move(args));
}

bool is_function(const std::string& name) { return function_arity(name) > 0; }

int function_arity(const std::string& name) {
  for (auto& f : kFunctions)
    if (name == f.name) return f.arity;
  return 0;
}

Expression parse(const std::string& source) { return Parser(source).parse_all(); }

std::string render(const Expression& e) {
  std::string out;
  render_to(*e, out);
  return out;
}

bool structurally_equal(const Expression& a, const Expression& b) {
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  if (a->kind == Kind::Number && a->value != b->value) return false;
  if ((a->kind == Kind::Variable || a->kind == Kind::Call) && a->name != b->name) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  return true;
}

std::vector<std::string> free_variables(const Expression& e) {
  std::set<std::string> s;
  collect(*e, s);
  return {s.begin(), s.end()};
}

int depth(const Expression& e) {
  int d = 0;
  for (auto& a : e->args) d = std::max(d, depth(a));
  return d + 1;
}

double apply(const Node& n, std::span<const double> a) {
  switch (n.kind) {
    case Kind::Neg: return -a[0];
    case Kind::Add: return checked(a[0] + a[1], "+");
    case Kind::Sub: return checked(a[0] - a[1], "-");
    case Kind::Mul: return checked(a[0] * a[1], "*");
    case Kind::Div:
      if (a[1] == 0.0) throw DomainError("division by zero");
      return checked(a[0] / a[1], "/");
    case Kind::Pow:
      if (a[0] == 0.0 && a[1] < 0.0) throw DomainError("0 raised to a negative power");
      return checked(std::pow(a[0], a[1]), "^");
    case Kind::Call: break;
    default: throw Error("apply: not an operator node");
  }
  const std::string& f = n.name;
  const double x = a[0];
  if (f == "sin") return std::sin(x);
  if (f == "cos") return std::cos(x);
  if (f == "sinh") return checked(std::sinh(x), "sinh");
  if (f == "cosh") return checked(std::cosh(x), "cosh");
  if (f == "exp") return checked(std::exp(x), "exp");
  if (f == "log") {
    if (x <= 0.0) throw DomainError("log of non-positive value");
    return std::log(x);
  }
  if (f == "sqrt") {
    if (x < 0.0) throw DomainError("sqrt of negative value");
    return std::sqrt(x);
  }
  if (f == "abs") return std::abs(x);
  if (f == "atan2") return std::atan2(x, a[1]);
  if (f == "pow") {
    if (x == 0.0 && a[1] < 0.0) throw DomainError("0 raised to a negative power");
    return checked(std::pow(x, a[1]), "pow");
  }
  throw Error("unknown function " + f);
}

namespace {
double eval_ctx(const Node& n, const EvalContext& ctx) {
  if (n.kind == Kind::Number) return n.value;
  if (n.kind == Kind::Variable) {
    auto it = ctx.find(n.name);
    if (it == ctx.end()) throw DomainError("unbound variable '" + n.name + "'");
    return it->second;
  }
  double args[2];
  for (std::size_t i = 0; i < n.args.size(); ++i) args[i] = eval_ctx(*n.args[i], ctx);
  return apply(n, std::span<const double>(args, n.args.size()));
}
}  // namespace

double evaluate(const Expression& e, const EvalContext& ctx) { return eval_ctx(*e, ctx); }

Compiled::Compiled(Expression e, const std::vector<std::string>& slots) : expr_(std::move(e)) {
  auto build = [&](auto&& self, const Node& n) -> int {
    Op op{&n, -1, {}};
    if (n.kind == Kind::Variable) {
      auto it = std::find(slots.begin(), slots.end(), n.name);
      if (it == slots.end()) throw DomainError("unbound variable '" + n.name + "'");
      op.slot = static_cast<int>(it - slots.begin());
    }
    for (auto& a : n.args) op.children.push_back(self(self, *a));
    ops_.push_back(std::move(op));
    return static_cast<int>(ops_.size()) - 1;
  };
  root_ = build(build, *expr_);
}

double Compiled::eval(int i, std::span<const double> values) const {
  const Op& op = ops_[i];
  if (op.node->kind == Kind::Number) return op.node->value;
  if (op.slot >= 0) return values[op.slot];
  double args[2];
  for (std::size_t k = 0; k < op.children.size(); ++k) args[k] = eval(op.children[k], values);
  return apply(*op.node, std::span<const double>(args, op.children.size()));
}

double Compiled::operator()(std::span<const double> values) const {
  if (root_ < 0) throw Error("empty compiled expression");
  return eval(root_, values);
}

}  // namespace lcd::expr
