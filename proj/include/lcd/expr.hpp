#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lcd/numerics.hpp"

namespace lcd::expr {

enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node;
using Expression = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  double value = 0.0;  // Number
  std::string name;    // Variable / Call
  std::vector<Expression> args;
};

struct SyntaxError : Error {
  SyntaxError(const std::string& msg, int line, int column, std::vector<std::string> expected);
  int line, column;
  std::vector<std::string> expected;
};

using EvalContext = std::map<std::string, double>;

Expression number(double v);
Expression variable(std::string name);
Expression unary_neg(Expression a);
Expression binary(Kind k, Expression a, Expression b);
Expression call(std::string fn, std::vector<Expression> args);

bool is_function(const std::string& name);
int function_arity(const std::string& name);

Expression parse(const std::string& source);
std::string render(const Expression& e);
bool structurally_equal(const Expression& a, const Expression& b);
std::vector<std::string> free_variables(const Expression& e);
int depth(const Expression& e);

double evaluate(const Expression& e, const EvalContext& ctx);

// Applies one operator node to already-evaluated arguments (with domain checks).
double apply(const Node& n, std::span<const double> args);

// Expression with its variables resolved to slots; evaluation takes a flat value array.
class Compiled {
 public:
  Compiled() = default;
  Compiled(Expression e, const std::vector<std::string>& slots);
  double operator()(std::span<const double> values) const;
  const Expression& source() const { return expr_; }
  bool empty() const { return !expr_; }

 private:
  struct Op {
    const Node* node;
    int slot;
    std::vector<int> children;
  };
  double eval(int i, std::span<const double> values) const;
  Expression expr_;
  std::vector<Op> ops_;
  int root_ = -1;
};

}  // namespace lcd::expr
