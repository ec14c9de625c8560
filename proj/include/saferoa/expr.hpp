#pragma once

#include "saferoa/interval.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace saferoa {

enum class Op : std::uint8_t {
  Var,
  Const,
  Add,
  Sub,
  Mul,
  Neg,
  Sin,
  Cos,
  Exp,
  Square,
  Relu,
};

struct ExprNode {
  Op op;
  int a = -1;  // first child
  int b = -1;  // second child (binary ops)
  double value = 0.0;
  int var = -1;
};

/// A scalar expression over variables x1..xn stored as an append-only DAG.
/// Children always precede parents, so a single forward sweep evaluates the
/// graph in points or in intervals. Differentiation produces a new graph.
///
/// Build with the node factories, then seal with set_output():
///   ExprGraph g(2);
///   g.set_output(g.sub(g.var(0), g.mul(g.constant(0.1), g.var(1))));
class ExprGraph {
 public:
  ExprGraph() = default;
  explicit ExprGraph(int dim) : dim_(dim) {}

  int var(int index);
  int constant(double v);
  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);
  int neg(int a);
  int sin(int a);
  int cos(int a);
  int exp(int a);
  int square(int a);
  int relu(int a);

  void set_output(int id);
  int output() const { return output_; }
  int dim() const { return dim_; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<ExprNode>& nodes() const { return nodes_; }

  double eval(const Eigen::VectorXd& x) const;
  Interval eval(const Box& box) const;

  /// Exact partial derivative d(this)/d(x_index) as a new graph.
  /// Throws if the graph contains a Relu node (not differentiable).
  ExprGraph derivative(int index) const;

  bool contains_op(Op op) const;

  /// Parse one prefix-notation expression, e.g.
  ///   (add x2 (mul 0.1 (sub (square x1) 1)))
  /// Atoms are x1..xn and numeric literals; add/sub/mul are binary,
  /// neg/sin/cos/exp/square/relu unary.
  static ExprGraph parse(const std::string& text, int dim);

  std::string to_string() const;

 private:
  int push(ExprNode n);
  int check(int id) const;

  std::vector<ExprNode> nodes_;
  int output_ = -1;
  int dim_ = 0;
};

}  // namespace saferoa
