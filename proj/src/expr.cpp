#include "saferoa/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace saferoa {

int ExprGraph::push(ExprNode n) {
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

int ExprGraph::check(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("ExprGraph: child id out of range");
  return id;
}

int ExprGraph::var(int index) {
  if (index < 0 || index >= dim_)
    throw std::invalid_argument("ExprGraph: variable index " + std::to_string(index + 1) +
                                " outside dimension " + std::to_string(dim_));
  return push({Op::Var, -1, -1, 0.0, index});
}

int ExprGraph::constant(double v) { return push({Op::Const, -1, -1, v, -1}); }

namespace {
bool is_const(const ExprNode& n, double v) { return n.op == Op::Const && n.value == v; }
}  // namespace

int ExprGraph::add(int a, int b) {
  check(a);
  check(b);
  const ExprNode &na = nodes_[a], &nb = nodes_[b];
  if (na.op == Op::Const && nb.op == Op::Const) return constant(na.value + nb.value);
  if (is_const(na, 0.0)) return b;
  if (is_const(nb, 0.0)) return a;
  return push({Op::Add, a, b, 0.0, -1});
}

int ExprGraph::sub(int a, int b) {
  check(a);
  check(b);
  const ExprNode &na = nodes_[a], &nb = nodes_[b];
  if (na.op == Op::Const && nb.op == Op::Const) return constant(na.value - nb.value);
  if (is_const(nb, 0.0)) return a;
  if (is_const(na, 0.0)) return neg(b);
  return push({Op::Sub, a, b, 0.0, -1});
}

int ExprGraph::mul(int a, int b) {
  check(a);
  check(b);
  const ExprNode &na = nodes_[a], &nb = nodes_[b];
  if (na.op == Op::Const && nb.op == Op::Const) return constant(na.value * nb.value);
  if (is_const(na, 0.0) || is_const(nb, 0.0)) return constant(0.0);
  if (is_const(na, 1.0)) return b;
  if (is_const(nb, 1.0)) return a;
  return push({Op::Mul, a, b, 0.0, -1});
}

int ExprGraph::neg(int a) {
  check(a);
  if (nodes_[a].op == Op::Const) return constant(-nodes_[a].value);
  return push({Op::Neg, a, -1, 0.0, -1});
}

int ExprGraph::sin(int a) {
  check(a);
  if (nodes_[a].op == Op::Const) return constant(std::sin(nodes_[a].value));
  return push({Op::Sin, a, -1, 0.0, -1});
}

int ExprGraph::cos(int a) {
  check(a);
  if (nodes_[a].op == Op::Const) return constant(std::cos(nodes_[a].value));
  return push({Op::Cos, a, -1, 0.0, -1});
}

int ExprGraph::exp(int a) {
  check(a);
  if (nodes_[a].op == Op::Const) return constant(std::exp(nodes_[a].value));
  return push({Op::Exp, a, -1, 0.0, -1});
}

int ExprGraph::square(int a) {
  check(a);
  if (nodes_[a].op == Op::Const) return constant(nodes_[a].value * nodes_[a].value);
  return push({Op::Square, a, -1, 0.0, -1});
}

int ExprGraph::relu(int a) {
  check(a);
  if (nodes_[a].op == Op::Const) return constant(std::max(nodes_[a].value, 0.0));
  return push({Op::Relu, a, -1, 0.0, -1});
}

void ExprGraph::set_output(int id) { output_ = check(id); }

double ExprGraph::eval(const Eigen::VectorXd& x) const {
  if (output_ < 0) throw std::logic_error("ExprGraph: no output set");
  if (x.size() != dim_)
    throw std::invalid_argument("ExprGraph: input dimension " + std::to_string(x.size()) +
                                " != " + std::to_string(dim_));
  std::vector<double> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    switch (n.op) {
      case Op::Var: v[i] = x[n.var]; break;
      case Op::Const: v[i] = n.value; break;
      case Op::Add: v[i] = v[n.a] + v[n.b]; break;
      case Op::Sub: v[i] = v[n.a] - v[n.b]; break;
      case Op::Mul: v[i] = v[n.a] * v[n.b]; break;
      case Op::Neg: v[i] = -v[n.a]; break;
      case Op::Sin: v[i] = std::sin(v[n.a]); break;
      case Op::Cos: v[i] = std::cos(v[n.a]); break;
      case Op::Exp: v[i] = std::exp(v[n.a]); break;
      case Op::Square: v[i] = v[n.a] * v[n.a]; break;
      case Op::Relu: v[i] = std::max(v[n.a], 0.0); break;
    }
  }
  return v[output_];
}

Interval ExprGraph::eval(const Box& box) const {
  if (output_ < 0) throw std::logic_error("ExprGraph: no output set");
  if (box.dim() != dim_)
    throw std::invalid_argument("ExprGraph: box dimension mismatch");
  std::vector<Interval> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    switch (n.op) {
      case Op::Var: v[i] = box.axis(n.var); break;
      case Op::Const: v[i] = Interval::point(n.value); break;
      case Op::Add: v[i] = v[n.a] + v[n.b]; break;
      case Op::Sub: v[i] = v[n.a] - v[n.b]; break;
      case Op::Mul: v[i] = v[n.a] * v[n.b]; break;
      case Op::Neg: v[i] = -v[n.a]; break;
      case Op::Sin: v[i] = saferoa::sin(v[n.a]); break;
      case Op::Cos: v[i] = saferoa::cos(v[n.a]); break;
      case Op::Exp: v[i] = saferoa::exp(v[n.a]); break;
      case Op::Square: v[i] = sqr(v[n.a]); break;
      case Op::Relu: v[i] = saferoa::relu(v[n.a]); break;
    }
  }
  return v[output_];
}

ExprGraph ExprGraph::derivative(int index) const {
  if (output_ < 0) throw std::logic_error("ExprGraph: no output set");
  if (index < 0 || index >= dim_) throw std::invalid_argument("ExprGraph: derivative index out of range");
  ExprGraph g(dim_);
  g.nodes_ = nodes_;  // originals keep their ids; derivative nodes are appended
  std::vector<int> d(nodes_.size(), -1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    const int ia = static_cast<int>(i);
    switch (n.op) {
      case Op::Var: d[i] = g.constant(n.var == index ? 1.0 : 0.0); break;
      case Op::Const: d[i] = g.constant(0.0); break;
      case Op::Add: d[i] = g.add(d[n.a], d[n.b]); break;
      case Op::Sub: d[i] = g.sub(d[n.a], d[n.b]); break;
      case Op::Mul: d[i] = g.add(g.mul(d[n.a], n.b), g.mul(n.a, d[n.b])); break;
      case Op::Neg: d[i] = g.neg(d[n.a]); break;
      case Op::Sin: d[i] = g.mul(g.cos(n.a), d[n.a]); break;
      case Op::Cos: d[i] = g.neg(g.mul(g.sin(n.a), d[n.a])); break;
      case Op::Exp: d[i] = g.mul(ia, d[n.a]); break;
      case Op::Square: d[i] = g.mul(g.mul(g.constant(2.0), n.a), d[n.a]); break;
      case Op::Relu:
        throw std::runtime_error("ExprGraph: relu node is not differentiable");
    }
  }
  g.set_output(d[output_]);
  return g;
}

bool ExprGraph::contains_op(Op op) const {
  for (const ExprNode& n : nodes_)
    if (n.op == op) return true;
  return false;
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == ')') {
      if (!cur.empty()) tokens.push_back(cur), cur.clear();
      tokens.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) tokens.push_back(cur), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

class PrefixParser {
 public:
  PrefixParser(std::vector<std::string> tokens, ExprGraph& g) : tokens_(std::move(tokens)), g_(g) {}

  int parse_all() {
    const int id = parse_expr();
    if (pos_ != tokens_.size()) fail("trailing tokens after expression");
    return id;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression parse error at token " + std::to_string(pos_) + ": " + msg);
  }

  const std::string& next() {
    if (pos_ >= tokens_.size()) fail("unexpected end of input");
    return tokens_[pos_++];
  }

  int parse_atom(const std::string& tok) {
    if (tok.size() >= 2 && tok[0] == 'x') {
      char* end = nullptr;
      const long idx = std::strtol(tok.c_str() + 1, &end, 10);
      if (*end == '\0' && idx >= 1) return g_.var(static_cast<int>(idx) - 1);
    }
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail("unknown atom '" + tok + "'");
    return g_.constant(v);
  }

  int parse_expr() {
    const std::string& tok = next();
    if (tok != "(") return parse_atom(tok);
    const std::string op = next();
    int id;
    if (op == "add" || op == "sub" || op == "mul") {
      const int a = parse_expr();
      const int b = parse_expr();
      id = op == "add" ? g_.add(a, b) : op == "sub" ? g_.sub(a, b) : g_.mul(a, b);
    } else if (op == "neg" || op == "sin" || op == "cos" || op == "exp" || op == "square" ||
               op == "relu") {
      const int a = parse_expr();
      id = op == "neg"      ? g_.neg(a)
           : op == "sin"    ? g_.sin(a)
           : op == "cos"    ? g_.cos(a)
           : op == "exp"    ? g_.exp(a)
           : op == "square" ? g_.square(a)
                            : g_.relu(a);
    } else {
      fail("unknown operator '" + op + "'");
    }
    if (next() != ")") fail("expected ')'");
    return id;
  }

  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  ExprGraph& g_;
};

}  // namespace

ExprGraph ExprGraph::parse(const std::string& text, int dim) {
  ExprGraph g(dim);
  PrefixParser p(tokenize(text), g);
  g.set_output(p.parse_all());
  return g;
}

std::string ExprGraph::to_string() const {
  if (output_ < 0) return "<unset>";
  std::vector<std::string> s(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    std::ostringstream os;
    switch (n.op) {
      case Op::Var: os << "x" << (n.var + 1); break;
      case Op::Const: os << n.value; break;
      case Op::Add: os << "(add " << s[n.a] << " " << s[n.b] << ")"; break;
      case Op::Sub: os << "(sub " << s[n.a] << " " << s[n.b] << ")"; break;
      case Op::Mul: os << "(mul " << s[n.a] << " " << s[n.b] << ")"; break;
      case Op::Neg: os << "(neg " << s[n.a] << ")"; break;
      case Op::Sin: os << "(sin " << s[n.a] << ")"; break;
      case Op::Cos: os << "(cos " << s[n.a] << ")"; break;
      case Op::Exp: os << "(exp " << s[n.a] << ")"; break;
      case Op::Square: os << "(square " << s[n.a] << ")"; break;
      case Op::Relu: os << "(relu " << s[n.a] << ")"; break;
    }
    s[i] = os.str();
  }
  return s[output_];
}

}  // namespace saferoa
