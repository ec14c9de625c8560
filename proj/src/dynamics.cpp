#include "saferoa/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace saferoa {

SystemDef make_system(std::string name, double dt, std::vector<ExprGraph> components, Box domain,
                      std::optional<ExprGraph> safety) {
  const int n = static_cast<int>(components.size());
  if (n == 0) throw std::invalid_argument("system: needs at least one component");
  if (domain.dim() != n) throw std::invalid_argument("system: domain dimension mismatch");
  for (const ExprGraph& g : components)
    if (g.dim() != n) throw std::invalid_argument("system: component dimension mismatch");
  if (safety && safety->dim() != n)
    throw std::invalid_argument("system: safety function dimension mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(domain.lo[i] < domain.hi[i]))
      throw std::invalid_argument("system: domain must have positive width");
    if (!(domain.lo[i] < 0.0 && domain.hi[i] > 0.0))
      throw std::invalid_argument("system: origin must be interior to the domain");
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double fi0 = components[i].eval(zero);
    if (std::abs(fi0) > 1e-12)
      throw std::invalid_argument("system: origin is not an equilibrium (f_" +
                                  std::to_string(i + 1) + "(0) = " + std::to_string(fi0) + ")");
  }
  SystemDef sys;
  sys.name = std::move(name);
  sys.n = n;
  sys.dt = dt;
  sys.components = std::move(components);
  sys.domain = std::move(domain);
  sys.safety = std::move(safety);
  return sys;
}

namespace {

Eigen::Vector2d vec2(double a, double b) { return Eigen::Vector2d(a, b); }

// Reversed Van der Pol oscillator, Euler step dt = 0.1:
//   f1 = x1 - dt*x2
//   f2 = x2 + dt*(x1 + (x1^2 - 1)*x2)
// Obstacle of radius 1/4 at (1,1):
//   g = 1 + 1/4 - ((x1-1)^2 + (x2-1)^2)/0.25
SystemDef make_vdp() {
  const double dt = 0.1;
  ExprGraph f1(2);
  f1.set_output(f1.sub(f1.var(0), f1.mul(f1.constant(dt), f1.var(1))));
  ExprGraph f2(2);
  {
    const int x1 = f2.var(0), x2 = f2.var(1);
    const int nonlin = f2.mul(f2.sub(f2.square(x1), f2.constant(1.0)), x2);
    f2.set_output(f2.add(x2, f2.mul(f2.constant(dt), f2.add(x1, nonlin))));
  }
  ExprGraph g(2);
  {
    const int d1 = g.square(g.sub(g.var(0), g.constant(1.0)));
    const int d2 = g.square(g.sub(g.var(1), g.constant(1.0)));
    const int dist = g.add(d1, d2);
    g.set_output(g.sub(g.constant(1.25), g.mul(g.constant(4.0), dist)));
  }
  return make_system("vdp", dt, {std::move(f1), std::move(f2)},
                     Box(vec2(-2.5, -3.5), vec2(2.5, 3.5)), std::move(g));
}

// Two-machine power system, Euler step dt = 0.1:
//   f1 = x1 + dt*x2
//   f2 = x2 - dt*(x2/2 + sin(x1 + pi/3) - sin(pi/3))
// Two obstacles of radius 1/8 at (0.25, +-0.25); with
//   gk = 1 + (1/8)^2 - ((x1-0.25)^2 + (x2 -+ 0.25)^2)
// the safety function is max(g1, g2) written as g1 + relu(g2 - g1).
SystemDef make_two_machine() {
  const double dt = 0.1;
  const double pi3 = M_PI / 3.0;
  ExprGraph f1(2);
  f1.set_output(f1.add(f1.var(0), f1.mul(f1.constant(dt), f1.var(1))));
  ExprGraph f2(2);
  {
    const int x1 = f2.var(0), x2 = f2.var(1);
    const int half_x2 = f2.mul(f2.constant(0.5), x2);
    const int swing = f2.sub(f2.sin(f2.add(x1, f2.constant(pi3))), f2.constant(std::sin(pi3)));
    f2.set_output(f2.sub(x2, f2.mul(f2.constant(dt), f2.add(half_x2, swing))));
  }
  ExprGraph g(2);
  {
    const double lvl = 1.0 + 1.0 / 64.0;
    const int x1 = g.var(0), x2 = g.var(1);
    const int dx = g.square(g.sub(x1, g.constant(0.25)));
    const int g1 = g.sub(g.constant(lvl), g.add(dx, g.square(g.sub(x2, g.constant(0.25)))));
    const int g2 = g.sub(g.constant(lvl), g.add(dx, g.square(g.add(x2, g.constant(0.25)))));
    g.set_output(g.add(g1, g.relu(g.sub(g2, g1))));
  }
  return make_system("two_machine", dt, {std::move(f1), std::move(f2)},
                     Box(vec2(-1.0, -0.5), vec2(1.0, 0.5)), std::move(g));
}

// Two generator bus power system, Euler step dt = 0.05, no state constraints:
//   f1 = x1 + dt*x2
//   f2 = x2 + dt*(-sin(x1) - 0.5*sin(x1 - x3) - 0.4*x2)
//   f3 = x3 + dt*x4
//   f4 = x4 + dt*(-sin(x3) - 0.5*sin(x3 - x1) - 0.5*x4)
SystemDef make_power4d() {
  const double dt = 0.05;
  auto integrator = [dt](int pos, int vel) {
    ExprGraph f(4);
    f.set_output(f.add(f.var(pos), f.mul(f.constant(dt), f.var(vel))));
    return f;
  };
  auto swing = [dt](int pos, int vel, int other, double damping) {
    ExprGraph f(4);
    const int xp = f.var(pos), xv = f.var(vel), xo = f.var(other);
    const int own = f.neg(f.sin(xp));
    const int coupling = f.neg(f.mul(f.constant(0.5), f.sin(f.sub(xp, xo))));
    const int drag = f.neg(f.mul(f.constant(damping), xv));
    const int accel = f.add(f.add(own, coupling), drag);
    f.set_output(f.add(xv, f.mul(f.constant(dt), accel)));
    return f;
  };
  Eigen::VectorXd corner = Eigen::VectorXd::Constant(4, 3.5);
  return make_system("power4d", dt,
                     {integrator(0, 1), swing(0, 1, 2, 0.4), integrator(2, 3), swing(2, 3, 0, 0.5)},
                     Box(-corner, corner), std::nullopt);
}

}  // namespace

bool is_builtin_system(const std::string& name) {
  return name == "vdp" || name == "two_machine" || name == "power4d";
}

SystemDef builtin_system(const std::string& name) {
  if (name == "vdp") return make_vdp();
  if (name == "two_machine") return make_two_machine();
  if (name == "power4d") return make_power4d();
  throw std::invalid_argument("unknown built-in system '" + name + "'");
}

Eigen::VectorXd step(const SystemDef& sys, const Eigen::VectorXd& x) {
  if (x.size() != sys.n)
    throw std::invalid_argument("step: state dimension " + std::to_string(x.size()) + " != " +
                                std::to_string(sys.n));
  Eigen::VectorXd out(sys.n);
  for (int i = 0; i < sys.n; ++i) out[i] = sys.components[i].eval(x);
  return out;
}

double default_escape_threshold(const SystemDef& sys) {
  return 1e3 * std::max(sys.domain.lo.cwiseAbs().maxCoeff(), sys.domain.hi.cwiseAbs().maxCoeff());
}

Trajectory trajectory(const SystemDef& sys, const Eigen::VectorXd& x0, int K, double c_x) {
  if (K < 0) throw std::invalid_argument("trajectory: negative step count");
  Trajectory t;
  t.states.reserve(static_cast<std::size_t>(K) + 1);
  t.states.push_back(x0);
  for (int k = 0;; ++k) {
    const Eigen::VectorXd& cur = t.states.back();
    if (!cur.allFinite() || cur.cwiseAbs().maxCoeff() > c_x) {
      t.diverged = true;
      t.diverge_index = k;
      return t;
    }
    if (k == K) return t;
    t.states.push_back(step(sys, cur));
  }
}

Eigen::MatrixXd jacobian_at(const SystemDef& sys, const Eigen::VectorXd& x) {
  Eigen::MatrixXd J(sys.n, sys.n);
  for (int i = 0; i < sys.n; ++i) {
    if (sys.components[i].contains_op(Op::Relu))
      throw std::runtime_error("jacobian_at: relu node in component " + std::to_string(i + 1));
    for (int j = 0; j < sys.n; ++j) J(i, j) = sys.components[i].derivative(j).eval(x);
  }
  return J;
}

Interval interval_eval(const ExprGraph& graph, const Box& box) { return graph.eval(box); }

std::vector<Interval> interval_image(const SystemDef& sys, const Box& box) {
  std::vector<Interval> out(sys.n);
  for (int i = 0; i < sys.n; ++i) out[i] = sys.components[i].eval(box);
  return out;
}

Eigen::VectorXd hessian_eta_bound(const SystemDef& sys, const Box& box) {
  Eigen::VectorXd eta(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < sys.n; ++j) {
      const ExprGraph dj = sys.components[i].derivative(j);
      for (int k = 0; k < sys.n; ++k) {
        const Interval range = dj.derivative(k).eval(box);
        sum += range.mag();
      }
    }
    eta[i] = sum;
  }
  return eta;
}

namespace {

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Eigen::VectorXd parse_reals(const std::string& text, int n, const std::string& what) {
  std::istringstream is(text);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    if (!(is >> v[i])) throw std::invalid_argument("system file: expected " + std::to_string(n) +
                                                   " numbers for '" + what + "'");
  double extra;
  if (is >> extra) throw std::invalid_argument("system file: too many numbers for '" + what + "'");
  return v;
}

}  // namespace

SystemDef parse_system_text(const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  int n = -1;
  double dt = 0.0;
  bool have_dt = false;
  std::string name;
  std::vector<ExprGraph> components;
  std::optional<Eigen::VectorXd> lo, hi;
  std::optional<ExprGraph> safety;

  auto fail = [&](const std::string& msg) -> void {
    throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::string rest;
    std::getline(ls, rest);
    rest = strip(rest);
    try {
      if (key == "name") {
        name = rest;
      } else if (key == "n") {
        n = std::stoi(rest);
        if (n < 1) fail("n must be positive");
      } else if (key == "dt") {
        dt = std::stod(rest);
        have_dt = true;
      } else if (key == "f") {
        if (n < 0) fail("'n' must appear before 'f'");
        components.push_back(ExprGraph::parse(rest, n));
      } else if (key == "g") {
        if (n < 0) fail("'n' must appear before 'g'");
        safety = ExprGraph::parse(rest, n);
      } else if (key == "lo") {
        if (n < 0) fail("'n' must appear before 'lo'");
        lo = parse_reals(rest, n, "lo");
      } else if (key == "hi") {
        if (n < 0) fail("'n' must appear before 'hi'");
        hi = parse_reals(rest, n, "hi");
      } else {
        fail("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      if (what.rfind(origin, 0) == 0) throw;
      fail(what);
    }
  }
  if (n < 0) throw std::invalid_argument(origin + ": missing 'n'");
  if (!have_dt) throw std::invalid_argument(origin + ": missing 'dt'");
  if (static_cast<int>(components.size()) != n)
    throw std::invalid_argument(origin + ": expected " + std::to_string(n) + " 'f' lines, got " +
                                std::to_string(components.size()));
  if (!lo || !hi) throw std::invalid_argument(origin + ": missing 'lo' or 'hi'");
  if (name.empty()) name = origin;
  return make_system(std::move(name), dt, std::move(components), Box(*lo, *hi), std::move(safety));
}

SystemDef load_system(const std::string& path_or_name) {
  if (is_builtin_system(path_or_name)) return builtin_system(path_or_name);
  std::ifstream in(path_or_name);
  if (!in) throw std::invalid_argument("cannot open system file '" + path_or_name + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_text(buf.str(), path_or_name);
}

}  // namespace saferoa
