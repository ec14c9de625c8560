#pragma once

#include "saferoa/expr.hpp"
#include "saferoa/interval.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace saferoa {

/// Discrete-time autonomous system x_{k+1} = f(x_k) with its training /
/// verification box and an optional safety function g (safe set = {g < 1}).
/// Immutable after construction; evaluation is side-effect free.
struct SystemDef {
  std::string name;
  int n = 0;
  double dt = 0.0;
  std::vector<ExprGraph> components;  // one graph per output of f
  Box domain;                         // hyper-rectangle X
  std::optional<ExprGraph> safety;    // g_X, with safe set {g_X < 1}
};

/// Validates invariants (f(0)=0 within 1e-12, origin interior to the domain,
/// component dimensions) and assembles the definition.
SystemDef make_system(std::string name, double dt, std::vector<ExprGraph> components, Box domain,
                      std::optional<ExprGraph> safety);

/// Built-in benchmark systems: "vdp", "two_machine", "power4d".
SystemDef builtin_system(const std::string& name);
bool is_builtin_system(const std::string& name);

/// Loads a system definition file (see README for the format). Falls back to
/// the built-ins when `path_or_name` matches a built-in name.
SystemDef load_system(const std::string& path_or_name);
SystemDef parse_system_text(const std::string& text, const std::string& origin);

/// One application of the transition map.
Eigen::VectorXd step(const SystemDef& sys, const Eigen::VectorXd& x);

struct Trajectory {
  std::vector<Eigen::VectorXd> states;  // states[0] = x0
  bool diverged = false;
  int diverge_index = -1;  // first k with ||state_k||_inf > c_x or non-finite
};

/// Simulates K steps, stopping early once the sup-norm exceeds the escape
/// threshold c_x or a coordinate stops being finite.
Trajectory trajectory(const SystemDef& sys, const Eigen::VectorXd& x0, int K, double c_x);

/// Default escape threshold: 1e3 * max |domain corner| (sup norm).
double default_escape_threshold(const SystemDef& sys);

/// Exact Jacobian of f at x via graph differentiation.
Eigen::MatrixXd jacobian_at(const SystemDef& sys, const Eigen::VectorXd& x);

/// Natural interval extension of a graph over a box.
Interval interval_eval(const ExprGraph& graph, const Box& box);

/// Componentwise interval image of f over a box.
std::vector<Interval> interval_image(const SystemDef& sys, const Box& box);

/// Vector eta with |f(x) - Df(0) x| <= (||x||^2 / 2) * eta componentwise on
/// the given origin-centered box, obtained by interval-bounding every second
/// partial of each component and summing the row of maxima.
Eigen::VectorXd hessian_eta_bound(const SystemDef& sys, const Box& box);

}  // namespace saferoa
