#pragma once

#include "saferoa/dynamics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace saferoa {

/// Safe set X = {x : g(x) < 1}, empty-constraint case g = nullopt (X = R^n).
struct SafetySpec {
  std::optional<ExprGraph> g;
  double gamma_floor = 1.0;

  static SafetySpec from_system(const SystemDef& sys) { return {sys.safety, 1.0}; }
  static SafetySpec unconstrained() { return {std::nullopt, 1.0}; }
};

/// State weight alpha(x) = mu * base_scale * ||x||^2. The labeling scale mu
/// is folded in once here so labels, training residuals and verification all
/// share the same alpha.
struct AlphaSpec {
  double base_scale = 1.0;  // dt for the benchmark choice alpha = dt*||x||^2
  double mu = 1.0;
  double alpha_m() const { return mu * base_scale; }
  double alpha_M() const { return mu * base_scale; }
};

struct LabelConfig {
  int horizon = 2000;       // hard cap M on simulated steps
  double c_max = 40.0;      // truncation bound C_max (unscaled value sum)
  double c_x = 0.0;         // escape threshold; <= 0 means the system default
  double converge_tol = 1e-3;  // ||x|| below this counts as converged
};

enum class SampleStatus { Converged, Unsafe, Diverged, Truncated };

const char* to_string(SampleStatus s);
SampleStatus sample_status_from_string(const std::string& s);

struct LabeledSample {
  Eigen::VectorXd x;
  double w_hat = 0.0;
  double value_sum = 0.0;  // truncated value sum S (scaled by mu); inf for unsafe/diverged
  SampleStatus status = SampleStatus::Converged;
};

/// Barrier weight gamma(x) = 1 + 1/relu(1 - g(x)), +inf outside the safe
/// set (1/0 := inf). Identically 1 when no safety function is present.
double gamma(const SafetySpec& spec, const Eigen::VectorXd& x);

/// alpha(x) = mu * base_scale * ||x||_2^2.
double alpha(const AlphaSpec& spec, const Eigen::VectorXd& x);

/// xi(x) = 1 - exp(-gamma(x) * alpha(x)); equals 1 outside the safe set.
double xi_coeff(const SafetySpec& safety, const AlphaSpec& aspec, const Eigen::VectorXd& x);

/// beta(x) = exp(gamma(x) * alpha(x)) - 1; +inf outside the safe set.
double beta_coeff(const SafetySpec& safety, const AlphaSpec& aspec, const Eigen::VectorXd& x);

/// Truncated-horizon ground-truth label for one state. Simulates at most
/// cfg.horizon steps, accumulating S = sum gamma(x_k) * alpha(x_k):
///   - any iterate leaves the safe set, or S exceeds mu * C_max  -> Unsafe, 1
///   - sup norm exceeds the escape threshold                     -> Diverged, 1
///   - ||x_k|| drops below converge_tol                          -> Converged, 1 - exp(-S)
///   - horizon hit while still safe                              -> Truncated, 1 - exp(-S)
LabeledSample label(const SystemDef& sys, const SafetySpec& safety, const AlphaSpec& aspec,
                    const LabelConfig& cfg, const Eigen::VectorXd& x);

/// Residual of W against w(x) - w(f(x)) = xi(x) * (1 - w(f(x))).
double zubov_residual(const std::function<double(const Eigen::VectorXd&)>& W, const SystemDef& sys,
                      const SafetySpec& safety, const AlphaSpec& aspec, const Eigen::VectorXd& x);

/// Uniform samples over the system domain, labeled; the origin sample
/// (0, w_hat = 0) is always appended last. Deterministic for a fixed seed,
/// independent of the worker count.
std::vector<LabeledSample> sample_dataset(const SystemDef& sys, const SafetySpec& safety,
                                          const AlphaSpec& aspec, const LabelConfig& cfg,
                                          int n_data, std::uint64_t seed, int workers = 1);

struct LabelSetup {
  AlphaSpec alpha;
  LabelConfig config;
  double pilot_percentile = 0.0;  // raw 97.5th-percentile value sum
};

/// Pilot-run calibration: C_max is the 97.5th percentile of finite value
/// sums over n_pilot uniform samples, then mu = 40 / C_max.
LabelSetup auto_label_setup(const SystemDef& sys, const SafetySpec& safety, int horizon,
                            double c_x, int n_pilot, std::uint64_t seed);

void write_dataset_csv(const std::string& path, const std::vector<LabeledSample>& samples);
std::vector<LabeledSample> read_dataset_csv(const std::string& path);

/// Uniform point in a box from a seeded generator (splitmix-style mapping of
/// raw 64-bit draws; identical across platforms).
Eigen::VectorXd uniform_in_box(const Box& box, std::mt19937_64& rng);
double uniform01(std::mt19937_64& rng);

}  // namespace saferoa
