#include "saferoa/zubov.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace saferoa {

const char* to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::Converged: return "converged";
    case SampleStatus::Unsafe: return "unsafe";
    case SampleStatus::Diverged: return "diverged";
    case SampleStatus::Truncated: return "truncated";
  }
  return "?";
}

SampleStatus sample_status_from_string(const std::string& s) {
  if (s == "converged") return SampleStatus::Converged;
  if (s == "unsafe") return SampleStatus::Unsafe;
  if (s == "diverged") return SampleStatus::Diverged;
  if (s == "truncated") return SampleStatus::Truncated;
  throw std::invalid_argument("unknown sample status '" + s + "'");
}

double gamma(const SafetySpec& spec, const Eigen::VectorXd& x) {
  if (!spec.g) return 1.0;
  const double gx = spec.g->eval(x);
  const double slack = std::max(1.0 - gx, 0.0);
  if (slack == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + 1.0 / slack;
}

double alpha(const AlphaSpec& spec, const Eigen::VectorXd& x) {
  return spec.mu * spec.base_scale * x.squaredNorm();
}

double xi_coeff(const SafetySpec& safety, const AlphaSpec& aspec, const Eigen::VectorXd& x) {
  const double ga = gamma(safety, x) * alpha(aspec, x);
  if (std::isinf(ga)) return 1.0;
  if (std::isnan(ga)) return 0.0;  // gamma = inf at the origin: alpha = 0 dominates
  return -std::expm1(-ga);
}

double beta_coeff(const SafetySpec& safety, const AlphaSpec& aspec, const Eigen::VectorXd& x) {
  const double ga = gamma(safety, x) * alpha(aspec, x);
  if (std::isnan(ga)) return std::numeric_limits<double>::infinity();
  return std::expm1(ga);
}

LabeledSample label(const SystemDef& sys, const SafetySpec& safety, const AlphaSpec& aspec,
                    const LabelConfig& cfg, const Eigen::VectorXd& x) {
  const double escape = cfg.c_x > 0.0 ? cfg.c_x : default_escape_threshold(sys);
  const double budget = aspec.mu * cfg.c_max;
  LabeledSample out;
  out.x = x;
  out.value_sum = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  Eigen::VectorXd cur = x;
  for (int k = 0;; ++k) {
    if (!cur.allFinite() || cur.cwiseAbs().maxCoeff() > escape) {
      out.status = SampleStatus::Diverged;
      out.w_hat = 1.0;
      return out;
    }
    const double g = gamma(safety, cur);
    if (std::isinf(g)) {
      out.status = SampleStatus::Unsafe;
      out.w_hat = 1.0;
      return out;
    }
    const double term = g * alpha(aspec, cur);
    sum += term;
    if (sum > budget) {
      out.status = SampleStatus::Unsafe;
      out.w_hat = 1.0;
      return out;
    }
    if (cur.norm() < cfg.converge_tol) {
      out.status = SampleStatus::Converged;
      break;
    }
    if (k >= cfg.horizon) {
      out.status = SampleStatus::Truncated;
      break;
    }
    cur = step(sys, cur);
  }
  out.value_sum = sum;
  out.w_hat = -std::expm1(-sum);
  if (out.w_hat < 0.0) out.w_hat = 0.0;
  if (out.w_hat > 1.0 || std::isnan(out.w_hat)) out.w_hat = 1.0;
  return out;
}

double zubov_residual(const std::function<double(const Eigen::VectorXd&)>& W, const SystemDef& sys,
                      const SafetySpec& safety, const AlphaSpec& aspec, const Eigen::VectorXd& x) {
  const Eigen::VectorXd fx = step(sys, x);
  const double wf = W(fx);
  return W(x) - wf - xi_coeff(safety, aspec, x) * (1.0 - wf);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::VectorXd uniform_in_box(const Box& box, std::mt19937_64& rng) {
  Eigen::VectorXd x(box.dim());
  for (int i = 0; i < box.dim(); ++i)
    x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * uniform01(rng);
  return x;
}

std::vector<LabeledSample> sample_dataset(const SystemDef& sys, const SafetySpec& safety,
                                          const AlphaSpec& aspec, const LabelConfig& cfg,
                                          int n_data, std::uint64_t seed, int workers) {
  if (n_data < 1) throw std::invalid_argument("sample_dataset: n_data must be >= 1");
  // Draw all points up front so the dataset is fixed by the seed alone.
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> points(n_data);
  for (int i = 0; i < n_data; ++i) points[i] = uniform_in_box(sys.domain, rng);

  std::vector<LabeledSample> out(n_data);
  workers = std::max(1, workers);
  if (workers == 1) {
    for (int i = 0; i < n_data; ++i) out[i] = label(sys, safety, aspec, cfg, points[i]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_data; i = next.fetch_add(1))
          out[i] = label(sys, safety, aspec, cfg, points[i]);
      });
    for (auto& t : pool) t.join();
  }
  LabeledSample origin;
  origin.x = Eigen::VectorXd::Zero(sys.n);
  origin.w_hat = 0.0;
  origin.status = SampleStatus::Converged;
  out.push_back(std::move(origin));
  return out;
}

LabelSetup auto_label_setup(const SystemDef& sys, const SafetySpec& safety, int horizon,
                            double c_x, int n_pilot, std::uint64_t seed) {
  if (n_pilot < 1) throw std::invalid_argument("auto_label_setup: n_pilot must be >= 1");
  AlphaSpec raw{sys.dt, 1.0};
  LabelConfig pilot_cfg;
  pilot_cfg.horizon = horizon;
  pilot_cfg.c_max = std::numeric_limits<double>::infinity();  // no budget during the pilot
  pilot_cfg.c_x = c_x;

  std::mt19937_64 rng(seed);
  std::vector<double> sums;
  sums.reserve(n_pilot);
  for (int i = 0; i < n_pilot; ++i) {
    const Eigen::VectorXd x = uniform_in_box(sys.domain, rng);
    const LabeledSample s = label(sys, safety, raw, pilot_cfg, x);
    if (s.status == SampleStatus::Converged && std::isfinite(s.value_sum))
      sums.push_back(s.value_sum);
  }
  if (sums.empty())
    throw std::runtime_error("auto_label_setup: no pilot trajectory converged safely");
  std::sort(sums.begin(), sums.end());
  const std::size_t idx =
      std::min(sums.size() - 1, static_cast<std::size_t>(std::ceil(0.975 * sums.size())) - 1);
  const double c_max = sums[idx];

  LabelSetup setup;
  setup.pilot_percentile = c_max;
  setup.alpha = AlphaSpec{sys.dt, 40.0 / c_max};
  setup.config = pilot_cfg;
  setup.config.c_max = c_max;
  return setup;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_dataset_csv(const std::string& path, const std::vector<LabeledSample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (samples.empty()) throw std::invalid_argument("write_dataset_csv: empty dataset");
  const int n = static_cast<int>(samples.front().x.size());
  for (int i = 0; i < n; ++i) out << "x_" << (i + 1) << ",";
  out << "w_hat,status\n";
  for (const LabeledSample& s : samples) {
    for (int i = 0; i < n; ++i) out << fmt17(s.x[i]) << ",";
    out << fmt17(s.w_hat) << "," << to_string(s.status) << "\n";
  }
}

std::vector<LabeledSample> read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const int n = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 1;
  if (n < 1) throw std::runtime_error(path + ": malformed header");
  std::vector<LabeledSample> samples;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    LabeledSample s;
    s.x.resize(n);
    for (int i = 0; i < n; ++i) {
      if (!std::getline(ls, cell, ',')) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
      s.x[i] = std::stod(cell);
    }
    if (!std::getline(ls, cell, ',')) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
    s.w_hat = std::stod(cell);
    if (!std::getline(ls, cell)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
    s.status = sample_status_from_string(cell);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace saferoa
