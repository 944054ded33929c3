#pragma once

// Monte Carlo mean-square estimation for two-step Maruyama recurrences.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msstab/schemes.hpp"

namespace msstab {

/// xi for (path, step, noise index). The default draws from gaussian_stream.
using NoiseSource = std::function<double(std::uint64_t path, std::uint32_t step, std::uint32_t noise)>;

inline constexpr double kOverflowClamp = 1e150;

struct SimConfig {
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  double h = 0.125;
  double t_end = 1.0;
  std::size_t batches = 100;          // M
  std::size_t paths_per_batch = 100;  // L
  std::uint64_t seed = 20140101;
  double theta = 0.5;  // bootstrap and theta-method comparator
  bool theta_comparator = false;
  bool euler_comparator = false;
  unsigned threads = 0;  // 0: hardware concurrency
  NoiseSource noise;     // empty: gaussian_stream(seed, ...)

  std::size_t steps() const;
  std::size_t total_paths() const { return batches * paths_per_batch; }
  void validate() const;
};

/// Estimated sqrt(E|X|^2) on the step grid. For systems `ms_norm` is the full
/// state and `ms_norm_first` the first component.
struct MsTrace {
  std::string label;
  std::vector<double> times;
  std::vector<double> ms_norm;
  std::vector<double> ms_norm_first;
  std::vector<char> diverged;  // per time, set once any path passed the clamp

  bool any_diverged() const;
  double terminal() const { return ms_norm.back(); }
};

std::complex<double> theta_maruyama_step(std::complex<double> x, std::complex<double> lambda, std::complex<double> mu,
                                         double h, double theta, double xi);

std::vector<MsTrace> run_two_step_scalar(const SimConfig& cfg, const ScalarTestEq<double>& eq);

/// X_0 defaults to the vector of ones.
std::vector<MsTrace> run_two_step_system(const SimConfig& cfg, const SystemTestEq<double>& eq,
                                         std::optional<Eigen::VectorXd> x0 = std::nullopt);

/// Least-squares slope of log(values) against times over [t_from, t_to];
/// zero entries are skipped.
double log_slope(const std::vector<double>& times, const std::vector<double>& values, double t_from = 0,
                 double t_to = 1e300);

}  // namespace msstab
