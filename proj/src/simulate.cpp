#include "msstab/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "msstab/errors.hpp"
#include "msstab/random.hpp"

namespace msstab {

std::size_t SimConfig::steps() const {
  const double ratio = t_end / h;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(ratio));
}

void SimConfig::validate() const {
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  if (!(t_end > 0) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  if (batches == 0 || paths_per_batch == 0) throw Error(ErrorCode::InvalidArgument, "need at least one path");
  if (!(theta >= 0 && theta <= 1)) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0, 1]");
  if (steps() < 2) throw Error(ErrorCode::InvalidArgument, "t_end must cover at least two steps");
  if (steps() > 0xFFFFFFFFull) throw Error(ErrorCode::InvalidArgument, "too many steps");
}

bool MsTrace::any_diverged() const {
  return std::any_of(diverged.begin(), diverged.end(), [](char c) { return c != 0; });
}

std::complex<double> theta_maruyama_step(std::complex<double> x, std::complex<double> lambda, std::complex<double> mu,
                                         double h, double theta, double xi) {
  const std::complex<double> den = 1.0 - theta * lambda * h;
  if (std::abs(den) <= 1e-14) throw Error(ErrorCode::SingularDenominator, "1 - theta*h*lambda vanishes");
  return (1.0 + (1.0 - theta) * lambda * h + mu * std::sqrt(h) * xi) / den * x;
}

namespace {

struct Accum {
  std::vector<double> sum, sum_first;
  std::vector<char> over;

  explicit Accum(std::size_t n) : sum(n + 1, 0.0), sum_first(n + 1, 0.0), over(n + 1, 0) {}
};

unsigned worker_count(const SimConfig& cfg) {
  unsigned t = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, cfg.batches));
}

// Runs `path_fn(path_id, accums)` for every path, one Accum set per batch,
// then folds batches in order so the result does not depend on scheduling.
template <class PathFn>
std::vector<Accum> run_batches(const SimConfig& cfg, std::size_t n_methods, PathFn path_fn) {
  const std::size_t n = cfg.steps();
  std::vector<std::vector<Accum>> per_batch(cfg.batches);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::size_t m; (m = next.fetch_add(1)) < cfg.batches && !failed;) {
        std::vector<Accum> acc(n_methods, Accum(n));
        for (std::size_t j = 0; j < cfg.paths_per_batch; ++j) path_fn(m * cfg.paths_per_batch + j, acc);
        per_batch[m] = std::move(acc);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  const unsigned nt = worker_count(cfg);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Accum> total(n_methods, Accum(n));
  for (const auto& batch : per_batch) {
    for (std::size_t k = 0; k < n_methods; ++k) {
      for (std::size_t i = 0; i <= n; ++i) {
        total[k].sum[i] += batch[k].sum[i];
        total[k].sum_first[i] += batch[k].sum_first[i];
        total[k].over[i] |= batch[k].over[i];
      }
    }
  }
  return total;
}

MsTrace make_trace(const SimConfig& cfg, std::string label, const Accum& acc, bool with_first) {
  const std::size_t n = cfg.steps();
  const double count = static_cast<double>(cfg.total_paths());
  MsTrace tr;
  tr.label = std::move(label);
  tr.times.resize(n + 1);
  tr.ms_norm.resize(n + 1);
  tr.diverged = acc.over;
  if (with_first) tr.ms_norm_first.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    tr.times[i] = static_cast<double>(i) * cfg.h;
    tr.ms_norm[i] = std::min(std::sqrt(acc.sum[i] / count), kOverflowClamp);
    if (with_first) tr.ms_norm_first[i] = std::min(std::sqrt(acc.sum_first[i] / count), kOverflowClamp);
    if (tr.diverged[i] || !std::isfinite(tr.ms_norm[i])) {
      tr.ms_norm[i] = kOverflowClamp;
      tr.diverged[i] = 1;
    }
  }
  return tr;
}

NoiseSource resolve_noise(const SimConfig& cfg) {
  if (cfg.noise) return cfg.noise;
  const std::uint64_t seed = cfg.seed;
  return [seed](std::uint64_t path, std::uint32_t step, std::uint32_t noise) {
    return gaussian_stream(seed, path, step, noise);
  };
}

// Adds |x_i|^2 for a path that crossed the clamp at step i and stays there.
void saturate(Accum& acc, std::size_t from) {
  const double c2 = kOverflowClamp * kOverflowClamp;
  for (std::size_t k = from; k < acc.sum.size(); ++k) {
    acc.sum[k] += c2;
    acc.sum_first[k] += c2;
    acc.over[k] = 1;
  }
}

}  // namespace

std::vector<MsTrace> run_two_step_scalar(const SimConfig& cfg, const ScalarTestEq<double>& eq) {
  using C = std::complex<double>;
  cfg.validate();
  const std::size_t n = cfg.steps();
  std::vector<ReducedCoeffs<double>> rcs;
  std::vector<std::string> labels;
  for (Scheme s : cfg.schemes) {
    rcs.push_back(reduce_scalar(catalog(s), eq, cfg.h));
    labels.emplace_back(to_string(s));
  }
  std::vector<double> one_step_thetas;
  if (cfg.theta_comparator) {
    one_step_thetas.push_back(cfg.theta);
    labels.emplace_back("theta");
  }
  if (cfg.euler_comparator) {
    one_step_thetas.push_back(0.0);
    labels.emplace_back("euler");
  }
  const NoiseSource noise = resolve_noise(cfg);

  auto path_fn = [&](std::uint64_t path, std::vector<Accum>& acc) {
    std::vector<double> xi(n);
    for (std::size_t k = 0; k < n; ++k) xi[k] = noise(path, static_cast<std::uint32_t>(k), 0);
    std::size_t slot = 0;
    for (const auto& rc : rcs) {
      Accum& a = acc[slot++];
      C prev = 1.0;
      C cur = theta_maruyama_step(prev, eq.lambda, eq.mu, cfg.h, cfg.theta, xi[0]);
      a.sum[0] += 1.0;
      a.sum_first[0] += 1.0;
      if (std::abs(cur) > kOverflowClamp || !std::isfinite(std::abs(cur))) {
        saturate(a, 1);
        continue;
      }
      a.sum[1] += std::norm(cur);
      a.sum_first[1] += std::norm(cur);
      for (std::size_t i = 2; i <= n; ++i) {
        const C next = rc.a * cur + rc.c * prev + rc.b * cur * xi[i - 1] + rc.d * prev * xi[i - 2];
        prev = cur;
        cur = next;
        const double mag2 = std::norm(cur);
        if (!(mag2 <= kOverflowClamp * kOverflowClamp)) {
          saturate(a, i);
          break;
        }
        a.sum[i] += mag2;
        a.sum_first[i] += mag2;
      }
    }
    for (double th : one_step_thetas) {
      Accum& a = acc[slot++];
      C x = 1.0;
      a.sum[0] += 1.0;
      a.sum_first[0] += 1.0;
      for (std::size_t i = 1; i <= n; ++i) {
        x = theta_maruyama_step(x, eq.lambda, eq.mu, cfg.h, th, xi[i - 1]);
        const double mag2 = std::norm(x);
        if (!(mag2 <= kOverflowClamp * kOverflowClamp)) {
          saturate(a, i);
          break;
        }
        a.sum[i] += mag2;
        a.sum_first[i] += mag2;
      }
    }
  };

  const auto totals = run_batches(cfg, labels.size(), path_fn);
  std::vector<MsTrace> out;
  for (std::size_t k = 0; k < labels.size(); ++k) out.push_back(make_trace(cfg, labels[k], totals[k], false));
  return out;
}

namespace {

// One theta-Maruyama step for the system: (I - theta h F)^-1 (I + (1-theta) h F + sqrt(h) sum_r G_r xi_r).
struct ThetaSystemStep {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd drift;
  std::vector<Eigen::MatrixXd> diffusion;

  ThetaSystemStep(const SystemTestEq<double>& eq, double h, double theta) {
    const Eigen::Index n = eq.dim();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    lu.compute(I - theta * h * eq.F);
    if (!(lu.rcond() > 1e-12)) throw Error(ErrorCode::SingularResolvent, "I - theta h F is singular");
    drift = lu.solve(I + (1.0 - theta) * h * eq.F);
    for (const auto& g : eq.G) diffusion.push_back(lu.solve(std::sqrt(h) * g));
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x, const double* xi) const {
    Eigen::VectorXd y = drift * x;
    for (std::size_t r = 0; r < diffusion.size(); ++r) y.noalias() += xi[r] * (diffusion[r] * x);
    return y;
  }
};

}  // namespace

std::vector<MsTrace> run_two_step_system(const SimConfig& cfg, const SystemTestEq<double>& eq,
                                         std::optional<Eigen::VectorXd> x0) {
  cfg.validate();
  eq.validate();
  const std::size_t n = cfg.steps();
  const std::size_t m = eq.noises();
  const Eigen::VectorXd start = x0 ? *x0 : Eigen::VectorXd::Ones(eq.dim());
  if (start.size() != eq.dim()) throw Error(ErrorCode::DimensionMismatch, "initial value has wrong length");

  std::vector<SystemMatrices<double>> mats;
  std::vector<std::string> labels;
  for (Scheme s : cfg.schemes) {
    mats.push_back(reduce_system(catalog(s), eq, cfg.h));
    labels.emplace_back(to_string(s));
  }
  const ThetaSystemStep bootstrap(eq, cfg.h, cfg.theta);
  std::vector<ThetaSystemStep> one_step;
  if (cfg.theta_comparator) {
    one_step.emplace_back(eq, cfg.h, cfg.theta);
    labels.emplace_back("theta");
  }
  if (cfg.euler_comparator) {
    one_step.emplace_back(eq, cfg.h, 0.0);
    labels.emplace_back("euler");
  }
  const NoiseSource noise = resolve_noise(cfg);
  const double clamp2 = kOverflowClamp * kOverflowClamp;

  auto path_fn = [&](std::uint64_t path, std::vector<Accum>& acc) {
    std::vector<double> xi(n * m);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t r = 0; r < m; ++r) {
        xi[k * m + r] = noise(path, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(r));
      }
    }
    const double s0 = start.squaredNorm();
    const double f0 = start(0) * start(0);
    std::size_t slot = 0;
    for (const auto& sm : mats) {
      Accum& a = acc[slot++];
      Eigen::VectorXd prev = start;
      Eigen::VectorXd cur = bootstrap.apply(prev, xi.data());
      Eigen::VectorXd next(start.size());
      a.sum[0] += s0;
      a.sum_first[0] += f0;
      if (!(cur.squaredNorm() <= clamp2)) {
        saturate(a, 1);
        continue;
      }
      a.sum[1] += cur.squaredNorm();
      a.sum_first[1] += cur(0) * cur(0);
      for (std::size_t i = 2; i <= n; ++i) {
        next.noalias() = sm.A * cur;
        next.noalias() += sm.C * prev;
        for (std::size_t r = 0; r < m; ++r) {
          next.noalias() += xi[(i - 1) * m + r] * (sm.B[r] * cur);
          next.noalias() += xi[(i - 2) * m + r] * (sm.D[r] * prev);
        }
        prev.swap(cur);
        cur.swap(next);
        const double mag2 = cur.squaredNorm();
        if (!(mag2 <= clamp2)) {
          saturate(a, i);
          break;
        }
        a.sum[i] += mag2;
        a.sum_first[i] += cur(0) * cur(0);
      }
    }
    for (const auto& step : one_step) {
      Accum& a = acc[slot++];
      Eigen::VectorXd x = start;
      a.sum[0] += s0;
      a.sum_first[0] += f0;
      for (std::size_t i = 1; i <= n; ++i) {
        x = step.apply(x, xi.data() + (i - 1) * m);
        const double mag2 = x.squaredNorm();
        if (!(mag2 <= clamp2)) {
          saturate(a, i);
          break;
        }
        a.sum[i] += mag2;
        a.sum_first[i] += x(0) * x(0);
      }
    }
  };

  const auto totals = run_batches(cfg, labels.size(), path_fn);
  std::vector<MsTrace> out;
  for (std::size_t k = 0; k < labels.size(); ++k) out.push_back(make_trace(cfg, labels[k], totals[k], true));
  return out;
}

double log_slope(const std::vector<double>& times, const std::vector<double>& values, double t_from, double t_to) {
  double st = 0, sv = 0, stt = 0, stv = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < std::min(times.size(), values.size()); ++i) {
    if (times[i] < t_from - 1e-12 || times[i] > t_to + 1e-12 || !(values[i] > 0)) continue;
    const double lv = std::log(values[i]);
    st += times[i];
    sv += lv;
    stt += times[i] * times[i];
    stv += times[i] * lv;
    ++count;
  }
  if (count < 2) return 0.0;
  const double cn = static_cast<double>(count);
  const double den = cn * stt - st * st;
  return den == 0 ? 0.0 : (cn * stv - st * sv) / den;
}

}  // namespace msstab
