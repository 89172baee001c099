#pragma once

// Iterative proportional scaling in exact (Fraction) and float (double) modes.
// One step projects onto a single block's marginals; a cycle is k steps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

#include "pmle/core.hpp"
#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"

namespace pmle {

enum class IpsMode { Exact, Float };

namespace detail {

inline double as_double(const Fraction& f) { return f.to_double(); }
inline double as_double(double v) { return v; }

template <typename T>
T abs_diff(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, Fraction>) {
    return abs(a - b);
  } else {
    return std::fabs(a - b);
  }
}

template <typename T>
void check_data(const MultipartitionMatrix& mat, std::span<const T> d) {
  if (d.size() != mat.m())
    throw DimensionMismatch("data has " + std::to_string(d.size()) + " entries, matrix has " +
                            std::to_string(mat.m()) + " columns");
  T s = T(0);
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (!(d[j] > T(0))) throw NonPositiveData("data entry " + std::to_string(j + 1) + " is not positive");
    s += d[j];
  }
  if constexpr (std::is_same_v<T, Fraction>) {
    if (s != Fraction(1)) throw NonNormalizedData("data sums to " + s.to_string() + ", expected 1");
  } else {
    if (std::fabs(s - 1.0) > 1e-12) throw NonNormalizedData("data sums to " + std::to_string(s) + ", expected 1");
  }
}

}  // namespace detail

struct IpsHistoryEntry {
  std::size_t step;
  double max_delta;
  double kl_to_data;  // KL(d || p)
};

template <typename T>
struct IpsState {
  std::vector<T> p;
  std::size_t step_count = 0;
  std::vector<IpsHistoryEntry> history;
};

template <typename T>
IpsState<T> initial_state(const MultipartitionMatrix& mat) {
  IpsState<T> s;
  if constexpr (std::is_same_v<T, Fraction>) {
    s.p.assign(mat.m(), Fraction(1, static_cast<long>(mat.m())));
  } else {
    s.p.assign(mat.m(), 1.0 / static_cast<double>(mat.m()));
  }
  return s;
}

inline double kl_divergence(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw DimensionMismatch("kl_divergence: length mismatch");
  double s = 0;
  for (std::size_t j = 0; j < q.size(); ++j) s += q[j] * std::log(q[j] / p[j]);
  return s;
}

template <typename T>
double kl_divergence(const std::vector<T>& q, const std::vector<T>& p) {
  std::vector<double> a, b;
  for (const auto& x : q) a.push_back(detail::as_double(x));
  for (const auto& x : p) b.push_back(detail::as_double(x));
  return kl_divergence(std::span<const double>(a), std::span<const double>(b));
}

template <typename T>
double log_likelihood(std::span<const T> d, std::span<const T> p) {
  double s = 0;
  for (std::size_t j = 0; j < d.size(); ++j) s += detail::as_double(d[j]) * std::log(detail::as_double(p[j]));
  return s;
}

// max over all stacked rows of |alpha . p - alpha . d|
template <typename T>
T birch_residual(const MultipartitionMatrix& mat, std::span<const T> p, std::span<const T> d) {
  if (p.size() != mat.m() || d.size() != mat.m()) throw DimensionMismatch("birch_residual: length mismatch");
  T worst = T(0);
  for (const auto& b : mat.blocks()) {
    std::vector<T> s(b.rows(), T(0));
    for (std::size_t j = 0; j < mat.m(); ++j) s[b.row_of(j)] += p[j] - d[j];
    for (const auto& x : s) {
      T a = detail::abs_diff(x, T(0));
      if (a > worst) worst = a;
    }
  }
  return worst;
}
template <typename T>
T birch_residual(const MultipartitionMatrix& mat, const std::vector<T>& p, const std::vector<T>& d) {
  return birch_residual<T>(mat, std::span<const T>(p), std::span<const T>(d));
}

// Projection onto {p : A^l p = A^l d}. Returns the largest entry change.
template <typename T>
T ips_step_inplace(std::vector<T>& p, const MultipartitionMatrix& mat, std::span<const T> d, std::size_t l) {
  const auto& b = mat.block(l);
  std::vector<T> sp(b.rows(), T(0)), sd(b.rows(), T(0));
  for (std::size_t j = 0; j < mat.m(); ++j) {
    sp[b.row_of(j)] += p[j];
    sd[b.row_of(j)] += d[j];
  }
  std::vector<T> factor(b.rows(), T(1));
  for (std::size_t i = 0; i < b.rows(); ++i) {
    if (sd[i] == sp[i]) continue;
    if (sp[i] == T(0)) throw ZeroMarginal("block " + std::to_string(l + 1) + ", row " + std::to_string(i + 1));
    factor[i] = sd[i] / sp[i];
  }
  T delta = T(0);
  for (std::size_t j = 0; j < mat.m(); ++j) {
    const T& f = factor[b.row_of(j)];
    if (f == T(1)) continue;
    T next = p[j] * f;
    T dj = detail::abs_diff(next, p[j]);
    if (dj > delta) delta = dj;
    p[j] = std::move(next);
  }
  return delta;
}

template <typename T>
IpsState<T> ips_step(const IpsState<T>& state, const MultipartitionMatrix& mat, std::span<const T> d, std::size_t l) {
  detail::check_data(mat, d);
  IpsState<T> next = state;
  ips_step_inplace(next.p, mat, d, l);
  ++next.step_count;
  if constexpr (std::is_same_v<T, Fraction>) {
    auto got = block_marginals<T>(mat, std::span<const T>(next.p));
    auto want = block_marginals<T>(mat, d);
    if (got[l] != want[l]) throw ZeroMarginal("projection postcondition failed");
  }
  return next;
}

struct IpsConfig {
  IpsMode mode = IpsMode::Exact;
  std::size_t max_cycles = 50;
  double float_tolerance = 1e-8;
  // Float mode: also stop once the Birch residual drops below this.
  std::optional<double> birch_tolerance;
  bool record_history = false;
};

template <typename T>
struct IpsResult {
  std::vector<T> final;
  std::size_t steps_taken = 0;
  Fraction cycles_taken;
  bool converged = false;
  T birch_residual = T(0);
  bool one_cycle_exact = false;  // exact mode: Ap = Ad after exactly k steps
  std::vector<IpsHistoryEntry> history;
};

// Exact mode stops at a fixpoint of a full cycle; steps_taken is the last step
// that changed p. Float mode stops at the first step whose largest entry change
// is below the tolerance; steps_taken counts the steps before it.
template <typename T>
IpsResult<T> ips_run(const MultipartitionMatrix& mat, std::span<const T> d, const IpsConfig& cfg) {
  detail::check_data(mat, d);
  constexpr bool exact = std::is_same_v<T, Fraction>;
  const std::size_t k = mat.k();
  IpsResult<T> res;
  std::vector<T> p = initial_state<T>(mat).p;
  std::vector<double> dd;
  if (cfg.record_history)
    for (const auto& x : d) dd.push_back(detail::as_double(x));

  std::size_t step = 0, unchanged_run = 0, last_change = 0;
  const std::size_t max_steps = cfg.max_cycles * k;
  while (step < max_steps) {
    std::size_t l = step % k;
    T delta = ips_step_inplace(p, mat, d, l);
    ++step;
    if (cfg.record_history) {
      std::vector<double> pd;
      for (const auto& x : p) pd.push_back(detail::as_double(x));
      res.history.push_back({step, detail::as_double(delta), kl_divergence(std::span<const double>(dd),
                                                                           std::span<const double>(pd))});
    }
    if (step == k) res.one_cycle_exact = exact && birch_residual<T>(mat, std::span<const T>(p), d) == T(0);
    if constexpr (exact) {
      if (delta == T(0)) {
        ++unchanged_run;
      } else {
        unchanged_run = 0;
        last_change = step;
      }
      if (unchanged_run >= k) {
        res.converged = true;
        break;
      }
    } else {
      if (delta < cfg.float_tolerance) {
        res.converged = true;
        last_change = step - 1;
        break;
      }
      last_change = step;
      if (cfg.birch_tolerance && l == k - 1 &&
          birch_residual<T>(mat, std::span<const T>(p), d) < *cfg.birch_tolerance) {
        res.converged = true;
        break;
      }
    }
  }
  if (!res.converged) last_change = step;
  res.steps_taken = last_change;
  res.cycles_taken = Fraction(static_cast<long>(res.steps_taken), static_cast<long>(k));
  res.birch_residual = birch_residual<T>(mat, std::span<const T>(p), d);
  res.final = std::move(p);
  return res;
}
template <typename T>
IpsResult<T> ips_run(const MultipartitionMatrix& mat, const std::vector<T>& d, const IpsConfig& cfg) {
  return ips_run<T>(mat, std::span<const T>(d), cfg);
}

// Uniform on the open simplex: normalized i.i.d. standard exponentials.
inline std::vector<double> sample_dirichlet(std::size_t m, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> d(m);
  double s = 0;
  for (auto& x : d) {
    do x = ex(rng);
    while (x <= 0);
    s += x;
  }
  for (auto& x : d) x /= s;
  return d;
}

struct ExperimentConfig {
  std::size_t trials = 1000;
  double tolerance = 1e-8;
  std::uint64_t seed = 1;
  std::size_t max_cycles = 1'000'000;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct TrialResult {
  std::size_t trial;
  std::size_t steps;
  double final_birch_residual;
  bool converged;
};

struct ExperimentStats {
  std::vector<TrialResult> trials;
  double mean = 0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::map<std::size_t, std::size_t> histogram;  // steps -> count
};

inline ExperimentStats iteration_experiment(const MultipartitionMatrix& mat, const ExperimentConfig& cfg) {
  ExperimentStats st;
  st.trials.resize(cfg.trials);
  IpsConfig ic;
  ic.mode = IpsMode::Float;
  ic.float_tolerance = cfg.tolerance;
  ic.max_cycles = cfg.max_cycles;
  unsigned n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(1, cfg.trials)));
  auto worker = [&](unsigned w) {
    for (std::size_t t = w; t < cfg.trials; t += n_threads) {
      std::mt19937_64 rng(cfg.seed + t);
      auto d = sample_dirichlet(mat.m(), rng);
      auto r = ips_run<double>(mat, std::span<const double>(d), ic);
      st.trials[t] = {t, r.steps_taken, r.birch_residual, r.converged};
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  if (st.trials.empty()) return st;
  double total = 0;
  st.min = st.trials.front().steps;
  st.max = st.trials.front().steps;
  for (const auto& t : st.trials) {
    total += static_cast<double>(t.steps);
    st.min = std::min(st.min, t.steps);
    st.max = std::max(st.max, t.steps);
    ++st.histogram[t.steps];
  }
  st.mean = total / static_cast<double>(st.trials.size());
  return st;
}

}  // namespace pmle
