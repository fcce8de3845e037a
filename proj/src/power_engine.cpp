#include "arelab/power_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "arelab/errors.hpp"
#include "arelab/kernels.hpp"
#include "arelab/ks_null.hpp"
#include "arelab/parallel.hpp"
#include "arelab/rng.hpp"
#include "arelab/test_stats.hpp"
#include "sorting.hpp"

namespace arelab {

namespace {

// Replicates per parallel chunk. Fixed so that chunking never depends on the
// number of worker threads.
constexpr std::size_t kGrain = 64;
constexpr std::size_t kImportanceSwitchHits = 50;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Fills x with a sample of size x.size() from p_theta (or the null when
// alt is null) using elements [0, n) of the replicate's stream. Streams are
// keyed without n, so the sample of size n is a prefix of the one of size n' > n.
void draw(const rng::Stream& stream, const LocalAlternative* alt, std::span<double> x) {
  stream.fill_uniforms(x);
  if (alt == nullptr) return;
  if (alt->spec().is_power_tail()) {
    kernels::power_tail_quantile(x, {alt->theta(), alt->spec().tail_exponent()});
  } else {
    for (double& v : x) v = quantile(*alt, v);
  }
}

PowerEstimate make_estimate(std::size_t hits, std::size_t replicates, std::size_t n, double level,
                            double critical) {
  PowerEstimate e;
  e.replicates = replicates;
  e.n = n;
  e.level = level;
  e.critical_value = critical;
  e.power = static_cast<double>(hits) / static_cast<double>(replicates);
  e.standard_error = std::sqrt(e.power * (1.0 - e.power) / static_cast<double>(replicates));
  return e;
}

// V_n for every replicate, in replicate order.
std::vector<double> simulate_np(const LocalAlternative& alt, const MomentSet& m, std::size_t n,
                                bool under_alternative, rng::Op op, const SimulationConfig& cfg) {
  if (n == 0) throw DomainError("sample size must be >= 1");
  if (!(m.var0 > 0.0)) throw DomainError("NP statistic needs a positive null variance");
  std::vector<double> v(cfg.replicates);
  const double scale = 1.0 / (std::sqrt(static_cast<double>(n)) * m.sigma0());
  const double centre = static_cast<double>(n) * m.e0;
  parallel_for(cfg.replicates, kGrain, resolve_threads(cfg.threads), [&](std::size_t begin, std::size_t end) {
    thread_local std::vector<double> x;
    x.resize(n);
    for (std::size_t rep = begin; rep < end; ++rep) {
      draw(rng::Stream(cfg.seed, op, 0, rep), under_alternative ? &alt : nullptr, x);
      v[rep] = (log_likelihood_sum(x, alt) - centre) * scale;
    }
  });
  return v;
}

double log_sum_exp(const std::vector<double>& terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - hi);
  return hi + std::log(s);
}

void validate_target(double target, double alpha) {
  if (!(target > alpha && target < 1.0)) {
    std::ostringstream msg;
    msg << "target power must lie in (alpha, 1) = (" << alpha << ", 1), got " << target;
    throw DomainError(msg.str());
  }
}

}  // namespace

std::size_t GridSpec::point(std::size_t index) const {
  std::size_t g = start;
  for (std::size_t j = 0; j < index; ++j) {
    g = std::max(g + 1, static_cast<std::size_t>(std::llround(static_cast<double>(g) * ratio)));
  }
  return g;
}

void SimulationConfig::validate() const {
  if (replicates < 1000) throw DomainError("replicates must be >= 1000");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (grid.start < 1) throw DomainError("grid must start at n >= 1");
  if (!(grid.ratio > 1.0)) throw DomainError("grid ratio must exceed 1 (strictly increasing grid)");
  if (grid.max_n < grid.start) throw DomainError("grid ceiling lies below its start");
  if (smoothing_window < 1) throw DomainError("smoothing window must be >= 1");
}

double np_null_quantile(const LocalAlternative& alt, const MomentSet& m, std::size_t n, double alpha,
                        const SimulationConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double tail = static_cast<double>(cfg.replicates) * alpha;
  if (tail < 10.0) {
    std::ostringstream msg;
    msg << "replicates * alpha = " << tail << " < 10 leaves the null tail unresolved";
    throw EstimationError(msg.str(), std::numeric_limits<double>::quiet_NaN(), 0);
  }
  std::vector<double> v = simulate_np(alt, m, n, false, rng::Op::np_null, cfg);
  const std::size_t r = v.size();
  const std::size_t index = std::min(r - 1, r - static_cast<std::size_t>(std::floor(tail)));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(index), v.end());
  return v[index];
}

double np_null_quantile(const LocalAlternative& alt, std::size_t n, double alpha,
                        const SimulationConfig& cfg) {
  return np_null_quantile(alt, log_moments(alt), n, alpha, cfg);
}

TailEstimate np_null_tail(const LocalAlternative& alt, const MomentSet& m, std::size_t n, double threshold,
                          const SimulationConfig& cfg) {
  TailEstimate est;
  est.replicates = cfg.replicates;
  const std::vector<double> v = simulate_np(alt, m, n, false, rng::Op::np_null, cfg);
  const auto hits = static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [threshold](double x) { return x >= threshold; }));
  const double r = static_cast<double>(cfg.replicates);
  if (hits >= kImportanceSwitchHits) {
    est.hits = hits;
    est.probability = static_cast<double>(hits) / r;
    est.log_probability = std::log(est.probability);
    est.standard_error = std::sqrt(est.probability * (1.0 - est.probability) / r);
    return est;
  }

  // Importance sampling from p_theta: dP0/dP_theta = exp(-S), S = sum log p(X_i),
  // and V_n >= threshold is S >= n e0 + sqrt(n) sigma0 threshold.
  const double nn = static_cast<double>(n);
  const double s_cut = nn * m.e0 + std::sqrt(nn) * m.sigma0() * threshold;
  std::vector<double> s(cfg.replicates);
  parallel_for(cfg.replicates, kGrain, resolve_threads(cfg.threads), [&](std::size_t begin, std::size_t end) {
    thread_local std::vector<double> x;
    x.resize(n);
    for (std::size_t rep = begin; rep < end; ++rep) {
      draw(rng::Stream(cfg.seed, rng::Op::importance, 0, rep), &alt, x);
      s[rep] = log_likelihood_sum(x, alt);
    }
  });
  std::vector<double> w1, w2;
  for (double si : s) {
    if (si >= s_cut) {
      w1.push_back(-si);
      w2.push_back(-2.0 * si);
    }
  }
  est.importance_sampled = true;
  est.hits = w1.size();
  if (w1.empty()) {
    throw EstimationError("importance sampling found no tail hits at threshold " + std::to_string(threshold) +
                              " (plain Monte Carlo had " + std::to_string(hits) + ")",
                          static_cast<double>(hits) / r, hits);
  }
  const double log_r = std::log(r);
  est.log_probability = log_sum_exp(w1) - log_r;
  est.probability = std::exp(est.log_probability);
  const double log_second = log_sum_exp(w2) - log_r;
  const double rel_var = std::max(0.0, std::exp(log_second - 2.0 * est.log_probability) - 1.0);
  est.standard_error = est.probability * std::sqrt(rel_var / r);
  return est;
}

TailEstimate np_level_from_shift(const LocalAlternative& alt, std::size_t n, double x,
                                 const SimulationConfig& cfg) {
  const MomentSet m = log_moments(alt);
  return np_null_tail(alt, m, n, x + shift_b(m, n), cfg);
}

PowerEstimate power_np(const LocalAlternative& alt, const MomentSet& m, std::size_t n, double critical,
                       const SimulationConfig& cfg) {
  const std::vector<double> v = simulate_np(alt, m, n, true, rng::Op::np_alternative, cfg);
  const auto hits = static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [critical](double x) { return x >= critical; }));
  return make_estimate(hits, cfg.replicates, n, cfg.alpha, critical);
}

PowerEstimate power_np(const LocalAlternative& alt, std::size_t n, double critical,
                       const SimulationConfig& cfg) {
  return power_np(alt, log_moments(alt), n, critical, cfg);
}

PowerEstimate power_ks_at(const LocalAlternative& alt, std::size_t n, double u, const SimulationConfig& cfg) {
  if (n == 0) throw DomainError("sample size must be >= 1");
  const double nn = static_cast<double>(n);
  const double d = u / std::sqrt(nn);
  // K_n >= u  iff  some U_(i) <= F(i/n - d) or U_(i) >= F((i-1)/n + d),
  // with U_(i) the sorted uniforms behind X_(i) = F^{-1}(U_(i)).
  std::vector<double> lower(n), upper(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double a = static_cast<double>(i) / nn - d;
    const double b = static_cast<double>(i - 1) / nn + d;
    lower[i - 1] = a < 0.0 ? -1.0 : cdf_value(alt, std::min(a, 1.0));
    upper[i - 1] = b > 1.0 ? 2.0 : cdf_value(alt, std::max(b, 0.0));
  }
  std::vector<std::uint8_t> rejected(cfg.replicates, 0);
  parallel_for(cfg.replicates, kGrain, resolve_threads(cfg.threads), [&](std::size_t begin, std::size_t end) {
    thread_local std::vector<double> x, scratch;
    thread_local std::vector<std::uint32_t> offsets;
    x.resize(n);
    for (std::size_t rep = begin; rep < end; ++rep) {
      rng::Stream(cfg.seed, rng::Op::ks_alternative, 0, rep).fill_uniforms(x);
      detail::sort_unit_interval(x, scratch, offsets);
      rejected[rep] = kernels::band_exceeded(x, lower, upper) ? 1 : 0;
    }
  });
  std::size_t hits = 0;
  for (std::uint8_t r : rejected) hits += r;
  return make_estimate(hits, cfg.replicates, n, cfg.alpha, u);
}

PowerEstimate power_ks_direct(const LocalAlternative& alt, std::size_t n, double u,
                              const SimulationConfig& cfg) {
  if (n == 0) throw DomainError("sample size must be >= 1");
  std::vector<std::uint8_t> rejected(cfg.replicates, 0);
  parallel_for(cfg.replicates, kGrain, resolve_threads(cfg.threads), [&](std::size_t begin, std::size_t end) {
    thread_local std::vector<double> x;
    x.resize(n);
    for (std::size_t rep = begin; rep < end; ++rep) {
      draw(rng::Stream(cfg.seed, rng::Op::ks_alternative, 0, rep), &alt, x);
      std::sort(x.begin(), x.end());
      rejected[rep] = ks_statistic_sorted(x) >= u ? 1 : 0;
    }
  });
  std::size_t hits = 0;
  for (std::uint8_t r : rejected) hits += r;
  return make_estimate(hits, cfg.replicates, n, cfg.alpha, u);
}

PowerEstimate power_ks(const LocalAlternative& alt, std::size_t n, double alpha, const SimulationConfig& cfg) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  PowerEstimate e = power_ks_at(alt, n, ks_critical(n, alpha), cfg);
  e.level = alpha;
  return e;
}

std::vector<double> isotonic_fit(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.size() != weights.size()) throw DomainError("isotonic_fit: size mismatch");
  struct Block {
    double mean, weight;
    std::size_t size;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
      a.weight = w;
      a.size += b.size;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) out.insert(out.end(), b.size, b.mean);
  return out;
}

namespace {

std::vector<double> smooth(const std::vector<GridEvaluation>& evals, const SimulationConfig& cfg) {
  std::vector<double> raw(evals.size());
  for (std::size_t i = 0; i < evals.size(); ++i) raw[i] = evals[i].raw_power;
  if (cfg.smoothing == PowerSmoothing::isotonic) {
    // Equal replicate counts, so equal weights.
    return isotonic_fit(raw, std::vector<double>(raw.size(), 1.0));
  }
  const std::size_t half = cfg.smoothing_window / 2;
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(raw.size() - 1, i + half);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += raw[j];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace

SampleSizeResult find_sample_size(const PowerCurve& curve, double target_power, const SimulationConfig& cfg) {
  cfg.validate();
  const GridSpec& grid = cfg.grid;
  std::map<std::size_t, PowerEstimate> at_n;       // every evaluation, keyed by n
  std::map<std::size_t, std::size_t> index_of_n;  // grid points only
  std::size_t best_n = 0;
  double best_power = -1.0;

  const auto n_of = [&grid](std::size_t j) { return grid.point(j); };
  const auto eval_n = [&](std::size_t n) -> const PowerEstimate& {
    auto it = at_n.find(n);
    if (it == at_n.end()) {
      it = at_n.emplace(n, curve(n)).first;
      if (it->second.power > best_power) {
        best_power = it->second.power;
        best_n = n;
      }
    }
    return it->second;
  };
  const auto eval = [&](std::size_t j) -> const PowerEstimate& {
    const std::size_t n = n_of(j);
    if (n > grid.max_n) {
      std::ostringstream msg;
      msg << "no verified crossing of power " << target_power << " up to n=" << grid.max_n << " (best power "
          << best_power << " at n=" << best_n << ")";
      throw SearchExhausted(msg.str(), best_n, best_power);
    }
    index_of_n[n] = j;
    return eval_n(n);
  };
  const auto evaluations = [&]() {
    std::vector<GridEvaluation> out;
    for (const auto& [n, est] : at_n) {
      const auto it = index_of_n.find(n);
      GridEvaluation g;
      g.grid_index = it == index_of_n.end() ? std::numeric_limits<std::size_t>::max() : it->second;
      g.n = n;
      g.raw_power = est.power;
      g.standard_error = est.standard_error;
      out.push_back(g);
    }
    const std::vector<double> s = smooth(out, cfg);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].smoothed_power = s[i];
    return out;
  };
  const auto smoothed_at = [](const std::vector<GridEvaluation>& ev, std::size_t n) {
    for (const auto& g : ev) {
      if (g.n == n) return g.smoothed_power;
    }
    return -1.0;
  };

  CrossingDiagnostics diag;
  std::size_t from = 0;  // search restarts here after a rejected window
  std::size_t crossing = 0;
  for (;;) {
    // Gallop over indices from, from+1, from+2, from+4, ... on the raw curve.
    std::size_t fail = from;
    bool have_fail = false;
    std::size_t pass = from;
    for (std::size_t step = 0;; step = step == 0 ? 1 : 2 * step) {
      const std::size_t j = from + step;
      if (eval(j).power >= target_power) {
        pass = j;
        break;
      }
      fail = j;
      have_fail = true;
    }
    if (have_fail) {
      while (pass - fail > 1) {
        const std::size_t mid = fail + (pass - fail) / 2;
        (eval(mid).power >= target_power ? pass : fail) = mid;
      }
    }
    for (std::size_t j = pass + 1; j <= pass + cfg.verification_window; ++j) eval(j);

    const std::vector<GridEvaluation> ev = evaluations();
    // First grid point at or after `from` whose smoothed power reaches the target.
    std::size_t cand = pass;
    for (std::size_t j = from; j <= pass; ++j) {
      if (index_of_n.count(n_of(j)) && smoothed_at(ev, n_of(j)) >= target_power) {
        cand = j;
        break;
      }
    }
    for (std::size_t j = cand + 1; j <= cand + cfg.verification_window; ++j) eval(j);
    const std::vector<GridEvaluation> ev2 = evaluations();
    std::size_t first_bad = 0;
    bool ok = true;
    for (std::size_t j = cand; j <= cand + cfg.verification_window; ++j) {
      if (smoothed_at(ev2, n_of(j)) < target_power) {
        ok = false;
        first_bad = j;
        break;
      }
    }
    if (ok) {
      crossing = cand;
      break;
    }
    ++diag.windows_rejected;
    from = first_bad + 1;
  }

  std::size_t N = n_of(crossing);
  if (grid.refine && crossing > 0) {
    const std::size_t prev = n_of(crossing - 1);
    eval(crossing - 1);
    const std::size_t mid = prev + (N - prev) / 2;
    if (mid > prev && mid < N) {
      eval_n(mid);
      if (smoothed_at(evaluations(), mid) >= target_power) N = mid;
    }
  }

  diag.evaluations = evaluations();
  diag.crossing_grid_n = n_of(crossing);
  diag.verification_passed = true;

  SampleSizeResult res;
  res.N = N;
  res.target_power = target_power;
  res.n_np = grid.start;
  res.ratio = static_cast<double>(N) / static_cast<double>(grid.start);
  res.ks_power_at_N = at_n.at(N);
  res.level = res.ks_power_at_N.level;
  res.crossing_diagnostics = std::move(diag);
  return res;
}

SampleSizeResult find_sample_size_ks(const LocalAlternative& alt, double target_power, double alpha,
                                     const SimulationConfig& cfg) {
  validate_target(target_power, alpha);
  SampleSizeResult res = find_sample_size(
      [&](std::size_t n) { return power_ks(alt, n, alpha, cfg); }, target_power, cfg);
  res.level = alpha;
  return res;
}

SampleSizeResult efficiency_ratio_empirical(const LocalAlternative& alt, std::size_t n_np, double alpha,
                                            const SimulationConfig& cfg) {
  cfg.validate();
  if (n_np == 0) throw DomainError("n_np must be >= 1");
  const MomentSet m = log_moments(alt);
  double level = alpha;
  double critical = 0.0;
  if (cfg.mode == LevelMode::fixed_level) {
    critical = np_null_quantile(alt, m, n_np, alpha, cfg);
  } else {
    critical = cfg.shift_x + shift_b(m, n_np);
    level = np_null_tail(alt, m, n_np, critical, cfg).probability;
  }
  PowerEstimate np = power_np(alt, m, n_np, critical, cfg);
  np.level = level;

  SimulationConfig search = cfg;
  search.grid.start = n_np;
  search.grid.max_n = std::max(cfg.grid.max_n, n_np);
  SampleSizeResult res = find_sample_size_ks(alt, np.power, level, search);
  res.n_np = n_np;
  res.ratio = static_cast<double>(res.N) / static_cast<double>(n_np);
  res.np_power = np;
  res.level = level;
  return res;
}

MonteCarloMoments monte_carlo_moments(const LocalAlternative& alt, std::size_t draws, std::uint64_t seed,
                                      std::size_t threads) {
  if (draws < 2) throw DomainError("monte_carlo_moments needs at least two draws");
  constexpr std::size_t kChunk = 1 << 14;
  const std::size_t chunks = (draws + kChunk - 1) / kChunk;
  struct Sums {
    double s[5] = {0, 0, 0, 0, 0};
  };

  const auto run = [&](rng::Op op, bool under_alternative, double& mean, double& mean_se, double& var,
                       double& var_se) {
    // Powers of log p - c about a pilot centre c keep the raw sums well conditioned.
    std::vector<double> pilot(4096);
    draw(rng::Stream(seed, op, 1, 0), under_alternative ? &alt : nullptr, pilot);
    double c = 0.0;
    for (double& v : pilot) c += log_density(alt, v);
    c /= static_cast<double>(pilot.size());

    std::vector<Sums> sums(chunks);
    parallel_for(chunks, 1, resolve_threads(threads), [&](std::size_t begin, std::size_t end) {
      thread_local std::vector<double> x, y;
      for (std::size_t ch = begin; ch < end; ++ch) {
        const std::size_t len = std::min(kChunk, draws - ch * kChunk);
        x.resize(len);
        y.resize(len);
        draw(rng::Stream(seed, op, 0, ch), under_alternative ? &alt : nullptr, x);
        if (alt.spec().is_power_tail()) {
          kernels::power_tail_log_density(x, y, {alt.theta(), alt.spec().tail_exponent()});
        } else {
          for (std::size_t i = 0; i < len; ++i) y[i] = log_density(alt, x[i]);
        }
        Sums& s = sums[ch];
        for (double v : y) {
          const double d = v - c;
          const double d2 = d * d;
          s.s[0] += 1.0;
          s.s[1] += d;
          s.s[2] += d2;
          s.s[3] += d2 * d;
          s.s[4] += d2 * d2;
        }
      }
    });
    Sums tot;
    for (const Sums& s : sums) {
      for (int k = 0; k < 5; ++k) tot.s[k] += s.s[k];
    }
    const double n = tot.s[0];
    const double m1 = tot.s[1] / n, m2 = tot.s[2] / n, m3 = tot.s[3] / n, m4 = tot.s[4] / n;
    const double v = m2 - m1 * m1;
    const double mu4 = m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1 * m1 * m1 * m1;
    mean = c + m1;
    mean_se = std::sqrt(v / n);
    var = v * n / (n - 1.0);
    var_se = std::sqrt(std::max(0.0, mu4 - v * v) / n);
  };

  MonteCarloMoments out;
  out.draws = draws;
  run(rng::Op::moments_null, false, out.e0, out.e0_se, out.var0, out.var0_se);
  run(rng::Op::moments_alternative, true, out.e1, out.e1_se, out.var1, out.var1_se);
  return out;
}

}  // namespace arelab
