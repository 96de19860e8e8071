// diagnostics.hpp - Lyapunov instrumentation and stability verdicts
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "saev/sim.hpp"
#include "saev/time.hpp"

namespace saev {

struct LyapunovSnapshot {
  SimTime time;
  double value = 0.0;             // 0.5 * sum lambda_c * H_c^2
  std::vector<double> per_node;   // individual 0.5 * lambda_c * H_c^2 terms
};

inline LyapunovSnapshot lyapunov_snapshot(SimTime time, const std::vector<double>& rates,
                                          const std::vector<double>& hol_waits) {
  if (rates.size() != hol_waits.size())
    throw std::invalid_argument("rate and waiting vectors differ in length");
  LyapunovSnapshot s;
  s.time = time;
  s.per_node.reserve(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    double term = 0.5 * rates[i] * hol_waits[i] * hol_waits[i];
    s.per_node.push_back(term);
    s.value += term;
  }
  return s;
}

/// Drift bound constant: 0.5 * sum (lambda^2 + lambda + 2/lambda + 1).
/// The 2/lambda term diverges toward zero, so tiny rates are rejected.
inline double lemma1_K(const std::vector<double>& rates) {
  constexpr double kLambdaMin = 1e-9;
  double k = 0.0;
  for (double l : rates) {
    if (!(l >= kLambdaMin) || !(l < 1.0))
      throw std::domain_error("arrival rate outside [1e-9, 1)");
    k += 0.5 * (l * l + l + 2.0 / l + 1.0);
  }
  return k;
}

struct DriftSeries {
  std::vector<double> deltas;        // L(t+1) - L(t)
  std::vector<double> running_mean;  // mean of deltas[0..i]
};

inline DriftSeries empirical_drift(const std::vector<LyapunovSnapshot>& trajectory) {
  if (trajectory.size() < 2)
    throw std::invalid_argument("drift needs at least two snapshots");
  DriftSeries out;
  double sum = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    double d = trajectory[i].value - trajectory[i - 1].value;
    out.deltas.push_back(d);
    sum += d;
    out.running_mean.push_back(sum / static_cast<double>(out.deltas.size()));
  }
  return out;
}

enum class StabilityVerdict { Stable, Growing, Inconclusive };

inline const char* verdict_name(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "STABLE";
    case StabilityVerdict::Growing: return "GROWING";
    case StabilityVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct StabilityReport {
  std::vector<double> window_means;  // mean sum of HOL waits per window
  double growth_factor = 1.2;
  double noise_floor = 0.5;
  StabilityVerdict verdict = StabilityVerdict::Inconclusive;
  std::string note;
};

/// Splits the series into equal windows (first window = warm-up, excluded from
/// the verdict) and compares the last window's mean against the previous one.
/// The noise floor (in summed HOL minutes) keeps a near-empty system from being
/// flagged GROWING because its tiny window means jitter across the ratio.
inline StabilityReport stability_verdict(const std::vector<SeriesPoint>& series, int windows = 5,
                                         double growth_factor = 1.2,
                                         double noise_floor = 0.5) {
  StabilityReport rep;
  rep.growth_factor = growth_factor;
  rep.noise_floor = noise_floor;
  if (windows < 4) throw std::invalid_argument("need at least 4 windows");
  if (series.size() < static_cast<std::size_t>(windows) * 2) {
    rep.note = "horizon too short for " + std::to_string(windows) + " windows";
    return rep;
  }
  std::size_t per = series.size() / static_cast<std::size_t>(windows);
  for (int w = 0; w < windows; ++w) {
    std::size_t lo = static_cast<std::size_t>(w) * per;
    std::size_t hi = (w + 1 == windows) ? series.size() : lo + per;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += series[i].sum_hol_wait_min;
    rep.window_means.push_back(sum / static_cast<double>(hi - lo));
  }
  double prev = rep.window_means[rep.window_means.size() - 2];
  double last = rep.window_means.back();
  // additive floor doubles as the prev == 0 guard for flat-at-zero queues
  if (last <= growth_factor * prev + noise_floor)
    rep.verdict = StabilityVerdict::Stable;
  else
    rep.verdict = StabilityVerdict::Growing;
  return rep;
}

}  // namespace saev
