/*
 * Copyright 2025-2026 The wimesh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wimesh/tuner.hpp"

#include <cmath>
#include <sstream>

#include "wimesh/network.hpp"

namespace wimesh {

Regressors build_regressors(const TrainingSet& ts, bool true_mean) {
  if (ts.size() < 3)
    throw ConfigError("training set needs at least 3 samples");
  Regressors r;
  double averager = 0.0;
  double prev = 0.0;
  long epochs_seen = 0;
  for (size_t e = 0; e + 1 < ts.size(); ++e) {
    double cur = ts.samples[e];
    // At the end of epoch e the unit predicts epoch e+1 from the registers
    // as they stand before the commit. Both lags exist from e = 1 on.
    if (e >= 1) {
      r.x.push_back(cur);
      r.y.push_back(averager);
      r.z.push_back(cur - prev);
      r.a.push_back(ts.samples[e + 1]);
    }
    if (true_mean) {
      averager = (averager * epochs_seen + cur) / (epochs_seen + 1.0);
      ++epochs_seen;
    } else {
      averager = (cur + averager) / 2.0;
    }
    prev = cur;
  }
  return r;
}

double cost(const Weights& w, const Regressors& r) {
  double s = 0.0;
  const size_t m = r.a.size();
  for (size_t i = 0; i < m; ++i) {
    double e = w.kp * r.x[i] + w.ki * r.y[i] + w.kd * r.z[i] - r.a[i];
    s += e * e;
  }
  return s / static_cast<double>(m);
}

double cost(const Weights& w, const TrainingSet& ts) {
  return cost(w, build_regressors(ts));
}

std::array<double, 3> cost_gradient(const Weights& w, const Regressors& r) {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  const size_t m = r.a.size();
  for (size_t i = 0; i < m; ++i) {
    double e = w.kp * r.x[i] + w.ki * r.y[i] + w.kd * r.z[i] - r.a[i];
    g[0] += 2.0 * e * r.x[i];
    g[1] += 2.0 * e * r.y[i];
    g[2] += 2.0 * e * r.z[i];
  }
  for (auto& v : g) v /= static_cast<double>(m);
  return g;
}

namespace {

double clampw(double v, double cap) {
  if (v < 0.0) return 0.0;
  if (v > cap) return cap;
  return v;
}

// Projected gradient descent over the selected coordinates with halving
// line search. Appends accepted costs to trace.
void descend(const Regressors& r, Weights& w, bool move_kp_ki, bool move_kd,
             const TuneOptions& opt, std::vector<double>& trace,
             int& iters_used) {
  double j = cost(w, r);
  if (!std::isfinite(j)) throw ConfigError("tuner: non-finite cost");
  trace.push_back(j);
  for (int it = 0; it < opt.max_iters; ++it) {
    auto g = cost_gradient(w, r);
    if (!move_kp_ki) g[0] = g[1] = 0.0;
    if (!move_kd) g[2] = 0.0;
    double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    if (norm < opt.tol) break;
    double step = opt.initial_step;
    bool accepted = false;
    while (step > 1e-18) {
      Weights cand = w;
      cand.kp = clampw(w.kp - step * g[0], opt.weight_cap);
      cand.ki = clampw(w.ki - step * g[1], opt.weight_cap);
      cand.kd = clampw(w.kd - step * g[2], opt.weight_cap);
      double jc = cost(cand, r);
      if (!std::isfinite(jc)) throw ConfigError("tuner: non-finite cost");
      if (jc < j) {
        w = cand;
        j = jc;
        trace.push_back(j);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iters_used;
    if (!accepted) break;  // no descent direction within resolution
  }
}

}  // namespace

TuneResult two_step_optimize(const TrainingSet& ts, const TuneOptions& opt) {
  Regressors r = build_regressors(ts);
  TuneResult out;
  out.weights = Weights{0.0, 0.0, 0.0};

  bool constant = true;
  for (double z : r.z)
    if (z != 0.0) constant = false;
  out.degenerate = constant;

  descend(r, out.weights, true, false, opt, out.trace, out.iterations);
  if (!constant)
    descend(r, out.weights, false, true, opt, out.trace, out.iterations);
  out.final_cost = cost(out.weights, r);
  out.final_rmse = std::sqrt(out.final_cost);
  return out;
}

Weights two_step_closed_form(const TrainingSet& ts) {
  Regressors r = build_regressors(ts);
  const size_t m = r.a.size();
  double sxx = 0, sxy = 0, syy = 0, sxa = 0, sya = 0;
  for (size_t i = 0; i < m; ++i) {
    sxx += r.x[i] * r.x[i];
    sxy += r.x[i] * r.y[i];
    syy += r.y[i] * r.y[i];
    sxa += r.x[i] * r.a[i];
    sya += r.y[i] * r.a[i];
  }
  Weights w{0.0, 0.0, 0.0};
  double det = sxx * syy - sxy * sxy;
  if (std::abs(det) > 1e-12 * (sxx * syy + 1.0)) {
    w.kp = (sxa * syy - sya * sxy) / det;
    w.ki = (sya * sxx - sxa * sxy) / det;
  } else if (sxx > 0.0) {
    w.kp = sxa / sxx;
  }
  double szz = 0, sze = 0;
  for (size_t i = 0; i < m; ++i) {
    double e = r.a[i] - w.kp * r.x[i] - w.ki * r.y[i];
    szz += r.z[i] * r.z[i];
    sze += r.z[i] * e;
  }
  if (szz > 0.0) w.kd = sze / szz;
  return w;
}

TrainingSet collect_training_set(const ExperimentConfig& base, long epochs,
                                 Cycle epoch_cycles) {
  ExperimentConfig cfg = base;
  cfg.scheme = Scheme::TMac;
  cfg.wi_vc_depth = 0;
  cfg.traffic.pattern = Pattern::Uniform;
  cfg.traffic.injection_load = 1.0;
  cfg.traffic.temporal = Temporal::SelfSimilar;
  cfg.measure_cycles = static_cast<Cycle>(epochs) * epoch_cycles;
  Simulation sim(cfg);
  sim.enable_demand_sampling(epoch_cycles);
  SimResult res = sim.run();

  // WI with the highest sample variance.
  int best = 0;
  double best_var = -1.0;
  for (size_t i = 0; i < res.demand_windows.size(); ++i) {
    const auto& s = res.demand_windows[i];
    if (s.empty()) continue;
    double mean = 0;
    for (long v : s) mean += static_cast<double>(v);
    mean /= s.size();
    double var = 0;
    for (long v : s) {
      double d = v - mean;
      var += d * d;
    }
    var /= s.size();
    if (var > best_var) {
      best_var = var;
      best = static_cast<int>(i);
    }
  }
  TrainingSet ts;
  ts.epoch_cycles = epoch_cycles;
  ts.config_hash = cfg.hash();
  for (long v : res.demand_windows[best])
    ts.samples.push_back(static_cast<double>(v));
  return ts;
}

std::string weights_artifact(const TuneResult& r) {
  std::ostringstream os;
  os.precision(12);
  os << "kp = " << r.weights.kp << "\n";
  os << "ki = " << r.weights.ki << "\n";
  os << "kd = " << r.weights.kd << "\n";
  os << "# cost " << r.final_cost << " rmse " << r.final_rmse
     << " iterations " << r.iterations;
  if (r.degenerate) os << " (constant training set: kd left at 0)";
  os << "\n# trace";
  size_t step = r.trace.size() > 50 ? r.trace.size() / 50 : 1;
  for (size_t i = 0; i < r.trace.size(); i += step) os << " " << r.trace[i];
  os << "\n";
  return os.str();
}

}  // namespace wimesh
