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

#include "wimesh/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace wimesh {

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0)
    jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int n_threads = std::min(jobs, count);
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

LoadSweepResult sweep_load(const ExperimentConfig& base,
                           const std::vector<double>& loads,
                           const SaturationRule& rule, int jobs) {
  if (loads.empty()) throw ConfigError("empty load list");
  if (!std::is_sorted(loads.begin(), loads.end()))
    throw ConfigError("loads must be sorted ascending");
  LoadSweepResult out;
  out.points.resize(loads.size());
  parallel_for(static_cast<int>(loads.size()), jobs, [&](int i) {
    ExperimentConfig cfg = base;
    cfg.traffic.injection_load = loads[i];
    SimResult r = run_simulation(cfg);
    out.points[i] = {loads[i], r.summary};
  });

  double base_latency =
      out.points.front().summary.avg_latency_cycles.value_or(0.0);
  out.zero_load_latency = base_latency;
  double best_bw = 0.0;
  double prev_bw = -1.0;
  for (size_t i = 0; i < out.points.size(); ++i) {
    const RunSummary& s = out.points[i].summary;
    double lat = s.avg_latency_cycles.value_or(0.0);
    bool saturated = false;
    if (i > 0 && base_latency > 0.0 &&
        lat > rule.latency_factor * base_latency)
      saturated = true;
    if (i > 0 && prev_bw > 0.0 &&
        s.bandwidth_per_core_bps < prev_bw * (1.0 + rule.min_gain))
      saturated = true;
    if (saturated && !out.saturation_load) {
      out.saturation_load = out.points[i].load;
      break;
    }
    best_bw = std::max(best_bw, s.bandwidth_per_core_bps);
    prev_bw = s.bandwidth_per_core_bps;
  }
  if (!out.saturation_load) {
    // Unsaturated across the sweep: peak is the highest measured bandwidth.
    best_bw = 0.0;
    for (const auto& p : out.points)
      best_bw = std::max(best_bw, p.summary.bandwidth_per_core_bps);
  }
  out.peak_bandwidth_per_core_bps = best_bw;
  return out;
}

SubnetSweepResult sweep_subnet(const ExperimentConfig& base,
                               const std::vector<int>& sizes,
                               const std::vector<double>& loads,
                               const SaturationRule& rule, int jobs) {
  SubnetSweepResult out;
  out.rows.resize(sizes.size());
  parallel_for(static_cast<int>(sizes.size()), jobs, [&](int i) {
    ExperimentConfig cfg = base;
    cfg.scheme = Scheme::TMac;
    cfg.wi_vc_depth = 0;
    cfg.subnet_size = sizes[i];
    cfg.traffic.pattern = Pattern::Uniform;
    LoadSweepResult r = sweep_load(cfg, loads, rule, 1);
    out.rows[i] = {sizes[i], cfg.n_wis(), r.peak_bandwidth_per_core_bps};
  });
  double best = -1.0;
  for (const auto& row : out.rows)
    if (row.peak_bandwidth_per_core_bps > best) {
      best = row.peak_bandwidth_per_core_bps;
      out.best_subnet_size = row.subnet_size;
    }
  return out;
}

CompareResult compare_schemes(const ExperimentConfig& base,
                              const std::vector<Scheme>& schemes,
                              Scheme baseline,
                              const std::vector<double>& loads,
                              const SaturationRule& rule, int jobs) {
  CompareResult out;
  out.baseline = baseline;
  out.schemes.resize(schemes.size());
  parallel_for(static_cast<int>(schemes.size()), jobs, [&](int i) {
    ExperimentConfig cfg = base;
    cfg.scheme = schemes[i];
    cfg.wi_vc_depth = base.wi_vc_depth;  // 0 keeps the per-scheme default
    SchemeComparison sc;
    sc.scheme = schemes[i];
    sc.sweep = sweep_load(cfg, loads, rule, 1);
    long long alloc = 0, used = 0;
    for (const auto& p : sc.sweep.points) {
      alloc += p.summary.allocated_slot_flits;
      used += p.summary.used_slot_flits;
    }
    if (alloc > 0)
      sc.wasted_slot_fraction =
          static_cast<double>(alloc - used) / static_cast<double>(alloc);
    out.schemes[i] = std::move(sc);
  });
  double base_peak = 0.0;
  for (const auto& sc : out.schemes)
    if (sc.scheme == baseline)
      base_peak = sc.sweep.peak_bandwidth_per_core_bps;
  for (auto& sc : out.schemes) {
    if (base_peak > 0.0)
      sc.peak_gain_vs_baseline_pct =
          (sc.sweep.peak_bandwidth_per_core_bps / base_peak - 1.0) * 100.0;
  }
  return out;
}

std::string sweep_csv(const LoadSweepResult& r) {
  std::ostringstream os;
  os << RunSummary::csv_header() << "\n";
  for (const auto& p : r.points) os << p.summary.csv_row() << "\n";
  return os.str();
}

std::string compare_csv(const CompareResult& r) {
  std::ostringstream os;
  os << "scheme,peak_bandwidth_per_core_bps,peak_gain_vs_baseline_pct,"
        "saturation_load\n";
  for (const auto& sc : r.schemes) {
    os << scheme_name(sc.scheme) << ","
       << sc.sweep.peak_bandwidth_per_core_bps << ","
       << sc.peak_gain_vs_baseline_pct << ",";
    if (sc.sweep.saturation_load)
      os << *sc.sweep.saturation_load;
    else
      os << "na";
    os << "\n";
  }
  return os.str();
}

std::string svg_line_chart(const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<std::string>& labels,
                           const std::vector<std::vector<double>>& xs,
                           const std::vector<std::vector<double>>& ys) {
  const int w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& v : xs)
    for (double x : v) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
  for (const auto& v : ys)
    for (double y : v) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  ymin = std::min(ymin, 0.0);
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto py = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
     << "' height='" << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << w / 2 << "' y='22' text-anchor='middle' "
     << "font-size='15'>" << title << "</text>\n";
  os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
     << "' y2='" << h - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << h - mb << "' stroke='black'/>\n";
  os << "<text x='" << w / 2 << "' y='" << h - 12
     << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
  os << "<text x='16' y='" << h / 2
     << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
     << h / 2 << ")'>" << y_label << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    double xv = xmin + (xmax - xmin) * t / 4.0;
    double yv = ymin + (ymax - ymin) * t / 4.0;
    os << "<text x='" << px(xv) << "' y='" << h - mb + 16
       << "' text-anchor='middle' font-size='10'>" << xv << "</text>\n";
    os << "<text x='" << ml - 6 << "' y='" << py(yv) + 3
       << "' text-anchor='end' font-size='10'>" << yv << "</text>\n";
  }
  for (size_t s = 0; s < xs.size(); ++s) {
    const char* col = colors[s % 6];
    os << "<polyline fill='none' stroke='" << col << "' stroke-width='2' "
       << "points='";
    for (size_t i = 0; i < xs[s].size(); ++i)
      os << px(xs[s][i]) << "," << py(ys[s][i]) << " ";
    os << "'/>\n";
    os << "<text x='" << w - mr - 150 << "' y='" << mt + 16 * s + 10
       << "' font-size='11' fill='" << col << "'>"
       << (s < labels.size() ? labels[s] : "series") << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace wimesh
