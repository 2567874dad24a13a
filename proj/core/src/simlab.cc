#include "bboxlab/simlab.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "bboxlab/error.h"
#include "bboxlab/grad.h"

namespace bboxlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_double(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

BBox displaced(const BBox& gt, Axis axis, DeviationMode mode, double d) {
  if (mode == DeviationMode::kPosition) {
    return axis == Axis::kX ? BBox(gt.x_c() + d, gt.y_c(), gt.w(), gt.h())
                            : BBox(gt.x_c(), gt.y_c() + d, gt.w(), gt.h());
  }
  return axis == Axis::kX ? BBox(gt.x_c(), gt.y_c(), gt.w() + d, gt.h())
                          : BBox(gt.x_c(), gt.y_c(), gt.w(), gt.h() + d);
}

bool all_finite(const std::array<double, 4>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct RunSummary {
  double final_iou = 0.0;
  int steps = 0;
  StopReason reason = StopReason::kMaxSteps;
};

RunSummary summarize(const Trajectory& t) {
  return {t.final_state().iou, t.final_state().step, t.stop_reason};
}

}  // namespace

std::string_view axis_name(Axis axis) { return axis == Axis::kX ? "x" : "y"; }

std::string_view deviation_mode_name(DeviationMode mode) {
  return mode == DeviationMode::kPosition ? "position" : "shape";
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged:
      return "converged";
    case StopReason::kMaxSteps:
      return "max_steps";
    case StopReason::kDiverged:
      return "diverged";
  }
  return "unknown";
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw InvalidParam("linspace needs at least one interval");
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    out[i] = i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / n;
  }
  return out;
}

SweepCurve deviation_sweep(const SweepSpec& spec) {
  for (std::size_t i = 1; i < spec.deviations.size(); ++i) {
    if (!(spec.deviations[i] > spec.deviations[i - 1])) {
      throw InvalidParam("sweep deviations must be strictly increasing");
    }
  }
  SweepCurve curve{spec, {}};
  curve.values.reserve(spec.deviations.size());
  for (double d : spec.deviations) {
    const BBox pred = displaced(spec.gt, spec.axis, spec.mode, d);
    curve.values.push_back(evaluate(spec.metric, pred, spec.gt, spec.params).value);
  }
  return curve;
}

BBox scaled(const BBox& b, double s) {
  if (!(s > 0.0)) throw InvalidParam("scale factor must be > 0");
  return BBox(b.x_c(), b.y_c(), b.w() * s, b.h() * s);
}

std::pair<SweepCurve, SweepCurve> scale_pair_sweep(const BBox& gt_small, const BBox& gt_large,
                                                   MetricId metric,
                                                   const std::vector<double>& deviations,
                                                   const MetricParams& params, Axis axis) {
  SweepSpec small{gt_small, axis, deviations, metric, params, DeviationMode::kPosition};
  SweepSpec large = small;
  large.gt = gt_large;
  return {deviation_sweep(small), deviation_sweep(large)};
}

Trajectory run_regression(const Scenario& scenario) {
  const DescentConfig& cfg = scenario.descent;
  if (!(cfg.lr > 0.0)) throw InvalidParam("learning rate must be > 0");
  if (cfg.max_steps < 1) throw InvalidParam("max_steps must be >= 1");

  Trajectory traj{scenario, {}, StopReason::kMaxSteps};
  traj.states.reserve(static_cast<std::size_t>(std::min(cfg.max_steps, 100000)) + 1);

  // (x_c, y_c, log w, log h)
  std::array<double, 4> z = {scenario.anchor.x_c(), scenario.anchor.y_c(),
                             std::log(scenario.anchor.w()), std::log(scenario.anchor.h())};
  BBox pred = scenario.anchor;
  for (int step = 0;; ++step) {
    const auto [loss, g] = loss_and_gradient(scenario.metric, pred, scenario.gt, scenario.params);
    if (!std::isfinite(loss)) {
      traj.stop_reason = StopReason::kDiverged;
      break;
    }
    traj.states.push_back({step, pred, loss, iou(pred, scenario.gt)});
    if (loss < cfg.converge_loss) {
      traj.stop_reason = StopReason::kConverged;
      break;
    }
    if (step == cfg.max_steps) {
      traj.stop_reason = StopReason::kMaxSteps;
      break;
    }
    // d/d(log w) = w * d/dw
    const std::array<double, 4> dz = {g.d_xc, g.d_yc, g.d_w * pred.w(), g.d_h * pred.h()};
    for (std::size_t k = 0; k < 4; ++k) z[k] -= cfg.lr * dz[k];
    const std::array<double, 4> next = {z[0], z[1], std::exp(z[2]), std::exp(z[3])};
    if (!all_finite(dz) || !all_finite(next) || !(next[2] > 0.0) || !(next[3] > 0.0)) {
      traj.stop_reason = StopReason::kDiverged;
      break;
    }
    pred = BBox(next[0], next[1], next[2], next[3]);
  }
  return traj;
}

std::vector<Scenario> generate_scenarios(const ScenarioGenerator& gen, std::size_t count,
                                         std::uint64_t seed) {
  if (!(gen.min_size > 0.0) || !(gen.max_size >= gen.min_size) || !(gen.max_aspect >= 1.0) ||
      !(gen.min_gt_aspect >= 1.0) || gen.min_gt_aspect > gen.max_aspect) {
    throw InvalidParam("invalid scenario generator ranges");
  }
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t scenario_seed = splitmix64(seed + i);
    std::mt19937_64 rng(scenario_seed);

    const double size = log_uniform(rng, gen.min_size, gen.max_size);
    double aspect = 1.0;
    if (gen.min_gt_aspect > 1.0) {
      aspect = log_uniform(rng, gen.min_gt_aspect, gen.max_aspect);
      if (unit_double(rng) < 0.5) aspect = 1.0 / aspect;
    } else {
      aspect = log_uniform(rng, 1.0 / gen.max_aspect, gen.max_aspect);
    }
    const double gw = size * std::sqrt(aspect);
    const double gh = size / std::sqrt(aspect);
    const BBox gt(unit_double(rng), unit_double(rng), gw, gh);

    const double ox = uniform(rng, -gen.max_offset, gen.max_offset) * gw;
    const double oy = uniform(rng, -gen.max_offset, gen.max_offset) * gh;
    const double jw = std::exp(uniform(rng, -gen.log_jitter, gen.log_jitter));
    const double jh = std::exp(uniform(rng, -gen.log_jitter, gen.log_jitter));
    const BBox anchor(gt.x_c() + ox, gt.y_c() + oy, gw * jw, gh * jh);

    out.push_back(Scenario{anchor, gt, gen.metric, gen.params, gen.descent, scenario_seed});
  }
  return out;
}

std::string default_label(MetricId metric, const MetricParams& params) {
  std::string label(metric_name(metric));
  if (uses_shape_weights(metric)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "[scale=%g]", params.scale);
    label += buf;
  }
  return label;
}

ComparisonTable batch_compare(const std::vector<Scenario>& templates,
                              const std::vector<LossConfig>& losses, std::uint64_t seed,
                              unsigned threads) {
  if (templates.empty()) throw InvalidParam("batch_compare needs at least one scenario");
  if (losses.empty()) throw InvalidParam("batch_compare needs at least one loss");

  const std::size_t n = templates.size();
  ComparisonTable table{n, seed, {}};
  for (const auto& loss : losses) {
    // Surface MissingParam/InvalidParam here rather than inside a worker.
    evaluate(loss.metric, templates.front().anchor, templates.front().gt, loss.params);
    std::vector<RunSummary> results(n);
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        Scenario s = templates[i];
        s.metric = loss.metric;
        s.params = loss.params;
        results[i] = summarize(run_regression(s));
      }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
      work(0, n);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (n + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
      }
      for (auto& t : pool) t.join();
    }

    ComparisonRow row{loss.label.empty() ? default_label(loss.metric, loss.params) : loss.label,
                      loss.metric, loss.params};
    double iou_sum = 0.0;
    double step_sum = 0.0;
    for (const auto& r : results) {
      iou_sum += r.final_iou;
      step_sum += r.steps;
      row.converged += r.reason == StopReason::kConverged ? 1 : 0;
      row.diverged += r.reason == StopReason::kDiverged ? 1 : 0;
    }
    row.mean_final_iou = iou_sum / static_cast<double>(n);
    row.mean_steps = step_sum / static_cast<double>(n);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace bboxlab
