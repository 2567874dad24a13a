#ifndef BBOXLAB_SIMLAB_H_
#define BBOXLAB_SIMLAB_H_

// Deviation sweeps and synthetic gradient-descent regression runs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bboxlab/box.h"
#include "bboxlab/metrics.h"

namespace bboxlab {

enum class Axis { kX, kY };
enum class DeviationMode { kPosition, kShape };

std::string_view axis_name(Axis axis);
std::string_view deviation_mode_name(DeviationMode mode);

struct SweepSpec {
  BBox gt;
  Axis axis = Axis::kX;
  // Strictly increasing offsets, in the same length unit as gt.
  std::vector<double> deviations;
  MetricId metric = MetricId::kIoU;
  MetricParams params;
  // Position mode shifts the center along `axis`; shape mode grows (or for
  // negative offsets shrinks) the size along `axis` with the center fixed.
  DeviationMode mode = DeviationMode::kPosition;
};

struct SweepCurve {
  SweepSpec spec;
  std::vector<double> values;
};

// n + 1 evenly spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

// Throws InvalidParam for non-increasing deviations and InvalidBox when a
// shape deviation drives a size to <= 0.
SweepCurve deviation_sweep(const SweepSpec& spec);

// Scales w and h of `b` by s around its center.
BBox scaled(const BBox& b, double s);

// Sweeps the same absolute deviations over a small and a large ground truth.
std::pair<SweepCurve, SweepCurve> scale_pair_sweep(const BBox& gt_small, const BBox& gt_large,
                                                   MetricId metric,
                                                   const std::vector<double>& deviations,
                                                   const MetricParams& params,
                                                   Axis axis = Axis::kX);

struct DescentConfig {
  double lr = 0.05;
  int max_steps = 2000;
  double converge_loss = 1e-6;

  bool operator==(const DescentConfig&) const = default;
};

struct Scenario {
  BBox anchor;
  BBox gt;
  MetricId metric = MetricId::kIoU;
  MetricParams params;
  DescentConfig descent;
  std::uint64_t seed = 0;
};

enum class StopReason { kConverged, kMaxSteps, kDiverged };
std::string_view stop_reason_name(StopReason reason);

struct TrajectoryState {
  int step;
  BBox pred;
  double loss;
  double iou;
};

struct Trajectory {
  Scenario scenario;
  std::vector<TrajectoryState> states;
  StopReason stop_reason = StopReason::kMaxSteps;

  const TrajectoryState& final_state() const { return states.back(); }
};

// Explicit gradient descent in (x_c, y_c, log w, log h) with a fixed step.
// State k is recorded before update k; the run stops when the recorded loss
// is below converge_loss, after max_steps updates, or when an update yields
// a non-finite value (diverged; the offending state is not recorded).
Trajectory run_regression(const Scenario& scenario);

// Random scenario generation. Centers are uniform in the unit canvas, aspect
// ratios log-uniform in [1/max_aspect, max_aspect] and sizes (sqrt of area)
// log-uniform in [min_size, max_size]. With min_gt_aspect > 1 the ground
// truth's long/short ratio is forced into [min_gt_aspect, max_aspect] with a
// random orientation. The anchor is the ground truth perturbed by a center
// offset up to max_offset * size and a log-size jitter up to +-log_jitter per
// side, so runs start from a partially overlapping box.
struct ScenarioGenerator {
  double min_size = 0.05;
  double max_size = 0.5;
  double max_aspect = 4.0;
  double min_gt_aspect = 1.0;
  double max_offset = 0.5;
  double log_jitter = 0.5;
  MetricId metric = MetricId::kIoU;
  MetricParams params;
  DescentConfig descent;

  bool operator==(const ScenarioGenerator&) const = default;
};

// Scenario i is drawn from its own mt19937_64 stream seeded by
// splitmix64(seed + i), so any prefix of the list is reproducible alone.
std::vector<Scenario> generate_scenarios(const ScenarioGenerator& gen, std::size_t count,
                                         std::uint64_t seed);

// One row of a comparison: a metric and the parameters it runs with.
struct LossConfig {
  std::string label;
  MetricId metric;
  MetricParams params;
};

std::string default_label(MetricId metric, const MetricParams& params);

struct ComparisonRow {
  std::string label;
  MetricId metric;
  MetricParams params;
  double mean_final_iou = 0.0;
  // Mean number of updates taken; runs that never converge count max_steps.
  double mean_steps = 0.0;
  std::size_t converged = 0;
  std::size_t diverged = 0;
};

struct ComparisonTable {
  std::size_t n_scenarios = 0;
  std::uint64_t seed = 0;
  std::vector<ComparisonRow> rows;
};

// Runs every scenario under every loss. Each template keeps its anchor, gt
// and descent config; metric and params come from the loss row, so rows are
// paired over the same scenario set. `threads` > 1 splits scenarios across
// workers; results are reduced in scenario order, so output does not depend
// on the thread count. Throws InvalidParam on empty inputs.
ComparisonTable batch_compare(const std::vector<Scenario>& templates,
                              const std::vector<LossConfig>& losses, std::uint64_t seed,
                              unsigned threads = 1);

}  // namespace bboxlab

#endif  // BBOXLAB_SIMLAB_H_
