#include <benchmark/benchmark.h>

#include "bboxlab/grad.h"
#include "bboxlab/metrics.h"
#include "bboxlab/oracle.h"
#include "bboxlab/simlab.h"

namespace {

using bboxlab::BBox;
using bboxlab::MetricId;

bboxlab::MetricParams params() {
  bboxlab::MetricParams p;
  p.scale = 1.0;
  p.mean_size_s = 3.0;
  p.nwd_c = 3.0;
  return p;
}

void BM_Evaluate(benchmark::State& state) {
  const auto id = bboxlab::kAllMetrics[static_cast<std::size_t>(state.range(0))];
  const BBox pred(1.1, 0.4, 2.3, 1.7), gt(0.5, 0.2, 2.0, 1.0);
  const auto p = params();
  state.SetLabel(std::string(bboxlab::metric_name(id)));
  for (auto _ : state) benchmark::DoNotOptimize(bboxlab::evaluate(id, pred, gt, p));
}
BENCHMARK(BM_Evaluate)->DenseRange(0, static_cast<int>(bboxlab::kAllMetrics.size()) - 1);

void BM_LossAndGradient(benchmark::State& state) {
  const auto id = bboxlab::kAllMetrics[static_cast<std::size_t>(state.range(0))];
  const BBox pred(1.1, 0.4, 2.3, 1.7), gt(0.5, 0.2, 2.0, 1.0);
  const auto p = params();
  state.SetLabel(std::string(bboxlab::metric_name(id)));
  for (auto _ : state) benchmark::DoNotOptimize(bboxlab::loss_and_gradient(id, pred, gt, p));
}
BENCHMARK(BM_LossAndGradient)->DenseRange(0, static_cast<int>(bboxlab::kAllMetrics.size()) - 1);

void BM_MonteCarloIoU(benchmark::State& state) {
  const BBox a(1, 1, 2, 2), b(2, 2, 2, 2);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bboxlab::mc_iou(a, b, n, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloIoU)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_GridIoU(benchmark::State& state) {
  const BBox a(1, 1, 2, 2), b(2, 2, 2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bboxlab::grid_iou(a, b, static_cast<std::uint32_t>(state.range(0))));
  }
}
BENCHMARK(BM_GridIoU)->Arg(3000);

void BM_RunRegression(benchmark::State& state) {
  const MetricId ids[] = {MetricId::kIoU, MetricId::kGIoU, MetricId::kDIoU, MetricId::kShapeIoU};
  const MetricId id = ids[state.range(0)];
  bboxlab::Scenario s{BBox(1, 1, 2, 2), BBox(0, 0, 2, 2), id, {}, {0.05, 2000, 1e-6}, 0};
  state.SetLabel(std::string(bboxlab::metric_name(id)));
  for (auto _ : state) benchmark::DoNotOptimize(bboxlab::run_regression(s));
}
BENCHMARK(BM_RunRegression)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
