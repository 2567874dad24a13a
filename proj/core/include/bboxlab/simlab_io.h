#ifndef BBOXLAB_SIMLAB_IO_H_
#define BBOXLAB_SIMLAB_IO_H_

// CSV / JSON emission for sweep curves, trajectories and comparison tables.
// Numbers are written with 17 significant digits so they round-trip exactly.
//
//   sweep       deviation,value            (one curve)
//               curve,deviation,value      (several curves)
//   trajectory  step,xc,yc,w,h,loss,iou
//   compare     metric,mean_final_iou,mean_steps,diverged

#include <ostream>
#include <string>
#include <vector>

#include "bboxlab/simlab.h"

namespace bboxlab {

std::string format_full(double v);

struct NamedCurve {
  std::string name;
  const SweepCurve* curve;
};

void write_sweep_csv(std::ostream& os, const SweepCurve& curve);
void write_sweep_csv(std::ostream& os, const std::vector<NamedCurve>& curves);
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
void write_comparison_csv(std::ostream& os, const ComparisonTable& table);

// {"n_scenarios":..,"seed":..,"rows":[{"metric":..,"metric_id":..,"scale":..,
//   "mean_final_iou":..,"mean_steps":..,"converged":..,"diverged":..}]}
std::string comparison_to_json(const ComparisonTable& table, int indent = 2);

}  // namespace bboxlab

#endif  // BBOXLAB_SIMLAB_IO_H_
