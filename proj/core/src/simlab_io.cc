#include "bboxlab/simlab_io.h"

#include <cstdio>

#include "json.hpp"

namespace bboxlab {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, const SweepCurve& curve) {
  os << "deviation,value\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    os << format_full(curve.spec.deviations[i]) << ',' << format_full(curve.values[i]) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<NamedCurve>& curves) {
  if (curves.size() == 1) {
    write_sweep_csv(os, *curves.front().curve);
    return;
  }
  os << "curve,deviation,value\n";
  for (const auto& [name, curve] : curves) {
    for (std::size_t i = 0; i < curve->values.size(); ++i) {
      os << name << ',' << format_full(curve->spec.deviations[i]) << ','
         << format_full(curve->values[i]) << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "step,xc,yc,w,h,loss,iou\n";
  for (const auto& s : trajectory.states) {
    os << s.step << ',' << format_full(s.pred.x_c()) << ',' << format_full(s.pred.y_c()) << ','
       << format_full(s.pred.w()) << ',' << format_full(s.pred.h()) << ','
       << format_full(s.loss) << ',' << format_full(s.iou) << '\n';
  }
}

void write_comparison_csv(std::ostream& os, const ComparisonTable& table) {
  os << "metric,mean_final_iou,mean_steps,diverged\n";
  for (const auto& row : table.rows) {
    // Labels such as "shape-iou[scale=1]" never contain commas or quotes.
    os << row.label << ',' << format_full(row.mean_final_iou) << ','
       << format_full(row.mean_steps) << ',' << row.diverged << '\n';
  }
}

std::string comparison_to_json(const ComparisonTable& table, int indent) {
  nlohmann::ordered_json j;
  j["n_scenarios"] = table.n_scenarios;
  j["seed"] = table.seed;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["metric"] = row.label;
    r["metric_id"] = std::string(metric_name(row.metric));
    r["scale"] = row.params.scale;
    r["mean_final_iou"] = row.mean_final_iou;
    r["mean_steps"] = row.mean_steps;
    r["converged"] = row.converged;
    r["diverged"] = row.diverged;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(indent);
}

}  // namespace bboxlab
