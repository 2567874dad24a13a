#include "bboxlab/grad.h"

#include <algorithm>
#include <cmath>

#include "bboxlab/dual.h"
#include "bboxlab/error.h"
#include "kernels.h"

namespace bboxlab {

namespace {

using Dual4 = Dual<4>;

double edge_gap_min(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::min({std::abs(a_lo - b_lo), std::abs(a_lo - b_hi), std::abs(a_hi - b_lo),
                   std::abs(a_hi - b_hi)});
}

}  // namespace

double BoxGradient::max_abs() const {
  return std::max({std::abs(d_xc), std::abs(d_yc), std::abs(d_w), std::abs(d_h)});
}

LossAndGradient loss_and_gradient(MetricId id, const BBox& pred, const BBox& gt,
                                  const MetricParams& params) {
  internal::check_params(id, params);
  const internal::BoxT<Dual4> p{
      Dual4::variable(pred.x_c(), 0),
      Dual4::variable(pred.y_c(), 1),
      Dual4::variable(pred.w(), 2),
      Dual4::variable(pred.h(), 3),
  };
  const auto terms = internal::compute(id, p, gt, params);
  // loss = 1 - value
  const auto& g = terms.value.grad();
  return {1.0 - terms.value.value(), BoxGradient{-g[0], -g[1], -g[2], -g[3]}};
}

BoxGradient loss_gradient(MetricId id, const BBox& pred, const BBox& gt,
                          const MetricParams& params) {
  return loss_and_gradient(id, pred, gt, params).gradient;
}

bool is_generic_point(const BBox& pred, const BBox& gt, double step) {
  const double margin = 10.0 * step;
  const double adx = std::abs(pred.x_c() - gt.x_c());
  const double ady = std::abs(pred.y_c() - gt.y_c());
  if (adx <= margin || ady <= margin || std::abs(adx - ady) <= margin) return false;
  if (std::abs(pred.w() - gt.w()) <= margin || std::abs(pred.h() - gt.h()) <= margin) {
    return false;
  }
  if (edge_gap_min(pred.left(), pred.right(), gt.left(), gt.right()) <= margin) return false;
  if (edge_gap_min(pred.bottom(), pred.top(), gt.bottom(), gt.top()) <= margin) return false;
  const double overlap = intersection_area(pred, gt);
  return overlap > 0.0 && overlap < std::min(pred.area(), gt.area());
}

GradCheckReport finite_diff_check(MetricId id, const BBox& pred, const BBox& gt,
                                  const MetricParams& params, double step) {
  if (!(step > 0.0)) throw InvalidParam("finite-difference step must be > 0");
  if (!is_generic_point(pred, gt, step)) {
    throw NonGenericPoint("finite-difference check at a non-generic point: pred " +
                          to_string(pred) + ", gt " + to_string(gt));
  }

  const BoxGradient analytic = loss_gradient(id, pred, gt, params);
  const std::array<double, 4> base = {pred.x_c(), pred.y_c(), pred.w(), pred.h()};
  auto loss_at = [&](std::size_t k, double delta) {
    auto v = base;
    v[k] += delta;
    return evaluate(id, BBox(v[0], v[1], v[2], v[3]), gt, params).loss;
  };

  std::array<double, 4> numeric{};
  for (std::size_t k = 0; k < 4; ++k) {
    numeric[k] = (loss_at(k, step) - loss_at(k, -step)) / (2.0 * step);
  }

  GradCheckReport report{
      .max_rel_err = 0.0,
      .per_component_err = {},
      .analytic = analytic,
      .numeric = {numeric[0], numeric[1], numeric[2], numeric[3]},
      .step = step,
      .pred = pred,
      .gt = gt,
      .metric = id,
      .params = params,
  };
  const auto a = analytic.as_array();
  for (std::size_t k = 0; k < 4; ++k) {
    const double err = std::abs(a[k] - numeric[k]) / std::max(1.0, std::abs(numeric[k]));
    report.per_component_err[k] = err;
    report.max_rel_err = std::max(report.max_rel_err, err);
  }
  return report;
}

}  // namespace bboxlab
