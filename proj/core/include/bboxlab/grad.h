#ifndef BBOXLAB_GRAD_H_
#define BBOXLAB_GRAD_H_

#include <array>

#include "bboxlab/box.h"
#include "bboxlab/metrics.h"

namespace bboxlab {

// Partial derivatives of a loss w.r.t. the predicted box (x_c, y_c, w, h).
struct BoxGradient {
  double d_xc = 0.0;
  double d_yc = 0.0;
  double d_w = 0.0;
  double d_h = 0.0;

  std::array<double, 4> as_array() const { return {d_xc, d_yc, d_w, d_h}; }
  double max_abs() const;

  bool operator==(const BoxGradient&) const = default;
};

// Exact derivative of evaluate(id, pred, gt, params).loss at differentiable
// points, computed by forward-mode dual numbers. At kinks the result is the
// derivative of a fixed branch:
//   - intersection/enclosure edge ties take the predicted box's edge,
//   - a zero overlap contributes no gradient (the IoU plateau),
//   - max(w, w_gt) ties take w_gt, |0| and sqrt(0) have derivative 0.
// Throws MissingParam like evaluate().
BoxGradient loss_gradient(MetricId id, const BBox& pred, const BBox& gt,
                          const MetricParams& params = {});

// Loss value and gradient from a single dual-number pass.
struct LossAndGradient {
  double loss;
  BoxGradient gradient;
};
LossAndGradient loss_and_gradient(MetricId id, const BBox& pred, const BBox& gt,
                                  const MetricParams& params = {});

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::array<double, 4> per_component_err{};
  BoxGradient analytic;
  BoxGradient numeric;
  double step = 0.0;
  BBox pred;
  BBox gt;
  MetricId metric;
  MetricParams params;
};

// True when every kink of every metric is more than 10 * step away: center
// offsets |dx|, |dy| and their difference, size gaps |w - w_gt|, |h - h_gt|,
// all pairwise edge gaps along each axis, and the boxes partially overlap.
bool is_generic_point(const BBox& pred, const BBox& gt, double step);

// Central differences of evaluate().loss against loss_gradient(). Relative
// error per component is |analytic - numeric| / max(1, |numeric|).
// Throws NonGenericPoint when is_generic_point() fails, InvalidParam when
// step <= 0.
GradCheckReport finite_diff_check(MetricId id, const BBox& pred, const BBox& gt,
                                  const MetricParams& params, double step = 1e-6);

}  // namespace bboxlab

#endif  // BBOXLAB_GRAD_H_
