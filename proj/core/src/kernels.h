#ifndef BBOXLAB_SRC_KERNELS_H_
#define BBOXLAB_SRC_KERNELS_H_

// Scalar-generic metric kernels. Instantiated with double for evaluation and
// with Dual<4> for gradients w.r.t. the predicted box (x_c, y_c, w, h); the
// ground-truth box is always a constant.
//
// Tie conventions at kinks:
//   * overlap / enclosure extents are a min / max over candidate lengths;
//     exact ties average the tied candidates' derivatives (the midpoint
//     subgradient, which vanishes at pred == gt);
//   * overlap clamp max(0, o): zero branch at o == 0;
//   * max(w, w_gt) in the shape costs: w_gt wins;
//   * min(|dx|, |dy|) in the SIoU angle cost: |dx| wins.

#include <array>
#include <cmath>
#include <numbers>

#include "bboxlab/box.h"
#include "bboxlab/metrics.h"

namespace bboxlab::internal {

using std::abs;
using std::asin;
using std::atan;
using std::exp;
using std::pow;
using std::sin;
using std::sqrt;

inline constexpr double kNwdWeight = 2.0;

template <class T>
struct BoxT {
  T x_c;
  T y_c;
  T w;
  T h;
};

template <class T>
BoxT<T> lift(const BBox& b) {
  return {T(b.x_c()), T(b.y_c()), T(b.w()), T(b.h())};
}

// Minimum (Sign = +1) or maximum (Sign = -1) of the candidates; exact ties
// average the tied candidates.
template <int Sign, class T, std::size_t N>
T extreme(const std::array<T, N>& c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < N; ++i) {
    if (Sign > 0 ? c[i] < c[best] : c[i] > c[best]) best = i;
  }
  T sum = c[best];
  int ties = 1;
  for (std::size_t i = 0; i < N; ++i) {
    if (i != best && !(c[i] < c[best]) && !(c[i] > c[best])) {
      sum = sum + c[i];
      ++ties;
    }
  }
  return ties == 1 ? c[best] : sum / static_cast<double>(ties);
}

template <class T>
T gt_max(const T& p, double g) {
  return p > T(g) ? p : T(g);
}

template <class T>
T clamp_nonneg(const T& x) {
  return x > T(0.0) ? x : T(0.0);
}

template <class T>
struct Geometry {
  T inter;
  T uni;
  T enc_w;
  T enc_h;
  T c_sq;
  T dx;
  T dy;
  T rho_sq;
};

// Extents along one axis from center offset d and sizes a (pred), b (gt):
//   overlap   = min(pred_hi, gt_hi) - max(pred_lo, gt_lo)
//             = min(a, b, (a + b)/2 + d, (a + b)/2 - d)
//   enclosure = max(pred_hi, gt_hi) - min(pred_lo, gt_lo)
//             = max(a, b, (a + b)/2 + d, (a + b)/2 - d)
template <class T>
T overlap_extent(const T& d, const T& a, double b) {
  const T mid = 0.5 * (a + b);
  return extreme<+1>(std::array<T, 4>{a, T(b), mid + d, mid - d});
}

template <class T>
T enclosure_extent(const T& d, const T& a, double b) {
  const T mid = 0.5 * (a + b);
  return extreme<-1>(std::array<T, 4>{a, T(b), mid + d, mid - d});
}

template <class T>
Geometry<T> geometry(const BoxT<T>& p, const BBox& g) {
  Geometry<T> geo;
  geo.dx = p.x_c - g.x_c();
  geo.dy = p.y_c - g.y_c();
  const T ow = clamp_nonneg(overlap_extent(geo.dx, p.w, g.w()));
  const T oh = clamp_nonneg(overlap_extent(geo.dy, p.h, g.h()));
  geo.inter = ow * oh;
  geo.uni = p.w * p.h + g.area() - geo.inter;
  geo.enc_w = enclosure_extent(geo.dx, p.w, g.w());
  geo.enc_h = enclosure_extent(geo.dy, p.h, g.h());
  geo.c_sq = geo.enc_w * geo.enc_w + geo.enc_h * geo.enc_h;
  geo.rho_sq = geo.dx * geo.dx + geo.dy * geo.dy;
  return geo;
}

inline constexpr int kMaxComponents = 4;

template <class T>
struct Terms {
  T value;
  std::array<const char*, kMaxComponents> names{};
  std::array<T, kMaxComponents> comps{};
  int count = 0;

  void add(const char* name, const T& v) {
    names[count] = name;
    comps[count] = v;
    ++count;
  }
};

template <class T>
T omega_cost(const T& omega, double theta) {
  return pow(T(1.0) - exp(-omega), theta);
}

template <class T>
Terms<T> iou_terms(const Geometry<T>& geo) {
  Terms<T> t;
  const T iou = geo.inter / geo.uni;
  t.value = iou;
  t.add("iou", iou);
  return t;
}

template <class T>
Terms<T> giou_terms(const Geometry<T>& geo) {
  Terms<T> t;
  const T iou = geo.inter / geo.uni;
  const T enc_area = geo.enc_w * geo.enc_h;
  const T enclosure = (enc_area - geo.uni) / enc_area;
  t.value = iou - enclosure;
  t.add("iou", iou);
  t.add("enclosure", enclosure);
  return t;
}

template <class T>
Terms<T> diou_terms(const Geometry<T>& geo) {
  Terms<T> t;
  const T iou = geo.inter / geo.uni;
  const T distance = geo.rho_sq / geo.c_sq;
  t.value = iou - distance;
  t.add("iou", iou);
  t.add("distance", distance);
  return t;
}

template <class T>
Terms<T> ciou_terms(const BoxT<T>& p, const BBox& g, const Geometry<T>& geo) {
  Terms<T> t;
  const T iou = geo.inter / geo.uni;
  const T distance = geo.rho_sq / geo.c_sq;
  const T angle_gap = T(std::atan(g.w() / g.h())) - atan(p.w / p.h);
  const T v = (4.0 / (std::numbers::pi * std::numbers::pi)) * angle_gap * angle_gap;
  const T denom = (T(1.0) - iou) + v;
  const T alpha = denom > T(0.0) ? v / denom : T(0.0);
  const T aspect = alpha * v;
  t.value = iou - distance - aspect;
  t.add("iou", iou);
  t.add("distance", distance);
  t.add("aspect", aspect);
  return t;
}

template <class T>
Terms<T> eiou_terms(const BoxT<T>& p, const BBox& g, const Geometry<T>& geo) {
  Terms<T> t;
  const T iou = geo.inter / geo.uni;
  const T distance = geo.rho_sq / geo.c_sq;
  const T dw = p.w - g.w();
  const T dh = p.h - g.h();
  const T width = dw * dw / (geo.enc_w * geo.enc_w);
  const T height = dh * dh / (geo.enc_h * geo.enc_h);
  t.value = iou - distance - width - height;
  t.add("iou", iou);
  t.add("distance", distance);
  t.add("width", width);
  t.add("height", height);
  return t;
}

template <class T>
Terms<T> siou_terms(const BoxT<T>& p, const BBox& g, const Geometry<T>& geo,
                    const MetricParams& params) {
  Terms<T> t;
  const T iou = geo.inter / geo.uni;

  const T adx = abs(geo.dx);
  const T ady = abs(geo.dy);
  const T nearest = adx <= ady ? adx : ady;
  const T sigma = sqrt(geo.rho_sq);
  // eps is relative to the enclosing diagonal.
  const T angle = sin(2.0 * asin(nearest / (sigma + params.eps * sqrt(geo.c_sq))));

  const T gamma = T(2.0) - angle;
  const T rx = geo.dx / geo.enc_w;
  const T ry = geo.dy / geo.enc_h;
  const T distance = (T(1.0) - exp(-gamma * (rx * rx))) + (T(1.0) - exp(-gamma * (ry * ry)));

  const T omega_w = abs(p.w - g.w()) / gt_max(p.w, g.w());
  const T omega_h = abs(p.h - g.h()) / gt_max(p.h, g.h());
  const T shape = omega_cost(omega_w, params.theta) + omega_cost(omega_h, params.theta);

  t.value = iou - 0.5 * (distance + shape);
  t.add("iou", iou);
  t.add("angle", angle);
  t.add("distance", distance);
  t.add("shape", shape);
  return t;
}

template <class T>
Terms<T> shape_iou_terms(const BoxT<T>& p, const BBox& g, const Geometry<T>& geo,
                         const ShapeWeights& sw, const MetricParams& params) {
  Terms<T> t;
  const T iou = geo.inter / geo.uni;
  const T distance = (sw.hh * (geo.dx * geo.dx) + sw.ww * (geo.dy * geo.dy)) / geo.c_sq;
  const T omega_w = sw.hh * (abs(p.w - g.w()) / gt_max(p.w, g.w()));
  const T omega_h = sw.ww * (abs(p.h - g.h()) / gt_max(p.h, g.h()));
  const T shape = omega_cost(omega_w, params.theta) + omega_cost(omega_h, params.theta);
  t.value = iou - distance - params.shape_omega_coeff * shape;
  t.add("iou", iou);
  t.add("distance", distance);
  t.add("shape", shape);
  return t;
}

template <class T>
Terms<T> exp_distance_terms(const T& d, double normalizer) {
  Terms<T> t;
  t.value = exp(-(d / normalizer));
  t.add("distance", d);
  return t;
}

template <class T>
T size_gap(const BoxT<T>& p, const BBox& g) {
  const T dw = p.w - g.w();
  const T dh = p.h - g.h();
  return (dw * dw + dh * dh) / (kNwdWeight * kNwdWeight);
}

template <class T>
T weighted_center_sq(const Geometry<T>& geo, const ShapeWeights& sw) {
  return sw.hh * (geo.dx * geo.dx) + sw.ww * (geo.dy * geo.dy);
}

// Precondition: the caller has validated params and the presence of S / C.
template <class T>
Terms<T> compute(MetricId id, const BoxT<T>& p, const BBox& g, const MetricParams& params) {
  const Geometry<T> geo = geometry(p, g);
  switch (id) {
    case MetricId::kIoU:
      return iou_terms(geo);
    case MetricId::kGIoU:
      return giou_terms(geo);
    case MetricId::kDIoU:
      return diou_terms(geo);
    case MetricId::kCIoU:
      return ciou_terms(p, g, geo);
    case MetricId::kEIoU:
      return eiou_terms(p, g, geo);
    case MetricId::kSIoU:
      return siou_terms(p, g, geo, params);
    case MetricId::kShapeIoU:
      return shape_iou_terms(p, g, geo, shape_weights(g, params.scale), params);
    case MetricId::kDotD:
      return exp_distance_terms(sqrt(geo.rho_sq), *params.mean_size_s);
    case MetricId::kNWD:
      return exp_distance_terms(sqrt(geo.rho_sq + size_gap(p, g)), *params.nwd_c);
    case MetricId::kShapeDotD:
      return exp_distance_terms(sqrt(weighted_center_sq(geo, shape_weights(g, params.scale))),
                                *params.mean_size_s);
    case MetricId::kShapeNWD:
      return exp_distance_terms(
          sqrt(weighted_center_sq(geo, shape_weights(g, params.scale)) + size_gap(p, g)),
          *params.nwd_c);
  }
  return {};
}

// Throws InvalidParam / MissingParam.
void check_params(MetricId id, const MetricParams& params);

}  // namespace bboxlab::internal

#endif  // BBOXLAB_SRC_KERNELS_H_
