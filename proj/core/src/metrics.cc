#include "bboxlab/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "bboxlab/error.h"
#include "kernels.h"

namespace bboxlab {

namespace {

struct NamedMetric {
  MetricId id;
  std::string_view name;
};

constexpr std::array<NamedMetric, 11> kNames = {{
    {MetricId::kIoU, "iou"},
    {MetricId::kGIoU, "giou"},
    {MetricId::kDIoU, "diou"},
    {MetricId::kCIoU, "ciou"},
    {MetricId::kEIoU, "eiou"},
    {MetricId::kSIoU, "siou"},
    {MetricId::kShapeIoU, "shape-iou"},
    {MetricId::kDotD, "dotd"},
    {MetricId::kNWD, "nwd"},
    {MetricId::kShapeDotD, "shape-dotd"},
    {MetricId::kShapeNWD, "shape-nwd"},
}};

MetricResult to_result(const internal::Terms<double>& t) {
  MetricResult r;
  r.value = t.value;
  r.loss = 1.0 - t.value;
  r.components.reserve(t.count);
  for (int i = 0; i < t.count; ++i) r.components.emplace_back(t.names[i], t.comps[i]);
  return r;
}

}  // namespace

std::string_view metric_name(MetricId id) {
  for (const auto& m : kNames) {
    if (m.id == id) return m.name;
  }
  return "unknown";
}

std::optional<MetricId> parse_metric(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(lowered.begin(), lowered.end(), '_', '-');
  for (const auto& m : kNames) {
    if (m.name == lowered) return m.id;
  }
  return std::nullopt;
}

bool needs_mean_size(MetricId id) {
  return id == MetricId::kDotD || id == MetricId::kShapeDotD;
}

bool needs_nwd_constant(MetricId id) {
  return id == MetricId::kNWD || id == MetricId::kShapeNWD;
}

bool uses_shape_weights(MetricId id) {
  return id == MetricId::kShapeIoU || id == MetricId::kShapeDotD || id == MetricId::kShapeNWD;
}

void MetricParams::validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidParam("scale must be a finite value >= 0");
  }
  if (mean_size_s && !(*mean_size_s > 0.0 && std::isfinite(*mean_size_s))) {
    throw InvalidParam("mean size S must be > 0");
  }
  if (nwd_c && !(*nwd_c > 0.0 && std::isfinite(*nwd_c))) {
    throw InvalidParam("NWD constant C must be > 0");
  }
  if (!(eps > 0.0)) throw InvalidParam("eps must be > 0");
  if (!(theta > 0.0)) throw InvalidParam("theta must be > 0");
  if (!(shape_omega_coeff >= 0.0)) throw InvalidParam("shape omega coefficient must be >= 0");
}

double MetricResult::component(std::string_view name) const {
  for (const auto& [key, v] : components) {
    if (key == name) return v;
  }
  throw std::out_of_range("no component named " + std::string(name));
}

bool MetricResult::has_component(std::string_view name) const {
  return std::any_of(components.begin(), components.end(),
                     [&](const auto& kv) { return kv.first == name; });
}

ShapeWeights shape_weights(const BBox& gt, double scale) {
  if (!(scale >= 0.0)) throw InvalidParam("scale must be >= 0");
  // 2 w^s / (w^s + h^s) written as a ratio so large sizes cannot overflow.
  const double ratio = std::pow(gt.h() / gt.w(), scale);
  const double ww = 2.0 / (1.0 + ratio);
  return {ww, 2.0 - ww};
}

namespace internal {

void check_params(MetricId id, const MetricParams& params) {
  params.validate();
  if (needs_mean_size(id) && !params.mean_size_s) {
    throw MissingParam(std::string(metric_name(id)) + " requires the dataset mean size S");
  }
  if (needs_nwd_constant(id) && !params.nwd_c) {
    throw MissingParam(std::string(metric_name(id)) + " requires the NWD constant C");
  }
}

}  // namespace internal

MetricResult evaluate(MetricId id, const BBox& pred, const BBox& gt,
                      const MetricParams& params) {
  internal::check_params(id, params);
  return to_result(internal::compute(id, internal::lift<double>(pred), gt, params));
}

MetricResult iou_metric(const BBox& pred, const BBox& gt) {
  return evaluate(MetricId::kIoU, pred, gt);
}
MetricResult giou(const BBox& pred, const BBox& gt) { return evaluate(MetricId::kGIoU, pred, gt); }
MetricResult diou(const BBox& pred, const BBox& gt) { return evaluate(MetricId::kDIoU, pred, gt); }
MetricResult ciou(const BBox& pred, const BBox& gt) { return evaluate(MetricId::kCIoU, pred, gt); }
MetricResult eiou(const BBox& pred, const BBox& gt) { return evaluate(MetricId::kEIoU, pred, gt); }

MetricResult siou(const BBox& pred, const BBox& gt, const MetricParams& params) {
  return evaluate(MetricId::kSIoU, pred, gt, params);
}
MetricResult shape_iou(const BBox& pred, const BBox& gt, const MetricParams& params) {
  return evaluate(MetricId::kShapeIoU, pred, gt, params);
}
MetricResult dotd(const BBox& pred, const BBox& gt, const MetricParams& params) {
  return evaluate(MetricId::kDotD, pred, gt, params);
}
MetricResult nwd(const BBox& pred, const BBox& gt, const MetricParams& params) {
  return evaluate(MetricId::kNWD, pred, gt, params);
}
MetricResult shape_dotd(const BBox& pred, const BBox& gt, const MetricParams& params) {
  return evaluate(MetricId::kShapeDotD, pred, gt, params);
}
MetricResult shape_nwd(const BBox& pred, const BBox& gt, const MetricParams& params) {
  return evaluate(MetricId::kShapeNWD, pred, gt, params);
}

}  // namespace bboxlab
