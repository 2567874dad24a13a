#ifndef BBOXLAB_METRICS_H_
#define BBOXLAB_METRICS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bboxlab/box.h"

namespace bboxlab {

enum class MetricId {
  kIoU,
  kGIoU,
  kDIoU,
  kCIoU,
  kEIoU,
  kSIoU,
  kShapeIoU,
  kDotD,
  kNWD,
  kShapeDotD,
  kShapeNWD,
};

inline constexpr std::array<MetricId, 11> kAllMetrics = {
    MetricId::kIoU,      MetricId::kGIoU,      MetricId::kDIoU,    MetricId::kCIoU,
    MetricId::kEIoU,     MetricId::kSIoU,      MetricId::kShapeIoU, MetricId::kDotD,
    MetricId::kNWD,      MetricId::kShapeDotD, MetricId::kShapeNWD,
};

// Command-line spelling: "iou", "giou", ..., "shape-iou", "shape-dotd", "shape-nwd".
std::string_view metric_name(MetricId id);
// Accepts the command-line spelling, case-insensitive; std::nullopt otherwise.
std::optional<MetricId> parse_metric(std::string_view name);

bool needs_mean_size(MetricId id);    // DotD, Shape-DotD
bool needs_nwd_constant(MetricId id); // NWD, Shape-NWD
bool uses_shape_weights(MetricId id); // Shape-IoU, Shape-DotD, Shape-NWD

struct MetricParams {
  // Shape-IoU scale factor; 0 gives neutral weights ww = hh = 1.
  double scale = 0.0;
  // Dataset mean absolute box size S; required by the DotD family.
  std::optional<double> mean_size_s;
  // Dataset constant C; required by the NWD family.
  std::optional<double> nwd_c;
  // Exponent on (1 - e^-omega) in the SIoU and Shape-IoU shape costs.
  double theta = 4.0;
  // Weight of the shape cost in the Shape-IoU loss.
  double shape_omega_coeff = 0.5;
  // Guard in the SIoU angle cost, relative to the enclosing diagonal.
  double eps = 1e-7;

  // Throws InvalidParam on out-of-domain values. Absent S/C are not errors here.
  void validate() const;

  bool operator==(const MetricParams&) const = default;
};

// Metric value (higher is a better match), loss = 1 - value, and the named
// penalty terms the value was assembled from.
struct MetricResult {
  double value = 0.0;
  double loss = 0.0;
  std::vector<std::pair<std::string, double>> components;

  // Throws std::out_of_range for an unknown component name.
  double component(std::string_view name) const;
  bool has_component(std::string_view name) const;
};

struct ShapeWeights {
  double ww;
  double hh;
};

ShapeWeights shape_weights(const BBox& gt, double scale);

MetricResult iou_metric(const BBox& pred, const BBox& gt);
MetricResult giou(const BBox& pred, const BBox& gt);
MetricResult diou(const BBox& pred, const BBox& gt);
MetricResult ciou(const BBox& pred, const BBox& gt);
MetricResult eiou(const BBox& pred, const BBox& gt);
MetricResult siou(const BBox& pred, const BBox& gt, const MetricParams& params);
MetricResult shape_iou(const BBox& pred, const BBox& gt, const MetricParams& params);
MetricResult dotd(const BBox& pred, const BBox& gt, const MetricParams& params);
MetricResult nwd(const BBox& pred, const BBox& gt, const MetricParams& params);
MetricResult shape_dotd(const BBox& pred, const BBox& gt, const MetricParams& params);
MetricResult shape_nwd(const BBox& pred, const BBox& gt, const MetricParams& params);

// Uniform dispatch. Throws MissingParam when S or C is required but absent.
MetricResult evaluate(MetricId id, const BBox& pred, const BBox& gt,
                      const MetricParams& params = {});

}  // namespace bboxlab

#endif  // BBOXLAB_METRICS_H_
