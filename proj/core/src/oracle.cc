#include "bboxlab/oracle.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "bboxlab/error.h"

namespace bboxlab {

namespace {

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool inside(const BBox& b, double x, double y) {
  return x >= b.left() && x < b.right() && y >= b.bottom() && y < b.top();
}

// Number of cell centers origin + (i + 0.5) * cell, i in [0, n), inside [lo, hi).
std::int64_t centers_in(double lo, double hi, double origin, double cell, std::int64_t n) {
  if (!(hi > lo)) return 0;
  auto first = static_cast<std::int64_t>(std::ceil((lo - origin) / cell - 0.5));
  auto last = static_cast<std::int64_t>(std::ceil((hi - origin) / cell - 0.5));
  first = std::clamp<std::int64_t>(first, 0, n);
  last = std::clamp<std::int64_t>(last, 0, n);
  return std::max<std::int64_t>(0, last - first);
}

}  // namespace

OracleEstimate mc_iou(const BBox& a, const BBox& b, std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidParam("mc_iou needs at least one sample");
  const EnclosureInfo enc = enclosure(a, b);
  const double x0 = enc.enclosing.x_min();
  const double y0 = enc.enclosing.y_min();

  std::mt19937_64 rng(seed);
  std::uint64_t both = 0;
  std::uint64_t either = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = x0 + unit_double(rng) * enc.w_c;
    const double y = y0 + unit_double(rng) * enc.h_c;
    const bool in_a = inside(a, x, y);
    const bool in_b = inside(b, x, y);
    both += (in_a && in_b) ? 1 : 0;
    either += (in_a || in_b) ? 1 : 0;
  }
  if (either == 0) {
    throw DegenerateSample("mc_iou: no sample fell inside either box");
  }
  return OracleEstimate{
      .value = static_cast<double>(both) / static_cast<double>(either),
      .n_samples = n,
      .seed = seed,
      .stderr_bound = 0.5 / std::sqrt(static_cast<double>(n)),
  };
}

double grid_iou(const BBox& a, const BBox& b, std::uint32_t cells_per_axis) {
  if (cells_per_axis < 2) throw InvalidParam("grid_iou needs at least 2 cells per axis");
  const EnclosureInfo enc = enclosure(a, b);
  const std::int64_t n = cells_per_axis;
  const double x0 = enc.enclosing.x_min();
  const double y0 = enc.enclosing.y_min();
  const double cx = enc.w_c / static_cast<double>(n);
  const double cy = enc.h_c / static_cast<double>(n);

  // Membership is a product of per-axis interval tests, so each count
  // factorizes into an x-count times a y-count.
  const std::int64_t in_a = centers_in(a.left(), a.right(), x0, cx, n) *
                            centers_in(a.bottom(), a.top(), y0, cy, n);
  const std::int64_t in_b = centers_in(b.left(), b.right(), x0, cx, n) *
                            centers_in(b.bottom(), b.top(), y0, cy, n);
  const std::int64_t in_both =
      centers_in(std::max(a.left(), b.left()), std::min(a.right(), b.right()), x0, cx, n) *
      centers_in(std::max(a.bottom(), b.bottom()), std::min(a.top(), b.top()), y0, cy, n);
  const std::int64_t in_either = in_a + in_b - in_both;
  if (in_either == 0) return 0.0;
  return static_cast<double>(in_both) / static_cast<double>(in_either);
}

}  // namespace bboxlab
