#ifndef BBOXLAB_ORACLE_H_
#define BBOXLAB_ORACLE_H_

// Brute-force IoU estimators, independent of the closed-form geometry.

#include <cstdint>
#include <string_view>

#include "bboxlab/box.h"

namespace bboxlab {

// Generator used by every sampling routine in the library: std::mt19937_64,
// whose output sequence is fixed by the C++ standard. Doubles are formed as
// (x >> 11) * 2^-53, so estimates reproduce bit-for-bit across platforms.
inline constexpr std::string_view kOracleGenerator = "mt19937_64";

struct OracleEstimate {
  double value = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  // 0.5 / sqrt(n_samples)
  double stderr_bound = 0.0;
  std::string_view generator = kOracleGenerator;

  bool operator==(const OracleEstimate&) const = default;
};

// Samples n uniform points in the enclosing box and returns
// #(in both) / #(in either). Single stream, so the result depends only on
// (a, b, n, seed). Throws InvalidParam for n == 0 and DegenerateSample when
// no point lands in either box.
OracleEstimate mc_iou(const BBox& a, const BBox& b, std::uint64_t n, std::uint64_t seed);

// Rasterizes the enclosing box into cells_per_axis^2 cells and counts cell
// centers inside each box (half-open [lo, hi) membership). Throws
// InvalidParam for cells_per_axis < 2.
double grid_iou(const BBox& a, const BBox& b, std::uint32_t cells_per_axis);

}  // namespace bboxlab

#endif  // BBOXLAB_ORACLE_H_
