#include "bboxlab/box.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bboxlab/error.h"
#include "kernels.h"

namespace bboxlab {

namespace {

std::string format_doubles(const char* fmt, double a, double b, double c, double d) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

}  // namespace

CornerBox::CornerBox(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!(x_min < x_max) || !(y_min < y_max) || !std::isfinite(x_min) ||
      !std::isfinite(y_min) || !std::isfinite(x_max) || !std::isfinite(y_max)) {
    throw InvalidBox("invalid corner box " + to_string(*this));
  }
}

bool CornerBox::contains(const CornerBox& other) const {
  return x_min_ <= other.x_min_ && y_min_ <= other.y_min_ && x_max_ >= other.x_max_ &&
         y_max_ >= other.y_max_;
}

BBox::BBox(double x_c, double y_c, double w, double h) : x_c_(x_c), y_c_(y_c), w_(w), h_(h) {
  if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(x_c) || !std::isfinite(y_c) ||
      !std::isfinite(w) || !std::isfinite(h)) {
    throw InvalidBox("invalid box " + to_string(*this) + ": width and height must be > 0");
  }
}

BBox BBox::from_corners(const CornerBox& c) {
  return BBox(0.5 * (c.x_min() + c.x_max()), 0.5 * (c.y_min() + c.y_max()), c.width(),
              c.height());
}

std::string to_string(const BBox& b) {
  return format_doubles("(x_c=%g, y_c=%g, w=%g, h=%g)", b.x_c(), b.y_c(), b.w(), b.h());
}

std::string to_string(const CornerBox& c) {
  return format_doubles("(x_min=%g, y_min=%g, x_max=%g, y_max=%g)", c.x_min(), c.y_min(),
                        c.x_max(), c.y_max());
}

CornerBox to_corners(const BBox& b) {
  return CornerBox(b.left(), b.bottom(), b.right(), b.top());
}

BBox from_corners(const CornerBox& c) { return BBox::from_corners(c); }

double intersection_area(const BBox& a, const BBox& b) {
  return internal::geometry(internal::lift<double>(a), b).inter;
}

double union_area(const BBox& a, const BBox& b) {
  return internal::geometry(internal::lift<double>(a), b).uni;
}

EnclosureInfo enclosure(const BBox& a, const BBox& b) {
  const CornerBox box(std::min(a.left(), b.left()), std::min(a.bottom(), b.bottom()),
                      std::max(a.right(), b.right()), std::max(a.top(), b.top()));
  const double w_c = box.width();
  const double h_c = box.height();
  return {box, w_c * w_c + h_c * h_c, w_c, h_c};
}

double center_distance_sq(const BBox& a, const BBox& b) {
  const double dx = a.x_c() - b.x_c();
  const double dy = a.y_c() - b.y_c();
  return dx * dx + dy * dy;
}

double iou(const BBox& a, const BBox& b) {
  const auto geo = internal::geometry(internal::lift<double>(a), b);
  return geo.inter / geo.uni;
}

}  // namespace bboxlab
