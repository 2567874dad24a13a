#ifndef BBOXLAB_BOX_H_
#define BBOXLAB_BOX_H_

#include <string>

namespace bboxlab {

// Corner form (x_min, y_min, x_max, y_max). Construction enforces
// x_min < x_max and y_min < y_max.
class CornerBox {
 public:
  CornerBox(double x_min, double y_min, double x_max, double y_max);

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }

  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }

  // Closed containment test.
  bool contains(const CornerBox& other) const;

  bool operator==(const CornerBox&) const = default;

 private:
  double x_min_;
  double y_min_;
  double x_max_;
  double y_max_;
};

// Axis-aligned box in center form. Width and height are strictly positive;
// anything else throws InvalidBox.
class BBox {
 public:
  BBox(double x_c, double y_c, double w, double h);

  static BBox from_corners(const CornerBox& c);

  double x_c() const { return x_c_; }
  double y_c() const { return y_c_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double area() const { return w_ * h_; }

  double left() const { return x_c_ - 0.5 * w_; }
  double right() const { return x_c_ + 0.5 * w_; }
  double bottom() const { return y_c_ - 0.5 * h_; }
  double top() const { return y_c_ + 0.5 * h_; }

  bool operator==(const BBox&) const = default;

 private:
  double x_c_;
  double y_c_;
  double w_;
  double h_;
};

std::string to_string(const BBox& b);
std::string to_string(const CornerBox& c);

// Smallest axis-aligned box containing two boxes, with the squared diagonal
// used to normalize distance penalties.
struct EnclosureInfo {
  CornerBox enclosing;
  double c_sq;
  double w_c;
  double h_c;
};

CornerBox to_corners(const BBox& b);
BBox from_corners(const CornerBox& c);

double intersection_area(const BBox& a, const BBox& b);
double union_area(const BBox& a, const BBox& b);
EnclosureInfo enclosure(const BBox& a, const BBox& b);
double center_distance_sq(const BBox& a, const BBox& b);
double iou(const BBox& a, const BBox& b);

}  // namespace bboxlab

#endif  // BBOXLAB_BOX_H_
