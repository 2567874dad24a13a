#include "bboxlab/box.h"

#include <gtest/gtest.h>

#include <cmath>

#include "bboxlab/error.h"
#include "support/random_boxes.h"

namespace bboxlab {
namespace {

TEST(BBoxTest, RejectsDegenerateSizes) {
  EXPECT_THROW(BBox(0, 0, 0, 1), InvalidBox);
  EXPECT_THROW(BBox(0, 0, 1, -1), InvalidBox);
  EXPECT_THROW(BBox(0, 0, NAN, 1), InvalidBox);
  EXPECT_THROW(CornerBox(1, 0, 1, 2), InvalidBox);
  EXPECT_THROW(CornerBox(0, 2, 1, 1), InvalidBox);
}

TEST(BBoxTest, ToCorners) {
  EXPECT_EQ(to_corners(BBox(1, 1, 2, 2)), CornerBox(0, 0, 2, 2));
  EXPECT_EQ(to_corners(BBox(0, 0, 4, 2)), CornerBox(-2, -1, 2, 1));
}

TEST(BBoxTest, CornerRoundTrip) {
  testing::BoxGen gen(7);
  for (int i = 0; i < 1000; ++i) {
    const BBox b = gen.box(1e-3, 10.0);
    const BBox back = from_corners(to_corners(b));
    const double tol = 4 * std::numeric_limits<double>::epsilon() *
                       (std::abs(b.x_c()) + std::abs(b.y_c()) + b.w() + b.h());
    EXPECT_NEAR(back.x_c(), b.x_c(), tol);
    EXPECT_NEAR(back.y_c(), b.y_c(), tol);
    EXPECT_NEAR(back.w(), b.w(), tol);
    EXPECT_NEAR(back.h(), b.h(), tol);
    EXPECT_NEAR(to_corners(b).area(), b.area(), 1e-12 * b.area());
  }
}

TEST(BoxGeometryTest, WorkedExamples) {
  const BBox a(1, 1, 2, 2);
  const BBox b(2, 2, 2, 2);
  EXPECT_DOUBLE_EQ(intersection_area(a, b), 1.0);
  EXPECT_DOUBLE_EQ(union_area(a, b), 7.0);
  EXPECT_DOUBLE_EQ(iou(a, b), 1.0 / 7.0);

  const EnclosureInfo enc = enclosure(a, b);
  EXPECT_EQ(enc.enclosing, CornerBox(0, 0, 3, 3));
  EXPECT_DOUBLE_EQ(enc.c_sq, 18.0);
  EXPECT_DOUBLE_EQ(enc.w_c, 3.0);
  EXPECT_DOUBLE_EQ(enc.h_c, 3.0);

  EXPECT_DOUBLE_EQ(center_distance_sq(BBox(0, 0, 1, 1), BBox(3, 4, 1, 1)), 25.0);
}

TEST(BoxGeometryTest, IdenticalDisjointNested) {
  const BBox a(0.3, -2, 1.5, 0.25);
  EXPECT_DOUBLE_EQ(intersection_area(a, a), a.area());
  EXPECT_DOUBLE_EQ(union_area(a, a), a.area());
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(center_distance_sq(a, a), 0.0);
  const EnclosureInfo self = enclosure(a, a);
  EXPECT_EQ(self.enclosing, to_corners(a));
  EXPECT_DOUBLE_EQ(self.c_sq, a.w() * a.w() + a.h() * a.h());

  const BBox p(0, 0, 1, 1);
  const BBox q(10, 10, 1, 1);
  EXPECT_EQ(intersection_area(p, q), 0.0);
  EXPECT_EQ(union_area(p, q), 2.0);
  EXPECT_EQ(iou(p, q), 0.0);

  const BBox outer(0, 0, 4, 4);
  const BBox inner(0.5, -0.5, 1, 2);
  EXPECT_EQ(enclosure(outer, inner).enclosing, to_corners(outer));
}

TEST(BoxGeometryTest, TouchingBoxesHaveZeroIoU) {
  const BBox a(0, 0, 2, 2);
  const BBox b(2, 0, 2, 2);
  EXPECT_EQ(intersection_area(a, b), 0.0);
  EXPECT_EQ(iou(a, b), 0.0);
}

TEST(BoxGeometryTest, RandomPairInvariants) {
  testing::BoxGen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const auto [a, b] = gen.pair();
    const double inter = intersection_area(a, b);
    const double uni = union_area(a, b);
    const EnclosureInfo enc = enclosure(a, b);
    EXPECT_GE(inter, 0.0);
    EXPECT_LE(inter, std::min(a.area(), b.area()) * (1 + 1e-12));
    EXPECT_NEAR(uni, a.area() + b.area() - inter, 1e-12);
    EXPECT_GE(uni, std::max(a.area(), b.area()) * (1 - 1e-12));
    EXPECT_GE(enc.enclosing.area(), uni * (1 - 1e-12));
    EXPECT_TRUE(enc.enclosing.contains(to_corners(a)));
    EXPECT_TRUE(enc.enclosing.contains(to_corners(b)));
    EXPECT_NEAR(enc.c_sq, enc.w_c * enc.w_c + enc.h_c * enc.h_c, 1e-12);
    EXPECT_EQ(center_distance_sq(a, b), center_distance_sq(b, a));

    const double v = iou(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_EQ(v == 0.0, inter == 0.0);
  }
}

TEST(BoxGeometryTest, EnclosureIsTight) {
  testing::BoxGen gen(12);
  for (int i = 0; i < 500; ++i) {
    const auto [a, b] = gen.pair();
    const CornerBox e = enclosure(a, b).enclosing;
    // Each side of the enclosing box is touched by one of the inputs.
    EXPECT_EQ(e.x_min(), std::min(a.left(), b.left()));
    EXPECT_EQ(e.x_max(), std::max(a.right(), b.right()));
    EXPECT_EQ(e.y_min(), std::min(a.bottom(), b.bottom()));
    EXPECT_EQ(e.y_max(), std::max(a.top(), b.top()));
  }
}

TEST(BoxGeometryTest, IoUTranslationAndScaleInvariance) {
  testing::BoxGen gen(13);
  for (int i = 0; i < 1000; ++i) {
    const auto [a, b] = gen.overlapping_pair();
    const double base = iou(a, b);
    const double tx = gen.uniform(-50, 50);
    const double ty = gen.uniform(-50, 50);
    const double s = gen.log_uniform(1e-3, 1e3);
    auto move = [&](const BBox& x) { return BBox(x.x_c() + tx, x.y_c() + ty, x.w(), x.h()); };
    auto scale = [&](const BBox& x) { return BBox(x.x_c() * s, x.y_c() * s, x.w() * s, x.h() * s); };
    EXPECT_NEAR(iou(move(a), move(b)), base, 1e-12 * std::max(1.0, 100.0 * base) + 1e-12);
    EXPECT_NEAR(iou(scale(a), scale(b)), base, 1e-12 * std::max(base, 1e-300) + 1e-14);
  }
}

TEST(BoxGeometryTest, IoUOneOnlyForEqualBoxes) {
  const BBox a(0, 0, 2, 1);
  EXPECT_LT(iou(a, BBox(1e-6, 0, 2, 1)), 1.0);
  EXPECT_LT(iou(a, BBox(0, 0, 2, 1 + 1e-6)), 1.0);
  EXPECT_EQ(iou(a, BBox(0, 0, 2, 1)), 1.0);
}

}  // namespace
}  // namespace bboxlab
