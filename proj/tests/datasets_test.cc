#include "bboxlab/datasets.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "bboxlab/error.h"
#include "support/golden.h"

namespace bboxlab {
namespace {

namespace fs = std::filesystem;

fs::path fixture(const std::string& name) { return testing::test_data_dir() / "fixtures" / name; }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("bboxlab_ds_" + std::to_string(std::random_device{}()) + "_" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

AnnotationSet three_box_set() {
  AnnotationSet a;
  a.images = {{"1", {CornerBox(0, 0, 2, 3), CornerBox(5, 5, 9, 9)}}, {"2", {CornerBox(1, 1, 2, 9)}}};
  return a;
}

TEST(LoadCocoTest, MiniFixture) {
  const AnnotationSet ann = load_annotations(fixture("mini-coco.json"), AnnotationFormat::kCocoJson);
  ASSERT_EQ(ann.images.size(), 2u);
  EXPECT_EQ(ann.n_boxes(), 3u);
  EXPECT_EQ(ann.images[0].image_id, "1");
  EXPECT_EQ(ann.images[0].boxes[0], CornerBox(3, 4, 5, 7));
  EXPECT_EQ(ann.source_format, AnnotationFormat::kCocoJson);
}

TEST(LoadCocoTest, TwoAnnotations) {
  const AnnotationSet ann =
      load_annotations(fixture("two-annotations-coco.json"), AnnotationFormat::kCocoJson);
  EXPECT_EQ(ann.n_boxes(), 2u);
  EXPECT_EQ(ann.images.size(), 1u);
}

TEST(LoadCocoTest, ZeroWidthIsValidationErrorNamingRecord) {
  TempDir dir;
  const auto path = dir.write("bad.json", R"({"images":[{"id":1}],"annotations":[
      {"id":5,"image_id":1,"bbox":[1,1,2,2]},
      {"id":6,"image_id":1,"bbox":[1,1,0,2]}]})");
  try {
    load_annotations(path, AnnotationFormat::kCocoJson);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("annotations[1] (id 6)"), std::string::npos) << e.what();
  }
}

TEST(LoadCocoTest, MalformedRecordsAreParseErrors) {
  TempDir dir;
  EXPECT_THROW(load_annotations(dir.write("a.json", "{not json"), AnnotationFormat::kCocoJson),
               ParseError);
  EXPECT_THROW(load_annotations(dir.write("b.json", R"({"images":[]})"),
                                AnnotationFormat::kCocoJson),
               ParseError);
  EXPECT_THROW(load_annotations(dir.write("c.json", R"({"annotations":[{"image_id":1,"bbox":[1,2,3]}]})"),
                                AnnotationFormat::kCocoJson),
               ParseError);
  EXPECT_THROW(
      load_annotations(dir.write("d.json", R"({"images":[{"id":1}],"annotations":[{"image_id":2,"bbox":[1,2,3,4]}]})"),
                       AnnotationFormat::kCocoJson),
      ParseError);
  EXPECT_THROW(load_annotations(dir.write("e.json", R"({"images":[{"id":1},{"id":1}],"annotations":[]})"),
                                AnnotationFormat::kCocoJson),
               ParseError);
  EXPECT_THROW(load_annotations(dir.path() / "missing.json", AnnotationFormat::kCocoJson),
               ParseError);
}

TEST(LoadYoloTest, Denormalization) {
  const AnnotationSet ann = load_annotations(fixture("yolo"), AnnotationFormat::kYoloTxt);
  ASSERT_EQ(ann.images.size(), 3u);
  EXPECT_EQ(ann.images[0].image_id, "img_a.jpg");
  ASSERT_EQ(ann.images[0].boxes.size(), 1u);
  EXPECT_EQ(ann.images[0].boxes[0], CornerBox(25, 25, 75, 75));
  ASSERT_EQ(ann.images[1].boxes.size(), 2u);
  EXPECT_EQ(ann.images[1].boxes[0], CornerBox(40, 15, 60, 35));
  EXPECT_TRUE(ann.images[2].boxes.empty());
  EXPECT_EQ(ann.source_format, AnnotationFormat::kYoloTxt);
}

TEST(LoadYoloTest, ErrorsCarryLineLocator) {
  TempDir dir;
  dir.write("manifest.json", R"({"a.jpg": {"width": 10, "height": 10}})");
  dir.write("a.txt", "0 0.5 0.5 0.2 0.2\n0 0.5 0.5\n");
  try {
    load_annotations(dir.path(), AnnotationFormat::kYoloTxt);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("a.txt:2"), std::string::npos) << e.what();
  }
  dir.write("a.txt", "0 0.5 0.5 0 0.2\n");
  EXPECT_THROW(load_annotations(dir.path(), AnnotationFormat::kYoloTxt), ValidationError);
  dir.write("a.txt", "0 0.5 0.5 0.2 0.2\n");
  dir.write("orphan.txt", "0 0.5 0.5 0.2 0.2\n");
  EXPECT_THROW(load_annotations(dir.path(), AnnotationFormat::kYoloTxt), ParseError);
}

TEST(LoadYoloTest, ExplicitManifestAndMissingDirectory) {
  TempDir dir;
  const auto manifest = dir.write("sizes.json", R"({"a.png": {"width": 4, "height": 2}})");
  fs::create_directories(dir.path() / "labels");
  std::ofstream(dir.path() / "labels" / "a.txt") << "3 0.5 0.5 1 1\n";
  const AnnotationSet ann =
      load_annotations(dir.path() / "labels", AnnotationFormat::kYoloTxt, manifest);
  EXPECT_EQ(ann.images[0].boxes[0], CornerBox(0, 0, 4, 2));
  EXPECT_THROW(load_annotations(dir.path() / "nope", AnnotationFormat::kYoloTxt), ParseError);
}

TEST(DatasetMeanSizeTest, WorkedExamples) {
  EXPECT_NEAR(dataset_mean_size(three_box_set()), std::sqrt(10.0), 1e-12);
  AnnotationSet single;
  single.images = {{"x", {CornerBox(0, 0, 5, 5)}}};
  EXPECT_EQ(dataset_mean_size(single), 5.0);
  AnnotationSet empty;
  empty.images = {{"x", {}}};
  EXPECT_THROW(dataset_mean_size(empty), EmptyDataset);
  EXPECT_THROW(compute_stats(empty), EmptyDataset);
}

TEST(DatasetMeanSizeTest, MatchesFlatComputationAndIgnoresGrouping) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> side(0.5, 80.0);
  for (int trial = 0; trial < 50; ++trial) {
    AnnotationSet a;
    std::vector<CornerBox> all;
    const int n_images = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n_images; ++i) {
      ImageAnnotations img{std::to_string(i), {}};
      const int n = static_cast<int>(rng() % 5);
      for (int k = 0; k < n; ++k) {
        const double x = side(rng);
        const double y = side(rng);
        img.boxes.emplace_back(x, y, x + side(rng), y + side(rng));
        all.push_back(img.boxes.back());
      }
      a.images.push_back(img);
    }
    if (all.empty()) continue;
    double flat = 0.0;
    for (const auto& b : all) flat += b.width() * b.height();
    const double s = dataset_mean_size(a);
    EXPECT_NEAR(s, std::sqrt(flat / all.size()), 1e-12 * s);

    AnnotationSet shuffled;
    std::shuffle(all.begin(), all.end(), rng);
    shuffled.images = {{"all", all}};
    EXPECT_EQ(dataset_mean_size(shuffled), s);
    std::reverse(a.images.begin(), a.images.end());
    EXPECT_EQ(dataset_mean_size(a), s);
    const DatasetStats st = compute_stats(a);
    EXPECT_EQ(compute_stats(shuffled).size_histogram, st.size_histogram);
  }
}

TEST(ComputeStatsTest, Fixture) {
  const AnnotationSet ann = load_annotations(fixture("mini-coco.json"), AnnotationFormat::kCocoJson);
  const DatasetStats st = compute_stats(ann);
  EXPECT_NEAR(st.mean_size_s, std::sqrt(10.0), 1e-12);
  EXPECT_EQ(st.nwd_c, st.mean_size_s);
  EXPECT_EQ(st.nwd_c_source, ConstantSource::kDerived);
  EXPECT_EQ(st.n_images, 2u);
  EXPECT_EQ(st.n_boxes, 3u);
  // sizes sqrt(6)=2.45, 4, sqrt(8)=2.83 -> buckets [2,4) x2 and [4,8) x1
  EXPECT_EQ(st.size_histogram, (std::map<int, std::size_t>{{1, 2}, {2, 1}}));

  const DatasetStats over = compute_stats(ann, 12.0);
  EXPECT_EQ(over.nwd_c, 12.0);
  EXPECT_EQ(over.nwd_c_source, ConstantSource::kOverride);
  EXPECT_EQ(constant_source_name(over.nwd_c_source), "override");
  EXPECT_THROW(compute_stats(ann, 0.0), InvalidParam);
}

TEST(CanonicalJsonTest, RoundTripsBothFormats) {
  for (const auto& [path, format] :
       {std::pair{fixture("mini-coco.json"), AnnotationFormat::kCocoJson},
        std::pair{fixture("yolo"), AnnotationFormat::kYoloTxt}}) {
    const AnnotationSet ann = load_annotations(path, format);
    const std::string dump = to_canonical_json(ann);
    EXPECT_NE(dump.find("\"schema_version\": 1"), std::string::npos);
    EXPECT_EQ(from_canonical_json(dump), ann);
  }
}

TEST(CanonicalJsonTest, RandomSetsRoundTrip) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 20; ++t) {
    AnnotationSet a;
    a.source_format = t % 2 ? AnnotationFormat::kYoloTxt : AnnotationFormat::kCocoJson;
    for (int i = 0; i < 4; ++i) {
      ImageAnnotations img{"im" + std::to_string(i), {}};
      for (int k = 0; k < 3; ++k) {
        const double x = u(rng);
        const double y = u(rng);
        img.boxes.emplace_back(x, y, x + std::abs(u(rng)) + 1e-3, y + std::abs(u(rng)) + 1e-3);
      }
      a.images.push_back(img);
    }
    EXPECT_EQ(from_canonical_json(to_canonical_json(a)), a);
  }
}

TEST(CanonicalJsonTest, RejectsBadSchema) {
  EXPECT_THROW(from_canonical_json(R"({"schema_version": 2, "images": []})"), ParseError);
  EXPECT_THROW(from_canonical_json(R"({"schema_version": 1, "source_format": "voc", "images": []})"),
               ParseError);
  EXPECT_THROW(from_canonical_json(
                   R"({"schema_version": 1, "source_format": "coco-json", "images": [{"id": "a", "boxes": [[0,0,0,1]]}]})"),
               ValidationError);
}

TEST(AnnotationFormatTest, Names) {
  EXPECT_EQ(parse_annotation_format("coco-json"), AnnotationFormat::kCocoJson);
  EXPECT_EQ(parse_annotation_format("yolo-txt"), AnnotationFormat::kYoloTxt);
  EXPECT_FALSE(parse_annotation_format("voc-xml").has_value());
  EXPECT_FALSE(scale_guidance().empty());
}

}  // namespace
}  // namespace bboxlab
