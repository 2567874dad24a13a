#ifndef BBOXLAB_DATASETS_H_
#define BBOXLAB_DATASETS_H_

// Annotation ingestion (COCO JSON, YOLO txt) and the dataset size
// statistics used by the DotD / NWD families.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bboxlab/box.h"

namespace bboxlab {

enum class AnnotationFormat { kCocoJson, kYoloTxt };

std::string_view format_name(AnnotationFormat format);
std::optional<AnnotationFormat> parse_annotation_format(std::string_view name);

struct ImageAnnotations {
  std::string image_id;
  std::vector<CornerBox> boxes;

  bool operator==(const ImageAnnotations&) const = default;
};

// Image ids are unique; boxes are in pixels.
struct AnnotationSet {
  std::vector<ImageAnnotations> images;
  AnnotationFormat source_format = AnnotationFormat::kCocoJson;

  std::size_t n_boxes() const;
  bool operator==(const AnnotationSet&) const = default;
};

// coco-json: `path` is the annotation file; boxes come from each
//   annotation's "bbox": [x, y, width, height]. Images listed without
//   annotations are kept with zero boxes.
// yolo-txt: `path` is a directory of <stem>.txt files with lines
//   "class cx cy w h" (normalized); `manifest` (default <path>/manifest.json)
//   maps image file names to {"width": W, "height": H}. Label files are
//   matched to manifest entries by stem; images are ordered by file name.
// Throws ParseError (with file/line/record locator) for malformed input and
// ValidationError for non-positive or out-of-range sizes.
AnnotationSet load_annotations(const std::filesystem::path& path, AnnotationFormat format,
                               const std::optional<std::filesystem::path>& manifest = {});

// S = sqrt(sum of w*h over all boxes / number of boxes). Areas are summed in
// sorted order, so the result does not depend on image or box order.
// Throws EmptyDataset when there are no boxes.
double dataset_mean_size(const AnnotationSet& ann);

enum class ConstantSource { kDerived, kOverride };
std::string_view constant_source_name(ConstantSource source);

struct DatasetStats {
  double mean_size_s = 0.0;
  double nwd_c = 0.0;
  ConstantSource nwd_c_source = ConstantSource::kDerived;
  std::size_t n_images = 0;
  std::size_t n_boxes = 0;
  // Key k counts boxes whose size sqrt(w*h) lies in [2^k, 2^(k+1)) pixels.
  std::map<int, std::size_t> size_histogram;
};

// nwd_c defaults to mean_size_s. Throws EmptyDataset, InvalidParam for a
// non-positive override.
DatasetStats compute_stats(const AnnotationSet& ann,
                           std::optional<double> nwd_c_override = std::nullopt);

// Guidance printed next to the size histogram. No numeric scale is derived.
std::string_view scale_guidance();

inline constexpr int kCanonicalSchemaVersion = 1;

// {"schema_version": 1, "source_format": "coco-json",
//  "images": [{"id": "...", "boxes": [[x_min, y_min, x_max, y_max], ...]}]}
std::string to_canonical_json(const AnnotationSet& ann);
// Throws ParseError on schema mismatch, ValidationError on invalid boxes.
AnnotationSet from_canonical_json(std::string_view text);

}  // namespace bboxlab

#endif  // BBOXLAB_DATASETS_H_
