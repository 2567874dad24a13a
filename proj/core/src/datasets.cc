#include "bboxlab/datasets.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bboxlab/error.h"
#include "json.hpp"

namespace bboxlab {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

std::string id_string(const json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return id.dump();
  throw ParseError("image id must be an integer or a string, got " + id.dump());
}

void check_unique_ids(const AnnotationSet& ann, const std::string& where) {
  std::set<std::string> seen;
  for (const auto& img : ann.images) {
    if (!seen.insert(img.image_id).second) {
      throw ParseError(where + ": duplicate image id '" + img.image_id + "'");
    }
  }
}

AnnotationSet load_coco(const std::filesystem::path& path) {
  const std::string where = path.string();
  const json doc = parse_json(read_file(path), where);
  if (!doc.is_object() || !doc.contains("annotations") || !doc["annotations"].is_array()) {
    throw ParseError(where + ": missing \"annotations\" array");
  }

  AnnotationSet ann;
  ann.source_format = AnnotationFormat::kCocoJson;
  std::map<std::string, std::size_t> index;
  if (doc.contains("images")) {
    if (!doc["images"].is_array()) throw ParseError(where + ": \"images\" must be an array");
    std::size_t i = 0;
    for (const auto& img : doc["images"]) {
      const std::string loc = where + ": images[" + std::to_string(i++) + "]";
      if (!img.is_object() || !img.contains("id")) throw ParseError(loc + ": missing \"id\"");
      std::string id;
      try {
        id = id_string(img["id"]);
      } catch (const ParseError& e) {
        throw ParseError(loc + ": " + e.what());
      }
      if (!index.emplace(id, ann.images.size()).second) {
        throw ParseError(loc + ": duplicate image id '" + id + "'");
      }
      ann.images.push_back({id, {}});
    }
  }

  std::size_t i = 0;
  for (const auto& rec : doc["annotations"]) {
    std::string loc = where + ": annotations[" + std::to_string(i++) + "]";
    if (rec.is_object() && rec.contains("id")) loc += " (id " + rec["id"].dump() + ")";
    if (!rec.is_object() || !rec.contains("image_id") || !rec.contains("bbox")) {
      throw ParseError(loc + ": needs \"image_id\" and \"bbox\"");
    }
    const json& bbox = rec["bbox"];
    if (!bbox.is_array() || bbox.size() != 4 ||
        !std::all_of(bbox.begin(), bbox.end(), [](const json& v) { return v.is_number(); })) {
      throw ParseError(loc + ": \"bbox\" must be [x, y, width, height]");
    }
    const double x = bbox[0].get<double>();
    const double y = bbox[1].get<double>();
    const double w = bbox[2].get<double>();
    const double h = bbox[3].get<double>();
    if (!(w > 0.0) || !(h > 0.0)) {
      throw ValidationError(loc + ": non-positive width/height in bbox " + bbox.dump());
    }
    std::string image_id;
    try {
      image_id = id_string(rec["image_id"]);
    } catch (const ParseError& e) {
      throw ParseError(loc + ": " + e.what());
    }
    auto it = index.find(image_id);
    if (it == index.end()) {
      if (doc.contains("images")) {
        throw ParseError(loc + ": image_id " + image_id + " not listed in \"images\"");
      }
      it = index.emplace(image_id, ann.images.size()).first;
      ann.images.push_back({image_id, {}});
    }
    try {
      ann.images[it->second].boxes.emplace_back(x, y, x + w, y + h);
    } catch (const InvalidBox& e) {
      throw ValidationError(loc + ": " + e.what());
    }
  }
  return ann;
}

struct ImageSize {
  double width;
  double height;
};

std::map<std::string, ImageSize> load_manifest(const std::filesystem::path& path) {
  const std::string where = path.string();
  const json doc = parse_json(read_file(path), where);
  if (!doc.is_object()) throw ParseError(where + ": manifest must be a JSON object");
  std::map<std::string, ImageSize> out;
  for (const auto& [name, dims] : doc.items()) {
    const std::string loc = where + ": \"" + name + "\"";
    if (!dims.is_object() || !dims.contains("width") || !dims.contains("height") ||
        !dims["width"].is_number() || !dims["height"].is_number()) {
      throw ParseError(loc + ": needs numeric \"width\" and \"height\"");
    }
    const ImageSize size{dims["width"].get<double>(), dims["height"].get<double>()};
    if (!(size.width > 0.0) || !(size.height > 0.0)) {
      throw ValidationError(loc + ": non-positive image size");
    }
    out.emplace(name, size);
  }
  return out;
}

std::vector<CornerBox> load_yolo_file(const std::filesystem::path& path, ImageSize size) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<CornerBox> boxes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string loc = path.string() + ":" + std::to_string(line_no);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string cls;
    double v[4];
    if (!(ss >> cls >> v[0] >> v[1] >> v[2] >> v[3])) {
      throw ParseError(loc + ": expected \"class cx cy w h\"");
    }
    std::string extra;
    if (ss >> extra) throw ParseError(loc + ": trailing field '" + extra + "'");
    if (!(v[2] > 0.0) || !(v[3] > 0.0)) {
      throw ValidationError(loc + ": non-positive width/height");
    }
    for (double x : v) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw ValidationError(loc + ": normalized coordinate outside [0, 1]");
      }
    }
    const double cx = v[0] * size.width;
    const double cy = v[1] * size.height;
    const double hw = 0.5 * v[2] * size.width;
    const double hh = 0.5 * v[3] * size.height;
    boxes.emplace_back(cx - hw, cy - hh, cx + hw, cy + hh);
  }
  return boxes;
}

AnnotationSet load_yolo(const std::filesystem::path& dir,
                        const std::optional<std::filesystem::path>& manifest_path) {
  if (!std::filesystem::is_directory(dir)) {
    throw ParseError(dir.string() + ": yolo-txt input must be a directory");
  }
  const auto manifest = load_manifest(manifest_path.value_or(dir / "manifest.json"));

  std::map<std::string, std::string> stem_to_image;
  for (const auto& [name, size] : manifest) {
    const std::string stem = std::filesystem::path(name).stem().string();
    if (!stem_to_image.emplace(stem, name).second) {
      throw ParseError("manifest: two images share the stem '" + stem + "'");
    }
  }

  AnnotationSet ann;
  ann.source_format = AnnotationFormat::kYoloTxt;
  std::map<std::string, std::vector<CornerBox>> by_image;
  for (const auto& [name, size] : manifest) by_image[name];

  std::vector<std::filesystem::path> label_files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      label_files.push_back(entry.path());
    }
  }
  std::sort(label_files.begin(), label_files.end());
  for (const auto& file : label_files) {
    const auto it = stem_to_image.find(file.stem().string());
    if (it == stem_to_image.end()) {
      throw ParseError(file.string() + ": no manifest entry for this label file");
    }
    by_image[it->second] = load_yolo_file(file, manifest.at(it->second));
  }
  for (auto& [name, boxes] : by_image) ann.images.push_back({name, std::move(boxes)});
  return ann;
}

}  // namespace

std::string_view format_name(AnnotationFormat format) {
  return format == AnnotationFormat::kCocoJson ? "coco-json" : "yolo-txt";
}

std::optional<AnnotationFormat> parse_annotation_format(std::string_view name) {
  if (name == "coco-json" || name == "coco") return AnnotationFormat::kCocoJson;
  if (name == "yolo-txt" || name == "yolo") return AnnotationFormat::kYoloTxt;
  return std::nullopt;
}

std::size_t AnnotationSet::n_boxes() const {
  std::size_t n = 0;
  for (const auto& img : images) n += img.boxes.size();
  return n;
}

AnnotationSet load_annotations(const std::filesystem::path& path, AnnotationFormat format,
                               const std::optional<std::filesystem::path>& manifest) {
  AnnotationSet ann =
      format == AnnotationFormat::kCocoJson ? load_coco(path) : load_yolo(path, manifest);
  check_unique_ids(ann, path.string());
  return ann;
}

double dataset_mean_size(const AnnotationSet& ann) {
  std::vector<double> areas;
  areas.reserve(ann.n_boxes());
  for (const auto& img : ann.images) {
    for (const auto& b : img.boxes) areas.push_back(b.area());
  }
  if (areas.empty()) throw EmptyDataset("dataset has no boxes");
  std::sort(areas.begin(), areas.end());
  double total = 0.0;
  for (double a : areas) total += a;
  return std::sqrt(total / static_cast<double>(areas.size()));
}

std::string_view constant_source_name(ConstantSource source) {
  return source == ConstantSource::kDerived ? "derived" : "override";
}

DatasetStats compute_stats(const AnnotationSet& ann, std::optional<double> nwd_c_override) {
  DatasetStats stats;
  stats.mean_size_s = dataset_mean_size(ann);
  stats.n_images = ann.images.size();
  stats.n_boxes = ann.n_boxes();
  if (nwd_c_override) {
    if (!(*nwd_c_override > 0.0)) throw InvalidParam("NWD constant override must be > 0");
    stats.nwd_c = *nwd_c_override;
    stats.nwd_c_source = ConstantSource::kOverride;
  } else {
    stats.nwd_c = stats.mean_size_s;
  }
  for (const auto& img : ann.images) {
    for (const auto& b : img.boxes) {
      const int bucket = static_cast<int>(std::floor(std::log2(std::sqrt(b.area()))));
      ++stats.size_histogram[bucket];
    }
  }
  return stats;
}

std::string_view scale_guidance() {
  return "The Shape-IoU scale factor should follow the typical target size of the dataset; "
         "no numeric value is derived here. Use the size histogram and a scale sweep to pick one.";
}

std::string to_canonical_json(const AnnotationSet& ann) {
  nlohmann::ordered_json j;
  j["schema_version"] = kCanonicalSchemaVersion;
  j["source_format"] = std::string(format_name(ann.source_format));
  auto images = nlohmann::ordered_json::array();
  for (const auto& img : ann.images) {
    nlohmann::ordered_json entry;
    entry["id"] = img.image_id;
    auto boxes = nlohmann::ordered_json::array();
    for (const auto& b : img.boxes) {
      boxes.push_back({b.x_min(), b.y_min(), b.x_max(), b.y_max()});
    }
    entry["boxes"] = std::move(boxes);
    images.push_back(std::move(entry));
  }
  j["images"] = std::move(images);
  return j.dump(2);
}

AnnotationSet from_canonical_json(std::string_view text) {
  const json doc = parse_json(std::string(text), "canonical dump");
  if (!doc.is_object() || !doc.contains("schema_version") ||
      doc["schema_version"] != kCanonicalSchemaVersion) {
    throw ParseError("canonical dump: unsupported or missing schema_version");
  }
  AnnotationSet ann;
  const auto format = parse_annotation_format(doc.value("source_format", std::string()));
  if (!format) throw ParseError("canonical dump: unknown source_format");
  ann.source_format = *format;
  if (!doc.contains("images") || !doc["images"].is_array()) {
    throw ParseError("canonical dump: missing \"images\" array");
  }
  std::size_t i = 0;
  for (const auto& img : doc["images"]) {
    const std::string loc = "canonical dump: images[" + std::to_string(i++) + "]";
    if (!img.is_object() || !img.contains("id") || !img["id"].is_string() ||
        !img.contains("boxes") || !img["boxes"].is_array()) {
      throw ParseError(loc + ": needs string \"id\" and \"boxes\" array");
    }
    ImageAnnotations entry{img["id"].get<std::string>(), {}};
    for (const auto& b : img["boxes"]) {
      if (!b.is_array() || b.size() != 4) throw ParseError(loc + ": box must have 4 numbers");
      try {
        entry.boxes.emplace_back(b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                                 b[3].get<double>());
      } catch (const InvalidBox& e) {
        throw ValidationError(loc + ": " + e.what());
      } catch (const json::exception& e) {
        throw ParseError(loc + ": " + e.what());
      }
    }
    ann.images.push_back(std::move(entry));
  }
  check_unique_ids(ann, "canonical dump");
  return ann;
}

}  // namespace bboxlab
