#include "cli/cli.h"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "bboxlab/error.h"
#include "bboxlab/grad.h"
#include "bboxlab/oracle.h"
#include "bboxlab/simlab_io.h"
#include "bboxlab/version.h"
#include "cli/svg.h"
#include "json.hpp"

namespace bboxlab::cli {
namespace {

using Json = nlohmann::ordered_json;

template <class E>
struct Names {
  E value;
  std::string_view name;
};

constexpr Names<Command> kCommands[] = {
    {Command::kEval, "eval"},         {Command::kGradCheck, "grad-check"},
    {Command::kOracle, "oracle"},     {Command::kSweep, "sweep"},
    {Command::kSimulate, "simulate"}, {Command::kCompare, "compare"},
    {Command::kStats, "stats"},
};
constexpr Names<OutputFormat> kFormats[] = {
    {OutputFormat::kText, "text"},
    {OutputFormat::kCsv, "csv"},
    {OutputFormat::kJson, "json"},
    {OutputFormat::kSvg, "svg"},
};
constexpr Names<SweepAxis> kAxes[] = {
    {SweepAxis::kX, "x"}, {SweepAxis::kY, "y"}, {SweepAxis::kBoth, "both"}};
constexpr Names<OracleMethod> kMethods[] = {
    {OracleMethod::kMonteCarlo, "mc"}, {OracleMethod::kGrid, "grid"}, {OracleMethod::kBoth, "both"}};
constexpr Names<DeviationMode> kModes[] = {
    {DeviationMode::kPosition, "position"}, {DeviationMode::kShape, "shape"}};

template <class E, std::size_t N>
std::string_view name_of(const Names<E> (&table)[N], E value) {
  for (const auto& n : table) {
    if (n.value == value) return n.name;
  }
  return "?";
}

template <class E, std::size_t N>
E value_of(const Names<E> (&table)[N], std::string_view name, std::string_view what) {
  for (const auto& n : table) {
    if (n.name == name) return n.value;
  }
  throw UsageError("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

template <class E, std::size_t N>
std::vector<std::string> names(const Names<E> (&table)[N]) {
  std::vector<std::string> out;
  for (const auto& n : table) out.emplace_back(n.name);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("invalid number '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

template <class Int>
Int to_int(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("invalid integer '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<MetricId> parse_metric_list(const std::vector<std::string>& items) {
  std::vector<MetricId> out;
  for (const auto& item : items) {
    for (const auto& part : split(item, ',')) {
      if (part == "all") {
        out.insert(out.end(), kAllMetrics.begin(), kAllMetrics.end());
        continue;
      }
      const auto id = parse_metric(part);
      if (!id) throw UsageError("unknown metric '" + part + "'");
      out.push_back(*id);
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::vector<std::string>& items,
                                      std::string_view what) {
  std::vector<double> out;
  for (const auto& item : items) {
    for (const auto& part : split(item, ',')) out.push_back(to_double(part, what));
  }
  return out;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config <-> JSON

Json box_json(const std::optional<BBox>& b) {
  if (!b) return nullptr;
  return Json::array({b->x_c(), b->y_c(), b->w(), b->h()});
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt_json(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<BBox> box_from(const nlohmann::json& j, std::string_view key) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 4) {
    throw UsageError("config: " + std::string(key) + " must be [xc, yc, w, h]");
  }
  try {
    return BBox(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  } catch (const InvalidBox& e) {
    throw UsageError("config: " + std::string(key) + ": " + e.what());
  }
}

template <class T>
void read(const nlohmann::json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

template <class T>
void read_opt(const nlohmann::json& obj, const char* key, std::optional<T>& dst) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  dst = v.is_null() ? std::nullopt : std::optional<T>(v.get<T>());
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  if (j.contains("command")) {
    cfg.command = value_of(kCommands, j.at("command").get<std::string>(), "command");
  }
  if (j.contains("metrics")) {
    cfg.metrics = parse_metric_list(j.at("metrics").get<std::vector<std::string>>());
  }
  if (j.contains("params")) {
    const auto& p = j.at("params");
    read(p, "scale", cfg.params.scale);
    read_opt(p, "mean_size", cfg.params.mean_size_s);
    read_opt(p, "nwd_c", cfg.params.nwd_c);
    read(p, "theta", cfg.params.theta);
    read(p, "shape_omega_coeff", cfg.params.shape_omega_coeff);
    read(p, "eps", cfg.params.eps);
  }
  read(j, "scales", cfg.scales);
  for (auto [key, dst] : {std::pair{"pred", &cfg.pred}, std::pair{"gt", &cfg.gt},
                          std::pair{"anchor", &cfg.anchor}}) {
    if (j.contains(key)) *dst = box_from(j.at(key), key);
  }
  read_opt(j, "annotations", cfg.annotations);
  if (j.contains("ann_format")) {
    const auto name = j.at("ann_format").get<std::string>();
    const auto f = parse_annotation_format(name);
    if (!f) throw UsageError("unknown annotation format '" + name + "'");
    cfg.ann_format = *f;
  }
  read_opt(j, "manifest", cfg.manifest);
  read_opt(j, "output", cfg.output);
  read_opt(j, "dump", cfg.dump);
  if (j.contains("format")) {
    cfg.format = value_of(kFormats, j.at("format").get<std::string>(), "format");
  }
  read(j, "seed", cfg.seed);
  if (j.contains("grad_check")) read(j.at("grad_check"), "step", cfg.step);
  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    if (o.contains("method")) {
      cfg.oracle_method = value_of(kMethods, o.at("method").get<std::string>(), "oracle method");
    }
    read(o, "samples", cfg.samples);
    read(o, "cells", cfg.cells);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.contains("axis")) cfg.axis = value_of(kAxes, s.at("axis").get<std::string>(), "axis");
    if (s.contains("mode")) cfg.mode = value_of(kModes, s.at("mode").get<std::string>(), "mode");
    read(s, "max_dev", cfg.max_dev);
    read(s, "steps", cfg.steps);
    read_opt(s, "pair_scale", cfg.pair_scale);
  }
  if (j.contains("descent")) {
    const auto& d = j.at("descent");
    read(d, "lr", cfg.descent.lr);
    read(d, "max_steps", cfg.descent.max_steps);
    read(d, "converge_loss", cfg.descent.converge_loss);
  }
  if (j.contains("compare")) {
    const auto& c = j.at("compare");
    read(c, "scenarios", cfg.scenarios);
    read(c, "threads", cfg.threads);
    read(c, "min_size", cfg.generator.min_size);
    read(c, "max_size", cfg.generator.max_size);
    read(c, "min_aspect", cfg.generator.min_gt_aspect);
    read(c, "max_aspect", cfg.generator.max_aspect);
    read(c, "max_offset", cfg.generator.max_offset);
    read(c, "log_jitter", cfg.generator.log_jitter);
  }
}

Json config_json(const RunConfig& cfg) {
  Json metrics = Json::array();
  for (MetricId m : cfg.metrics) metrics.push_back(metric_name(m));
  Json j;
  j["command"] = command_name(cfg.command);
  j["metrics"] = metrics;
  j["params"] = {{"scale", cfg.params.scale},
                 {"mean_size", opt_json(cfg.params.mean_size_s)},
                 {"nwd_c", opt_json(cfg.params.nwd_c)},
                 {"theta", cfg.params.theta},
                 {"shape_omega_coeff", cfg.params.shape_omega_coeff},
                 {"eps", cfg.params.eps}};
  j["scales"] = cfg.scales;
  j["pred"] = box_json(cfg.pred);
  j["gt"] = box_json(cfg.gt);
  j["anchor"] = box_json(cfg.anchor);
  j["annotations"] = opt_json(cfg.annotations);
  j["ann_format"] = bboxlab::format_name(cfg.ann_format);
  j["manifest"] = opt_json(cfg.manifest);
  j["output"] = opt_json(cfg.output);
  j["dump"] = opt_json(cfg.dump);
  j["format"] = format_name(cfg.format);
  j["seed"] = cfg.seed;
  j["grad_check"] = {{"step", cfg.step}};
  j["oracle"] = {{"method", oracle_method_name(cfg.oracle_method)},
                 {"samples", cfg.samples},
                 {"cells", cfg.cells}};
  j["sweep"] = {{"axis", sweep_axis_name(cfg.axis)},
                {"mode", deviation_mode_name(cfg.mode)},
                {"max_dev", cfg.max_dev},
                {"steps", cfg.steps},
                {"pair_scale", opt_json(cfg.pair_scale)}};
  j["descent"] = {{"lr", cfg.descent.lr},
                  {"max_steps", cfg.descent.max_steps},
                  {"converge_loss", cfg.descent.converge_loss}};
  j["compare"] = {{"scenarios", cfg.scenarios},
                  {"threads", cfg.threads},
                  {"min_size", cfg.generator.min_size},
                  {"max_size", cfg.generator.max_size},
                  {"min_aspect", cfg.generator.min_gt_aspect},
                  {"max_aspect", cfg.generator.max_aspect},
                  {"max_offset", cfg.generator.max_offset},
                  {"log_jitter", cfg.generator.log_jitter}};
  return j;
}

// ---------------------------------------------------------------------------
// Argument parsing

struct Raw {
  std::string config;
  std::string seed;
  std::string format;
  std::string output;
  std::vector<std::string> metrics;
  std::string scale;
  std::vector<std::string> scales;
  std::string mean_size;
  std::string nwd_c;
  std::string eps;
  std::string annotations;
  std::string ann_format;
  std::string manifest;
  std::string pred;
  std::string gt;
  std::string anchor;
  bool corners = false;
  std::string step;
  std::string method;
  std::string samples;
  std::string cells;
  std::string axis;
  std::string mode;
  std::string max_dev;
  std::string steps;
  std::string pair_scale;
  std::string lr;
  std::string max_steps;
  std::string converge_loss;
  std::string scenarios;
  std::string threads;
  std::string min_size;
  std::string max_size;
  std::string min_aspect;
  std::string max_aspect;
  std::string max_offset;
  std::string dump;
};

constexpr const char* kDescription = "Bounding-box regression metric laboratory";

void add_common(CLI::App* sub, Raw& raw, bool svg) {
  std::vector<std::string> formats = {"text", "csv", "json"};
  if (svg) formats.emplace_back("svg");
  sub->add_option("--config", raw.config, "JSON run config; flags override its values")
      ->type_name("FILE");
  sub->add_option("--seed", raw.seed, "RNG seed (default: $BBOXLAB_SEED or 0)")
      ->type_name("N");
  sub->add_option("--format", raw.format, "Output format")
      ->check(CLI::IsMember(formats))
      ->type_name("FMT")
      ->default_str("text");
  sub->add_option("--output,-o", raw.output, "Write output to FILE instead of stdout")
      ->type_name("FILE");
}

void add_metric_opts(CLI::App* sub, Raw& raw, bool scales) {
  sub->add_option("--metric,-m", raw.metrics,
                  "Metric(s), comma separated or repeated; 'all' for every metric")
      ->type_name("LIST");
  sub->add_option("--scale", raw.scale, "Shape-* scale factor")->type_name("X")->default_str("0");
  if (scales) {
    sub->add_option("--scales", raw.scales, "Several Shape-* scale factors (one row/curve each)")
        ->type_name("LIST");
  }
  sub->add_option("--mean-size", raw.mean_size, "Dataset mean size S (DotD family)")
      ->type_name("S");
  sub->add_option("--nwd-c", raw.nwd_c, "Dataset constant C (NWD family)")->type_name("C");
  sub->add_option("--eps", raw.eps, "SIoU angle-cost guard")->type_name("X")->default_str("1e-07");
  sub->add_option("--annotations", raw.annotations, "Derive S and C from this annotation set")
      ->type_name("PATH");
  sub->add_option("--ann-format", raw.ann_format, "Annotation format")
      ->check(CLI::IsMember({"coco-json", "coco", "yolo-txt", "yolo"}))
      ->type_name("FMT")
      ->default_str("coco-json");
  sub->add_option("--manifest", raw.manifest, "Image size manifest for yolo-txt")
      ->type_name("FILE");
}

void add_corners(CLI::App* sub, Raw& raw) {
  sub->add_flag("--corners", raw.corners, "Read boxes as x_min,y_min,x_max,y_max");
}

void add_descent(CLI::App* sub, Raw& raw) {
  sub->add_option("--lr", raw.lr, "Gradient-descent step size")->type_name("X")->default_str("0.05");
  sub->add_option("--max-steps", raw.max_steps, "Step budget")->type_name("N")->default_str("2000");
  sub->add_option("--converge-loss", raw.converge_loss, "Stop once loss drops below this")
      ->type_name("X")
      ->default_str("1e-06");
}

std::unique_ptr<CLI::App> build_app(Raw& raw) {
  auto app = std::make_unique<CLI::App>(kDescription, "bboxlab");
  app->set_version_flag("--version", std::string(kVersion));
  app->require_subcommand(1);
  app->fallthrough(false);

  auto* eval = app->add_subcommand("eval", "Evaluate metrics for one predicted/GT box pair");
  add_common(eval, raw, false);
  add_metric_opts(eval, raw, false);
  eval->add_option("--pred", raw.pred, "Predicted box xc,yc,w,h")->type_name("BOX");
  eval->add_option("--gt", raw.gt, "Ground-truth box xc,yc,w,h")->type_name("BOX");
  add_corners(eval, raw);

  auto* grad = app->add_subcommand("grad-check", "Compare analytic and finite-difference gradients");
  add_common(grad, raw, false);
  add_metric_opts(grad, raw, false);
  grad->add_option("--pred", raw.pred, "Predicted box xc,yc,w,h")->type_name("BOX");
  grad->add_option("--gt", raw.gt, "Ground-truth box xc,yc,w,h")->type_name("BOX");
  add_corners(grad, raw);
  grad->add_option("--step", raw.step, "Central-difference step")->type_name("H")->default_str("1e-06");

  auto* oracle = app->add_subcommand("oracle", "Check analytic IoU against sampling oracles");
  add_common(oracle, raw, false);
  oracle->add_option("--pred", raw.pred, "First box xc,yc,w,h")->type_name("BOX");
  oracle->add_option("--gt", raw.gt, "Second box xc,yc,w,h")->type_name("BOX");
  add_corners(oracle, raw);
  oracle->add_option("--method", raw.method, "Oracle(s) to run")
      ->check(CLI::IsMember(names(kMethods)))
      ->type_name("M")
      ->default_str("both");
  oracle->add_option("--samples", raw.samples, "Monte-Carlo sample count")
      ->type_name("N")
      ->default_str("100000");
  oracle->add_option("--cells", raw.cells, "Grid cells per axis")->type_name("N")->default_str("3000");

  auto* sweep = app->add_subcommand("sweep", "Metric value versus deviation along an axis");
  add_common(sweep, raw, true);
  add_metric_opts(sweep, raw, true);
  sweep->add_option("--gt", raw.gt, "Ground-truth box xc,yc,w,h")->type_name("BOX");
  add_corners(sweep, raw);
  sweep->add_option("--axis", raw.axis, "Deviation axis")
      ->check(CLI::IsMember(names(kAxes)))
      ->type_name("AXIS")
      ->default_str("both");
  sweep->add_option("--mode", raw.mode, "Offset the center or the size")
      ->check(CLI::IsMember(names(kModes)))
      ->type_name("MODE")
      ->default_str("position");
  sweep->add_option("--max-dev", raw.max_dev, "Largest deviation")->type_name("D")->default_str("2");
  sweep->add_option("--steps", raw.steps, "Number of intervals in [0, max-dev]")
      ->type_name("N")
      ->default_str("40");
  sweep->add_option("--pair-scale", raw.pair_scale,
                    "Also sweep the GT scaled by this factor (same absolute deviations)")
      ->type_name("S");

  auto* sim = app->add_subcommand("simulate", "Gradient-descent regression of one box");
  add_common(sim, raw, true);
  add_metric_opts(sim, raw, false);
  sim->add_option("--anchor", raw.anchor, "Initial box xc,yc,w,h (random from --seed if absent)")
      ->type_name("BOX");
  sim->add_option("--gt", raw.gt, "Target box xc,yc,w,h (random from --seed if absent)")
      ->type_name("BOX");
  add_corners(sim, raw);
  add_descent(sim, raw);

  auto* cmp = app->add_subcommand("compare", "Paired regression comparison over random scenarios");
  add_common(cmp, raw, false);
  add_metric_opts(cmp, raw, true);
  add_descent(cmp, raw);
  cmp->add_option("--scenarios", raw.scenarios, "Scenario count")->type_name("N")->default_str("100");
  cmp->add_option("--threads", raw.threads, "Worker threads")->type_name("N")->default_str("1");
  cmp->add_option("--min-size", raw.min_size, "Smallest GT size")->type_name("X")->default_str("0.05");
  cmp->add_option("--max-size", raw.max_size, "Largest GT size")->type_name("X")->default_str("0.5");
  cmp->add_option("--min-aspect", raw.min_aspect, "Smallest GT aspect ratio (long/short)")
      ->type_name("X")
      ->default_str("1");
  cmp->add_option("--max-aspect", raw.max_aspect, "Largest aspect ratio")
      ->type_name("X")
      ->default_str("4");
  cmp->add_option("--max-offset", raw.max_offset, "Anchor center offset, in GT sizes")
      ->type_name("X")
      ->default_str("0.5");

  auto* stats = app->add_subcommand("stats", "Dataset size statistics (S, C, histogram)");
  add_common(stats, raw, false);
  stats->add_option("--annotations", raw.annotations, "Annotation file or directory")
      ->type_name("PATH");
  stats->add_option("--ann-format", raw.ann_format, "Annotation format")
      ->check(CLI::IsMember({"coco-json", "coco", "yolo-txt", "yolo"}))
      ->type_name("FMT")
      ->default_str("coco-json");
  stats->add_option("--manifest", raw.manifest, "Image size manifest for yolo-txt")
      ->type_name("FILE");
  stats->add_option("--nwd-c", raw.nwd_c, "Override the derived NWD constant C")->type_name("C");
  stats->add_option("--dump", raw.dump, "Write the canonical JSON dump of the annotations")
      ->type_name("FILE");

  return app;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BBox box_arg(const std::string& text, bool corners, std::string_view flag) {
  try {
    return parse_box(text, corners);
  } catch (const UsageError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

bool supports_svg(Command c) { return c == Command::kSweep || c == Command::kSimulate; }

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void validate(const RunConfig& cfg) {
  const std::string cmd(command_name(cfg.command));
  if (cfg.format == OutputFormat::kSvg && !supports_svg(cfg.command)) {
    throw UsageError(cmd + " does not support --format svg");
  }
  const bool needs_metric = cfg.command != Command::kOracle && cfg.command != Command::kStats;
  if (needs_metric) {
    require(!cfg.metrics.empty(), cmd + ": missing --metric");
    const bool have_ann = cfg.annotations.has_value();
    for (MetricId m : cfg.metrics) {
      const std::string name(metric_name(m));
      require(!needs_mean_size(m) || cfg.params.mean_size_s || have_ann,
              cmd + ": metric " + name + " needs --mean-size (or --annotations)");
      require(!needs_nwd_constant(m) || cfg.params.nwd_c || have_ann,
              cmd + ": metric " + name + " needs --nwd-c (or --annotations)");
    }
  }
  try {
    cfg.params.validate();
  } catch (const InvalidParam& e) {
    throw UsageError(cmd + ": " + e.what());
  }
  for (double s : cfg.scales) require(s >= 0.0, cmd + ": --scales values must be >= 0");

  switch (cfg.command) {
    case Command::kEval:
    case Command::kOracle:
      require(cfg.pred.has_value(), cmd + ": missing --pred");
      require(cfg.gt.has_value(), cmd + ": missing --gt");
      require(cfg.samples >= 1, cmd + ": --samples must be >= 1");
      require(cfg.cells >= 2, cmd + ": --cells must be >= 2");
      break;
    case Command::kGradCheck:
      require(cfg.pred.has_value(), cmd + ": missing --pred");
      require(cfg.gt.has_value(), cmd + ": missing --gt");
      require(cfg.step > 0.0, cmd + ": --step must be > 0");
      break;
    case Command::kSweep:
      require(cfg.gt.has_value(), cmd + ": missing --gt");
      require(cfg.max_dev > 0.0, cmd + ": --max-dev must be > 0");
      require(cfg.steps >= 1, cmd + ": --steps must be >= 1");
      require(!cfg.pair_scale || *cfg.pair_scale > 0.0, cmd + ": --pair-scale must be > 0");
      break;
    case Command::kSimulate:
      require(cfg.anchor.has_value() == cfg.gt.has_value(),
              cmd + ": give both --anchor and --gt, or neither for a random scenario");
      [[fallthrough]];
    case Command::kCompare:
      require(cfg.descent.lr > 0.0, cmd + ": --lr must be > 0");
      require(cfg.descent.max_steps >= 1, cmd + ": --max-steps must be >= 1");
      require(cfg.scenarios >= 1, cmd + ": --scenarios must be >= 1");
      require(cfg.threads >= 1, cmd + ": --threads must be >= 1");
      break;
    case Command::kStats:
      require(cfg.annotations.has_value(), cmd + ": missing --annotations");
      require(!cfg.params.nwd_c || *cfg.params.nwd_c > 0.0, cmd + ": --nwd-c must be > 0");
      break;
  }
}

// ---------------------------------------------------------------------------
// Execution

struct Context {
  RunConfig cfg;  // resolved: dataset-derived constants filled in
  std::ostream* out;
};

std::vector<std::string> header_lines(const RunConfig& cfg) {
  return {"bboxlab " + std::string(kVersion), "seed " + std::to_string(cfg.seed),
          "config " + config_json(cfg).dump()};
}

void write_comment_header(std::ostream& os, const RunConfig& cfg) {
  for (const auto& line : header_lines(cfg)) os << "# " << line << '\n';
}

Json meta_json(const RunConfig& cfg) {
  return {{"version", kVersion}, {"seed", cfg.seed}, {"config", config_json(cfg)}};
}

void emit_json(std::ostream& os, const RunConfig& cfg, const char* key, Json body) {
  Json doc;
  doc["meta"] = meta_json(cfg);
  doc[key] = std::move(body);
  os << doc.dump(2) << '\n';
}

std::string svg_comment(const RunConfig& cfg) {
  std::string s;
  for (const auto& line : header_lines(cfg)) s += line + "\n";
  return s;
}

std::vector<MetricParams> param_variants(const RunConfig& cfg, MetricId m) {
  if (!uses_shape_weights(m) || cfg.scales.empty()) return {cfg.params};
  std::vector<MetricParams> out;
  for (double s : cfg.scales) {
    MetricParams p = cfg.params;
    p.scale = s;
    out.push_back(p);
  }
  return out;
}

Json box_values(const BBox& b) { return Json::array({b.x_c(), b.y_c(), b.w(), b.h()}); }

void run_eval(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::ostream& os = *ctx.out;
  std::vector<MetricResult> results;
  for (MetricId m : cfg.metrics) results.push_back(evaluate(m, *cfg.pred, *cfg.gt, cfg.params));

  switch (cfg.format) {
    case OutputFormat::kText: {
      write_comment_header(os, cfg);
      os << "pred " << to_string(*cfg.pred) << "\ngt   " << to_string(*cfg.gt) << '\n';
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        os << '\n' << metric_name(cfg.metrics[i]) << '\n';
        os << "  " << std::left << std::setw(12) << "value" << fmt6(r.value) << '\n';
        os << "  " << std::left << std::setw(12) << "loss" << fmt6(r.loss) << '\n';
        for (const auto& [name, v] : r.components) {
          os << "  " << std::left << std::setw(12) << name << fmt6(v) << '\n';
        }
      }
      break;
    }
    case OutputFormat::kCsv: {
      write_comment_header(os, cfg);
      os << "metric,quantity,value\n";
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const std::string m(metric_name(cfg.metrics[i]));
        os << m << ",value," << format_full(r.value) << '\n';
        os << m << ",loss," << format_full(r.loss) << '\n';
        for (const auto& [name, v] : r.components) {
          os << m << ',' << name << ',' << format_full(v) << '\n';
        }
      }
      break;
    }
    default: {
      Json arr = Json::array();
      for (std::size_t i = 0; i < results.size(); ++i) {
        Json comps = Json::object();
        for (const auto& [name, v] : results[i].components) comps[name] = v;
        arr.push_back({{"metric", metric_name(cfg.metrics[i])},
                       {"value", results[i].value},
                       {"loss", results[i].loss},
                       {"components", comps}});
      }
      emit_json(os, cfg, "results", std::move(arr));
    }
  }
}

void run_grad_check(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::ostream& os = *ctx.out;
  std::vector<GradCheckReport> reports;
  for (MetricId m : cfg.metrics) {
    reports.push_back(finite_diff_check(m, *cfg.pred, *cfg.gt, cfg.params, cfg.step));
  }
  static constexpr const char* kParams[] = {"xc", "yc", "w", "h"};

  switch (cfg.format) {
    case OutputFormat::kText: {
      write_comment_header(os, cfg);
      os << std::left << std::setw(12) << "metric" << std::setw(6) << "param" << std::setw(14)
         << "analytic" << std::setw(14) << "numeric" << "rel_err\n";
      for (const auto& r : reports) {
        const auto a = r.analytic.as_array();
        const auto n = r.numeric.as_array();
        for (int k = 0; k < 4; ++k) {
          os << std::left << std::setw(12) << metric_name(r.metric) << std::setw(6) << kParams[k]
             << std::setw(14) << fmt6(a[k]) << std::setw(14) << fmt6(n[k])
             << fmt6(r.per_component_err[k]) << '\n';
        }
      }
      break;
    }
    case OutputFormat::kCsv: {
      write_comment_header(os, cfg);
      os << "metric,param,analytic,numeric,rel_err\n";
      for (const auto& r : reports) {
        const auto a = r.analytic.as_array();
        const auto n = r.numeric.as_array();
        for (int k = 0; k < 4; ++k) {
          os << metric_name(r.metric) << ',' << kParams[k] << ',' << format_full(a[k]) << ','
             << format_full(n[k]) << ',' << format_full(r.per_component_err[k]) << '\n';
        }
      }
      break;
    }
    default: {
      Json arr = Json::array();
      for (const auto& r : reports) {
        arr.push_back({{"metric", metric_name(r.metric)},
                       {"step", r.step},
                       {"analytic", r.analytic.as_array()},
                       {"numeric", r.numeric.as_array()},
                       {"rel_err", r.per_component_err},
                       {"max_rel_err", r.max_rel_err}});
      }
      emit_json(os, cfg, "results", std::move(arr));
    }
  }
}

void run_oracle(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::ostream& os = *ctx.out;
  const double analytic = iou(*cfg.pred, *cfg.gt);
  std::optional<OracleEstimate> mc;
  std::optional<double> grid;
  if (cfg.oracle_method != OracleMethod::kGrid) mc = mc_iou(*cfg.pred, *cfg.gt, cfg.samples, cfg.seed);
  if (cfg.oracle_method != OracleMethod::kMonteCarlo) grid = grid_iou(*cfg.pred, *cfg.gt, cfg.cells);

  switch (cfg.format) {
    case OutputFormat::kText:
      write_comment_header(os, cfg);
      os << "analytic iou  " << fmt6(analytic) << '\n';
      if (mc) {
        os << "monte-carlo   " << fmt6(mc->value) << "  (n=" << mc->n_samples
           << ", stderr<=" << fmt6(mc->stderr_bound) << ", |diff|=" << fmt6(std::abs(mc->value - analytic))
           << ")\n";
      }
      if (grid) {
        os << "grid          " << fmt6(*grid) << "  (cells=" << cfg.cells
           << ", |diff|=" << fmt6(std::abs(*grid - analytic)) << ")\n";
      }
      break;
    case OutputFormat::kCsv:
      write_comment_header(os, cfg);
      os << "method,estimate,analytic,abs_err,stderr_bound\n";
      if (mc) {
        os << "mc," << format_full(mc->value) << ',' << format_full(analytic) << ','
           << format_full(std::abs(mc->value - analytic)) << ',' << format_full(mc->stderr_bound)
           << '\n';
      }
      if (grid) {
        os << "grid," << format_full(*grid) << ',' << format_full(analytic) << ','
           << format_full(std::abs(*grid - analytic)) << ",\n";
      }
      break;
    default: {
      Json body = {{"analytic", analytic}};
      if (mc) {
        body["mc"] = {{"estimate", mc->value},
                      {"n_samples", mc->n_samples},
                      {"seed", mc->seed},
                      {"generator", std::string(mc->generator)},
                      {"stderr_bound", mc->stderr_bound}};
      }
      if (grid) body["grid"] = {{"estimate", *grid}, {"cells", cfg.cells}};
      emit_json(os, cfg, "oracle", std::move(body));
    }
  }
}

struct NamedSweep {
  std::string name;
  SweepCurve curve;
};

std::vector<NamedSweep> build_sweeps(const RunConfig& cfg) {
  std::vector<Axis> axes;
  if (cfg.axis != SweepAxis::kY) axes.push_back(Axis::kX);
  if (cfg.axis != SweepAxis::kX) axes.push_back(Axis::kY);
  std::vector<std::pair<std::string, BBox>> gts = {{"", *cfg.gt}};
  if (cfg.pair_scale) {
    gts[0].first = "/base";
    gts.emplace_back("/scaled", scaled(*cfg.gt, *cfg.pair_scale));
  }
  const auto devs = linspace(0.0, cfg.max_dev, cfg.steps);

  std::vector<NamedSweep> out;
  for (MetricId m : cfg.metrics) {
    const auto variants = param_variants(cfg, m);
    for (const auto& p : variants) {
      const std::string label =
          variants.size() > 1 ? default_label(m, p) : std::string(metric_name(m));
      for (Axis a : axes) {
        for (const auto& [suffix, g] : gts) {
          SweepSpec spec{g, a, devs, m, p, cfg.mode};
          out.push_back({label + "/" + std::string(axis_name(a)) + suffix, deviation_sweep(spec)});
        }
      }
    }
  }
  return out;
}

void run_sweep(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::ostream& os = *ctx.out;
  const auto sweeps = build_sweeps(cfg);
  const auto& devs = sweeps.front().curve.spec.deviations;

  switch (cfg.format) {
    case OutputFormat::kText: {
      write_comment_header(os, cfg);
      os << std::left << std::setw(12) << "deviation";
      for (const auto& s : sweeps) os << std::setw(std::max<int>(12, s.name.size() + 2)) << s.name;
      os << '\n';
      for (std::size_t i = 0; i < devs.size(); ++i) {
        os << std::left << std::setw(12) << fmt6(devs[i]);
        for (const auto& s : sweeps) {
          os << std::setw(std::max<int>(12, s.name.size() + 2)) << fmt6(s.curve.values[i]);
        }
        os << '\n';
      }
      break;
    }
    case OutputFormat::kCsv: {
      write_comment_header(os, cfg);
      if (sweeps.size() == 1) {
        write_sweep_csv(os, sweeps.front().curve);
      } else {
        std::vector<NamedCurve> named;
        for (const auto& s : sweeps) named.push_back({s.name, &s.curve});
        write_sweep_csv(os, named);
      }
      break;
    }
    case OutputFormat::kJson: {
      Json arr = Json::array();
      for (const auto& s : sweeps) {
        arr.push_back({{"name", s.name},
                       {"metric", metric_name(s.curve.spec.metric)},
                       {"scale", s.curve.spec.params.scale},
                       {"axis", axis_name(s.curve.spec.axis)},
                       {"mode", deviation_mode_name(s.curve.spec.mode)},
                       {"gt", box_values(s.curve.spec.gt)},
                       {"deviations", s.curve.spec.deviations},
                       {"values", s.curve.values}});
      }
      emit_json(os, cfg, "curves", std::move(arr));
      break;
    }
    case OutputFormat::kSvg: {
      PlotSpec plot;
      plot.title = std::string(deviation_mode_name(cfg.mode)) + " deviation sweep, gt " +
                   to_string(*cfg.gt);
      plot.x_label = "deviation";
      plot.y_label = "metric value";
      plot.comment = svg_comment(cfg);
      for (const auto& s : sweeps) plot.series.push_back({s.name, devs, s.curve.values});
      os << render_svg(plot);
      break;
    }
  }
}

Scenario base_scenario(const RunConfig& cfg) {
  if (cfg.anchor) return Scenario{*cfg.anchor, *cfg.gt, MetricId::kIoU, {}, {}, cfg.seed};
  return generate_scenarios(ScenarioGenerator{}, 1, cfg.seed).front();
}

std::vector<Trajectory> build_trajectories(const RunConfig& cfg) {
  Scenario base = base_scenario(cfg);
  base.descent = cfg.descent;
  std::vector<Trajectory> out;
  for (MetricId m : cfg.metrics) {
    Scenario s = base;
    s.metric = m;
    s.params = cfg.params;
    out.push_back(run_regression(s));
  }
  return out;
}

void write_state_row(std::ostream& os, const TrajectoryState& st) {
  os << st.step << ',' << format_full(st.pred.x_c()) << ',' << format_full(st.pred.y_c()) << ','
     << format_full(st.pred.w()) << ',' << format_full(st.pred.h()) << ','
     << format_full(st.loss) << ',' << format_full(st.iou) << '\n';
}

void run_simulate(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::ostream& os = *ctx.out;
  const auto trajs = build_trajectories(cfg);

  switch (cfg.format) {
    case OutputFormat::kText: {
      write_comment_header(os, cfg);
      const Scenario& s0 = trajs.front().scenario;
      os << "anchor " << to_string(s0.anchor) << "\ngt     " << to_string(s0.gt) << '\n';
      for (const auto& t : trajs) {
        const auto& f = t.final_state();
        os << '\n' << metric_name(t.scenario.metric) << '\n'
           << "  stop        " << stop_reason_name(t.stop_reason) << '\n'
           << "  steps       " << f.step << '\n'
           << "  final loss  " << fmt6(f.loss) << '\n'
           << "  final iou   " << fmt6(f.iou) << '\n'
           << "  final box   " << to_string(f.pred) << '\n';
      }
      break;
    }
    case OutputFormat::kCsv: {
      write_comment_header(os, cfg);
      if (trajs.size() == 1) {
        write_trajectory_csv(os, trajs.front());
      } else {
        os << "metric,step,xc,yc,w,h,loss,iou\n";
        for (const auto& t : trajs) {
          for (const auto& st : t.states) {
            os << metric_name(t.scenario.metric) << ',';
            write_state_row(os, st);
          }
        }
      }
      break;
    }
    case OutputFormat::kJson: {
      Json arr = Json::array();
      for (const auto& t : trajs) {
        Json states = Json::array();
        for (const auto& st : t.states) {
          states.push_back({{"step", st.step},
                            {"pred", box_values(st.pred)},
                            {"loss", st.loss},
                            {"iou", st.iou}});
        }
        arr.push_back({{"metric", metric_name(t.scenario.metric)},
                       {"anchor", box_values(t.scenario.anchor)},
                       {"gt", box_values(t.scenario.gt)},
                       {"stop_reason", stop_reason_name(t.stop_reason)},
                       {"states", states}});
      }
      emit_json(os, cfg, "trajectories", std::move(arr));
      break;
    }
    case OutputFormat::kSvg: {
      PlotSpec plot;
      plot.title = "IoU during regression";
      plot.x_label = "step";
      plot.y_label = "IoU";
      plot.comment = svg_comment(cfg);
      for (const auto& t : trajs) {
        Series s{std::string(metric_name(t.scenario.metric)), {}, {}};
        for (const auto& st : t.states) {
          s.xs.push_back(st.step);
          s.ys.push_back(st.iou);
        }
        plot.series.push_back(std::move(s));
      }
      os << render_svg(plot);
      break;
    }
  }
}

void run_compare(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::ostream& os = *ctx.out;
  ScenarioGenerator gen = cfg.generator;
  gen.descent = cfg.descent;
  const auto templates = generate_scenarios(gen, cfg.scenarios, cfg.seed);
  std::vector<LossConfig> losses;
  for (MetricId m : cfg.metrics) {
    for (const auto& p : param_variants(cfg, m)) losses.push_back({default_label(m, p), m, p});
  }
  const ComparisonTable table = batch_compare(templates, losses, cfg.seed, cfg.threads);

  switch (cfg.format) {
    case OutputFormat::kText: {
      write_comment_header(os, cfg);
      os << "scenarios " << table.n_scenarios << '\n';
      os << std::left << std::setw(24) << "metric" << std::setw(16) << "mean_final_iou"
         << std::setw(12) << "mean_steps" << std::setw(11) << "converged" << "diverged\n";
      for (const auto& r : table.rows) {
        os << std::left << std::setw(24) << r.label << std::setw(16) << fmt6(r.mean_final_iou)
           << std::setw(12) << fmt6(r.mean_steps) << std::setw(11) << r.converged << r.diverged
           << '\n';
      }
      break;
    }
    case OutputFormat::kCsv:
      write_comment_header(os, cfg);
      write_comparison_csv(os, table);
      break;
    default:
      emit_json(os, cfg, "comparison", Json::parse(comparison_to_json(table)));
  }
}

void run_stats(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::ostream& os = *ctx.out;
  std::optional<std::filesystem::path> manifest;
  if (cfg.manifest) manifest = *cfg.manifest;
  const AnnotationSet ann = load_annotations(*cfg.annotations, cfg.ann_format, manifest);
  const DatasetStats st = compute_stats(ann, cfg.params.nwd_c);
  if (cfg.dump) {
    std::ofstream dump(*cfg.dump, std::ios::binary);
    if (!dump) throw std::runtime_error("cannot write '" + *cfg.dump + "'");
    dump << to_canonical_json(ann);
  }

  switch (cfg.format) {
    case OutputFormat::kText:
      write_comment_header(os, cfg);
      os << "images      " << st.n_images << '\n'
         << "boxes       " << st.n_boxes << '\n'
         << "mean size S " << fmt6(st.mean_size_s) << '\n'
         << "nwd C       " << fmt6(st.nwd_c) << " (" << constant_source_name(st.nwd_c_source)
         << ")\n"
         << "size histogram (bucket k: 2^k <= sqrt(area) < 2^(k+1))\n";
      for (const auto& [k, n] : st.size_histogram) os << "  " << k << "  " << n << '\n';
      os << scale_guidance() << '\n';
      break;
    case OutputFormat::kCsv:
      write_comment_header(os, cfg);
      os << "key,value\n"
         << "n_images," << st.n_images << '\n'
         << "n_boxes," << st.n_boxes << '\n'
         << "mean_size_s," << format_full(st.mean_size_s) << '\n'
         << "nwd_c," << format_full(st.nwd_c) << '\n'
         << "nwd_c_source," << constant_source_name(st.nwd_c_source) << '\n';
      for (const auto& [k, n] : st.size_histogram) os << "bucket_" << k << ',' << n << '\n';
      break;
    default: {
      Json hist = Json::array();
      for (const auto& [k, n] : st.size_histogram) hist.push_back({{"bucket", k}, {"count", n}});
      emit_json(os, cfg, "stats",
                {{"n_images", st.n_images},
                 {"n_boxes", st.n_boxes},
                 {"mean_size_s", st.mean_size_s},
                 {"nwd_c", st.nwd_c},
                 {"nwd_c_source", constant_source_name(st.nwd_c_source)},
                 {"size_histogram", hist},
                 {"scale_guidance", scale_guidance()}});
    }
  }
}

// Fills S and C from --annotations where the flags left them unset.
RunConfig resolve(const RunConfig& cfg) {
  RunConfig r = cfg;
  if (cfg.command == Command::kStats || !cfg.annotations) return r;
  const bool wants = std::any_of(cfg.metrics.begin(), cfg.metrics.end(), [&](MetricId m) {
    return (needs_mean_size(m) && !cfg.params.mean_size_s) ||
           (needs_nwd_constant(m) && !cfg.params.nwd_c);
  });
  if (!wants) return r;
  std::optional<std::filesystem::path> manifest;
  if (cfg.manifest) manifest = *cfg.manifest;
  const DatasetStats st = compute_stats(load_annotations(*cfg.annotations, cfg.ann_format, manifest));
  if (!r.params.mean_size_s) r.params.mean_size_s = st.mean_size_s;
  if (!r.params.nwd_c) r.params.nwd_c = st.nwd_c;
  return r;
}

}  // namespace

std::string_view command_name(Command c) { return name_of(kCommands, c); }
std::string_view format_name(OutputFormat f) { return name_of(kFormats, f); }
std::string_view sweep_axis_name(SweepAxis a) { return name_of(kAxes, a); }
std::string_view oracle_method_name(OracleMethod m) { return name_of(kMethods, m); }

std::string config_to_json(const RunConfig& cfg, int indent) {
  return config_json(cfg).dump(indent);
}

RunConfig config_from_json(std::string_view text) {
  RunConfig cfg;
  try {
    apply_json(cfg, nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

BBox parse_box(std::string_view text, bool corners) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) {
    throw UsageError("box '" + std::string(text) + "' must have 4 comma-separated numbers");
  }
  double v[4];
  for (int i = 0; i < 4; ++i) v[i] = to_double(parts[i], "box");
  try {
    if (corners) return from_corners(CornerBox(v[0], v[1], v[2], v[3]));
    return BBox(v[0], v[1], v[2], v[3]);
  } catch (const InvalidBox& e) {
    throw UsageError(e.what());
  }
}

RunConfig parse_args(const std::vector<std::string>& args) {
  Raw raw;
  auto app = build_app(raw);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app->parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequest{app->help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequest{app->help("", CLI::AppFormatMode::All)};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequest{std::string(kVersion) + "\n"};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app->get_subcommands().front();
  const auto given = [&](const char* flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };

  RunConfig cfg;
  cfg.command = value_of(kCommands, sub->get_name(), "command");
  if (const char* env = std::getenv("BBOXLAB_SEED"); env != nullptr && *env != '\0') {
    cfg.seed = to_int<std::uint64_t>(env, "BBOXLAB_SEED");
  }
  if (given("--config")) {
    const RunConfig before = cfg;
    try {
      apply_json(cfg, nlohmann::json::parse(read_file(raw.config)));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config '" + raw.config + "': " + e.what());
    }
    if (cfg.command != before.command) {
      throw UsageError("config '" + raw.config + "' is for '" +
                       std::string(command_name(cfg.command)) + "', not '" + sub->get_name() + "'");
    }
  }

  if (given("--seed")) cfg.seed = to_int<std::uint64_t>(raw.seed, "--seed");
  if (given("--format")) cfg.format = value_of(kFormats, raw.format, "format");
  if (given("--output")) cfg.output = raw.output;
  if (given("--metric")) cfg.metrics = parse_metric_list(raw.metrics);
  if (given("--scale")) cfg.params.scale = to_double(raw.scale, "--scale");
  if (given("--scales")) cfg.scales = parse_double_list(raw.scales, "--scales");
  if (given("--mean-size")) cfg.params.mean_size_s = to_double(raw.mean_size, "--mean-size");
  if (given("--nwd-c")) cfg.params.nwd_c = to_double(raw.nwd_c, "--nwd-c");
  if (given("--eps")) cfg.params.eps = to_double(raw.eps, "--eps");
  if (given("--annotations")) cfg.annotations = raw.annotations;
  if (given("--ann-format")) cfg.ann_format = *parse_annotation_format(raw.ann_format);
  if (given("--manifest")) cfg.manifest = raw.manifest;
  if (given("--pred")) cfg.pred = box_arg(raw.pred, raw.corners, "--pred");
  if (given("--gt")) cfg.gt = box_arg(raw.gt, raw.corners, "--gt");
  if (given("--anchor")) cfg.anchor = box_arg(raw.anchor, raw.corners, "--anchor");
  if (given("--step")) cfg.step = to_double(raw.step, "--step");
  if (given("--method")) cfg.oracle_method = value_of(kMethods, raw.method, "oracle method");
  if (given("--samples")) cfg.samples = to_int<std::uint64_t>(raw.samples, "--samples");
  if (given("--cells")) cfg.cells = to_int<std::uint32_t>(raw.cells, "--cells");
  if (given("--axis")) cfg.axis = value_of(kAxes, raw.axis, "axis");
  if (given("--mode")) cfg.mode = value_of(kModes, raw.mode, "mode");
  if (given("--max-dev")) cfg.max_dev = to_double(raw.max_dev, "--max-dev");
  if (given("--steps")) cfg.steps = to_int<int>(raw.steps, "--steps");
  if (given("--pair-scale")) cfg.pair_scale = to_double(raw.pair_scale, "--pair-scale");
  if (given("--lr")) cfg.descent.lr = to_double(raw.lr, "--lr");
  if (given("--max-steps")) cfg.descent.max_steps = to_int<int>(raw.max_steps, "--max-steps");
  if (given("--converge-loss")) {
    cfg.descent.converge_loss = to_double(raw.converge_loss, "--converge-loss");
  }
  if (given("--scenarios")) cfg.scenarios = to_int<std::size_t>(raw.scenarios, "--scenarios");
  if (given("--threads")) cfg.threads = to_int<unsigned>(raw.threads, "--threads");
  if (given("--min-size")) cfg.generator.min_size = to_double(raw.min_size, "--min-size");
  if (given("--max-size")) cfg.generator.max_size = to_double(raw.max_size, "--max-size");
  if (given("--min-aspect")) cfg.generator.min_gt_aspect = to_double(raw.min_aspect, "--min-aspect");
  if (given("--max-aspect")) cfg.generator.max_aspect = to_double(raw.max_aspect, "--max-aspect");
  if (given("--max-offset")) cfg.generator.max_offset = to_double(raw.max_offset, "--max-offset");
  if (given("--dump")) cfg.dump = raw.dump;

  validate(cfg);
  return cfg;
}

std::string help_text(std::string_view command) {
  Raw raw;
  auto app = build_app(raw);
  if (command.empty()) return app->help();
  std::vector<std::string> args = {"--help", std::string(command)};
  try {
    app->parse(args);
  } catch (const CLI::CallForHelp&) {
    return app->help();
  }
  throw UsageError("unknown command '" + std::string(command) + "'");
}

void execute(const RunConfig& cfg, std::ostream& out) {
  Context ctx{resolve(cfg), &out};
  std::ofstream file;
  if (cfg.output) {
    file.open(*cfg.output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + *cfg.output + "'");
    ctx.out = &file;
  }
  switch (cfg.command) {
    case Command::kEval:
      run_eval(ctx);
      break;
    case Command::kGradCheck:
      run_grad_check(ctx);
      break;
    case Command::kOracle:
      run_oracle(ctx);
      break;
    case Command::kSweep:
      run_sweep(ctx);
      break;
    case Command::kSimulate:
      run_simulate(ctx);
      break;
    case Command::kCompare:
      run_compare(ctx);
      break;
    case Command::kStats:
      run_stats(ctx);
      break;
  }
  ctx.out->flush();
  if (!*ctx.out) throw std::runtime_error("write failed");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequest& h) {
    out << h.text;
    return kExitOk;
  } catch (const UsageError& e) {
    err << "bboxlab: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "bboxlab: " << e.what() << '\n';
    return kExitRuntime;
  }
  try {
    execute(cfg, out);
  } catch (const std::exception& e) {
    err << "bboxlab: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace bboxlab::cli
