#ifndef BBOXLAB_TOOLS_CLI_H_
#define BBOXLAB_TOOLS_CLI_H_

// Command-line front end: argument parsing into a RunConfig and execution of
// a resolved config. main() is a thin wrapper around run().

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bboxlab/box.h"
#include "bboxlab/datasets.h"
#include "bboxlab/metrics.h"
#include "bboxlab/simlab.h"

namespace bboxlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

enum class Command { kEval, kGradCheck, kOracle, kSweep, kSimulate, kCompare, kStats };
enum class OutputFormat { kText, kCsv, kJson, kSvg };
enum class SweepAxis { kX, kY, kBoth };
enum class OracleMethod { kMonteCarlo, kGrid, kBoth };

std::string_view command_name(Command c);
std::string_view format_name(OutputFormat f);
std::string_view sweep_axis_name(SweepAxis a);
std::string_view oracle_method_name(OracleMethod m);

struct RunConfig {
  Command command = Command::kEval;
  std::vector<MetricId> metrics;
  MetricParams params;
  // Extra Shape-* scale values for sweep/compare; empty means params.scale only.
  std::vector<double> scales;

  std::optional<BBox> pred;
  std::optional<BBox> gt;
  std::optional<BBox> anchor;

  std::optional<std::string> annotations;
  AnnotationFormat ann_format = AnnotationFormat::kCocoJson;
  std::optional<std::string> manifest;
  std::optional<std::string> output;
  std::optional<std::string> dump;
  OutputFormat format = OutputFormat::kText;
  std::uint64_t seed = 0;

  double step = 1e-6;

  OracleMethod oracle_method = OracleMethod::kBoth;
  std::uint64_t samples = 100000;
  std::uint32_t cells = 3000;

  SweepAxis axis = SweepAxis::kBoth;
  DeviationMode mode = DeviationMode::kPosition;
  double max_dev = 2.0;
  int steps = 40;
  std::optional<double> pair_scale;

  DescentConfig descent;

  std::size_t scenarios = 100;
  ScenarioGenerator generator;
  unsigned threads = 1;

  bool operator==(const RunConfig&) const = default;
};

// Malformed command line or an incomplete/conflicting config. Exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --help / --version: text to print, exit 0.
struct HelpRequest {
  std::string text;
};

// Config-file representation. Keys mirror RunConfig fields; boxes are
// [xc, yc, w, h]. Missing keys keep their defaults.
std::string config_to_json(const RunConfig& cfg, int indent = 2);
RunConfig config_from_json(std::string_view text);

BBox parse_box(std::string_view text, bool corners = false);

// args excludes the program name. Throws UsageError or HelpRequest.
RunConfig parse_args(const std::vector<std::string>& args);

// Help text for one subcommand (or the top level when command is empty).
std::string help_text(std::string_view command = {});

// Runs a resolved config; artifacts go to cfg.output or out. Throws
// bboxlab::Error (and std::exception) on runtime failures.
void execute(const RunConfig& cfg, std::ostream& out);

// Full front end: parse, execute, map failures to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bboxlab::cli

#endif  // BBOXLAB_TOOLS_CLI_H_
