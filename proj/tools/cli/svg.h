#ifndef BBOXLAB_TOOLS_SVG_H_
#define BBOXLAB_TOOLS_SVG_H_

// Minimal static line-plot writer. Each series becomes one <polyline> tagged
// with data-series="<name>" so tests can read the curves back.

#include <string>
#include <vector>

namespace bboxlab::cli {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string comment;  // emitted verbatim inside <!-- -->
  std::vector<Series> series;
};

std::string render_svg(const PlotSpec& plot);

}  // namespace bboxlab::cli

#endif  // BBOXLAB_TOOLS_SVG_H_
