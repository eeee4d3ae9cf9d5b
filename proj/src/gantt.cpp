/* Copyright 2026 The wavepipe Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wavepipe/gantt.hpp"

#include <sstream>
#include <stdexcept>

namespace wavepipe {

namespace {

const char* interval_color(const TraceInterval& iv) {
  if (iv.kind == ActionKind::BatchedExchange) return "#9c27b0";
  bool up = iv.direction == Direction::Up;
  if (iv.kind == ActionKind::Forward) return up ? "#2196f3" : "#4caf50";
  return up ? "#ffeb3b" : "#ff9800";
}

std::string render_svg(const SimTrace& trace) {
  const int devices = static_cast<int>(trace.intervals.size());
  const double left = 44.0, top = 10.0;
  const double row_h = 36.0, bar_h = 28.0;
  const double plot_w = 920.0;
  const double span = trace.makespan > 0.0 ? trace.makespan : 1.0;
  const double px = plot_w / span;
  const double width = left + plot_w + 10.0;
  const double height = top + row_h * devices + 24.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  for (int d = 0; d < devices; ++d) {
    double y = top + d * row_h;
    os << "  <text x=\"4\" y=\"" << y + bar_h * 0.7
       << "\" font-size=\"12\">d" << d << "</text>\n";
    os << "  <line x1=\"" << left << "\" y1=\"" << y + row_h - 4 << "\" x2=\""
       << left + plot_w << "\" y2=\"" << y + row_h - 4
       << "\" stroke=\"#ddd\"/>\n";
    for (const TraceInterval& iv : trace.intervals[d]) {
      double x = left + iv.start * px;
      double w = (iv.end - iv.start) * px;
      if (w < 0.5) w = 0.5;  // keep zero-duration exchanges visible
      os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
         << "\" height=\"" << bar_h << "\" fill=\"" << interval_color(iv)
         << "\" stroke=\"#333\" stroke-width=\"0.5\"/>\n";
      if (iv.kind != ActionKind::BatchedExchange && w >= 9.0) {
        os << "  <text x=\"" << x + w / 2 << "\" y=\"" << y + bar_h * 0.7
           << "\" font-size=\"11\" text-anchor=\"middle\">" << iv.microbatch
           << "</text>\n";
      }
    }
  }
  // time axis
  double axis_y = top + row_h * devices + 12.0;
  os << "  <text x=\"" << left << "\" y=\"" << axis_y
     << "\" font-size=\"11\">0</text>\n";
  os << "  <text x=\"" << left + plot_w << "\" y=\"" << axis_y
     << "\" font-size=\"11\" text-anchor=\"end\">" << trace.makespan
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string render_csv(const SimTrace& trace) {
  std::ostringstream os;
  os << "device,kind,microbatch,slice,start,end\n";
  for (int d = 0; d < static_cast<int>(trace.intervals.size()); ++d) {
    for (const TraceInterval& iv : trace.intervals[d]) {
      os << d << "," << action_kind_name(iv.kind) << "," << iv.microbatch
         << "," << iv.slice_index << "," << iv.start << "," << iv.end << "\n";
    }
  }
  return os.str();
}

}  // namespace

std::string trace_to_gantt(const SimTrace& trace, const std::string& format) {
  if (format == "svg") return render_svg(trace);
  if (format == "csv") return render_csv(trace);
  throw std::invalid_argument("unknown gantt format: " + format);
}

}  // namespace wavepipe
