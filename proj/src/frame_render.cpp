#include "hjplan/frame_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hjplan {

namespace {

constexpr double kCanvas = 600.0;
constexpr double kLegendWidth = 240.0;
constexpr int kUnderlayCells = 32;

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

class Mapper
{
public:
  explicit Mapper(const ScenarioSpec& spec)
    : myX0(spec.bounds_lower[0]),
      myY0(spec.bounds_lower[1]),
      myScale(kCanvas / std::max(spec.bounds_upper[0] - spec.bounds_lower[0], spec.bounds_upper[1] - spec.bounds_lower[1])),
      myY1(spec.bounds_upper[1])
  {
  }

  double px(double x) const { return (x - myX0) * myScale; }
  double py(double y) const { return (myY1 - y) * myScale; }
  double len(double d) const { return d * myScale; }

private:
  double myX0;
  double myY0;
  double myScale;
  double myY1;
};

std::string polyline_points(const Mapper& m, const std::vector<StateVector>& pts)
{
  std::string out;
  for (const auto& p : pts)
  {
    if (!out.empty())
      out += ' ';
    out += num(m.px(p[0])) + "," + num(m.py(p[1]));
  }
  return out;
}

// Blue (slow) to yellow (fast).
std::string speed_color(double t)
{
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + t * (250 - 40)));
  const int g = static_cast<int>(std::lround(60 + t * (230 - 60)));
  const int b = static_cast<int>(std::lround(200 + t * (40 - 200)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

void circle(std::ostringstream& os, const std::string& id, double cx, double cy, double r, const std::string& fill)
{
  os << "  <circle id=\"" << id << "\" cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
     << "\" fill=\"" << fill << "\"/>\n";
}

} // namespace

std::string render_frame_svg(const ScenarioSpec& spec, const FrameContent& frame)
{
  const Mapper m(spec);
  const double width = m.px(spec.bounds_upper[0]);
  const double height = m.py(spec.bounds_lower[1]);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width + kLegendWidth)
     << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width + kLegendWidth) << " " << num(height)
     << "\">\n";
  os << "  <title>" << frame.title << "</title>\n";
  os << "  <rect id=\"background\" x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" fill=\"#ffffff\" stroke=\"#000000\"/>\n";

  std::vector<std::pair<std::string, std::string>> legend; // label, swatch color

  if (!spec.field.is_constant())
  {
    os << "  <g id=\"velocity-underlay\" shape-rendering=\"crispEdges\">\n";
    const double lo = spec.field.lower_bound();
    double hi = lo;
    std::vector<double> speeds;
    speeds.reserve(kUnderlayCells * kUnderlayCells);
    StateVector x = StateVector::Zero(spec.start.size());
    const double cw = (spec.bounds_upper[0] - spec.bounds_lower[0]) / kUnderlayCells;
    const double ch = (spec.bounds_upper[1] - spec.bounds_lower[1]) / kUnderlayCells;
    for (int i = 0; i < kUnderlayCells; ++i)
      for (int j = 0; j < kUnderlayCells; ++j)
      {
        x[0] = spec.bounds_lower[0] + (i + 0.5) * cw;
        x[1] = spec.bounds_lower[1] + (j + 0.5) * ch;
        speeds.push_back(spec.field.value(x));
        hi = std::max(hi, speeds.back());
      }
    for (int i = 0; i < kUnderlayCells; ++i)
      for (int j = 0; j < kUnderlayCells; ++j)
      {
        const double v = speeds[static_cast<std::size_t>(i * kUnderlayCells + j)];
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        const double x0 = spec.bounds_lower[0] + i * cw;
        const double y1 = spec.bounds_lower[1] + (j + 1) * ch;
        os << "    <rect x=\"" << num(m.px(x0)) << "\" y=\"" << num(m.py(y1)) << "\" width=\"" << num(m.len(cw))
           << "\" height=\"" << num(m.len(ch)) << "\" fill=\"" << speed_color(t) << "\"/>\n";
      }
    os << "  </g>\n";
    legend.emplace_back("speed (blue slow, yellow fast)", speed_color(1.0));
  }

  bool anyUndiscovered = false;
  bool anyDiscovered = false;
  for (std::size_t i = 0; i < spec.true_obstacles.size(); ++i)
  {
    const auto& c = spec.true_obstacles[i];
    const bool found = frame.discovered.contains(i);
    (found ? anyDiscovered : anyUndiscovered) = true;
    circle(os, std::string(found ? "obstacle-discovered-" : "obstacle-undiscovered-") + std::to_string(i),
           m.px(c.center[0]), m.py(c.center[1]), m.len(c.radius), found ? "#1f4fd8" : "#8b0000");
  }
  if (anyUndiscovered)
    legend.emplace_back("undiscovered obstacle", "#8b0000");
  if (anyDiscovered)
    legend.emplace_back("discovered obstacle", "#1f4fd8");

  if (frame.traveled.size() >= 2)
  {
    os << "  <polyline id=\"traveled\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2.5\" points=\""
       << polyline_points(m, frame.traveled) << "\"/>\n";
    legend.emplace_back("traveled path", "#000000");
  }
  if (frame.plan.size() >= 2)
  {
    os << "  <polyline id=\"plan\" fill=\"none\" stroke=\"#ff00ff\" stroke-width=\"2\" stroke-dasharray=\"6,4\" "
          "points=\""
       << polyline_points(m, frame.plan) << "\"/>\n";
    legend.emplace_back("current plan", "#ff00ff");
  }

  circle(os, "start", m.px(spec.start[0]), m.py(spec.start[1]), 7, "#00a000");
  circle(os, "goal", m.px(spec.goal.target[0]), m.py(spec.goal.target[1]), 7, "#e00000");
  legend.emplace_back("start", "#00a000");
  legend.emplace_back("goal", "#e00000");

  for (std::size_t k = 0; k < frame.replan_markers.size(); ++k)
    circle(os, "replan-marker-" + std::to_string(k), m.px(frame.replan_markers[k][0]),
           m.py(frame.replan_markers[k][1]), 4, "#00cccc");
  if (!frame.replan_markers.empty())
    legend.emplace_back("replan point", "#00cccc");

  if (frame.vehicle)
  {
    circle(os, "vehicle", m.px((*frame.vehicle)[0]), m.py((*frame.vehicle)[1]), 6, "#00ffff");
    legend.emplace_back("vehicle", "#00ffff");
  }

  os << "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double y = 24.0;
  for (const auto& [label, color] : legend)
  {
    os << "    <g class=\"legend-entry\">\n"
       << "      <rect x=\"" << num(width + 12) << "\" y=\"" << num(y - 10) << "\" width=\"12\" height=\"12\" fill=\""
       << color << "\"/>\n"
       << "      <text x=\"" << num(width + 30) << "\" y=\"" << num(y) << "\">" << label << "</text>\n"
       << "    </g>\n";
    y += 20.0;
  }
  os << "  </g>\n</svg>\n";
  return os.str();
}

std::vector<FrameContent> trace_frames(const ReplanTrace& trace)
{
  std::vector<FrameContent> frames;
  std::set<std::size_t> discovered;
  std::vector<StateVector> markers;

  auto travelUpTo = [&](std::size_t maxPlan) {
    std::vector<StateVector> pts;
    for (const auto& n : trace.traveled_nodes)
      if (n.plan_id <= maxPlan)
        pts.push_back(n.position);
    return pts;
  };
  auto planFrom = [&](std::size_t planId, std::size_t node) {
    std::vector<StateVector> pts;
    const auto& path = trace.plans[planId].path;
    for (auto j = static_cast<Eigen::Index>(std::min<std::size_t>(node, path.cols() - 1)); j >= 0; --j)
      pts.push_back(path.col(j));
    return pts;
  };

  for (std::size_t k = 0; k < trace.events.size(); ++k)
  {
    const auto& e = trace.events[k];
    discovered.insert(e.discovered.begin(), e.discovered.end());
    markers.push_back(e.position);

    FrameContent f;
    f.title = "replan " + std::to_string(k + 1);
    f.discovered = discovered;
    f.traveled = travelUpTo(k);
    if (k + 1 < trace.plans.size())
      f.plan = planFrom(k + 1, static_cast<std::size_t>(trace.plans[k + 1].path.cols() - 1));
    f.vehicle = e.position;
    f.replan_markers = markers;
    frames.push_back(std::move(f));
  }

  FrameContent last;
  last.title = trace.reached_goal ? "goal reached" : "final state";
  last.discovered = discovered;
  last.traveled = trace.traveled;
  last.replan_markers = markers;
  if (!trace.plans.empty())
  {
    const std::size_t id = trace.plans.size() - 1;
    const std::size_t node = trace.traveled_nodes.empty() || trace.traveled_nodes.back().plan_id != id
                               ? static_cast<std::size_t>(trace.plans[id].path.cols() - 1)
                               : trace.traveled_nodes.back().node_index;
    last.plan = planFrom(id, node);
  }
  if (!trace.traveled.empty())
    last.vehicle = trace.traveled.back();
  frames.push_back(std::move(last));
  return frames;
}

} // namespace hjplan
