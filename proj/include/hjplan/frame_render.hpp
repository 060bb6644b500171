#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hjplan/replanner.hpp"

namespace hjplan {

/// Everything drawn in one frame.
struct FrameContent
{
  std::string title;
  std::set<std::size_t> discovered;
  std::vector<StateVector> traveled;
  std::vector<StateVector> plan;
  std::optional<StateVector> vehicle;
  std::vector<StateVector> replan_markers;
};

/// SVG 1.1 document. Colors: start green, goal red, undiscovered obstacles
/// dark red, discovered blue, traveled path black, current plan dashed
/// magenta, vehicle and replan markers cyan. Non-constant speed fields get
/// a 32x32 cell underlay, blue slow to yellow fast.
std::string render_frame_svg(const ScenarioSpec& spec, const FrameContent& frame);

/// Frame k < events.size() shows the halt of event k and its new plan; the
/// last frame shows the end of the run.
std::vector<FrameContent> trace_frames(const ReplanTrace& trace);

} // namespace hjplan
