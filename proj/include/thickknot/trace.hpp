#pragma once

#include <map>
#include <string>
#include <vector>

#include "thickknot/curve.hpp"

namespace thickknot {

struct TraceFrame {
  DiscreteCurve curve;
  GeometricReport report;
  int iteration = 0;
};

/// A finite sequence of curves standing in for an isotopy, e.g. snapshots of
/// a tightening run. Frames share the closed flag and tube radius.
struct IsotopyTrace {
  std::vector<TraceFrame> frames;
  std::map<std::string, std::string> metadata;  // config, seed, stage tags
};

/// Throws InvalidArgument when frames disagree on closed flag or tube radius.
void validate(const IsotopyTrace& trace);

}  // namespace thickknot
