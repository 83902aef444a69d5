#pragma once

#include <string>
#include <vector>

namespace looptrack {

// One raw position report: decimal degrees, seconds since the Unix epoch (UTC).
struct TrackPoint {
  double lon = 0.0;
  double lat = 0.0;
  double t = 0.0;

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

// All reports sharing a selector (vehicle id, MMSI, ...), sorted by time.
struct Track {
  std::string selector;
  std::vector<TrackPoint> points;
};

// Local planar coordinates: x east and y north in km, t in hours since the
// first point.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

struct ProjectionOrigin {
  double lon = 0.0;
  double lat = 0.0;
  double t = 0.0;  // epoch seconds of the first point
};

struct ProjectedTrack {
  std::string selector;
  std::vector<PlanarPoint> points;
  ProjectionOrigin origin;
};

}  // namespace looptrack
