#pragma once

#include <algorithm>
#include <cmath>

namespace forager {

// Synthetic image plane shared by the simulator, the detector and every
// feature consumer. Coordinates are (cx, cy) in [0,1]^2 with cy = 0 at the
// top (far) and cy = 1 at the bottom (near).
//
//   cy  = 1 - distance / range          (range = max visible distance)
//   cx  = 0.5 + bearing / pi            (bearing = atan2(lateral, forward))
//   w,h = base_box_size(range) / distance
struct PlaneBox {
    double cx = 0.5;
    double cy = 0.5;
    double w = 0.0;
    double h = 0.0;
};

inline double base_box_size(double range) { return 1.0 / range; }

inline double plane_cy(double distance, double range) { return 1.0 - distance / range; }

// Inverse of plane_cy; clamped to at least one cell.
inline double plane_distance(double cy, double range) {
    return std::max(1.0, (1.0 - cy) * range);
}

inline double plane_cx(double lateral, double forward) {
    return 0.5 + std::atan2(lateral, forward) / M_PI;
}

// Bearing in radians recovered from cx; positive = to the right.
inline double plane_bearing(double cx) { return (cx - 0.5) * M_PI; }

// Shifts the box center just enough to keep it inside the unit square.
inline PlaneBox clamp_box(PlaneBox b) {
    b.w = std::min(b.w, 1.0);
    b.h = std::min(b.h, 1.0);
    b.cx = std::clamp(b.cx, b.w / 2.0, 1.0 - b.w / 2.0);
    b.cy = std::clamp(b.cy, b.h / 2.0, 1.0 - b.h / 2.0);
    return b;
}

inline PlaneBox project_to_plane(double forward, double lateral, double distance, double range) {
    PlaneBox b;
    b.cx = plane_cx(lateral, forward);
    b.cy = plane_cy(distance, range);
    b.w = b.h = base_box_size(range) / std::max(1.0, distance);
    return clamp_box(b);
}

} // namespace forager
