#pragma once

#include <algorithm>
#include <cmath>

namespace epv {

// Pitch geometry. All coordinates in the engine live on this one frame:
// 105x68 meters, attacking goal on the x = 105 line, 7.32 m goal mouth
// centered at y = 34.
inline constexpr double kPitchLength = 105.0;
inline constexpr double kPitchWidth = 68.0;
inline constexpr double kGoalY = kPitchWidth / 2.0;
inline constexpr double kGoalHalfWidth = 7.32 / 2.0;
inline constexpr double kGoalPostLowY = kGoalY - kGoalHalfWidth;   // 30.34
inline constexpr double kGoalPostHighY = kGoalY + kGoalHalfWidth;  // 37.66

inline double distance_to_goal(double x, double y) {
    const double dx = kPitchLength - x;
    const double dy = kGoalY - y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Angle subtended by the goal mouth, in [0, pi]. A point on the goal line
/// between the posts sees the full pi.
inline double goal_angle(double x, double y) {
    const double ax = kPitchLength - x;
    const double ay1 = kGoalPostLowY - y;
    const double ay2 = kGoalPostHighY - y;
    // angle between (ax, ay1) and (ax, ay2)
    const double dot = ax * ax + ay1 * ay2;
    const double cross = ax * ay2 - ax * ay1;
    const double angle = std::atan2(std::abs(cross), dot);
    return std::clamp(angle, 0.0, 3.14159265358979323846);
}

inline double planar_distance(double x0, double y0, double x1, double y1) {
    return std::hypot(x1 - x0, y1 - y0);
}

}  // namespace epv
