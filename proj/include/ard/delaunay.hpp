#pragma once

#include <array>
#include <span>
#include <vector>

#include "ard/geometry.hpp"

namespace ard {

/// Delaunay triangulation of a planar point set (Bowyer-Watson insertion).
/// Triangles are counter-clockwise and index into `points`. Duplicate points
/// are not inserted.
std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Point> points);

/// > 0 when r lies strictly inside the circumcircle of the counter-clockwise
/// triangle (p, q, s).
double incircle(const Point& p, const Point& q, const Point& s, const Point& r) noexcept;
/// > 0 when (p, q, r) is counter-clockwise.
double orient(const Point& p, const Point& q, const Point& r) noexcept;

}  // namespace ard
