#include "ard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>

#include "ard/delaunay.hpp"
#include "ard/error.hpp"

namespace ard {

double AnnulusGeometry::area() const noexcept {
  return std::numbers::pi * (b_ * b_ - a_ * a_);
}

double AnnulusGeometry::signed_distance(double x, double y) const noexcept {
  const double r = std::hypot(x, y);
  return std::max(r - b_, a_ - r);
}

AnnulusGeometry make_annulus(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a > 0.0) || !(b > a)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "annulus needs 0 < a < b, got a=%.6g b=%.6g", a, b);
    fail(ErrorCode::Domain, buf);
  }
  return AnnulusGeometry(a, b);
}

double PolarSpectralGrid::angular_step() const noexcept {
  return 2.0 * std::numbers::pi / M;
}

PolarSpectralGrid build_polar_grid(const AnnulusGeometry& geom, int N, int M) {
  if (N < 4) fail(ErrorCode::Domain, "radial degree N must be at least 4, got " + std::to_string(N));
  if (M < 4) fail(ErrorCode::Domain, "angular count M must be at least 4, got " + std::to_string(M));
  if (M % 2 != 0) fail(ErrorCode::Domain, "angular count M must be even, got " + std::to_string(M));
  PolarSpectralGrid g;
  g.N = N;
  g.M = M;
  const double a = geom.a(), b = geom.b();
  g.radial_nodes.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    // cos(pi*(N-j)/N) ascends from -1 to 1; use the sine form for symmetry.
    const double x = -std::sin(std::numbers::pi * (N - 2.0 * j) / (2.0 * N));
    g.radial_nodes[j] = 0.5 * (a + b) + 0.5 * (b - a) * x;
  }
  g.radial_nodes.front() = a;
  g.radial_nodes.back() = b;
  g.angular_nodes.resize(M);
  for (int j = 0; j < M; ++j) g.angular_nodes[j] = 2.0 * std::numbers::pi * j / M;
  return g;
}

double triangle_area(const Point& p, const Point& q, const Point& r) noexcept {
  return 0.5 * ((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x));
}

double triangle_quality(const Point& p, const Point& q, const Point& r) noexcept {
  const double la = std::hypot(q.x - r.x, q.y - r.y);
  const double lb = std::hypot(p.x - r.x, p.y - r.y);
  const double lc = std::hypot(p.x - q.x, p.y - q.y);
  const double prod = (lb + lc - la) * (lc + la - lb) * (la + lb - lc);
  const double denom = la * lb * lc;
  if (!(denom > 0.0)) return 0.0;
  return std::max(0.0, prod / denom);
}

std::size_t TriMesh::edge_count() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(triangles.size() * 3);
  for (const auto& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      auto u = static_cast<std::uint64_t>(t[i]);
      auto v = static_cast<std::uint64_t>(t[(i + 1) % 3]);
      if (u > v) std::swap(u, v);
      keys.push_back((u << 32) | v);
    }
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

namespace {

std::vector<std::array<int, 3>> interior_triangles(const AnnulusGeometry& geom,
                                                   const std::vector<Point>& p, double geps) {
  auto tris = delaunay_triangulate(p);
  std::erase_if(tris, [&](const std::array<int, 3>& t) {
    const double cx = (p[t[0]].x + p[t[1]].x + p[t[2]].x) / 3.0;
    const double cy = (p[t[0]].y + p[t[1]].y + p[t[2]].y) / 3.0;
    return geom.signed_distance(cx, cy) > -geps;
  });
  return tris;
}

std::vector<std::pair<int, int>> unique_bars(const std::vector<std::array<int, 3>>& tris) {
  std::vector<std::pair<int, int>> bars;
  bars.reserve(tris.size() * 3);
  for (const auto& t : tris) {
    for (int i = 0; i < 3; ++i) {
      int u = t[i], v = t[(i + 1) % 3];
      if (u > v) std::swap(u, v);
      bars.emplace_back(u, v);
    }
  }
  std::sort(bars.begin(), bars.end());
  bars.erase(std::unique(bars.begin(), bars.end()), bars.end());
  return bars;
}

MeshQuality measure(const std::vector<Point>& p, const std::vector<std::array<int, 3>>& tris) {
  MeshQuality q;
  q.min_quality = tris.empty() ? 0.0 : 1.0;
  double sum = 0.0;
  for (const auto& t : tris) {
    const double qual = triangle_quality(p[t[0]], p[t[1]], p[t[2]]);
    q.min_quality = std::min(q.min_quality, qual);
    sum += qual;
    q.total_area += std::abs(triangle_area(p[t[0]], p[t[1]], p[t[2]]));
  }
  q.mean_quality = tris.empty() ? 0.0 : sum / static_cast<double>(tris.size());
  return q;
}

}  // namespace

TriMesh triangulate_annulus(const AnnulusGeometry& geom, double h, const MeshOptions& options) {
  if (!(h > 0.0) || !(h < geom.rho())) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "mesh edge length needs 0 < h < %.6g, got %.6g", geom.rho(), h);
    fail(ErrorCode::Domain, buf);
  }
  const double a = geom.a(), b = geom.b();
  const double geps = 1e-3 * h;

  // Hexagonal lattice over the bounding box, rows offset by h/2.
  std::vector<Point> p;
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int rows = static_cast<int>(std::floor(2.0 * b / dy)) + 1;
  const int cols = static_cast<int>(std::floor(2.0 * b / h)) + 1;
  for (int i = 0; i < rows; ++i) {
    const double y = -b + i * dy;
    const double shift = (i % 2 == 1) ? 0.5 * h : 0.0;
    for (int j = 0; j < cols; ++j) {
      const double x = -b + j * h + shift;
      if (geom.signed_distance(x, y) < geps) p.push_back({x, y});
    }
  }

  const std::size_t n = p.size();
  std::vector<double> fx(n), fy(n);
  std::vector<std::array<int, 3>> tris;
  MeshQuality last;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    tris = interior_triangles(geom, p, geps);
    const auto bars = unique_bars(tris);

    double sum_sq = 0.0;
    for (const auto& [u, v] : bars) {
      const double ex = p[u].x - p[v].x, ey = p[u].y - p[v].y;
      sum_sq += ex * ex + ey * ey;
    }
    const double target =
        options.length_scale * std::sqrt(sum_sq / static_cast<double>(std::max<std::size_t>(1, bars.size())));

    std::fill(fx.begin(), fx.end(), 0.0);
    std::fill(fy.begin(), fy.end(), 0.0);
    for (const auto& [u, v] : bars) {
      const double ex = p[u].x - p[v].x, ey = p[u].y - p[v].y;
      const double len = std::hypot(ex, ey);
      const double force = std::max(target - len, 0.0);
      if (len == 0.0 || force == 0.0) continue;
      const double sx = force / len * ex, sy = force / len * ey;
      fx[u] += sx;
      fy[u] += sy;
      fx[v] -= sx;
      fy[v] -= sy;
    }

    double max_move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i].x += options.time_step * fx[i];
      p[i].y += options.time_step * fy[i];
      const double r = std::hypot(p[i].x, p[i].y);
      const double d = std::max(r - b, a - r);
      if (d > 0.0 && r > 0.0) {
        // Gradient of d is +x/r outside b and -x/r inside a.
        const double target_r = (r > b) ? b : a;
        p[i].x *= target_r / r;
        p[i].y *= target_r / r;
      } else if (d < -geps) {
        max_move = std::max(max_move, options.time_step * std::hypot(fx[i], fy[i]));
      }
    }
    last.max_displacement = max_move / h;
    if (last.max_displacement < options.displacement_tol) {
      ++iter;
      break;
    }
  }

  tris = interior_triangles(geom, p, geps);
  MeshQuality q = measure(p, tris);
  q.max_displacement = last.max_displacement;
  q.iterations = iter;
  if (q.max_displacement >= options.displacement_tol) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "mesh relaxation did not settle after %d iterations: max displacement %.6g h, "
                  "min quality %.6g, mean quality %.6g",
                  iter, q.max_displacement, q.min_quality, q.mean_quality);
    fail(ErrorCode::NonConvergence, buf);
  }

  // Drop lattice points that ended up in no triangle and renumber.
  std::vector<int> remap(n, -1);
  for (const auto& t : tris) {
    for (int v : t) remap[v] = 0;
  }
  TriMesh mesh;
  mesh.h = h;
  mesh.a = a;
  mesh.b = b;
  for (std::size_t i = 0; i < n; ++i) {
    if (remap[i] < 0) continue;
    remap[i] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(p[i]);
    const double r = std::hypot(p[i].x, p[i].y);
    BoundaryFlag flag = BoundaryFlag::Interior;
    if (r - a < geps) flag = BoundaryFlag::Inner;
    else if (b - r < geps) flag = BoundaryFlag::Outer;
    mesh.boundary_flags.push_back(flag);
  }
  mesh.triangles.reserve(tris.size());
  for (const auto& t : tris) {
    std::array<int, 3> m{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (triangle_area(mesh.vertices[m[0]], mesh.vertices[m[1]], mesh.vertices[m[2]]) < 0.0)
      std::swap(m[1], m[2]);
    mesh.triangles.push_back(m);
  }
  mesh.quality = q;
  return mesh;
}

void write_mesh(const TriMesh& mesh, std::ostream& nodes, std::ostream& elements) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# annulus a=%.17g b=%.17g h=%.17g vertices=%zu\n", mesh.a,
                mesh.b, mesh.h, mesh.vertex_count());
  nodes << buf << "# x y flag (0 interior, 1 inner circle, 2 outer circle)\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", mesh.vertices[i].x, mesh.vertices[i].y,
                  static_cast<int>(mesh.boundary_flags[i]));
    nodes << buf;
  }
  std::snprintf(buf, sizeof buf, "# annulus a=%.17g b=%.17g h=%.17g triangles=%zu\n", mesh.a,
                mesh.b, mesh.h, mesh.triangle_count());
  elements << buf << "# i j k (0-based, counter-clockwise)\n";
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
    elements << buf;
  }
}

void write_mesh_files(const TriMesh& mesh, const std::string& node_path,
                      const std::string& element_path) {
  std::ofstream nodes(node_path), elements(element_path);
  if (!nodes) fail(ErrorCode::Io, "cannot open " + node_path);
  if (!elements) fail(ErrorCode::Io, "cannot open " + element_path);
  write_mesh(mesh, nodes, elements);
  if (!nodes || !elements) fail(ErrorCode::Io, "write failed for mesh files");
}

}  // namespace ard
