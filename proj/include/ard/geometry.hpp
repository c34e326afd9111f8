#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ard {

/// Planar annulus a < r < b centred at the origin.
class AnnulusGeometry {
 public:
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double rho() const noexcept { return rho_; }
  double area() const noexcept;

  /// Signed distance: negative inside, zero on either circle.
  double signed_distance(double x, double y) const noexcept;

  friend AnnulusGeometry make_annulus(double a, double b);

 private:
  AnnulusGeometry(double a, double b) : a_(a), b_(b), rho_(b - a) {}
  double a_;
  double b_;
  double rho_;
};

/// Throws ErrorCode::Domain unless 0 < a < b.
AnnulusGeometry make_annulus(double a, double b);

/// Chebyshev (radial) x Fourier (angular) tensor grid on the annulus.
struct PolarSpectralGrid {
  std::vector<double> radial_nodes;   // ascending, radial_nodes.front() == a, back() == b
  std::vector<double> angular_nodes;  // theta_j = 2*pi*j/M, j = 0..M-1
  int N = 0;                          // Chebyshev degree; N + 1 radial nodes
  int M = 0;                          // angular count, even

  double angular_step() const noexcept;
};

/// Radial nodes are Chebyshev-Gauss-Lobatto points cos(pi*j/N), j = 0..N,
/// mapped affinely onto [a, b]. Requires N >= 4, M >= 4 and M even.
PolarSpectralGrid build_polar_grid(const AnnulusGeometry& geom, int N, int M);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryFlag : std::uint8_t { Interior = 0, Inner = 1, Outer = 2 };

struct MeshQuality {
  double min_quality = 0.0;   // min over triangles of 2 * inradius / circumradius
  double mean_quality = 0.0;
  double total_area = 0.0;
  double max_displacement = 0.0;  // last relaxation step, in units of h
  int iterations = 0;
};

struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryFlag> boundary_flags;
  double h = 0.0;
  double a = 0.0;
  double b = 0.0;
  MeshQuality quality;

  std::size_t vertex_count() const noexcept { return vertices.size(); }
  std::size_t triangle_count() const noexcept { return triangles.size(); }
  /// Unique undirected edges.
  std::size_t edge_count() const;
};

double triangle_area(const Point& p, const Point& q, const Point& r) noexcept;
/// 2 * inradius / circumradius; 1 for an equilateral triangle.
double triangle_quality(const Point& p, const Point& q, const Point& r) noexcept;

struct MeshOptions {
  double time_step = 0.2;              // pseudo-time step of the force iteration
  double length_scale = 1.2;           // internal pressure factor on edge lengths
  double displacement_tol = 1e-3;      // stop when max interior move < tol * h
  int max_iterations = 5000;
};

/// Force-equilibrium triangulation of the annulus with uniform target edge
/// length h. Deterministic: the initial points are a hexagonal lattice.
/// Throws ErrorCode::NonConvergence with quality statistics when the
/// iteration cap is reached.
TriMesh triangulate_annulus(const AnnulusGeometry& geom, double h,
                            const MeshOptions& options = {});

/// Edge length that reproduces the reference 6340-triangle discretisation of
/// the a = 1/2, b = 1 annulus.
inline constexpr double kReferenceMeshEdge = 0.0286;
/// Desk-scale edge length (about 1600 triangles on the same annulus).
inline constexpr double kDeskMeshEdge = 0.057;

/// Node file: `x y flag` per line; element file: `i j k` per line (0-based).
/// Both start with `#` comment lines carrying a, b and h.
void write_mesh(const TriMesh& mesh, std::ostream& nodes, std::ostream& elements);
void write_mesh_files(const TriMesh& mesh, const std::string& node_path,
                      const std::string& element_path);

}  // namespace ard
