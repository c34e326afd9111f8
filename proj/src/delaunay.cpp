#include "ard/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace ard {

double orient(const Point& p, const Point& q, const Point& r) noexcept {
  const long double ax = static_cast<long double>(q.x) - p.x;
  const long double ay = static_cast<long double>(q.y) - p.y;
  const long double bx = static_cast<long double>(r.x) - p.x;
  const long double by = static_cast<long double>(r.y) - p.y;
  return static_cast<double>(ax * by - ay * bx);
}

double incircle(const Point& p, const Point& q, const Point& s, const Point& r) noexcept {
  const long double adx = static_cast<long double>(p.x) - r.x;
  const long double ady = static_cast<long double>(p.y) - r.y;
  const long double bdx = static_cast<long double>(q.x) - r.x;
  const long double bdy = static_cast<long double>(q.y) - r.y;
  const long double cdx = static_cast<long double>(s.x) - r.x;
  const long double cdy = static_cast<long double>(s.y) - r.y;
  const long double alift = adx * adx + ady * ady;
  const long double blift = bdx * bdx + bdy * bdy;
  const long double clift = cdx * cdx + cdy * cdy;
  return static_cast<double>(alift * (bdx * cdy - cdx * bdy) +
                             blift * (cdx * ady - adx * cdy) +
                             clift * (adx * bdy - bdx * ady));
}

namespace {

// Hilbert index of (x, y) on a 2^16 x 2^16 grid.
std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << 15; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = (1u << 16) - 1 - x;
        y = (1u << 16) - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> nbr{-1, -1, -1};  // nbr[i] is across the edge opposite v[i]
  bool alive = true;
};

class Triangulator {
 public:
  explicit Triangulator(std::span<const Point> input) : n_(static_cast<int>(input.size())) {
    pts_.assign(input.begin(), input.end());
    double xmin = std::numeric_limits<double>::max(), ymin = xmin;
    double xmax = std::numeric_limits<double>::lowest(), ymax = xmax;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double big = 1e3 * span;
    pts_.push_back({cx - big, cy - big});
    pts_.push_back({cx + big, cy - big});
    pts_.push_back({cx, cy + big});
    tris_.push_back(Tri{{n_, n_ + 1, n_ + 2}, {-1, -1, -1}, true});
    scale_ = span;

    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<std::uint64_t> key(n_);
    for (int i = 0; i < n_; ++i) {
      const auto gx = static_cast<std::uint32_t>((pts_[i].x - xmin) / span * 65535.0);
      const auto gy = static_cast<std::uint32_t>((pts_[i].y - ymin) / span * 65535.0);
      key[i] = hilbert_index(gx, gy);
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int i, int j) { return key[i] < key[j]; });
  }

  std::vector<std::array<int, 3>> run() {
    for (int idx : order_) insert(idx);
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_ || t.v[1] >= n_ || t.v[2] >= n_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  bool edge_sees(const Tri& t, int i, const Point& p) const {
    // p strictly on the outer side of the edge opposite v[i].
    return orient(pts_[t.v[(i + 1) % 3]], pts_[t.v[(i + 2) % 3]], p) < 0.0;
  }

  int locate(const Point& p) const {
    int t = last_;
    const std::size_t cap = 4 * tris_.size() + 16;
    int rotate = 0;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + rotate) % 3;
        if (edge_sees(tri, i, p)) {
          next = tri.nbr[i];
          break;
        }
      }
      rotate = (rotate + 1) % 3;
      if (next < 0) return t;
      t = next;
    }
    // Degenerate walk; fall back to a scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      const Tri& tri = tris_[i];
      if (!tri.alive) continue;
      if (!edge_sees(tri, 0, p) && !edge_sees(tri, 1, p) && !edge_sees(tri, 2, p)) return i;
    }
    return last_;
  }

  void insert(int pi) {
    const Point& p = pts_[pi];
    const int t0 = locate(p);
    for (int v : tris_[t0].v) {
      if (std::hypot(pts_[v].x - p.x, pts_[v].y - p.y) <= 1e-14 * scale_) return;
    }

    // Grow the cavity from the containing triangle.
    cavity_.clear();
    stack_.clear();
    ++stamp_;
    mark(t0);
    stack_.push_back(t0);
    // A point on an edge of t0 must also take the triangle across that edge.
    int pinned = -1;
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t0].nbr[i];
      if (nb >= 0 && !edge_sees(tris_[t0], i, p) &&
          orient(pts_[tris_[t0].v[(i + 1) % 3]], pts_[tris_[t0].v[(i + 2) % 3]], p) == 0.0) {
        mark(nb);
        stack_.push_back(nb);
        pinned = nb;
      }
    }
    while (!stack_.empty()) {
      const int t = stack_.back();
      stack_.pop_back();
      cavity_.push_back(t);
      for (int nb : tris_[t].nbr) {
        if (nb < 0 || marked(nb)) continue;
        const Tri& tn = tris_[nb];
        if (incircle(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], p) > 0.0) {
          mark(nb);
          stack_.push_back(nb);
        }
      }
    }

    // Inexact predicates can produce a cavity that is not star-shaped from p.
    // Drop offending triangles until every boundary edge faces p.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t c = 0; c < cavity_.size() && !changed; ++c) {
        const int t = cavity_[c];
        if (t == t0 || t == pinned) continue;
        const Tri& tri = tris_[t];
        for (int i = 0; i < 3; ++i) {
          const int nb = tri.nbr[i];
          if (nb >= 0 && marked(nb)) continue;
          if (orient(pts_[tri.v[(i + 1) % 3]], pts_[tri.v[(i + 2) % 3]], p) <= 0.0) {
            unmark(t);
            changed = true;
            break;
          }
        }
      }
      if (changed) reconnect(t0, pinned);
    }

    boundary_.clear();
    for (int t : cavity_) {
      const Tri& tri = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.nbr[i];
        if (nb >= 0 && marked(nb)) continue;
        boundary_.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb});
      }
    }
    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }

    created_.clear();
    for (const auto& e : boundary_) {
      int slot;
      if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
      } else {
        slot = static_cast<int>(tris_.size());
        tris_.emplace_back();
      }
      Tri& nt = tris_[slot];
      nt.v = {e.a, e.b, pi};
      nt.nbr = {-1, -1, e.outside};
      nt.alive = true;
      if (e.outside >= 0) {
        Tri& out = tris_[e.outside];
        for (int i = 0; i < 3; ++i) {
          if (out.v[(i + 1) % 3] == e.b && out.v[(i + 2) % 3] == e.a) out.nbr[i] = slot;
        }
      }
      created_.push_back(slot);
    }
    // Link the fan: (a, b, p) meets (b, c, p) across (b, p) and (z, a, p) across (p, a).
    starts_.clear();
    for (int t : created_) starts_.push_back({tris_[t].v[0], t});
    std::sort(starts_.begin(), starts_.end());
    auto find_start = [&](int v) {
      auto it = std::lower_bound(starts_.begin(), starts_.end(), std::pair<int, int>{v, -1});
      return (it != starts_.end() && it->first == v) ? it->second : -1;
    };
    for (int t : created_) {
      const int nb = find_start(tris_[t].v[1]);
      tris_[t].nbr[0] = nb;
      if (nb >= 0) tris_[nb].nbr[1] = t;
    }
    last_ = created_.empty() ? last_ : created_.front();
  }

  void reconnect(int t0, int pinned) {
    // Keep only the marked triangles still connected to t0.
    std::vector<int> kept;
    std::vector<int> keep_stack{t0};
    const auto old_stamp = stamp_;
    std::vector<int> candidates;
    for (int t : cavity_) {
      if (stamps_[t] == old_stamp) candidates.push_back(t);
    }
    ++stamp_;
    mark(t0);
    if (pinned >= 0) {
      mark(pinned);
      keep_stack.push_back(pinned);
    }
    while (!keep_stack.empty()) {
      const int t = keep_stack.back();
      keep_stack.pop_back();
      kept.push_back(t);
      for (int nb : tris_[t].nbr) {
        if (nb < 0 || marked(nb)) continue;
        if (std::find(candidates.begin(), candidates.end(), nb) == candidates.end()) continue;
        mark(nb);
        keep_stack.push_back(nb);
      }
    }
    cavity_ = std::move(kept);
  }

  void mark(int t) {
    if (stamps_.size() < tris_.size()) stamps_.resize(tris_.size() * 2, 0);
    stamps_[t] = stamp_;
  }
  void unmark(int t) { stamps_[t] = 0; }
  bool marked(int t) const {
    return t < static_cast<int>(stamps_.size()) && stamps_[t] == stamp_;
  }

  int n_;
  double scale_ = 1.0;
  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<int> order_;
  std::vector<int> free_;
  std::vector<int> cavity_;
  std::vector<int> stack_;
  std::vector<int> created_;
  std::vector<std::pair<int, int>> starts_;
  std::vector<std::uint64_t> stamps_;
  std::uint64_t stamp_ = 0;
  int last_ = 0;

  struct BoundaryEdge {
    int a, b, outside;
  };
  std::vector<BoundaryEdge> boundary_;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Point> points) {
  if (points.size() < 3) return {};
  Triangulator tri(points);
  return tri.run();
}

}  // namespace ard
