#include "ard/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ard/error.hpp"
#include "ard/parallel.hpp"

namespace ard {

namespace {

using quad = __float128;

quad qabs(quad x) { return x < 0 ? -x : x; }

// Neumaier compensated accumulator.
struct CompensatedSum {
  quad sum = 0;
  quad comp = 0;
  void add(quad x) {
    const quad t = sum + x;
    if (qabs(sum) >= qabs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  quad value() const { return sum + comp; }
};

// Mode factor 4(2k+1)(l+2k+1)(l+4k)/(l+4k+2) shared by every eigenvalue form.
double mode_factor(ModeIndex m) {
  const double k = m.k, l = m.l;
  return 4.0 * (2.0 * k + 1.0) * (l + 2.0 * k + 1.0) * (l + 4.0 * k) / (l + 4.0 * k + 2.0);
}

// a^(l-1)/(a^(l+1)+b^(l+1)) and b^(l-1)/(a^(l+1)+b^(l+1)) via q = b/a.
EigenComponents weight_components(double a, double b, double l) {
  const double q = b / a;
  const double qp = std::pow(q, l + 1.0);
  EigenComponents c;
  c.inner = 1.0 / (a * a * (1.0 + qp));
  c.outer = 1.0 / (b * b * (1.0 + 1.0 / qp));
  return c;
}

void check_finite_nonnegative(double value, ModeIndex m, const char* what) {
  if (!std::isfinite(value)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s is not finite for k=%d l=%.6g", what, m.k, m.l);
    fail(ErrorCode::Domain, buf);
  }
  if (value < 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s = %.6g is negative for k=%d l=%.6g (l < -4k)", what,
                  value, m.k, m.l);
    fail(ErrorCode::Domain, buf);
  }
}

}  // namespace

ModeIndex make_mode(int k, double l) {
  if (k < 0) fail(ErrorCode::Domain, "mode index k must be non-negative, got " + std::to_string(k));
  if (!std::isfinite(l)) fail(ErrorCode::Domain, "Bessel order l must be finite");
  if (std::abs(l - std::round(2.0 * l) / 2.0) < 1e-9) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "Bessel order l=%.12g is a multiple of 1/2", l);
    fail(ErrorCode::Domain, buf);
  }
  return ModeIndex{k, l};
}

EigenComponents eigenvalue_components(ModeIndex mode, const AnnulusGeometry& geom) {
  mode = make_mode(mode.k, mode.l);
  const double a = geom.a(), b = geom.b(), l = mode.l;
  const double p = mode_factor(mode);
  const double common = std::pow(a, l + 1.0) + std::pow(b, l + 1.0);
  EigenComponents c;
  c.inner = p / (std::pow(a, 1.0 - l) * common);
  c.outer = p / (std::pow(b, 1.0 - l) * common);
  if (!std::isfinite(c.inner) || !std::isfinite(c.outer) || common == 0.0) {
    const auto w = weight_components(a, b, l);
    c.inner = p * w.inner;
    c.outer = p * w.outer;
  }
  check_finite_nonnegative(c.inner, mode, "inner eigenvalue component");
  check_finite_nonnegative(c.outer, mode, "outer eigenvalue component");
  return c;
}

Eigenpair eigenvalue(ModeIndex mode, const AnnulusGeometry& geom) {
  mode = make_mode(mode.k, mode.l);
  const double a = geom.a(), b = geom.b(), l = mode.l, k = mode.k;
  const double num = 4.0 * (std::pow(a, l) * b + a * std::pow(b, l)) * (2.0 * k + 1.0) *
                     (l + 2.0 * k + 1.0) * (l + 4.0 * k);
  const double den = a * b * (std::pow(a, l + 1.0) + std::pow(b, l + 1.0)) * (l + 4.0 * k + 2.0);
  double eta_sq = num / den;
  if (!std::isfinite(eta_sq) || !std::isfinite(num) || den == 0.0) {
    const auto w = weight_components(a, b, l);
    eta_sq = mode_factor(mode) * (w.inner + w.outer);
  }
  check_finite_nonnegative(eta_sq, mode, "eigenvalue");
  const auto c = eigenvalue_components(mode, geom);
  return Eigenpair{mode, eta_sq, std::sqrt(eta_sq), c.inner, c.outer};
}

double weighting(double a, double rho, double l) {
  if (!(a > 0.0) || !(rho > 0.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "weighting needs a > 0 and rho > 0, got a=%.6g rho=%.6g", a,
                  rho);
    fail(ErrorCode::Domain, buf);
  }
  const double b = a + rho;
  if (l == 0.0) return 1.0 / (a * b);
  const double q = b / a;
  // Factor out the dominant radius so neither power overflows.
  if (l > -1.0) {
    return (1.0 + std::pow(q, 1.0 - l)) / (b * b * (1.0 + std::pow(q, -1.0 - l)));
  }
  return (1.0 + std::pow(q, l - 1.0)) / (a * a * (1.0 + std::pow(q, l + 1.0)));
}

SupremumReport weighting_supremum(double a, double rho, SupremumBranch branch) {
  SupremumReport r;
  if (branch == SupremumBranch::NegativeL) {
    r.printed = 2.0 / (a * (rho + a));
    r.numeric = weighting(a, rho, -1e3);
  } else {
    r.printed = 1.0 / (a * (rho + a));
    r.numeric = weighting(a, rho, 1e-6);
  }
  r.discrepancy = std::abs(r.printed - r.numeric);
  return r;
}

double eigenvalue_via_weighting(ModeIndex mode, double a, double rho) {
  mode = make_mode(mode.k, mode.l);
  const double eta_sq = weighting(a, rho, mode.l) * mode_factor(mode);
  check_finite_nonnegative(eta_sq, mode, "eigenvalue");
  return eta_sq;
}

double pairwise_cancellation_residual(ModeIndex mode, const AnnulusGeometry& geom) {
  const auto pair = eigenvalue(mode, geom);
  const double l = mode.l, a = geom.a(), b = geom.b();
  const double j = mode.k / 2;
  // F_{j+1}/F_j with the bracket ratio [(ea)^(m+2)+(eb)^(m+2)]/[(ea)^m+(eb)^m], m = l+2j-1.
  const double m = l + 2.0 * j - 1.0;
  const double q = b / a;
  double bracket;
  if (m >= -1.0) {
    bracket = b * b * (1.0 + std::pow(q, -m - 2.0)) / (1.0 + std::pow(q, -m));
  } else {
    bracket = a * a * (1.0 + std::pow(q, m + 2.0)) / (1.0 + std::pow(q, m));
  }
  bracket *= pair.eta_sq;
  const double ratio = -(l + 2.0 * j + 2.0) * bracket /
                       (4.0 * (j + 1.0) * (l + j + 1.0) * (l + 2.0 * j));
  return std::abs(1.0 + ratio) / (1.0 + std::abs(ratio));
}

EigenfunctionSeries::EigenfunctionSeries(ModeIndex mode, double c0, SeriesOptions options)
    : mode_(make_mode(mode.k, mode.l)), c0_(c0), options_(options) {
  if (options_.max_terms < 1)
    fail(ErrorCode::Domain, "series truncation must keep at least one term");
  if (!std::isfinite(c0)) fail(ErrorCode::Domain, "series constant must be finite");
  const double l = mode_.l;
  u_.resize(options_.max_terms);
  v_.resize(options_.max_terms);
  u_[0] = v_[0] = c0;
  for (int j = 0; j + 1 < options_.max_terms; ++j) {
    u_[j + 1] = -u_[j] / (4.0 * (j + 1) * (l + j + 1));
    v_[j + 1] = -v_[j] / (4.0 * (j + 1) * (-l + j + 1));
  }
}

EigenfunctionSeries::Radial EigenfunctionSeries::radial(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "series argument must be positive, got %.6g", x);
    fail(ErrorCode::Domain, buf);
  }
  const quad x2 = static_cast<quad>(x) * static_cast<quad>(x);
  Radial out;
  double tail_total = 0.0;
  for (const double order : {mode_.l, -mode_.l}) {
    CompensatedSum acc;
    quad term = static_cast<quad>(c0_) * static_cast<quad>(std::pow(x, order));
    int used = 0;
    quad next_ratio = 0;
    for (int j = 0; j < options_.max_terms; ++j) {
      if (qabs(term) > static_cast<quad>(1e300)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "series term %d exceeds 1e300 at x=%.6g (k=%d l=%.6g)", j, x, mode_.k,
                      mode_.l);
        fail(ErrorCode::TruncationRange, buf);
      }
      acc.add(term);
      used = j + 1;
      next_ratio = -x2 / (4 * static_cast<quad>(j + 1) * (static_cast<quad>(order) + j + 1));
      const quad next = term * next_ratio;
      term = next;
      if (j > 0 && qabs(next_ratio) < 1 &&
          qabs(next) < static_cast<quad>(options_.relative_tol) * qabs(acc.value()))
        break;
    }
    // term now holds the first omitted term; bound the rest geometrically once
    // the ratio is below one.
    const quad r = qabs(next_ratio);
    const double first = static_cast<double>(qabs(term));
    tail_total += (r < 1) ? first / (1.0 - static_cast<double>(r)) : first;
    out.value += static_cast<double>(acc.value());
    out.terms = std::max(out.terms, used);
  }
  out.tail = tail_total;
  return out;
}

EigenfunctionValue eigenfunction_value(const EigenfunctionSeries& series,
                                       const AnnulusGeometry& geom, double eta, double r,
                                       double theta) {
  if (!(r >= geom.a() && r <= geom.b())) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "radius %.6g lies outside [%.6g, %.6g]", r, geom.a(),
                  geom.b());
    fail(ErrorCode::Domain, buf);
  }
  if (!(eta > 0.0)) fail(ErrorCode::Domain, "eta must be positive");
  const auto rad = series.radial(eta * r);
  const double phase = series.mode().l * theta;
  EigenfunctionValue out;
  out.w = rad.value * std::complex<double>(std::cos(phase), std::sin(phase));
  out.tail = rad.tail;
  out.terms = rad.terms;
  return out;
}

std::vector<double> chebyshev_diff_matrix(const std::vector<double>& nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n), d(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j + 1 == n) w[j] *= 0.5;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
      d[i * n + j] = v;
      row += v;
    }
    d[i * n + i] = -row;
  }
  return d;
}

double collocation_residual(const EigenfunctionSeries& series, double eta,
                            const PolarSpectralGrid& grid) {
  if (grid.N < 8) fail(ErrorCode::Domain, "collocation grid needs N >= 8, got " + std::to_string(grid.N));
  if (!(eta > 0.0)) fail(ErrorCode::Domain, "eta must be positive");
  const auto& r = grid.radial_nodes;
  const std::size_t n = r.size();
  std::vector<double> R(n), d1(n, 0.0), d2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) R[i] = series.radial(eta * r[i]).value;
  const auto D = chebyshev_diff_matrix(r);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d1[i] += D[i * n + j] * R[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d2[i] += D[i * n + j] * d1[j];

  const double l = series.mode().l, eta_sq = eta * eta;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lap = d2[i] + d1[i] / r[i] - l * l * R[i] / (r[i] * r[i]);
    for (double theta : grid.angular_nodes) {
      const std::complex<double> phase(std::cos(l * theta), std::sin(l * theta));
      num += std::norm((lap + eta_sq * R[i]) * phase);
      den += std::norm(eta_sq * R[i] * phase);
    }
  }
  if (!(den > 0.0)) fail(ErrorCode::Domain, "eigenfunction vanishes on the grid interior");
  return std::sqrt(num / den);
}

Image render_phase_image(const EigenfunctionSeries& series, double eta,
                         const PolarSpectralGrid& grid, const PhasePlotOptions& options) {
  if (options.size < 2) fail(ErrorCode::Domain, "phase plot needs at least 2 pixels per side");
  const auto& r = grid.radial_nodes;
  const double a = r.front(), b = r.back(), l = series.mode().l;
  const std::size_t nr = r.size(), M = grid.angular_nodes.size();
  std::vector<std::complex<double>> w(nr * M);
  double wmax = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    const double R = series.radial(eta * r[i]).value;
    for (std::size_t j = 0; j < M; ++j) {
      const double ph = l * grid.angular_nodes[j];
      w[i * M + j] = R * std::complex<double>(std::cos(ph), std::sin(ph));
      wmax = std::max(wmax, std::abs(w[i * M + j]));
    }
  }

  Image img;
  img.width = img.height = options.size;
  img.rgb.assign(static_cast<std::size_t>(options.size) * options.size * 3, 0);
  const double px = 2.0 * b / options.size;
  for (int py = 0; py < options.size; ++py) {
    const double y = b - (py + 0.5) * px;
    for (int qx = 0; qx < options.size; ++qx) {
      const double x = -b + (qx + 0.5) * px;
      const double rr = std::hypot(x, y);
      if (rr < a || rr > b) continue;
      auto it = std::lower_bound(r.begin(), r.end(), rr);
      std::size_t i = static_cast<std::size_t>(it - r.begin());
      if (i == nr || (i > 0 && rr - r[i - 1] < r[i] - rr)) --i;
      double theta = std::atan2(y, x);
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      const auto j = static_cast<std::size_t>(std::lround(theta / grid.angular_step())) % M;
      const auto value = w[i * M + j];
      const double mag = wmax > 0.0 ? std::abs(value) / wmax : 0.0;
      const double hue = (std::arg(value) + std::numbers::pi) / (2.0 * std::numbers::pi);
      const auto c = hsv_to_rgb(hue, 1.0, mag);
      const std::size_t o = (static_cast<std::size_t>(py) * options.size + qx) * 3;
      img.rgb[o] = c[0];
      img.rgb[o + 1] = c[1];
      img.rgb[o + 2] = c[2];
    }
  }
  return img;
}

void render_phase_plot(const EigenfunctionSeries& series, double eta,
                       const PolarSpectralGrid& grid, const std::string& path,
                       const PhasePlotOptions& options) {
  write_ppm(render_phase_image(series, eta, grid, options), path);
}

SpectrumTable spectrum_table(const std::vector<int>& ks, const std::vector<double>& ls,
                             const AnnulusGeometry& geom) {
  SpectrumTable t;
  t.k = ks;
  t.l = ls;
  t.eta.assign(ks.size() * ls.size(), 0.0);
  parallel_for(t.eta.size(), [&](std::size_t idx) {
    const std::size_t i = idx / ls.size(), j = idx % ls.size();
    t.eta[idx] = eigenvalue(make_mode(ks[i], ls[j]), geom).eta;
  });
  return t;
}

std::string spectrum_table_csv(const SpectrumTable& table) {
  std::string out = "k";
  for (double l : table.l) out += "," + format_g(l);
  out += "\n";
  for (std::size_t i = 0; i < table.k.size(); ++i) {
    out += std::to_string(table.k[i]);
    for (std::size_t j = 0; j < table.l.size(); ++j) out += "," + format_g(table.at(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace ard
