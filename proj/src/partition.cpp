#include "ard/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "ard/error.hpp"
#include "ard/parallel.hpp"

namespace ard {

double SweepSpec::alpha_at(int i) const noexcept {
  return alpha_min + (alpha_max - alpha_min) * i / (n_alpha - 1);
}

double SweepSpec::beta_at(int j) const noexcept {
  return beta_min + (beta_max - beta_min) * j / (n_beta - 1);
}

KineticParams SweepSpec::params(double alpha, double beta) const {
  return make_params(alpha, beta, gamma, d);
}

void validate(const SweepSpec& s) {
  auto bad = [](const std::string& msg) { fail(ErrorCode::Domain, msg); };
  if (!(s.alpha_min > 0.0) || !(s.beta_min > 0.0)) bad("sweep minima must be positive");
  if (!(s.alpha_max > s.alpha_min) || !(s.beta_max > s.beta_min))
    bad("sweep ranges must have positive length");
  if (s.n_alpha < 2 || s.n_beta < 2) bad("sweep counts must be at least 2");
  if (!(s.gamma > 0.0) || !(s.d > 0.0)) bad("gamma and d must be positive");
  make_mode(s.mode.k, s.mode.l);
  make_annulus(s.a, s.b);
}

std::array<std::size_t, kRegionCount> RegionMap::counts() const {
  std::array<std::size_t, kRegionCount> c{};
  for (Region r : labels) ++c[static_cast<int>(r)];
  return c;
}

RegionMap sweep_classify(const SweepSpec& spec) {
  validate(spec);
  const auto geom = make_annulus(spec.a, spec.b);
  RegionMap map;
  map.spec = spec;
  map.eta_sq = eigenvalue(spec.mode, geom).eta_sq;
  map.labels.assign(static_cast<std::size_t>(spec.n_alpha) * spec.n_beta, Region::StableNode);
  parallel_for(static_cast<std::size_t>(spec.n_beta), [&](std::size_t j) {
    const double beta = spec.beta_at(static_cast<int>(j));
    for (int i = 0; i < spec.n_alpha; ++i) {
      const auto p = spec.params(spec.alpha_at(i), beta);
      const auto v = spec.k_max >= 0
                         ? classify_multimode(p, spec.mode.l, spec.k_max, geom, spec.form, spec.curve_tol)
                         : classify_point(p, map.eta_sq, spec.form, spec.curve_tol);
      map.labels[j * spec.n_alpha + i] = v.label;
    }
  });
  return map;
}

Polynomial discriminant_polynomial(double alpha, double gamma, double d, double eta_sq,
                                   DeterminantForm form) {
  // s^2 (T^2 - 4D) = Ts^2 - 4 s Ds with Ts = s T and Ds = s D, expanded in beta.
  const double a = alpha, g = gamma, e = eta_sq;
  const double m = form == DeterminantForm::Consistent ? d : d + 1.0;
  const double a2 = a * a, a4 = a2 * a2, g2 = g * g;
  const double q = (d + 1.0) * (d + 1.0) - 4.0 * m;  // coefficient of e^2
  const double ed = e * (d - 1.0);                    // e (d - 1)
  std::vector<double> c(7);
  c[6] = g2;
  c[5] = 6.0 * a * g2;
  c[4] = g * (2.0 * ed + 15.0 * a2 * g - 6.0 * g);
  c[3] = 4.0 * a * g * (2.0 * ed + 5.0 * a2 * g - 5.0 * g);
  c[2] = q * e * e + 12.0 * a2 * g * ed + 2.0 * e * g * (2.0 * m - d - 1.0) + 15.0 * a4 * g2 -
         24.0 * a2 * g2 + g2;
  c[1] = 2.0 * a * (q * e * e + 4.0 * a2 * g * ed + 3.0 * a4 * g2 - 6.0 * a2 * g2 - g2);
  c[0] = a2 * (q * e * e + 2.0 * a2 * g * ed + 2.0 * e * g * (d + 1.0 - 2.0 * m) + a4 * g2 -
               2.0 * a2 * g2 + g2);
  return Polynomial(std::move(c));
}

Polynomial transcritical_polynomial(double alpha, double gamma, double d, double eta_sq) {
  const double a = alpha, g = gamma, e = (d + 1.0) * eta_sq;
  return Polynomial({-a * (g * (1.0 + a * a) + e), g * (1.0 - 3.0 * a * a) - e, -3.0 * a * g, -g});
}

std::vector<double> bisection_roots(const std::function<double(double)>& f, double lo, double hi,
                                    int samples) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(lo);
  if (f0 == 0.0) roots.push_back(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x1 = lo + (hi - lo) * i / samples;
    const double f1 = f(x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
      double l = x0, r = x1, fl = f0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (l + r);
        if (mid <= l || mid >= r) break;
        const double fm = f(mid);
        if (fm == 0.0) {
          l = r = mid;
          break;
        }
        if ((fm < 0.0) == (fl < 0.0)) {
          l = mid;
          fl = fm;
        } else {
          r = mid;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

namespace {

struct RouteResult {
  std::vector<CurvePoint> points;
};

// Matches polynomial roots against bisection roots for one alpha.
std::vector<CurvePoint> reconcile(double alpha, const std::vector<double>& poly,
                                  const std::function<double(double)>& g, double lo, double hi,
                                  const CurveOptions& opt, const char* what) {
  const auto brackets = bisection_roots(g, lo, hi, opt.bisection_samples);
  const double spacing = (hi - lo) / opt.bisection_samples;
  std::vector<bool> used(brackets.size(), false);
  std::vector<CurvePoint> out;
  auto disagree = [&](const std::string& detail) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s curve at alpha=%.17g: ", what, alpha);
    std::string msg = buf + detail + "; polynomial roots:";
    for (double x : poly) msg += " " + std::to_string(x);
    msg += "; bisection roots:";
    for (double x : brackets) msg += " " + std::to_string(x);
    fail(ErrorCode::MethodDisagreement, msg);
  };
  for (double x : poly) {
    CurvePoint pt;
    pt.alpha = alpha;
    pt.beta = x;
    std::size_t best = brackets.size();
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < brackets.size(); ++k) {
      if (used[k]) continue;
      const double gap = std::abs(brackets[k] - x);
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    if (best < brackets.size() && best_gap <= opt.disagreement_tol) {
      used[best] = true;
      pt.method_gap = best_gap;
    } else {
      // Close pairs or even-multiplicity roots escape the coarse scan; look
      // again on a fine local grid.
      const double wlo = std::max(lo, x - 2.0 * spacing), whi = std::min(hi, x + 2.0 * spacing);
      const auto local = bisection_roots(g, wlo, whi, 2000);
      double local_gap = std::numeric_limits<double>::infinity();
      for (double y : local) local_gap = std::min(local_gap, std::abs(y - x));
      if (local_gap <= opt.disagreement_tol) {
        pt.method_gap = local_gap;
      } else {
        pt.tangent = true;
        pt.method_gap = 0.0;
      }
    }
    out.push_back(pt);
  }
  for (std::size_t k = 0; k < brackets.size(); ++k) {
    if (used[k]) continue;
    bool near_poly = false;
    for (double x : poly) near_poly = near_poly || std::abs(x - brackets[k]) <= opt.disagreement_tol;
    if (!near_poly) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "bisection root beta=%.17g has no polynomial counterpart",
                    brackets[k]);
      disagree(buf);
    }
  }
  return out;
}

}  // namespace

std::vector<CurvePoint> discriminant_curve(const SweepSpec& spec, const std::vector<double>& alphas,
                                           const CurveOptions& options) {
  validate(spec);
  const double eta_sq = eigenvalue(spec.mode, make_annulus(spec.a, spec.b)).eta_sq;
  std::vector<std::vector<CurvePoint>> per(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t idx) {
    const double alpha = alphas[idx];
    const auto g = [&](double beta) {
      const auto td = trace_det(spec.params(alpha, beta), eta_sq, spec.form);
      return td.trace * td.trace - 4.0 * td.det;
    };
    const auto P = discriminant_polynomial(alpha, spec.gamma, spec.d, eta_sq, spec.form);
    const auto poly = real_roots(P, spec.beta_min, spec.beta_max);
    auto pts = reconcile(alpha, poly, g, spec.beta_min, spec.beta_max, options, "discriminant");
    for (auto& pt : pts) {
      const auto td = trace_det(spec.params(alpha, pt.beta), eta_sq, spec.form);
      pt.residual = std::abs(td.trace * td.trace - 4.0 * td.det) / (1.0 + td.trace * td.trace);
    }
    per[idx] = std::move(pts);
  });
  std::vector<CurvePoint> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<CurvePoint> transcritical_curve(const SweepSpec& spec, const std::vector<double>& alphas,
                                            const CurveOptions& options) {
  validate(spec);
  const double eta_sq = eigenvalue(spec.mode, make_annulus(spec.a, spec.b)).eta_sq;
  std::vector<std::vector<CurvePoint>> per(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t idx) {
    const double alpha = alphas[idx];
    const auto t = [&](double beta) {
      return trace_det(spec.params(alpha, beta), eta_sq, spec.form).trace;
    };
    const auto P = transcritical_polynomial(alpha, spec.gamma, spec.d, eta_sq);
    const auto poly = real_roots(P, spec.beta_min, spec.beta_max);
    auto pts = reconcile(alpha, poly, t, spec.beta_min, spec.beta_max, options, "transcritical");
    std::vector<CurvePoint> kept;
    for (auto& pt : pts) {
      const auto td = trace_det(spec.params(alpha, pt.beta), eta_sq, spec.form);
      if (!(td.det > 0.0)) continue;
      pt.residual = std::abs(td.trace);
      kept.push_back(pt);
    }
    per[idx] = std::move(kept);
  });
  std::vector<CurvePoint> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

double CurveSet::max_method_gap() const noexcept {
  double m = 0.0;
  for (const auto& p : discriminant) m = std::max(m, p.method_gap);
  for (const auto& p : transcritical) m = std::max(m, p.method_gap);
  return m;
}

CurveSet trace_curves(const SweepSpec& spec, const std::vector<double>& alphas,
                      const CurveOptions& options) {
  CurveSet c;
  c.spec = spec;
  c.eta_sq = eigenvalue(spec.mode, make_annulus(spec.a, spec.b)).eta_sq;
  c.discriminant = discriminant_curve(spec, alphas, options);
  c.transcritical = transcritical_curve(spec, alphas, options);
  return c;
}

std::vector<double> alpha_samples(const SweepSpec& spec, int count) {
  if (count < 2) fail(ErrorCode::Domain, "need at least 2 alpha samples");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = spec.alpha_min + (spec.alpha_max - spec.alpha_min) * i / (count - 1);
  return out;
}

std::array<unsigned char, 3> region_color(Region region) noexcept {
  switch (region) {
    case Region::StableNode: return {0, 90, 200};
    case Region::StableSpiral: return {120, 200, 255};
    case Region::TuringInstability: return {220, 50, 40};
    case Region::HopfInstability: return {250, 190, 0};
    case Region::TranscriticalCurve: return {0, 0, 0};
    case Region::DiscriminantCurve: return {255, 255, 255};
  }
  return {128, 128, 128};
}

std::string region_map_csv(const RegionMap& map) {
  std::string out = "alpha,beta,label\n";
  for (int j = 0; j < map.spec.n_beta; ++j) {
    const std::string beta = format_g(map.spec.beta_at(j));
    for (int i = 0; i < map.spec.n_alpha; ++i) {
      out += format_g(map.spec.alpha_at(i));
      out += ',';
      out += beta;
      out += ',';
      out += to_string(map.at(i, j));
      out += '\n';
    }
  }
  return out;
}

ImportedRegionMap parse_region_map_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "alpha,beta,label")
    fail(ErrorCode::Io, "region map CSV must start with 'alpha,beta,label'");
  struct Row {
    double alpha, beta;
    Region label;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      fail(ErrorCode::Io, "region map CSV line " + std::to_string(lineno) + " is malformed");
    const auto label = parse_region(std::string_view(line).substr(c2 + 1));
    if (!label) fail(ErrorCode::Io, "unknown label on region map CSV line " + std::to_string(lineno));
    rows.push_back({std::stod(line.substr(0, c1)), std::stod(line.substr(c1 + 1, c2 - c1 - 1)), *label});
  }
  ImportedRegionMap m;
  for (const auto& r : rows) {
    m.alphas.push_back(r.alpha);
    m.betas.push_back(r.beta);
  }
  for (auto* v : {&m.alphas, &m.betas}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  if (m.alphas.size() * m.betas.size() != rows.size())
    fail(ErrorCode::Io, "region map CSV is not a full lattice");
  m.labels.assign(rows.size(), Region::StableNode);
  for (const auto& r : rows) {
    const auto i = std::lower_bound(m.alphas.begin(), m.alphas.end(), r.alpha) - m.alphas.begin();
    const auto j = std::lower_bound(m.betas.begin(), m.betas.end(), r.beta) - m.betas.begin();
    m.labels[static_cast<std::size_t>(j) * m.alphas.size() + i] = r.label;
  }
  return m;
}

Image region_raster(const RegionMap& map) {
  Image img;
  img.width = map.spec.n_alpha;
  img.height = map.spec.n_beta;
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  for (int row = 0; row < img.height; ++row) {
    const int j = img.height - 1 - row;
    for (int i = 0; i < img.width; ++i) {
      const auto c = region_color(map.at(i, j));
      const std::size_t o = (static_cast<std::size_t>(row) * img.width + i) * 3;
      img.rgb[o] = c[0];
      img.rgb[o + 1] = c[1];
      img.rgb[o + 2] = c[2];
    }
  }
  return img;
}

std::string region_legend() {
  std::string out = "index,label,r,g,b\n";
  for (int i = 0; i < kRegionCount; ++i) {
    const auto r = static_cast<Region>(i);
    const auto c = region_color(r);
    out += std::to_string(i) + "," + std::string(to_string(r)) + "," + std::to_string(c[0]) + "," +
           std::to_string(c[1]) + "," + std::to_string(c[2]) + "\n";
  }
  return out;
}

nlohmann::json spec_json(const SweepSpec& s) {
  nlohmann::json j;
  j["alpha"] = {s.alpha_min, s.alpha_max, s.n_alpha};
  j["beta"] = {s.beta_min, s.beta_max, s.n_beta};
  j["gamma"] = s.gamma;
  j["d"] = s.d;
  j["k"] = s.mode.k;
  j["l"] = s.mode.l;
  j["a"] = s.a;
  j["b"] = s.b;
  j["form"] = std::string(to_string(s.form));
  j["k_max"] = s.k_max;
  j["curve_tol"] = s.curve_tol ? nlohmann::json(*s.curve_tol) : nlohmann::json("default");
  return j;
}

nlohmann::json curves_summary(const CurveSet& curves) {
  nlohmann::json j;
  j["spec"] = spec_json(curves.spec);
  j["eta_sq"] = curves.eta_sq;
  j["discriminant_points"] = curves.discriminant.size();
  j["transcritical_points"] = curves.transcritical.size();
  j["tangent_points"] = std::count_if(curves.discriminant.begin(), curves.discriminant.end(),
                                      [](const CurvePoint& p) { return p.tangent; });
  j["max_method_gap"] = curves.max_method_gap();
  return j;
}

nlohmann::json region_summary(const RegionMap& map) {
  nlohmann::json j;
  j["spec"] = spec_json(map.spec);
  j["eta_sq"] = map.eta_sq;
  const auto c = map.counts();
  for (int i = 0; i < kRegionCount; ++i) j["counts"][std::string(to_string(static_cast<Region>(i)))] = c[i];
  return j;
}

std::string curves_csv(const CurveSet& curves) {
  std::string out = "kind,alpha,beta,residual,method_gap,tangent\n";
  auto emit = [&](const char* kind, const std::vector<CurvePoint>& pts) {
    for (const auto& p : pts) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.3e,%.3e,%d\n", kind, p.alpha, p.beta,
                    p.residual, p.method_gap, p.tangent ? 1 : 0);
      out += buf;
    }
  };
  emit("discriminant", curves.discriminant);
  emit("transcritical", curves.transcritical);
  return out;
}

std::vector<std::string> export_region_map(const RegionMap& map, const std::filesystem::path& dir,
                                           const std::string& stem) {
  const std::vector<std::string> files{stem + ".csv", stem + ".ppm", stem + "_legend.csv"};
  write_text(dir / files[0], region_map_csv(map));
  write_ppm(region_raster(map), dir / files[1]);
  write_text(dir / files[2], region_legend());
  return files;
}

std::vector<std::string> export_curves(const CurveSet& curves, const std::filesystem::path& dir,
                                       const std::string& stem) {
  const std::string file = stem + ".csv";
  write_text(dir / file, curves_csv(curves));
  return {file};
}

}  // namespace ard
