#include "ard/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "ard/error.hpp"
#include "ard/io.hpp"

namespace ard {

namespace {

constexpr std::array<std::string_view, kRegionCount> kRegionNames = {
    "StableNode",        "StableSpiral",       "TuringInstability",
    "HopfInstability",   "TranscriticalCurve", "DiscriminantCurve",
};

double growth_rate(const StabilityVerdict& v) {
  return std::max(v.sigma1.real(), v.sigma2.real());
}

double bound_with_factor(double factor, double d, double gamma, ModeIndex mode, double a) {
  const double k = mode.k, l = mode.l;
  const double num = factor * (d + 1.0) * (2.0 * k + 1.0) * (l + 2.0 * k + 1.0) * (l + 4.0 * k) -
                     gamma * a * a * (l + 4.0 * k + 2.0);
  return num / (gamma * a * (l + 4.0 * k + 2.0));
}

}  // namespace

KineticParams make_params(double alpha, double beta, double gamma, double d) {
  const std::array<std::pair<const char*, double>, 4> fields{
      {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"d", d}}};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value) || !(value > 0.0)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s must be positive and finite, got %.6g", name, value);
      fail(ErrorCode::Domain, buf);
    }
  }
  return KineticParams{alpha, beta, gamma, d};
}

SteadyState steady_state(double alpha, double beta) {
  const double s = alpha + beta;
  if (!(s != 0.0) || !std::isfinite(s)) fail(ErrorCode::Domain, "alpha + beta must be non-zero");
  SteadyState ss;
  ss.u = s;
  ss.v = beta / (s * s);
  ss.residual_f = alpha - ss.u + ss.u * ss.u * ss.v;
  ss.residual_g = beta - ss.u * ss.u * ss.v;
  return ss;
}

std::string_view to_string(DeterminantForm form) noexcept {
  return form == DeterminantForm::Consistent ? "consistent" : "literal";
}

DeterminantForm parse_determinant_form(std::string_view text) {
  if (text == "consistent") return DeterminantForm::Consistent;
  if (text == "paper-literal" || text == "literal") return DeterminantForm::Literal;
  fail(ErrorCode::Usage, "unknown determinant form '" + std::string(text) +
                             "' (expected consistent, literal or paper-literal)");
}

TraceDet trace_det(const KineticParams& p, double eta_sq, DeterminantForm form) {
  const double s = p.alpha + p.beta;
  const double m = form == DeterminantForm::Consistent ? p.d : p.d + 1.0;
  TraceDet td;
  td.trace = p.gamma * (p.beta - p.alpha - s * s * s) / s - (p.d + 1.0) * eta_sq;
  td.det = (p.gamma * (p.beta - p.alpha) / s - eta_sq) * (-p.gamma * s * s - m * eta_sq) +
           2.0 * p.gamma * p.gamma * p.beta * s;
  return td;
}

RootPair roots(double trace, double det) {
  const double disc = trace * trace - 4.0 * det;
  if (disc < 0.0) {
    const double im = 0.5 * std::sqrt(-disc);
    return {{0.5 * trace, im}, {0.5 * trace, -im}};
  }
  const double sq = std::sqrt(disc);
  const double q = 0.5 * (trace + std::copysign(sq, trace));
  double r1 = q, r2 = q != 0.0 ? det / q : 0.0;
  if (r2 > r1) std::swap(r1, r2);
  return {{r1, 0.0}, {r2, 0.0}};
}

std::string_view to_string(Region region) noexcept {
  return kRegionNames[static_cast<int>(region)];
}

std::optional<Region> parse_region(std::string_view text) noexcept {
  for (int i = 0; i < kRegionCount; ++i)
    if (kRegionNames[i] == text) return static_cast<Region>(i);
  return std::nullopt;
}

double default_curve_tolerance(double trace, double det) noexcept {
  return 1e-6 * std::max({1.0, std::abs(trace), std::sqrt(std::abs(det))});
}

Region region_label(double trace, double det, double tol) noexcept {
  const double disc = trace * trace - 4.0 * det;
  if (disc < -tol) {
    if (trace < -tol) return Region::StableSpiral;
    if (trace > tol) return Region::HopfInstability;
    return Region::TranscriticalCurve;
  }
  if (disc > tol) {
    return (trace < 0.0 && det > 0.0) ? Region::StableNode : Region::TuringInstability;
  }
  return Region::DiscriminantCurve;
}

StabilityVerdict classify_point(const KineticParams& p, double eta_sq, DeterminantForm form,
                                std::optional<double> tol) {
  StabilityVerdict v;
  v.params = p;
  v.eta_sq = eta_sq;
  const auto td = trace_det(p, eta_sq, form);
  v.trace = td.trace;
  v.det = td.det;
  v.discriminant = td.trace * td.trace - 4.0 * td.det;
  const auto r = roots(td.trace, td.det);
  v.sigma1 = r.first;
  v.sigma2 = r.second;
  v.label = region_label(td.trace, td.det, tol.value_or(default_curve_tolerance(td.trace, td.det)));
  return v;
}

StabilityVerdict classify_mode(const KineticParams& p, ModeIndex mode, const AnnulusGeometry& geom,
                               DeterminantForm form, std::optional<double> tol) {
  auto v = classify_point(p, eigenvalue(mode, geom).eta_sq, form, tol);
  v.k = mode.k;
  v.l = mode.l;
  return v;
}

StabilityVerdict classify_multimode(const KineticParams& p, double l, int k_max,
                                    const AnnulusGeometry& geom, DeterminantForm form,
                                    std::optional<double> tol) {
  if (k_max < 0) fail(ErrorCode::Domain, "k_max must be non-negative");
  auto best = classify_mode(p, make_mode(0, l), geom, form, tol);
  for (int k = 1; k <= k_max; ++k) {
    auto v = classify_mode(p, make_mode(k, l), geom, form, tol);
    if (growth_rate(v) > growth_rate(best)) best = v;
  }
  return best;
}

std::string verdict_csv_header() {
  return "alpha,beta,gamma,d,k,l,eta_sq,T,D,re_sigma1,im_sigma1,label";
}

std::string verdict_csv_row(const StabilityVerdict& v) {
  std::string row;
  for (double x : {v.params.alpha, v.params.beta, v.params.gamma, v.params.d}) row += format_g(x) + ",";
  row += std::to_string(v.k) + ",";
  for (double x : {v.l, v.eta_sq, v.trace, v.det, v.sigma1.real(), v.sigma1.imag()})
    row += format_g(x) + ",";
  row += to_string(v.label);
  return row;
}

HopfAdmissibility hopf_admissibility(double d, double gamma, ModeIndex mode, double a, double rho) {
  mode = make_mode(mode.k, mode.l);
  HopfAdmissibility h;
  h.bound_threshold = bound_with_factor(8.0, d, gamma, mode, a);
  h.bound_admissible = rho >= h.bound_threshold;
  h.eta_sq = eigenvalue_via_weighting(mode, a, rho);
  h.exact_admissible = gamma > (d + 1.0) * h.eta_sq;
  return h;
}

RhoBound turing_only_bound(double d, double gamma, ModeIndex mode, double a) {
  mode = make_mode(mode.k, mode.l);
  const double v = bound_with_factor(4.0, d, gamma, mode, a);
  return {v, v > 0.0};
}

RhoBound negative_l_bound(double d, double gamma, ModeIndex mode, double a) {
  mode = make_mode(mode.k, mode.l);
  const double v = bound_with_factor(8.0, d, gamma, mode, a);
  return {v, v > 0.0};
}

RepeatedRootThreshold repeated_root_thresholds(const KineticParams& p, ModeIndex mode, double a,
                                               LBranch branch) {
  mode = make_mode(mode.k, mode.l);
  const double s = p.alpha + p.beta;
  const double gap = p.beta - p.alpha - s * s * s;
  RepeatedRootThreshold r;
  r.restriction_ok = gap > 0.0;
  if (!r.restriction_ok) return r;
  const double factor = branch == LBranch::NegativeL ? 8.0 : 4.0;
  const double k = mode.k, l = mode.l;
  r.rho_stable_below = factor * (p.d + 1.0) * s * (2.0 * k + 1.0) * (l + 2.0 * k + 1.0) *
                           (l + 4.0 * k) / (p.gamma * a * gap * (l + 4.0 * k + 2.0)) -
                       a;
  return r;
}

}  // namespace ard
