#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ard/io.hpp"
#include "ard/polynomial.hpp"
#include "ard/spectrum.hpp"
#include "ard/stability.hpp"

namespace ard {

/// A rectangular (alpha, beta) lattice with both ends included. The default
/// is the (0, 1] x (0, 1] window at spacing 1/200.
struct SweepSpec {
  double alpha_min = 0.005;
  double alpha_max = 1.0;
  double beta_min = 0.005;
  double beta_max = 1.0;
  int n_alpha = 200;
  int n_beta = 200;
  double gamma = 1.0;
  double d = 1.0;
  ModeIndex mode{0, 0.27};
  double a = 0.5;
  double b = 1.0;
  DeterminantForm form = DeterminantForm::Consistent;
  int k_max = -1;  // >= 0 classifies with the most unstable of k = 0..k_max
  std::optional<double> curve_tol;

  double alpha_at(int i) const noexcept;
  double beta_at(int j) const noexcept;
  KineticParams params(double alpha, double beta) const;
};

/// Throws ErrorCode::Domain on empty ranges, counts below 2 or non-positive minima.
void validate(const SweepSpec& spec);

struct RegionMap {
  SweepSpec spec;
  double eta_sq = 0.0;
  std::vector<Region> labels;  // labels[j * n_alpha + i] at (alpha_i, beta_j)

  Region at(int i, int j) const { return labels[static_cast<std::size_t>(j) * spec.n_alpha + i]; }
  std::array<std::size_t, kRegionCount> counts() const;
};

RegionMap sweep_classify(const SweepSpec& spec);

/// Degree-6 polynomial in beta whose positive roots are the T^2 = 4D curve at
/// fixed alpha (T^2 - 4D multiplied by (alpha+beta)^2). See docs/FORMATS.md.
Polynomial discriminant_polynomial(double alpha, double gamma, double d, double eta_sq,
                                   DeterminantForm form);
/// Cubic in beta: gamma(beta - alpha - s^3) - (d+1) eta^2 s with s = alpha + beta.
Polynomial transcritical_polynomial(double alpha, double gamma, double d, double eta_sq);

/// Sign changes of f on `samples` equal steps over [lo, hi], refined by
/// bisection to full double precision.
std::vector<double> bisection_roots(const std::function<double(double)>& f, double lo, double hi,
                                    int samples);

struct CurvePoint {
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;    // scaled defining-equation residual
  double method_gap = 0.0;  // |beta_polynomial - beta_bisection|
  bool tangent = false;     // even-multiplicity root; no sign change to bracket
};

struct CurveOptions {
  int bisection_samples = 20000;
  double agreement_tol = 1e-8;     // reported
  double disagreement_tol = 1e-6;  // aborts
};

/// T^2 = 4D points for each alpha (beta within the sweep window), found by
/// polynomial roots and cross-checked by bisection on T^2 - 4D.
/// Throws ErrorCode::MethodDisagreement when the two routes differ by more
/// than options.disagreement_tol or find different root sets.
std::vector<CurvePoint> discriminant_curve(const SweepSpec& spec,
                                           const std::vector<double>& alphas,
                                           const CurveOptions& options = {});
/// T = 0 points with D > 0, cross-checked the same way.
std::vector<CurvePoint> transcritical_curve(const SweepSpec& spec,
                                            const std::vector<double>& alphas,
                                            const CurveOptions& options = {});

struct CurveSet {
  SweepSpec spec;
  double eta_sq = 0.0;
  std::vector<CurvePoint> discriminant;
  std::vector<CurvePoint> transcritical;
  double max_method_gap() const noexcept;
};
CurveSet trace_curves(const SweepSpec& spec, const std::vector<double>& alphas,
                      const CurveOptions& options = {});

/// Evenly spaced alphas across the sweep window (ends included).
std::vector<double> alpha_samples(const SweepSpec& spec, int count);

// ---- export ----

std::array<unsigned char, 3> region_color(Region region) noexcept;

/// "alpha,beta,label", one row per cell, beta-major.
std::string region_map_csv(const RegionMap& map);
struct ImportedRegionMap {
  std::vector<double> alphas;  // distinct, ascending
  std::vector<double> betas;
  std::vector<Region> labels;  // same layout as RegionMap::labels
};
ImportedRegionMap parse_region_map_csv(std::string_view text);

/// One pixel per cell, top row = largest beta.
Image region_raster(const RegionMap& map);
/// "index,label,r,g,b" rows.
std::string region_legend();
nlohmann::json spec_json(const SweepSpec& spec);
nlohmann::json region_summary(const RegionMap& map);
nlohmann::json curves_summary(const CurveSet& curves);

/// "kind,alpha,beta,residual,method_gap,tangent"; header only when empty.
std::string curves_csv(const CurveSet& curves);

/// Writes <stem>.csv, <stem>.ppm and <stem>_legend.csv; returns the file names.
std::vector<std::string> export_region_map(const RegionMap& map, const std::filesystem::path& dir,
                                           const std::string& stem);
/// Writes <stem>.csv.
std::vector<std::string> export_curves(const CurveSet& curves, const std::filesystem::path& dir,
                                       const std::string& stem);

}  // namespace ard
