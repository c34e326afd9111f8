#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include "ard/geometry.hpp"
#include "ard/spectrum.hpp"

namespace ard {

/// Activator-depleted kinetics f = alpha - u + u^2 v, g = beta - u^2 v with
/// reaction scale gamma and diffusion ratio d.
struct KineticParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
  double d = 1.0;
};

/// Throws ErrorCode::Domain unless every field is finite and positive.
KineticParams make_params(double alpha, double beta, double gamma, double d);

struct SteadyState {
  double u = 0.0;
  double v = 0.0;
  double residual_f = 0.0;
  double residual_g = 0.0;
};
SteadyState steady_state(double alpha, double beta);

/// `Consistent` expands the linearised 2x2 matrix (d eta^2 in the second
/// factor of the determinant); `Literal` uses (d+1) eta^2 there.
enum class DeterminantForm { Consistent, Literal };
std::string_view to_string(DeterminantForm form) noexcept;
DeterminantForm parse_determinant_form(std::string_view text);

struct TraceDet {
  double trace = 0.0;
  double det = 0.0;
};
TraceDet trace_det(const KineticParams& p, double eta_sq, DeterminantForm form);

struct RootPair {
  std::complex<double> first;   // larger real part (or + imaginary part)
  std::complex<double> second;
};
/// (T +- sqrt(T^2 - 4D)) / 2, with the cancellation-free form for real roots.
RootPair roots(double trace, double det);

enum class Region {
  StableNode,
  StableSpiral,
  TuringInstability,
  HopfInstability,
  TranscriticalCurve,
  DiscriminantCurve,
};
inline constexpr int kRegionCount = 6;
std::string_view to_string(Region region) noexcept;
std::optional<Region> parse_region(std::string_view text) noexcept;

/// 1e-6 * max(1, |T|, sqrt|D|).
double default_curve_tolerance(double trace, double det) noexcept;

/// Label from the signs of the discriminant, trace and determinant.
Region region_label(double trace, double det, double tol) noexcept;

struct StabilityVerdict {
  KineticParams params;
  int k = -1;  // -1 when classified from a bare eta^2
  double l = 0.0;
  double eta_sq = 0.0;
  double trace = 0.0;
  double det = 0.0;
  double discriminant = 0.0;
  std::complex<double> sigma1;
  std::complex<double> sigma2;
  Region label = Region::StableNode;
};

StabilityVerdict classify_point(const KineticParams& p, double eta_sq,
                                DeterminantForm form = DeterminantForm::Consistent,
                                std::optional<double> tol = std::nullopt);
/// Uses eta^2 of `mode` on `geom`.
StabilityVerdict classify_mode(const KineticParams& p, ModeIndex mode, const AnnulusGeometry& geom,
                               DeterminantForm form = DeterminantForm::Consistent,
                               std::optional<double> tol = std::nullopt);
/// Classifies modes k = 0..k_max at order l and returns the verdict with the
/// largest growth rate max Re(sigma); a point is unstable if any mode is.
StabilityVerdict classify_multimode(const KineticParams& p, double l, int k_max,
                                    const AnnulusGeometry& geom,
                                    DeterminantForm form = DeterminantForm::Consistent,
                                    std::optional<double> tol = std::nullopt);

/// "alpha,beta,gamma,d,k,l,eta_sq,T,D,re_sigma1,im_sigma1,label"
std::string verdict_csv_header();
std::string verdict_csv_row(const StabilityVerdict& v);

struct HopfAdmissibility {
  double bound_threshold = 0.0;  // rho must reach this (factor-8 form)
  bool bound_admissible = false;
  double eta_sq = 0.0;
  bool exact_admissible = false;  // gamma > (d+1) eta^2 on the actual annulus
};
HopfAdmissibility hopf_admissibility(double d, double gamma, ModeIndex mode, double a, double rho);

struct RhoBound {
  double value = 0.0;
  bool admissible = false;  // false when the bound is not positive
};
/// rho < [4(d+1)(2k+1)(l+2k+1)(l+4k) - gamma a^2 (l+4k+2)] / (gamma a (l+4k+2)).
RhoBound turing_only_bound(double d, double gamma, ModeIndex mode, double a);
/// Same with 8(d+1) in the numerator.
RhoBound negative_l_bound(double d, double gamma, ModeIndex mode, double a);

enum class LBranch { NegativeL, PositiveL };

struct RepeatedRootThreshold {
  std::optional<double> rho_stable_below;  // empty when the restriction fails
  bool restriction_ok = false;             // beta > alpha + (alpha+beta)^3
};
RepeatedRootThreshold repeated_root_thresholds(const KineticParams& p, ModeIndex mode, double a,
                                               LBranch branch);

}  // namespace ard
