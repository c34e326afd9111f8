#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ard/geometry.hpp"
#include "ard/io.hpp"

namespace ard {

/// Mode index of an annulus eigenfunction: k is the mode counter, l the Bessel order.
struct ModeIndex {
  int k = 0;
  double l = 0.0;
};

/// Throws ErrorCode::Domain if k < 0 or l is within 1e-9 of a multiple of 1/2.
ModeIndex make_mode(int k, double l);

struct Eigenpair {
  ModeIndex mode;
  double eta_sq = 0.0;
  double eta = 0.0;
  double eta1_sq = 0.0;  // inner-radius component
  double eta2_sq = 0.0;  // outer-radius component
};

/// Closed-form eigenvalue with its square root and both components.
/// Throws ErrorCode::Domain when the formula yields a negative or non-finite value.
Eigenpair eigenvalue(ModeIndex mode, const AnnulusGeometry& geom);

struct EigenComponents {
  double inner = 0.0;
  double outer = 0.0;
};
EigenComponents eigenvalue_components(ModeIndex mode, const AnnulusGeometry& geom);

/// (a^(l-1) + b^(l-1)) / (a^(l+1) + b^(l+1)) with b = a + rho. Evaluated in
/// ratio form so large |l| does not overflow.
double weighting(double a, double rho, double l);

enum class SupremumBranch { NegativeL, PositiveL };

struct SupremumReport {
  double printed = 0.0;      // 2/(a(rho+a)) or 1/(a(rho+a))
  double numeric = 0.0;      // weighting at l = -1e3 or l = 1e-6
  double discrepancy = 0.0;  // |printed - numeric|
};
SupremumReport weighting_supremum(double a, double rho, SupremumBranch branch);

/// weighting(a, rho, l) times the mode factor 4(2k+1)(l+2k+1)(l+4k)/(l+4k+2).
double eigenvalue_via_weighting(ModeIndex mode, double a, double rho);

/// Relative size of F_j + F_{j+1} (pairwise term sum of the inner Bessel
/// flux series) at the closed-form eta, with j = k/2 for even k. Diagnostic
/// only: the closed form is not expected to zero it.
double pairwise_cancellation_residual(ModeIndex mode, const AnnulusGeometry& geom);

struct SeriesOptions {
  int max_terms = 80;         // J cap
  double relative_tol = 1e-14;
};

/// Frobenius series R(x) = sum u_j x^(2j+l) + sum v_j x^(2j-l), u_0 = v_0 = c0.
class EigenfunctionSeries {
 public:
  explicit EigenfunctionSeries(ModeIndex mode, double c0 = 1.0, SeriesOptions options = {});

  const ModeIndex& mode() const noexcept { return mode_; }
  double c0() const noexcept { return c0_; }
  int max_terms() const noexcept { return options_.max_terms; }
  const SeriesOptions& options() const noexcept { return options_; }
  /// Coefficients u_j, v_j for j < max_terms (may underflow to zero).
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& v() const noexcept { return v_; }

  struct Radial {
    double value = 0.0;
    double tail = 0.0;  // magnitude bound on the omitted terms
    int terms = 0;      // terms summed in the longer of the two series
  };
  /// R(x) for x > 0, accumulated in quad precision with compensated sums.
  /// Throws ErrorCode::TruncationRange if a term exceeds 1e300.
  Radial radial(double x) const;

 private:
  ModeIndex mode_;
  double c0_;
  SeriesOptions options_;
  std::vector<double> u_;
  std::vector<double> v_;
};

struct EigenfunctionValue {
  std::complex<double> w;
  double tail = 0.0;
  int terms = 0;
};

/// R(eta r) exp(i l theta). Requires a <= r <= b.
EigenfunctionValue eigenfunction_value(const EigenfunctionSeries& series,
                                       const AnnulusGeometry& geom, double eta, double r,
                                       double theta);

/// Relative residual ||lap w + eta^2 w|| / ||eta^2 w|| over interior radial
/// nodes and all angular nodes. Radial derivatives use the barycentric
/// Chebyshev differentiation matrix; the angular one is -l^2 exactly.
/// Requires grid.N >= 8 and eta > 0.
double collocation_residual(const EigenfunctionSeries& series, double eta,
                            const PolarSpectralGrid& grid);

/// Chebyshev differentiation matrix on ascending nodes (row-major, n x n).
std::vector<double> chebyshev_diff_matrix(const std::vector<double>& nodes);

struct PhasePlotOptions {
  int size = 512;  // square image, pixels per side
};

/// Domain-coloured image of w sampled on the polar grid; each pixel takes
/// the value of the nearest grid node. Hue (arg w + pi)/2pi, value |w|/max|w|,
/// saturation 1, black outside the annulus.
Image render_phase_image(const EigenfunctionSeries& series, double eta,
                         const PolarSpectralGrid& grid, const PhasePlotOptions& options = {});
void render_phase_plot(const EigenfunctionSeries& series, double eta,
                       const PolarSpectralGrid& grid, const std::string& path,
                       const PhasePlotOptions& options = {});

struct SpectrumTable {
  std::vector<int> k;
  std::vector<double> l;
  std::vector<double> eta;  // row-major, eta[i * l.size() + j] for (k[i], l[j])

  double at(std::size_t i, std::size_t j) const { return eta[i * l.size() + j]; }
};
SpectrumTable spectrum_table(const std::vector<int>& ks, const std::vector<double>& ls,
                             const AnnulusGeometry& geom);
/// Header "k,<l_1>,<l_2>,..."; one row per k; 6 significant digits.
std::string spectrum_table_csv(const SpectrumTable& table);

}  // namespace ard
