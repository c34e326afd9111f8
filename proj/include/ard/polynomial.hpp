#pragma once

#include <vector>

namespace ard {

/// Real polynomial with ascending coefficients c[0] + c[1] x + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const noexcept { return c_; }
  /// Index of the highest non-zero coefficient; -1 for the zero polynomial.
  int degree() const noexcept;
  double operator()(double x) const noexcept;
  /// Sum of |c_i| |x|^i, the natural scale of rounding error in operator().
  double magnitude(double x) const noexcept;
  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(double s, const Polynomial& p);

 private:
  std::vector<double> c_;
};

struct RootOptions {
  double imag_tol = 1e-6;      // |Im z| <= imag_tol * max(1, |z|) counts as real
  double merge_tol = 1e-8;     // roots closer than this are merged
  double residual_tol = 1e-10; // accept only if |p(x)| <= tol * magnitude(x)
};

/// Real roots in [lo, hi], ascending: companion-matrix eigenvalues polished
/// by Newton's method in extended precision.
std::vector<double> real_roots(const Polynomial& p, double lo, double hi,
                               const RootOptions& options = {});

}  // namespace ard
