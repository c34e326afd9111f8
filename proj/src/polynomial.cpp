#include "ard/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

namespace ard {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {}

int Polynomial::degree() const noexcept {
  for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
    if (c_[i] != 0.0) return i;
  return -1;
}

double Polynomial::operator()(double x) const noexcept {
  long double acc = 0.0L;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return static_cast<double>(acc);
}

double Polynomial::magnitude(double x) const noexcept {
  double acc = 0.0;
  const double ax = std::abs(x);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  std::vector<double> r(std::max(p.c_.size(), q.c_.size()), 0.0);
  for (std::size_t i = 0; i < p.c_.size(); ++i) r[i] += p.c_[i];
  for (std::size_t i = 0; i < q.c_.size(); ++i) r[i] += q.c_[i];
  return Polynomial(std::move(r));
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + (-1.0) * q; }

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.c_.empty() || q.c_.empty()) return Polynomial({0.0});
  std::vector<double> r(p.c_.size() + q.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.c_.size(); ++i)
    for (std::size_t j = 0; j < q.c_.size(); ++j) r[i + j] += p.c_[i] * q.c_[j];
  return Polynomial(std::move(r));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> r = p.c_;
  for (double& x : r) x *= s;
  return Polynomial(std::move(r));
}

std::vector<double> real_roots(const Polynomial& p, double lo, double hi,
                               const RootOptions& options) {
  const int n = p.degree();
  if (n < 1) return {};
  const auto& c = p.coefficients();
  std::vector<std::complex<double>> candidates;
  if (n == 1) {
    candidates.emplace_back(-c[0] / c[1], 0.0);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    for (int i = 0; i < n; ++i) candidates.push_back(solver.eigenvalues()[i]);
  }

  std::vector<double> found;
  for (const auto& z : candidates) {
    if (std::abs(z.imag()) > options.imag_tol * std::max(1.0, std::abs(z))) continue;
    long double x = z.real();
    for (int it = 0; it < 60; ++it) {
      long double f = 0.0L, df = 0.0L;
      for (auto k = c.rbegin(); k != c.rend(); ++k) {
        df = df * x + f;
        f = f * x + *k;
      }
      if (df == 0.0L) break;
      const long double step = f / df;
      x -= step;
      if (std::abs(step) <= 1e-18L * std::max(1.0L, std::abs(x))) break;
    }
    const double xr = static_cast<double>(x);
    if (!std::isfinite(xr) || xr < lo || xr > hi) continue;
    if (std::abs(p(xr)) > options.residual_tol * p.magnitude(xr)) continue;
    found.push_back(xr);
  }
  std::sort(found.begin(), found.end());
  std::vector<double> merged;
  for (double x : found) {
    if (!merged.empty() && x - merged.back() < options.merge_tol) continue;
    merged.push_back(x);
  }
  return merged;
}

}  // namespace ard
