#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "ard/error.hpp"
#include "ard/partition.hpp"
#include "doctest.h"

using namespace ard;

namespace {

SweepSpec window_config(double d, double gamma) {
  SweepSpec s;
  s.d = d;
  s.gamma = gamma;
  return s;
}

// Label straight from the eigenvalues of the linearised matrix, without the
// trace/determinant closed forms.
Region oracle_label(const KineticParams& p, double eta_sq) {
  const double s = p.alpha + p.beta, u = s, v = p.beta / (s * s);
  Eigen::Matrix2d J;
  J << p.gamma * (-1.0 + 2.0 * u * v) - eta_sq, p.gamma * u * u,  //
      -2.0 * p.gamma * u * v, -p.gamma * u * u - p.d * eta_sq;
  const Eigen::Vector2cd ev = J.eigenvalues();
  const double tr = J.trace(), det = J.determinant();
  const double tol = 1e-6 * std::max({1.0, std::abs(tr), std::sqrt(std::abs(det))});
  const double disc = std::pow(std::abs(ev(0) - ev(1)), 2) * (std::abs(ev(0).imag()) > 0 ? -1.0 : 1.0);
  if (std::abs(disc) <= tol) return Region::DiscriminantCurve;
  if (disc < 0.0) {
    const double re = ev(0).real();
    if (2.0 * re < -tol) return Region::StableSpiral;
    if (2.0 * re > tol) return Region::HopfInstability;
    return Region::TranscriticalCurve;
  }
  return (ev(0).real() < 0.0 && ev(1).real() < 0.0) ? Region::StableNode : Region::TuringInstability;
}

std::size_t count(const RegionMap& m, Region r) { return m.counts()[static_cast<int>(r)]; }

}  // namespace

TEST_CASE("sweep lattice") {
  SweepSpec s;
  CHECK(s.alpha_at(0) == 0.005);
  CHECK(s.alpha_at(199) == 1.0);
  CHECK(s.beta_at(99) == doctest::Approx(0.5));
  s.n_alpha = 1;
  CHECK_THROWS_AS(validate(s), Error);
  s = {};
  s.alpha_min = 0.0;
  CHECK_THROWS_AS(sweep_classify(s), Error);
  s = {};
  s.beta_max = s.beta_min;
  CHECK_THROWS_AS(validate(s), Error);
}

TEST_CASE("small-gamma configuration has no oscillatory cells") {
  const auto m = sweep_classify(window_config(1.4, 1));
  CHECK(m.labels.size() == 40000u);
  CHECK(count(m, Region::HopfInstability) == 0);
  CHECK(count(m, Region::TranscriticalCurve) == 0);
  CHECK(count(m, Region::StableNode) > 0);
  // (beta - alpha)/s < 1 < eta^2 keeps D > 0, so no real positive root either.
  CHECK(count(m, Region::TuringInstability) == 0);
}

TEST_CASE("large-gamma configuration has every region type") {
  const auto m = sweep_classify(window_config(8, 21));
  CHECK(count(m, Region::HopfInstability) > 0);
  CHECK(count(m, Region::StableSpiral) > 0);
  CHECK(count(m, Region::TuringInstability) > 0);
  CHECK(count(m, Region::StableNode) > 0);
  const auto tc = transcritical_curve(m.spec, alpha_samples(m.spec, 100));
  CHECK(!tc.empty());
}

TEST_CASE("kinetically stable cells are never turing without diffusion") {
  auto spec = window_config(8, 21);
  const auto m = sweep_classify(spec);
  int stable = 0;
  for (int j = 0; j < spec.n_beta; ++j)
    for (int i = 0; i < spec.n_alpha; ++i) {
      const auto v = classify_point(spec.params(spec.alpha_at(i), spec.beta_at(j)), 0.0);
      if (!(v.trace < 0.0 && v.det > 0.0)) continue;
      ++stable;
      CHECK(v.label != Region::TuringInstability);
    }
  CHECK(stable > 0);
  CHECK(m.labels.size() == 40000u);
}

TEST_CASE("stable node count grows with d") {
  std::size_t prev = 0;
  for (double d : {8.0, 11.0, 14.0, 17.0, 20.0}) {
    const auto n = count(sweep_classify(window_config(d, 21)), Region::StableNode);
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("labels match the eigenvalue oracle on a 100x100 grid") {
  for (auto cfg : {std::pair{8.0, 21.0}, std::pair{1.4, 1.0}, std::pair{5.0, 730.0}}) {
    auto s = window_config(cfg.first, cfg.second);
    s.n_alpha = s.n_beta = 100;
    s.alpha_min = s.beta_min = 0.01;
    const auto m = sweep_classify(s);
    int mismatches = 0;
    for (int j = 0; j < 100; ++j)
      for (int i = 0; i < 100; ++i)
        mismatches += oracle_label(s.params(s.alpha_at(i), s.beta_at(j)), m.eta_sq) != m.at(i, j);
    CHECK(mismatches == 0);
  }
}

TEST_CASE("polynomials match trace and determinant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 1.0), g(0.5, 50.0), dd(0.5, 20.0), e(0.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double alpha = u(rng), beta = u(rng), gamma = g(rng), d = dd(rng), eta_sq = e(rng);
    const auto p = make_params(alpha, beta, gamma, d);
    const double s = alpha + beta;
    for (auto form : {DeterminantForm::Consistent, DeterminantForm::Literal}) {
      const auto td = trace_det(p, eta_sq, form);
      const double expect = s * s * (td.trace * td.trace - 4.0 * td.det);
      const auto P = discriminant_polynomial(alpha, gamma, d, eta_sq, form);
      CHECK(P.degree() == 6);
      CHECK(std::abs(P(beta) - expect) <= 1e-11 * P.magnitude(beta));
    }
    const auto C = transcritical_polynomial(alpha, gamma, d, eta_sq);
    const double t = s * trace_det(p, eta_sq, DeterminantForm::Consistent).trace;
    CHECK(std::abs(C(beta) - t) <= 1e-12 * C.magnitude(beta));
  }
}

TEST_CASE("discriminant polynomial agrees with symbolic assembly") {
  // Build s^2 (T^2 - 4D) from linear factors in beta with polynomial arithmetic.
  const double alpha = 0.13, gamma = 21, d = 8, e = 1.7;
  for (auto form : {DeterminantForm::Consistent, DeterminantForm::Literal}) {
    const double m = form == DeterminantForm::Consistent ? d : d + 1.0;
    const Polynomial s({alpha, 1.0});
    const Polynomial ts = gamma * (Polynomial({-alpha, 1.0}) - s * s * s) - ((d + 1.0) * e) * s;
    const Polynomial ds =
        (gamma * Polynomial({-alpha, 1.0}) - e * s) * (-gamma * s * s - Polynomial({m * e})) +
        (2.0 * gamma * gamma) * Polynomial({0.0, 1.0}) * s * s;
    const Polynomial expect = ts * ts - 4.0 * s * ds;
    const auto got = discriminant_polynomial(alpha, gamma, d, e, form).coefficients();
    REQUIRE(expect.coefficients().size() == got.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(expect.coefficients()[i]).epsilon(1e-12));
  }
}

TEST_CASE("bisection roots") {
  const auto r = bisection_roots([](double x) { return (x - 0.25) * (x - 0.7); }, 0.0, 1.0, 97);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(bisection_roots([](double x) { return x * x + 1; }, -1, 1, 10).empty());
}

TEST_CASE("curves satisfy their defining equations and both routes agree") {
  for (auto cfg : {std::pair{8.0, 21.0}, std::pair{1.4, 1.0}}) {
    const auto spec = window_config(cfg.first, cfg.second);
    const auto set = trace_curves(spec, alpha_samples(spec, 100));
    CHECK(set.max_method_gap() <= 1e-8);
    for (const auto& p : set.discriminant) {
      CHECK(p.residual < 1e-8);
      CHECK(p.beta >= spec.beta_min);
      CHECK(p.beta <= spec.beta_max);
    }
    for (const auto& p : set.transcritical) {
      CHECK(p.residual < 1e-8);
      CHECK(trace_det(spec.params(p.alpha, p.beta), set.eta_sq, spec.form).det > 0.0);
    }
    std::map<double, int> per_alpha;
    for (const auto& p : set.discriminant) ++per_alpha[p.alpha];
    for (const auto& [a, n] : per_alpha) CHECK(n <= 6);
    CHECK(!set.discriminant.empty());
  }
  CHECK(transcritical_curve(window_config(1.4, 1), alpha_samples(window_config(1.4, 1), 100)).empty());
}

TEST_CASE("discriminant curve flips root character") {
  const auto spec = window_config(8, 21);
  const double e = eigenvalue(spec.mode, make_annulus(spec.a, spec.b)).eta_sq;
  for (const auto& p : discriminant_curve(spec, alpha_samples(spec, 40))) {
    if (p.tangent || p.beta < 2e-3 || p.beta > 1.0 - 2e-3) continue;
    const auto lo = classify_point(spec.params(p.alpha, p.beta - 1e-3), e);
    const auto hi = classify_point(spec.params(p.alpha, p.beta + 1e-3), e);
    CHECK((lo.discriminant < 0.0) != (hi.discriminant < 0.0));
  }
}

TEST_CASE("transcritical curve through the constructed point") {
  // With eta^2 = 0, s^3 - s + 2 alpha = 0 factors as (s - 0.5)(s^2 + 0.5 s - 0.75).
  const auto P = transcritical_polynomial(0.1875, 10, 3.7, 0.0);
  const auto poly = real_roots(P, 0.005, 1.0);
  const auto bis = bisection_roots([&](double b) { return P(b); }, 0.005, 1.0, 20000);
  REQUIRE(poly.size() == 2);
  REQUIRE(bis.size() == 2);
  CHECK(poly[0] == doctest::Approx(0.3125).epsilon(1e-14));
  CHECK(bis[0] == doctest::Approx(0.3125).epsilon(1e-14));
  CHECK(poly[1] == doctest::Approx((std::sqrt(3.25) - 0.5) / 2 - 0.1875).epsilon(1e-14));
  CHECK(trace_det(make_params(0.1875, 0.3125, 10, 3.7), 0.0, DeterminantForm::Consistent).det > 0.0);
}

TEST_CASE("region map export round trip") {
  auto spec = window_config(8, 21);
  spec.n_alpha = 37;
  spec.n_beta = 23;
  const auto m = sweep_classify(spec);
  const auto back = parse_region_map_csv(region_map_csv(m));
  CHECK(back.alphas.size() == 37u);
  CHECK(back.betas.size() == 23u);
  CHECK(back.labels == m.labels);
  const auto img = region_raster(m);
  CHECK(img.width == 37);
  CHECK(img.height == 23);
  const auto top_left = region_color(m.at(0, 22));
  CHECK(img.rgb[0] == top_left[0]);
  CHECK(region_legend().rfind("index,label,r,g,b\n0,StableNode,", 0) == 0);
  CHECK_THROWS_AS(parse_region_map_csv("a,b\n"), Error);
  CHECK_THROWS_AS(parse_region_map_csv("alpha,beta,label\n0.1,0.2,Blue\n"), Error);

  const auto dir = std::filesystem::temp_directory_path() / "ard_partition_test";
  std::filesystem::remove_all(dir);
  const auto files = export_region_map(m, dir, "map");
  for (const auto& f : files) CHECK(std::filesystem::exists(dir / f));
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty curve set exports a header") {
  CurveSet c;
  CHECK(curves_csv(c) == "kind,alpha,beta,residual,method_gap,tangent\n");
}
